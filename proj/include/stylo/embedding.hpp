#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylo/preprocess.hpp"

namespace stylo {

inline constexpr int kDefaultDim = 768;

using EmbeddingVector = std::vector<float>;

// Sentence units carry their index within the document; document units do
// not. Serialized as "doc_id#index" and "doc_id" respectively.
struct UnitId {
    std::string doc_id;
    std::optional<std::size_t> index;

    std::string str() const;
    static UnitId parse(std::string_view s);

    friend bool operator==(const UnitId&, const UnitId&) = default;
};

// Row-major float matrix with one unit id per row.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    explicit EmbeddingMatrix(int dim);
    EmbeddingMatrix(int dim, std::vector<float> values, std::vector<UnitId> ids);

    int dim() const { return dim_; }
    std::size_t rows() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    std::span<const float> row(std::size_t i) const {
        return {values_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    const std::vector<float>& values() const { return values_; }
    const std::vector<UnitId>& unit_ids() const { return ids_; }

    void append(std::span<const float> row, UnitId id);

    friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

private:
    int dim_ = kDefaultDim;
    std::vector<float> values_;
    std::vector<UnitId> ids_;
};

enum class ProviderKind { Hash, File, Sidecar };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Hash;
    int dim = kDefaultDim;
    int ngram = 3;                      // hash
    std::filesystem::path path;         // file: EMB1 file to look vectors up in
    std::vector<std::string> command;   // sidecar: argv of the child process
};

// Character n-gram feature hashing. Grams are windows of `ngram` code points
// (the whole text when shorter); each gram's FNV-1a 64 hash h adds +1 (h even)
// or -1 (h odd) to component (h >> 1) mod dim. The result is L2-normalized.
EmbeddingVector hash_embed(std::string_view text, int dim, int ngram);

std::uint64_t fnv1a64(std::string_view bytes);

// Rows follow the input order.
EmbeddingMatrix embed_sentences(const ProviderConfig& provider, const std::vector<Sentence>& sentences);

struct DocumentUnits {
    std::string doc_id;
    std::vector<Sentence> sentences;
};

// Built-in providers pool a document as the L2-normalized mean of its sentence
// vectors. A sidecar receives the whole document text in one request.
EmbeddingMatrix embed_documents(const ProviderConfig& provider, const std::vector<DocumentUnits>& docs);

// L2-normalized arithmetic mean; zero stays zero.
EmbeddingVector mean_pool(const std::vector<EmbeddingVector>& vectors, int dim);

// EMB1 binary layout (little-endian):
//   "EMB1" | u32 count | u32 dim | count*dim f32 row-major | count * (u16 len, utf-8 id)
void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

std::string encode_emb1(const EmbeddingMatrix& matrix);
EmbeddingMatrix decode_emb1(std::string_view bytes);

// Child process speaking newline-delimited JSON over its stdin/stdout.
// Requests {"id","text"}, responses {"id","vector"}; lines starting with '#'
// are logs. Calls are serialized.
class SidecarClient {
public:
    explicit SidecarClient(const std::vector<std::string>& command);
    ~SidecarClient();
    SidecarClient(const SidecarClient&) = delete;
    SidecarClient& operator=(const SidecarClient&) = delete;

    // Returns the raw vector for `text`; throws Provider on protocol failure.
    std::vector<double> request(const std::string& id, const std::string& text);

    const std::vector<std::string>& log_lines() const { return logs_; }

private:
    std::optional<std::string> read_line();

    int fd_ = -1;
    int pid_ = -1;
    std::string buffer_;
    std::mutex mutex_;
    std::vector<std::string> logs_;
};

}  // namespace stylo

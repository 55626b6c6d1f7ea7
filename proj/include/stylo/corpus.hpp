#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stylo {

struct AuthorId {
    int index = 0;
    std::string name;

    friend bool operator==(const AuthorId&, const AuthorId&) = default;
};

struct Document {
    std::string doc_id;
    AuthorId author;
    std::string title;
    std::string raw_text;  // valid UTF-8

    friend bool operator==(const Document&, const Document&) = default;
};

enum class Granularity { Sentence, Document };

std::string_view to_string(Granularity g);
Granularity granularity_from_string(std::string_view s);

struct LabelVector {
    std::vector<int> labels;
    Granularity granularity = Granularity::Sentence;

    std::size_t size() const { return labels.size(); }
    friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

// Immutable after construction. Author indices are contiguous and assigned in
// order of first appearance.
class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<Document> documents, std::vector<AuthorId> authors,
           std::size_t replaced_bytes = 0);

    const std::vector<Document>& documents() const { return documents_; }
    const std::vector<AuthorId>& authors() const { return authors_; }

    // Number of ill-formed UTF-8 sequences replaced with U+FFFD during load.
    std::size_t replaced_sequences() const { return replaced_; }

    const Document* find(std::string_view doc_id) const;
    std::optional<int> author_index(std::string_view name) const;
    std::vector<std::string> author_names() const;

    friend bool operator==(const Corpus& a, const Corpus& b) {
        return a.documents_ == b.documents_ && a.authors_ == b.authors_ &&
               a.replaced_ == b.replaced_;
    }

private:
    std::vector<Document> documents_;
    std::vector<AuthorId> authors_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::size_t replaced_ = 0;
};

// Reads a JSON manifest: an array of {"doc_id","author_name","title","text_path"}.
// Relative text paths resolve against the manifest's directory.
Corpus load_corpus(const std::filesystem::path& manifest_path);

struct ManifestEntry {
    std::string doc_id;
    std::string author_name;
    std::string title;
    std::string text_path;
};

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

// Each (doc_id, count) contributes `count` copies of that document's author index.
LabelVector label_vector(const Corpus& corpus,
                         const std::vector<std::pair<std::string, std::size_t>>& units,
                         Granularity granularity = Granularity::Sentence);

}  // namespace stylo

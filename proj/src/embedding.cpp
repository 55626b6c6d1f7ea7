#include "stylo/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "stylo/error.hpp"
#include "stylo/utf8.hpp"

namespace stylo {

namespace fs = std::filesystem;

std::string UnitId::str() const {
    return index ? doc_id + "#" + std::to_string(*index) : doc_id;
}

UnitId UnitId::parse(std::string_view s) {
    const auto hash = s.rfind('#');
    if (hash != std::string_view::npos && hash + 1 < s.size()) {
        const auto suffix = s.substr(hash + 1);
        bool digits = suffix.size() <= 19;
        for (char c : suffix) digits = digits && c >= '0' && c <= '9';
        if (digits) return {std::string(s.substr(0, hash)), std::stoull(std::string(suffix))};
    }
    return {std::string(s), std::nullopt};
}

EmbeddingMatrix::EmbeddingMatrix(int dim) : dim_(dim) {
    if (dim <= 0) fail(ErrorKind::Validation, "embedding dim must be positive");
}

EmbeddingMatrix::EmbeddingMatrix(int dim, std::vector<float> values, std::vector<UnitId> ids)
    : dim_(dim), values_(std::move(values)), ids_(std::move(ids)) {
    if (dim <= 0) fail(ErrorKind::Validation, "embedding dim must be positive");
    if (values_.size() != ids_.size() * static_cast<std::size_t>(dim))
        fail(ErrorKind::Validation, "embedding values do not match rows x dim");
}

void EmbeddingMatrix::append(std::span<const float> row, UnitId id) {
    if (row.size() != static_cast<std::size_t>(dim_))
        fail(ErrorKind::Format, "row of dim " + std::to_string(row.size()) +
                                    " appended to matrix of dim " + std::to_string(dim_));
    values_.insert(values_.end(), row.begin(), row.end());
    ids_.push_back(std::move(id));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

EmbeddingVector normalized(const std::vector<double>& acc) {
    double norm2 = 0.0;
    for (double x : acc) norm2 += x * x;
    EmbeddingVector out(acc.size(), 0.0f);
    if (norm2 == 0.0) return out;
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] * inv);
    return out;
}

}  // namespace

EmbeddingVector hash_embed(std::string_view text, int dim, int ngram) {
    if (dim < 2) fail(ErrorKind::Validation, "hash dim must be >= 2");
    if (ngram < 1) fail(ErrorKind::Validation, "hash ngram must be >= 1");
    const auto cps = utf8::decode(text).text;
    std::vector<double> acc(static_cast<std::size_t>(dim), 0.0);
    if (cps.empty()) return normalized(acc);

    const auto n = static_cast<std::size_t>(ngram);
    const std::u32string_view view(cps);
    auto add_gram = [&](std::u32string_view gram) {
        const std::uint64_t h = fnv1a64(utf8::encode(gram));
        const auto slot = static_cast<std::size_t>((h >> 1) % static_cast<std::uint64_t>(dim));
        acc[slot] += (h & 1) == 0 ? 1.0 : -1.0;
    };
    if (view.size() < n) {
        add_gram(view);
    } else {
        for (std::size_t i = 0; i + n <= view.size(); ++i) add_gram(view.substr(i, n));
    }
    return normalized(acc);
}

EmbeddingVector mean_pool(const std::vector<EmbeddingVector>& vectors, int dim) {
    std::vector<double> acc(static_cast<std::size_t>(dim), 0.0);
    for (const auto& v : vectors) {
        if (v.size() != acc.size()) fail(ErrorKind::Format, "pooled vectors differ in dim");
        for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
    }
    if (!vectors.empty())
        for (double& x : acc) x /= static_cast<double>(vectors.size());
    return normalized(acc);
}

namespace {

// Abstract source of vectors keyed by unit id and text.
class Provider {
public:
    virtual ~Provider() = default;
    virtual EmbeddingVector sentence(const UnitId& id, const std::string& text) = 0;
    virtual std::optional<EmbeddingVector> document(const std::string&, const std::string&) {
        return std::nullopt;
    }
};

class HashProvider final : public Provider {
public:
    HashProvider(int dim, int ngram) : dim_(dim), ngram_(ngram) {}
    EmbeddingVector sentence(const UnitId&, const std::string& text) override {
        return hash_embed(text, dim_, ngram_);
    }

private:
    int dim_;
    int ngram_;
};

class FileProvider final : public Provider {
public:
    FileProvider(const fs::path& path, int dim) : matrix_(load_embeddings(path)) {
        if (matrix_.dim() != dim)
            fail(ErrorKind::Format, "embedding file '" + path.string() + "' has dim " +
                                        std::to_string(matrix_.dim()) + ", expected " +
                                        std::to_string(dim));
        for (std::size_t i = 0; i < matrix_.rows(); ++i) rows_.emplace(matrix_.unit_ids()[i].str(), i);
    }
    EmbeddingVector sentence(const UnitId& id, const std::string&) override {
        auto it = rows_.find(id.str());
        if (it == rows_.end()) fail(ErrorKind::Provider, "no vector for unit '" + id.str() + "'");
        auto r = matrix_.row(it->second);
        return {r.begin(), r.end()};
    }
    std::optional<EmbeddingVector> document(const std::string& doc_id, const std::string&) override {
        auto it = rows_.find(doc_id);
        if (it == rows_.end()) return std::nullopt;
        auto r = matrix_.row(it->second);
        return EmbeddingVector(r.begin(), r.end());
    }

private:
    EmbeddingMatrix matrix_;
    std::unordered_map<std::string, std::size_t> rows_;
};

class SidecarProvider final : public Provider {
public:
    SidecarProvider(const std::vector<std::string>& command, int dim) : client_(command), dim_(dim) {}
    EmbeddingVector sentence(const UnitId& id, const std::string& text) override {
        return convert(client_.request(id.str(), text));
    }
    std::optional<EmbeddingVector> document(const std::string& doc_id, const std::string& text) override {
        return convert(client_.request(doc_id, text));
    }

private:
    EmbeddingVector convert(const std::vector<double>& v) const {
        if (v.size() != static_cast<std::size_t>(dim_))
            fail(ErrorKind::Format, "sidecar returned dim " + std::to_string(v.size()) +
                                        ", expected " + std::to_string(dim_));
        EmbeddingVector out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i])) fail(ErrorKind::Format, "sidecar returned a non-finite component");
            out[i] = static_cast<float>(v[i]);
        }
        return out;
    }

    SidecarClient client_;
    int dim_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
    if (config.dim <= 0) fail(ErrorKind::Validation, "provider dim must be positive");
    switch (config.kind) {
        case ProviderKind::Hash: return std::make_unique<HashProvider>(config.dim, config.ngram);
        case ProviderKind::File: return std::make_unique<FileProvider>(config.path, config.dim);
        case ProviderKind::Sidecar:
            if (config.command.empty()) fail(ErrorKind::Validation, "sidecar command is empty");
            return std::make_unique<SidecarProvider>(config.command, config.dim);
    }
    fail(ErrorKind::Validation, "unknown provider kind");
}

// Re-throws provider failures with the index of the unit being embedded.
template <class Fn>
auto at_unit(std::size_t index, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Provider) throw;
        throw Error(e.kind(), e.detail() + " (unit " + std::to_string(index) + ")");
    }
}

}  // namespace

EmbeddingMatrix embed_sentences(const ProviderConfig& config, const std::vector<Sentence>& sentences) {
    auto provider = make_provider(config);
    EmbeddingMatrix out(config.dim);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto& s = sentences[i];
        UnitId id{s.doc_id, s.index};
        auto v = at_unit(i, [&] { return provider->sentence(id, s.text); });
        out.append(v, std::move(id));
    }
    return out;
}

EmbeddingMatrix embed_documents(const ProviderConfig& config, const std::vector<DocumentUnits>& docs) {
    auto provider = make_provider(config);
    EmbeddingMatrix out(config.dim);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const auto& doc = docs[d];
        if (doc.sentences.empty())
            fail(ErrorKind::Validation, "document '" + doc.doc_id + "' has no sentences");
        std::string joined;
        for (const auto& s : doc.sentences) {
            if (!joined.empty()) joined.push_back(' ');
            joined += s.text;
        }
        auto direct = at_unit(d, [&] { return provider->document(doc.doc_id, joined); });
        if (direct) {
            out.append(*direct, UnitId{doc.doc_id, std::nullopt});
            continue;
        }
        std::vector<EmbeddingVector> vectors;
        vectors.reserve(doc.sentences.size());
        for (const auto& s : doc.sentences) {
            UnitId id{s.doc_id, s.index};
            vectors.push_back(at_unit(d, [&] { return provider->sentence(id, s.text); }));
        }
        out.append(mean_pool(vectors, config.dim), UnitId{doc.doc_id, std::nullopt});
    }
    return out;
}

// ---- EMB1 ----

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4, "header");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint16_t u16() {
        need(2, "unit id length");
        const auto v = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes_[pos_]) |
                                                  (static_cast<unsigned char>(bytes_[pos_ + 1]) << 8));
        pos_ += 2;
        return v;
    }
    std::string_view take(std::size_t n, const char* what) {
        need(n, what);
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) fail(ErrorKind::Format, std::string("truncated EMB1 file (") + what + ")");
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_emb1(const EmbeddingMatrix& m) {
    std::string out;
    out.reserve(12 + m.values().size() * 4);
    out.append(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.dim()));
    for (float f : m.values()) put_u32(out, std::bit_cast<std::uint32_t>(f));
    for (const auto& id : m.unit_ids()) {
        const auto s = id.str();
        if (s.size() > 0xFFFF) fail(ErrorKind::Format, "unit id longer than 65535 bytes");
        put_u16(out, static_cast<std::uint16_t>(s.size()));
        out += s;
    }
    return out;
}

EmbeddingMatrix decode_emb1(std::string_view bytes) {
    Reader r(bytes);
    if (r.take(4, "magic") != std::string_view(kMagic, 4)) fail(ErrorKind::Format, "bad EMB1 magic");
    const std::uint32_t count = r.u32();
    const std::uint32_t dim = r.u32();
    if (dim == 0) fail(ErrorKind::Format, "EMB1 dim is zero");
    const std::uint64_t n_values = static_cast<std::uint64_t>(count) * dim;
    if (n_values * 4 > r.remaining())
        fail(ErrorKind::Format, "EMB1 payload shorter than count x dim (" + std::to_string(count) +
                                    " x " + std::to_string(dim) + ")");
    std::vector<float> values(static_cast<std::size_t>(n_values));
    for (auto& v : values) {
        v = std::bit_cast<float>(r.u32());
        if (!std::isfinite(v)) fail(ErrorKind::Format, "EMB1 contains a non-finite value");
    }
    std::vector<UnitId> ids;
    ids.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = r.u16();
        ids.push_back(UnitId::parse(utf8::sanitize(r.take(len, "unit id"))));
    }
    if (r.remaining() != 0) fail(ErrorKind::Format, "trailing bytes after EMB1 payload");
    return EmbeddingMatrix(static_cast<int>(dim), std::move(values), std::move(ids));
}

void write_embeddings(const EmbeddingMatrix& matrix, const fs::path& path) {
    const auto bytes = encode_emb1(matrix);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

EmbeddingMatrix load_embeddings(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Load, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return decode_emb1(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

}  // namespace stylo

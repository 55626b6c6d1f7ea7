#include "stylo/corpus.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "stylo/error.hpp"
#include "stylo/utf8.hpp"

namespace stylo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Granularity g) {
    return g == Granularity::Sentence ? "sentence" : "document";
}

Granularity granularity_from_string(std::string_view s) {
    if (s == "sentence") return Granularity::Sentence;
    if (s == "document") return Granularity::Document;
    fail(ErrorKind::Validation, "unknown granularity '" + std::string(s) + "'");
}

Corpus::Corpus(std::vector<Document> documents, std::vector<AuthorId> authors,
               std::size_t replaced_bytes)
    : documents_(std::move(documents)), authors_(std::move(authors)), replaced_(replaced_bytes) {
    std::unordered_set<std::string> names;
    for (std::size_t i = 0; i < authors_.size(); ++i) {
        if (authors_[i].index != static_cast<int>(i))
            fail(ErrorKind::Validation, "author indices must be contiguous from 0");
        if (!names.insert(authors_[i].name).second)
            fail(ErrorKind::Validation, "duplicate author name '" + authors_[i].name + "'");
    }
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& doc = documents_[i];
        if (!by_id_.emplace(doc.doc_id, i).second)
            fail(ErrorKind::Validation, "duplicate doc_id '" + doc.doc_id + "'");
        const int a = doc.author.index;
        if (a < 0 || a >= static_cast<int>(authors_.size()) || authors_[a] != doc.author)
            fail(ErrorKind::Validation, "document '" + doc.doc_id + "' has an unknown author");
        if (doc.raw_text.find_first_not_of(" \t\r\n\f\v") == std::string::npos)
            fail(ErrorKind::Validation, "document '" + doc.doc_id + "' has empty text");
    }
}

const Document* Corpus::find(std::string_view doc_id) const {
    auto it = by_id_.find(std::string(doc_id));
    return it == by_id_.end() ? nullptr : &documents_[it->second];
}

std::optional<int> Corpus::author_index(std::string_view name) const {
    for (const auto& a : authors_)
        if (a.name == name) return a.index;
    return std::nullopt;
}

std::vector<std::string> Corpus::author_names() const {
    std::vector<std::string> names;
    names.reserve(authors_.size());
    for (const auto& a : authors_) names.push_back(a.name);
    return names;
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Load, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(ErrorKind::Load, "cannot read '" + path.string() + "'");
    return std::move(ss).str();
}

std::string required_string(const json& entry, const char* key, std::size_t position) {
    auto it = entry.find(key);
    if (it == entry.end() || !it->is_string())
        fail(ErrorKind::Validation,
             "manifest entry " + std::to_string(position) + " lacks string field '" + key + "'");
    return it->get<std::string>();
}

}  // namespace

Corpus load_corpus(const fs::path& manifest_path) {
    const std::string bytes = read_file(manifest_path);
    json manifest;
    try {
        manifest = json::parse(bytes);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Format, "manifest '" + manifest_path.string() + "': " + e.what());
    }
    if (!manifest.is_array())
        fail(ErrorKind::Validation, "manifest must be a JSON array of entries");
    if (manifest.empty()) fail(ErrorKind::Validation, "manifest is empty");

    const fs::path base = manifest_path.parent_path();
    std::vector<Document> docs;
    std::vector<AuthorId> authors;
    std::unordered_set<std::string> seen_ids;
    std::size_t replaced_total = 0;

    for (std::size_t i = 0; i < manifest.size(); ++i) {
        const json& entry = manifest[i];
        if (!entry.is_object())
            fail(ErrorKind::Validation, "manifest entry " + std::to_string(i) + " is not an object");
        for (auto it = entry.begin(); it != entry.end(); ++it) {
            const auto& k = it.key();
            if (k != "doc_id" && k != "author_name" && k != "title" && k != "text_path")
                fail(ErrorKind::Validation,
                     "manifest entry " + std::to_string(i) + " has unexpected key '" + k + "'");
        }
        Document doc;
        doc.doc_id = required_string(entry, "doc_id", i);
        const std::string author_name = required_string(entry, "author_name", i);
        doc.title = required_string(entry, "title", i);
        fs::path text_path = required_string(entry, "text_path", i);

        if (!seen_ids.insert(doc.doc_id).second)
            fail(ErrorKind::Validation, "duplicate doc_id '" + doc.doc_id + "'");

        if (text_path.is_relative()) text_path = base / text_path;
        std::size_t replaced = 0;
        doc.raw_text = utf8::sanitize(read_file(text_path), &replaced);
        replaced_total += replaced;

        int index = -1;
        for (const auto& a : authors)
            if (a.name == author_name) index = a.index;
        if (index < 0) {
            index = static_cast<int>(authors.size());
            authors.push_back({index, author_name});
        }
        doc.author = authors[index];
        docs.push_back(std::move(doc));
    }
    return Corpus(std::move(docs), std::move(authors), replaced_total);
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
    json out = json::array();
    for (const auto& e : entries) {
        out.push_back({{"doc_id", e.doc_id},
                       {"author_name", e.author_name},
                       {"title", e.title},
                       {"text_path", e.text_path}});
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    f << out.dump(2) << '\n';
}

LabelVector label_vector(const Corpus& corpus,
                         const std::vector<std::pair<std::string, std::size_t>>& units,
                         Granularity granularity) {
    LabelVector out;
    out.granularity = granularity;
    for (const auto& [doc_id, count] : units) {
        const Document* doc = corpus.find(doc_id);
        if (!doc) fail(ErrorKind::Validation, "unknown doc_id '" + doc_id + "'");
        out.labels.insert(out.labels.end(), count, doc->author.index);
    }
    return out;
}

}  // namespace stylo

#include "stylo/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "stylo/error.hpp"
#include "stylo/preprocess.hpp"

namespace stylo {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

// Runs `fn`, tagging any untagged toolkit error with `name`.
template <class Fn>
decltype(auto) stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage(name);
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? base / path : path;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
}

ProviderConfig parse_provider(const json& j, const fs::path& base) {
    if (!j.is_object()) fail(ErrorKind::Validation, "provider must be an object");
    ProviderConfig p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& key = it.key();
        const auto& v = it.value();
        if (key == "kind") {
            const auto kind = v.get<std::string>();
            if (kind == "hash") p.kind = ProviderKind::Hash;
            else if (kind == "file") p.kind = ProviderKind::File;
            else if (kind == "sidecar") p.kind = ProviderKind::Sidecar;
            else fail(ErrorKind::Validation, "unknown provider kind '" + kind + "'");
        } else if (key == "dim") {
            p.dim = v.get<int>();
        } else if (key == "ngram") {
            p.ngram = v.get<int>();
        } else if (key == "path") {
            p.path = resolve(base, v.get<std::string>());
        } else if (key == "command") {
            p.command = v.get<std::vector<std::string>>();
        } else {
            fail(ErrorKind::Validation, "unknown provider key '" + key + "'");
        }
    }
    if (p.dim <= 0) fail(ErrorKind::Validation, "provider dim must be positive");
    if (p.kind == ProviderKind::Hash && (p.dim < 2 || p.ngram < 1))
        fail(ErrorKind::Validation, "hash provider needs dim >= 2 and ngram >= 1");
    if (p.kind == ProviderKind::File && p.path.empty())
        fail(ErrorKind::Validation, "file provider needs a path");
    if (p.kind == ProviderKind::Sidecar && p.command.empty())
        fail(ErrorKind::Validation, "sidecar provider needs a command");
    return p;
}

std::vector<std::string> author_names(const Corpus& corpus) { return corpus.author_names(); }

int resolve_k(const RunConfig& config, const Corpus& corpus) {
    const int authors = static_cast<int>(corpus.authors().size());
    if (authors < 2)
        fail(ErrorKind::Validation, "clustering needs at least 2 authors, corpus has " + std::to_string(authors));
    const int k = config.k.value_or(authors);
    if (k != authors)
        fail(ErrorKind::Validation, "k = " + std::to_string(k) + " but the corpus has " + std::to_string(authors) +
                                        " authors; accuracy is defined for one cluster per author");
    return k;
}

std::string labels_json(const PreparedCorpus& prepared, const EmbeddingMatrix& matrix) {
    ordered j;
    j["granularity"] = std::string(to_string(prepared.labels.granularity));
    j["labels"] = prepared.labels.labels;
    std::vector<std::string> ids;
    for (const auto& id : matrix.unit_ids()) ids.push_back(id.str());
    j["unit_ids"] = ids;
    return j.dump(2) + "\n";
}

// Author-ordered k-means centroids: author a gets the centroid of the cluster
// mapped to it.
std::vector<std::vector<double>> mapped_centroids(const KMeansFit& fit, const AccuracyReport& report) {
    std::vector<std::vector<double>> out(fit.centroids.size());
    for (std::size_t c = 0; c < fit.centroids.size(); ++c)
        out[static_cast<std::size_t>(report.mapping[c])] = fit.centroids[c];
    return out;
}

std::vector<Candidate> rank_against(const SimilarityMatrix& m, std::size_t query) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < m.size(); ++j)
        if (j != query) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m(query, a) > m(query, b); });
    std::vector<Candidate> out;
    for (std::size_t j : order) out.push_back({m.labels()[j], m(query, j)});
    return out;
}

}  // namespace

RunConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Validation, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::Validation, "config must be a JSON object");
    RunConfig c;
    c.out = resolve(base_dir, c.out.string());
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& key = it.key();
            const auto& v = it.value();
            if (key == "manifest") {
                c.manifest = resolve(base_dir, v.get<std::string>());
            } else if (key == "provider") {
                c.provider = parse_provider(v, base_dir);
            } else if (key == "granularity") {
                c.granularity = granularity_from_string(v.get<std::string>());
            } else if (key == "k") {
                if (v.is_string()) {
                    if (v.get<std::string>() != "auto") fail(ErrorKind::Validation, "k must be an integer or \"auto\"");
                    c.k.reset();
                } else {
                    c.k = v.get<int>();
                    if (*c.k < 1) fail(ErrorKind::Validation, "k must be at least 1");
                }
            } else if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (key == "threshold") {
                c.threshold = v.get<double>();
            } else if (key == "lexicon") {
                if (!v.is_null()) c.lexicon = resolve(base_dir, v.get<std::string>());
            } else if (key == "out") {
                c.out = resolve(base_dir, v.get<std::string>());
            } else if (key == "max_iter") {
                c.kmeans.max_iter = v.get<int>();
            } else if (key == "tol") {
                c.kmeans.tol = v.get<double>();
            } else {
                fail(ErrorKind::Validation, "unknown config key '" + key + "'");
            }
        }
    } catch (const json::type_error& e) {
        fail(ErrorKind::Validation, std::string("config has a wrongly typed value: ") + e.what());
    }
    if (c.manifest.empty()) fail(ErrorKind::Validation, "config lacks 'manifest'");
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) fail(ErrorKind::Validation, "threshold must lie in [0, 1]");
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Load, "cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

PreparedCorpus prepare_corpus(const RunConfig& config) {
    PreparedCorpus prepared;
    prepared.corpus = stage("load", [&] { return load_corpus(config.manifest); });
    stage("preprocess", [&] {
        std::optional<Lexicon> lexicon;
        if (config.lexicon) lexicon = load_lexicon(*config.lexicon);
        const Lexicon* lex = lexicon ? &*lexicon : nullptr;
        const CleanMode mode =
            config.granularity == Granularity::Sentence ? CleanMode::Sentence : CleanMode::Document;
        std::vector<std::pair<std::string, std::size_t>> counts;
        for (const auto& doc : prepared.corpus.documents()) {
            auto sentences = prepare_sentences(doc.doc_id, doc.raw_text, mode, lex);
            if (config.granularity == Granularity::Document && sentences.empty())
                fail(ErrorKind::Validation, "document '" + doc.doc_id + "' is empty after cleaning");
            counts.emplace_back(doc.doc_id, config.granularity == Granularity::Sentence ? sentences.size() : 1);
            prepared.documents.push_back({doc.doc_id, std::move(sentences)});
        }
        prepared.labels = label_vector(prepared.corpus, counts, config.granularity);
    });
    return prepared;
}

EmbeddingMatrix embed_corpus(const RunConfig& config, const PreparedCorpus& prepared) {
    return stage("embed", [&] {
        if (config.granularity == Granularity::Document) return embed_documents(config.provider, prepared.documents);
        std::vector<Sentence> sentences;
        for (const auto& doc : prepared.documents)
            sentences.insert(sentences.end(), doc.sentences.begin(), doc.sentences.end());
        return embed_sentences(config.provider, sentences);
    });
}

namespace {

ClusterResult fit_corpus(const RunConfig& config) {
    ClusterResult result;
    result.prepared = prepare_corpus(config);
    const int k = stage("cluster", [&] {
        const int k = resolve_k(config, result.prepared.corpus);
        std::vector<std::size_t> per_author(static_cast<std::size_t>(k), 0);
        for (int a : result.prepared.labels.labels) ++per_author[static_cast<std::size_t>(a)];
        for (std::size_t a = 0; a < per_author.size(); ++a)
            if (per_author[a] == 0)
                fail(ErrorKind::Validation, "author '" + result.prepared.corpus.authors()[a].name +
                                                "' has no text units after preprocessing");
        return k;
    });
    result.embeddings = embed_corpus(config, result.prepared);
    result.fit = stage("cluster", [&] { return kmeans(result.embeddings, k, config.seed, config.kmeans); });
    result.report = stage("evaluate", [&] {
        return accuracy(result.fit.assignments, result.prepared.labels.labels, k);
    });
    return result;
}

}  // namespace

ClusterResult run_clustering(const RunConfig& config) {
    auto result = fit_corpus(config);
    stage("report", [&] {
        ensure_out_dir(config.out);
        write_text(config.out / "fit.json", fit_report_json(result.fit, result.report));
        write_embeddings(result.embeddings, config.out / "embeddings.emb");
        write_text(config.out / "labels.json", labels_json(result.prepared, result.embeddings));
    });
    const auto projection = stage("project", [&] { return pca2(result.embeddings, result.prepared.labels); });
    stage("report", [&] {
        export_scatter(projection, author_names(result.prepared.corpus), config.out / "scatter.csv");
    });
    return result;
}

NetworkResult run_network(const RunConfig& config) {
    NetworkResult result;
    result.clustering = fit_corpus(config);
    const auto& cl = result.clustering;
    stage("network", [&] {
        const auto names = author_names(cl.prepared.corpus);
        result.raw = author_similarity(mapped_centroids(cl.fit, cl.report), names);
        result.rescaled = minmax_rescale(result.raw);
        result.full = build_graph(result.rescaled, std::nullopt);
        result.thresholded = build_graph(result.rescaled, config.threshold);
    });
    stage("report", [&] {
        ensure_out_dir(config.out);
        write_text(config.out / "fit.json", fit_report_json(cl.fit, cl.report));
        write_matrix_csv(result.raw, config.out / "similarity.csv");
        write_matrix_csv(result.rescaled, config.out / "similarity_rescaled.csv");
        const std::pair<const char*, GraphFormat> formats[] = {
            {".json", GraphFormat::Json}, {".dot", GraphFormat::Dot}, {".graphml", GraphFormat::GraphML}};
        for (const auto& [ext, format] : formats) {
            export_graph(result.full, format, config.out / (std::string("graph_full") + ext));
            export_graph(result.thresholded, format, config.out / (std::string("graph_threshold") + ext));
        }
    });
    return result;
}

std::vector<std::vector<double>> class_centroids(const EmbeddingMatrix& matrix, const LabelVector& labels,
                                                 int count) {
    if (labels.size() != matrix.rows())
        fail(ErrorKind::Validation, "label vector does not match the embedding rows");
    const auto dim = static_cast<std::size_t>(matrix.dim());
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(count), std::vector<double>(dim, 0.0));
    std::vector<std::size_t> n(static_cast<std::size_t>(count), 0);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const int a = labels.labels[r];
        if (a < 0 || a >= count) fail(ErrorKind::Validation, "label out of range");
        auto row = matrix.row(r);
        auto& s = sums[static_cast<std::size_t>(a)];
        for (std::size_t j = 0; j < dim; ++j) s[j] += row[j];
        ++n[static_cast<std::size_t>(a)];
    }
    for (std::size_t a = 0; a < sums.size(); ++a)
        if (n[a] > 0)
            for (double& x : sums[a]) x /= static_cast<double>(n[a]);
    return sums;
}

AttributionReport run_attribution(const RunConfig& config, std::string_view query) {
    // The query is validated before the corpus is embedded.
    const Corpus corpus = stage("load", [&] { return load_corpus(config.manifest); });
    const auto query_index = corpus.author_index(query);
    if (!query_index) throw Error(ErrorKind::Validation, "unknown query author '" + std::string(query) + "'", "attribute");

    const auto cl = fit_corpus(config);
    AttributionReport report;
    report.query = std::string(query);
    report.granularity = config.granularity;
    report.accuracy = cl.report.accuracy;
    stage("attribute", [&] {
        const auto names = author_names(cl.prepared.corpus);
        const auto q = static_cast<std::size_t>(*cl.prepared.corpus.author_index(query));
        const int k = static_cast<int>(names.size());
        report.similarity = author_similarity(class_centroids(cl.embeddings, cl.prepared.labels, k), names);
        report.ranking = rank_against(report.similarity, q);
        report.kmeans_ranking = rank_against(author_similarity(mapped_centroids(cl.fit, cl.report), names), q);
    });
    stage("report", [&] {
        ensure_out_dir(config.out);
        write_text(config.out / "attribution.json", attribution_report_json(report));
        write_matrix_csv(report.similarity, config.out / "attribution_similarity.csv");
    });
    return report;
}

std::string attribution_report_json(const AttributionReport& report) {
    auto list = [](const std::vector<Candidate>& cs) {
        ordered arr = ordered::array();
        for (const auto& c : cs) {
            ordered e;
            e["author"] = c.author;
            e["similarity"] = c.similarity;
            arr.push_back(std::move(e));
        }
        return arr;
    };
    ordered j;
    j["query"] = report.query;
    j["granularity"] = std::string(to_string(report.granularity));
    j["accuracy"] = report.accuracy;
    j["ranking"] = list(report.ranking);
    j["kmeans_ranking"] = list(report.kmeans_ranking);
    return j.dump(2) + "\n";
}

PreparedCorpus run_preprocess(const RunConfig& config) {
    auto prepared = prepare_corpus(config);
    stage("report", [&] {
        ensure_out_dir(config.out);
        std::string lines;
        for (const auto& doc : prepared.documents) {
            const int author = prepared.corpus.find(doc.doc_id)->author.index;
            auto emit = [&](std::optional<std::size_t> index, const std::string& text) {
                ordered j;
                j["doc_id"] = doc.doc_id;
                if (index) j["index"] = *index;
                j["author"] = author;
                j["text"] = text;
                lines += j.dump() + "\n";
            };
            if (config.granularity == Granularity::Sentence) {
                for (const auto& s : doc.sentences) emit(s.index, s.text);
            } else {
                std::string joined;
                for (const auto& s : doc.sentences) joined += (joined.empty() ? "" : " ") + s.text;
                emit(std::nullopt, joined);
            }
        }
        write_text(config.out / "units.jsonl", lines);
    });
    return prepared;
}

EmbeddingMatrix run_embed(const RunConfig& config) {
    const auto prepared = prepare_corpus(config);
    auto matrix = embed_corpus(config, prepared);
    stage("report", [&] {
        ensure_out_dir(config.out);
        write_embeddings(matrix, config.out / "embeddings.emb");
        write_text(config.out / "labels.json", labels_json(prepared, matrix));
    });
    return matrix;
}

}  // namespace stylo

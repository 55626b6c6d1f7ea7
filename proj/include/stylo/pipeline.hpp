#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/clustering.hpp"
#include "stylo/corpus.hpp"
#include "stylo/embedding.hpp"
#include "stylo/network.hpp"
#include "stylo/projection.hpp"
#include "stylo/similarity.hpp"

namespace stylo {

struct RunConfig {
    std::filesystem::path manifest;
    ProviderConfig provider;
    Granularity granularity = Granularity::Sentence;
    std::optional<int> k;  // empty means one cluster per author
    std::uint64_t seed = 42;
    double threshold = 0.7;
    std::optional<std::filesystem::path> lexicon;
    std::filesystem::path out = "out";
    KMeansOptions kmeans;
};

// Relative paths inside the config resolve against `base_dir`.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Corpus after cleaning and segmentation, in manifest order.
struct PreparedCorpus {
    Corpus corpus;
    std::vector<DocumentUnits> documents;
    LabelVector labels;  // one per embedded unit
};

PreparedCorpus prepare_corpus(const RunConfig& config);
EmbeddingMatrix embed_corpus(const RunConfig& config, const PreparedCorpus& prepared);

struct ClusterResult {
    PreparedCorpus prepared;
    EmbeddingMatrix embeddings;
    KMeansFit fit;
    AccuracyReport report;
};

// load -> preprocess -> embed -> k-means -> accuracy. Writes fit.json,
// embeddings.emb, labels.json and scatter.csv into config.out.
ClusterResult run_clustering(const RunConfig& config);

struct NetworkResult {
    ClusterResult clustering;
    SimilarityMatrix raw;
    SimilarityMatrix rescaled;
    AuthorGraph full;
    AuthorGraph thresholded;
};

// Author graph from k-means centroids (each centroid labelled with the author
// its cluster maps to). Writes similarity.csv, similarity_rescaled.csv and
// graph_full / graph_threshold in JSON, DOT and GraphML.
NetworkResult run_network(const RunConfig& config);

struct Candidate {
    std::string author;
    double similarity = 0.0;
};

struct AttributionReport {
    std::string query;
    Granularity granularity = Granularity::Sentence;
    double accuracy = 0.0;  // of the k-means fit on the same vectors
    std::vector<Candidate> ranking;         // author-class centroids
    std::vector<Candidate> kmeans_ranking;  // k-means centroids mapped to authors
    SimilarityMatrix similarity;            // author-class centroid cosine matrix
};

// Ranks every other author by cosine similarity between author-class
// centroids. Writes attribution.json and attribution_similarity.csv.
AttributionReport run_attribution(const RunConfig& config, std::string_view query);

// Writes units.jsonl: the cleaned units that would be embedded.
PreparedCorpus run_preprocess(const RunConfig& config);

// Writes embeddings.emb and labels.json.
EmbeddingMatrix run_embed(const RunConfig& config);

std::string attribution_report_json(const AttributionReport& report);

// Mean of the rows carrying each label, for labels 0..count-1.
std::vector<std::vector<double>> class_centroids(const EmbeddingMatrix& matrix, const LabelVector& labels,
                                                 int count);

}  // namespace stylo

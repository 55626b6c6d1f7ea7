#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stylo/similarity.hpp"

namespace stylo {

struct Edge {
    std::size_t source = 0;  // source < target
    std::size_t target = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Weighted undirected author graph. Edges are ordered by (source, target) and
// mirror the connectivity matrix exactly; there are no self-loops.
struct AuthorGraph {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    std::vector<std::vector<double>> connectivity;

    friend bool operator==(const AuthorGraph&, const AuthorGraph&) = default;
};

// Cosine similarity between author centroids (one row per author).
SimilarityMatrix author_similarity(const std::vector<std::vector<double>>& centroids,
                                   std::vector<std::string> names);

// Input must already be min-max rescaled. Without a threshold every pair with
// positive weight becomes an edge; with threshold t every pair with weight >= t.
AuthorGraph build_graph(const SimilarityMatrix& rescaled, std::optional<double> threshold);

enum class GraphFormat { Dot, GraphML, Json };

void export_graph(const AuthorGraph& graph, GraphFormat format, const std::filesystem::path& path);
std::string graph_to_string(const AuthorGraph& graph, GraphFormat format);

// Reads the JSON export back.
AuthorGraph import_graph_json(const std::filesystem::path& path);

}  // namespace stylo

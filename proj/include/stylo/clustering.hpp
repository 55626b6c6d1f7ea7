#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stylo/embedding.hpp"

namespace stylo {

struct KMeansOptions {
    int max_iter = 300;
    double tol = 1e-6;  // stop once no centroid component moves by tol or more
};

struct KMeansFit {
    std::vector<int> assignments;
    std::vector<std::vector<double>> centroids;  // k x d
    double inertia = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;
    // Inertia measured at each assignment step; non-increasing.
    std::vector<double> inertia_history;

    int k() const { return static_cast<int>(centroids.size()); }
    std::vector<std::size_t> cluster_sizes() const;
};

// Lloyd's algorithm with k-means++ seeding drawn from SplitMix64(seed).
// Rows go to the nearest centroid by euclidean distance, ties to the lowest
// centroid index. An emptied cluster takes the row farthest from its own
// centroid.
KMeansFit kmeans(std::span<const double> data, std::size_t rows, std::size_t dim, int k,
                 std::uint64_t seed, const KMeansOptions& options = {});
KMeansFit kmeans(const EmbeddingMatrix& data, int k, std::uint64_t seed,
                 const KMeansOptions& options = {});

// Minimum-cost perfect matching on a square cost matrix. Returns, for each
// row, the column assigned to it.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

struct AccuracyReport {
    double accuracy = 0.0;
    std::vector<int> mapping;                   // cluster -> author
    std::vector<std::vector<std::size_t>> confusion;  // [cluster][author]
    std::size_t matched = 0;
    std::size_t total = 0;
};

// Label agreement under the best one-to-one cluster -> author mapping.
// Cluster and author counts are taken as max label + 1 and must agree.
AccuracyReport accuracy(std::span<const int> assignments, std::span<const int> truth);
AccuracyReport accuracy(std::span<const int> assignments, std::span<const int> truth, int k);

// JSON report {k, seed, iterations, inertia, accuracy, mapping, cluster_sizes}.
std::string fit_report_json(const KMeansFit& fit, const AccuracyReport& report);

}  // namespace stylo

#include "stylo/clustering.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "stylo/error.hpp"
#include "stylo/rng.hpp"

namespace stylo {

std::vector<std::size_t> KMeansFit::cluster_sizes() const {
    std::vector<std::size_t> sizes(centroids.size(), 0);
    for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
    return sizes;
}

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

using Centroids = std::vector<std::vector<double>>;

Centroids seed_plus_plus(std::span<const double> data, std::size_t rows, std::size_t dim, int k,
                         SplitMix64& rng) {
    Centroids centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    auto row = [&](std::size_t r) { return data.data() + r * dim; };
    auto take = [&](std::size_t r) { centroids.emplace_back(row(r), row(r) + dim); };

    take(static_cast<std::size_t>(rng.below(rows)));
    std::vector<double> nearest(rows);
    for (std::size_t r = 0; r < rows; ++r) nearest[r] = squared_distance(row(r), centroids[0].data(), dim);

    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (double d : nearest) total += d;
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            pick = rows;
            std::size_t last_positive = 0;
            for (std::size_t r = 0; r < rows; ++r) {
                if (nearest[r] <= 0.0) continue;
                last_positive = r;
                cumulative += nearest[r];
                if (cumulative > target) {
                    pick = r;
                    break;
                }
            }
            if (pick == rows) pick = last_positive;  // rounding left target unreached
        } else {
            // Every row coincides with a chosen centroid.
            pick = static_cast<std::size_t>(rng.below(rows));
        }
        take(pick);
        const double* c = centroids.back().data();
        for (std::size_t r = 0; r < rows; ++r) nearest[r] = std::min(nearest[r], squared_distance(row(r), c, dim));
    }
    return centroids;
}

}  // namespace

KMeansFit kmeans(std::span<const double> data, std::size_t rows, std::size_t dim, int k,
                 std::uint64_t seed, const KMeansOptions& options) {
    if (k < 1) fail(ErrorKind::Validation, "k must be at least 1");
    if (dim == 0) fail(ErrorKind::Validation, "data dimension must be positive");
    if (data.size() != rows * dim) fail(ErrorKind::Validation, "data size does not match rows x dim");
    if (static_cast<std::size_t>(k) > rows)
        fail(ErrorKind::Validation, "k = " + std::to_string(k) + " exceeds the " + std::to_string(rows) +
                                        " available rows");
    for (double x : data)
        if (!std::isfinite(x)) fail(ErrorKind::Validation, "data contains non-finite values");
    if (options.max_iter < 1) fail(ErrorKind::Validation, "max_iter must be at least 1");

    const auto kk = static_cast<std::size_t>(k);
    auto row = [&](std::size_t r) { return data.data() + r * dim; };

    SplitMix64 rng(seed);
    KMeansFit fit;
    fit.seed = seed;
    fit.centroids = seed_plus_plus(data, rows, dim, k, rng);
    fit.assignments.assign(rows, 0);

    std::vector<double> cost(rows);
    for (int iter = 1; iter <= options.max_iter; ++iter) {
        double inertia = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            int best = 0;
            double best_d = squared_distance(row(r), fit.centroids[0].data(), dim);
            for (std::size_t c = 1; c < kk; ++c) {
                const double d = squared_distance(row(r), fit.centroids[c].data(), dim);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            fit.assignments[r] = best;
            cost[r] = best_d;
            inertia += best_d;
        }
        fit.inertia_history.push_back(inertia);

        Centroids next(kk, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(kk, 0);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto c = static_cast<std::size_t>(fit.assignments[r]);
            ++counts[c];
            const double* x = row(r);
            for (std::size_t j = 0; j < dim; ++j) next[c][j] += x[j];
        }
        for (std::size_t c = 0; c < kk; ++c)
            if (counts[c] > 0)
                for (double& v : next[c]) v /= static_cast<double>(counts[c]);

        bool repaired = false;
        std::vector<bool> taken(rows, false);
        for (std::size_t c = 0; c < kk; ++c) {
            if (counts[c] > 0) continue;
            std::size_t far = rows;
            double far_d = -1.0;
            for (std::size_t r = 0; r < rows; ++r) {
                if (taken[r]) continue;
                const auto own = static_cast<std::size_t>(fit.assignments[r]);
                const double d = squared_distance(row(r), next[own].data(), dim);
                if (d > far_d) {
                    far_d = d;
                    far = r;
                }
            }
            taken[far] = true;
            next[c].assign(row(far), row(far) + dim);
            repaired = true;
        }

        double movement = 0.0;
        for (std::size_t c = 0; c < kk; ++c)
            for (std::size_t j = 0; j < dim; ++j)
                movement = std::max(movement, std::abs(next[c][j] - fit.centroids[c][j]));
        fit.centroids = std::move(next);
        fit.iterations = iter;
        if (!repaired && movement < options.tol) break;
    }

    fit.inertia = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        fit.inertia += squared_distance(row(r), fit.centroids[static_cast<std::size_t>(fit.assignments[r])].data(), dim);
    return fit;
}

KMeansFit kmeans(const EmbeddingMatrix& data, int k, std::uint64_t seed, const KMeansOptions& options) {
    std::vector<double> values(data.values().begin(), data.values().end());
    return kmeans(values, data.rows(), static_cast<std::size_t>(data.dim()), k, seed, options);
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    for (const auto& r : cost) {
        if (r.size() != n) fail(ErrorKind::Validation, "cost matrix must be square");
        for (double x : r)
            if (!std::isfinite(x)) fail(ErrorKind::Validation, "cost matrix has non-finite entries");
    }
    if (n == 0) return {};

    // Shortest augmenting path with row/column potentials, 1-based with a
    // virtual column 0.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = static_cast<int>(j - 1);
    return assignment;
}

AccuracyReport accuracy(std::span<const int> assignments, std::span<const int> truth, int k) {
    if (assignments.size() != truth.size())
        fail(ErrorKind::Validation, "assignments (" + std::to_string(assignments.size()) +
                                        ") and labels (" + std::to_string(truth.size()) +
                                        ") differ in length");
    if (assignments.empty()) fail(ErrorKind::Validation, "accuracy of an empty labelling");
    if (k < 1) fail(ErrorKind::Validation, "k must be at least 1");
    const auto kk = static_cast<std::size_t>(k);
    AccuracyReport report;
    report.confusion.assign(kk, std::vector<std::size_t>(kk, 0));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const int c = assignments[i], a = truth[i];
        if (c < 0 || c >= k || a < 0 || a >= k)
            fail(ErrorKind::Validation, "label out of range 0.." + std::to_string(k - 1));
        ++report.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)];
    }
    std::vector<std::vector<double>> cost(kk, std::vector<double>(kk));
    for (std::size_t c = 0; c < kk; ++c)
        for (std::size_t a = 0; a < kk; ++a) cost[c][a] = -static_cast<double>(report.confusion[c][a]);
    report.mapping = hungarian(cost);
    for (std::size_t c = 0; c < kk; ++c)
        report.matched += report.confusion[c][static_cast<std::size_t>(report.mapping[c])];
    report.total = assignments.size();
    report.accuracy = static_cast<double>(report.matched) / static_cast<double>(report.total);
    return report;
}

AccuracyReport accuracy(std::span<const int> assignments, std::span<const int> truth) {
    if (assignments.empty() || truth.empty()) return accuracy(assignments, truth, 1);
    const int clusters = *std::max_element(assignments.begin(), assignments.end()) + 1;
    const int authors = *std::max_element(truth.begin(), truth.end()) + 1;
    if (clusters != authors)
        fail(ErrorKind::Validation, "cluster count " + std::to_string(clusters) +
                                        " differs from author count " + std::to_string(authors));
    return accuracy(assignments, truth, clusters);
}

std::string fit_report_json(const KMeansFit& fit, const AccuracyReport& report) {
    nlohmann::ordered_json j;
    j["k"] = fit.k();
    j["seed"] = fit.seed;
    j["iterations"] = fit.iterations;
    j["inertia"] = fit.inertia;
    j["accuracy"] = report.accuracy;
    j["mapping"] = report.mapping;
    j["cluster_sizes"] = fit.cluster_sizes();
    return j.dump(2) + "\n";
}

}  // namespace stylo

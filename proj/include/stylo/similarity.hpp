#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace stylo {

// Cosine of the angle between v and w, clamped to [-1, 1].
// Throws UndefinedMetric when either vector is zero.
double cosine(std::span<const double> v, std::span<const double> w);
double cosine(std::span<const float> v, std::span<const float> w);

double euclidean(std::span<const double> v, std::span<const double> w);
double euclidean(std::span<const float> v, std::span<const float> w);

// Dense square matrix with labelled rows/columns.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(std::size_t n, std::vector<std::string> labels);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

SimilarityMatrix similarity_matrix(const std::vector<std::vector<double>>& vectors,
                                   std::vector<std::string> labels);

// Off-diagonal min-max scaling onto [0, 1]; the diagonal is pinned to 1.
// A constant off-diagonal maps to all zeros.
SimilarityMatrix minmax_rescale(const SimilarityMatrix& m);

// CSV: header row and first column hold the labels; values use %.17g.
void write_matrix_csv(const SimilarityMatrix& m, const std::filesystem::path& path);
SimilarityMatrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace stylo

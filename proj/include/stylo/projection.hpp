#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/embedding.hpp"

namespace stylo {

struct Projection2D {
    std::vector<std::array<double, 2>> coords;
    LabelVector labels;
    std::array<double, 2> explained_variance{0.0, 0.0};  // sample covariance eigenvalues
    std::array<std::vector<double>, 2> components;        // unit loadings, length d
};

// Principal component projection onto the top two eigenvectors of the sample
// covariance (block power iteration with Rayleigh-Ritz, tol 1e-10, at most
// 1000 iterations). Each component is oriented so its largest-magnitude
// loading is positive.
Projection2D pca2(std::span<const double> data, std::size_t rows, std::size_t dim, LabelVector labels = {});
Projection2D pca2(const EmbeddingMatrix& data, LabelVector labels = {});

// CSV with header x,y,author_index,author_name; one row per point.
void export_scatter(const Projection2D& proj, const std::vector<std::string>& author_names,
                    const std::filesystem::path& path);

struct ScatterRow {
    double x = 0.0;
    double y = 0.0;
    int author_index = 0;
    std::string author_name;
};
std::vector<ScatterRow> read_scatter(const std::filesystem::path& path);

}  // namespace stylo

#include "stylo/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "csv.hpp"
#include "stylo/error.hpp"

namespace stylo {

namespace {

template <class T>
void check_dims(std::span<const T> v, std::span<const T> w) {
    if (v.size() != w.size())
        fail(ErrorKind::Validation, "dimension mismatch: " + std::to_string(v.size()) + " vs " +
                                        std::to_string(w.size()));
}

template <class T>
double cosine_impl(std::span<const T> v, std::span<const T> w) {
    check_dims(v, w);
    double dot = 0.0, vv = 0.0, ww = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = v[i], b = w[i];
        dot += a * b;
        vv += a * a;
        ww += b * b;
    }
    if (vv == 0.0 || ww == 0.0) fail(ErrorKind::UndefinedMetric, "cosine of a zero vector");
    return std::clamp(dot / (std::sqrt(vv) * std::sqrt(ww)), -1.0, 1.0);
}

template <class T>
double euclidean_impl(std::span<const T> v, std::span<const T> w) {
    check_dims(v, w);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = static_cast<double>(v[i]) - static_cast<double>(w[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double cosine(std::span<const double> v, std::span<const double> w) { return cosine_impl(v, w); }
double cosine(std::span<const float> v, std::span<const float> w) { return cosine_impl(v, w); }
double euclidean(std::span<const double> v, std::span<const double> w) { return euclidean_impl(v, w); }
double euclidean(std::span<const float> v, std::span<const float> w) { return euclidean_impl(v, w); }

SimilarityMatrix::SimilarityMatrix(std::size_t n, std::vector<std::string> labels)
    : n_(n), values_(n * n, 0.0), labels_(std::move(labels)) {
    if (labels_.size() != n) fail(ErrorKind::Validation, "matrix labels do not match its size");
}

SimilarityMatrix similarity_matrix(const std::vector<std::vector<double>>& vectors,
                                   std::vector<std::string> labels) {
    const std::size_t n = vectors.size();
    SimilarityMatrix m(n, std::move(labels));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::any_of(vectors[i].begin(), vectors[i].end(), [](double x) { return x != 0.0; }))
            fail(ErrorKind::UndefinedMetric, "vector " + std::to_string(i) + " (" + m.labels()[i] +
                                                 ") is zero");
    }
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double c = cosine(std::span<const double>(vectors[i]), std::span<const double>(vectors[j]));
            m(i, j) = c;
            m(j, i) = c;
        }
    }
    return m;
}

SimilarityMatrix minmax_rescale(const SimilarityMatrix& in) {
    const std::size_t n = in.size();
    if (n < 2) fail(ErrorKind::Validation, "min-max rescaling needs at least a 2x2 matrix");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                lo = std::min(lo, in(i, j));
                hi = std::max(hi, in(i, j));
            }
    SimilarityMatrix out(n, in.labels());
    const double range = hi - lo;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                out(i, j) = 1.0;
            } else if (range > 0.0) {
                out(i, j) = std::clamp((in(i, j) - lo) / range, 0.0, 1.0);
            } else {
                out(i, j) = 0.0;
            }
        }
    return out;
}

void write_matrix_csv(const SimilarityMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    for (const auto& label : m.labels()) out << ',' << csv::field(label);
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << csv::field(m.labels()[i]);
        for (std::size_t j = 0; j < m.size(); ++j) out << ',' << csv::number(m(i, j));
        out << '\n';
    }
    if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

SimilarityMatrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Load, "cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Format, "empty matrix CSV");
    auto header = csv::split(line);
    std::vector<std::string> labels(header.begin() + 1, header.end());
    const std::size_t n = labels.size();
    SimilarityMatrix m(n, labels);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) fail(ErrorKind::Format, "matrix CSV has too few rows");
        auto cells = csv::split(line);
        if (cells.size() != n + 1) fail(ErrorKind::Format, "matrix CSV row has wrong width");
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = csv::parse_number(cells[j + 1]);
        }
    }
    return m;
}

}  // namespace stylo

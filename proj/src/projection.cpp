#include "stylo/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csv.hpp"
#include "stylo/error.hpp"
#include "stylo/rng.hpp"

namespace stylo {

namespace {

using Vec = std::vector<double>;

constexpr double kTolerance = 1e-10;
constexpr int kMaxIterations = 1000;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Symmetric covariance, row-major d x d.
class Covariance {
public:
    Covariance(const std::vector<double>& centered, std::size_t rows, std::size_t dim)
        : dim_(dim), c_(dim * dim, 0.0) {
        for (std::size_t r = 0; r < rows; ++r) {
            const double* x = centered.data() + r * dim;
            for (std::size_t i = 0; i < dim; ++i) {
                const double xi = x[i];
                if (xi == 0.0) continue;
                double* ci = c_.data() + i * dim;
                for (std::size_t j = i; j < dim; ++j) ci[j] += xi * x[j];
            }
        }
        const double scale = 1.0 / static_cast<double>(rows - 1);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j) {
                c_[i * dim + j] *= scale;
                c_[j * dim + i] = c_[i * dim + j];
            }
    }

    Vec apply(const Vec& v) const {
        Vec out(dim_, 0.0);
        for (std::size_t i = 0; i < dim_; ++i) {
            const double* ci = c_.data() + i * dim_;
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) s += ci[j] * v[j];
            out[i] = s;
        }
        return out;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += c_[i * dim_ + i];
        return t;
    }

private:
    std::size_t dim_;
    Vec c_;
};

// Makes b orthonormal to unit vector a. When b is (numerically) inside span(a)
// the standard basis vector with the largest residual replaces it.
void orthonormalize_against(const Vec& a, Vec& b) {
    const double original = norm(b);
    axpy(-dot(a, b), a, b);
    axpy(-dot(a, b), a, b);
    double n = norm(b);
    if (n <= 1e-12 * std::max(original, 1e-300) || n == 0.0) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < a.size(); ++i)
            if (std::abs(a[i]) < std::abs(a[best])) best = i;
        std::fill(b.begin(), b.end(), 0.0);
        b[best] = 1.0;
        axpy(-dot(a, b), a, b);
        axpy(-dot(a, b), a, b);
        n = norm(b);
    }
    for (double& x : b) x /= n;
}

void normalize(Vec& a) {
    const double n = norm(a);
    for (double& x : a) x /= n;
}

void orient(Vec& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    if (v[best] < 0.0)
        for (double& x : v) x = -x;
}

struct TopTwo {
    std::array<double, 2> values{};
    std::array<Vec, 2> vectors;
};

TopTwo top_two_eigenpairs(const Covariance& cov, std::size_t dim) {
    TopTwo out;
    SplitMix64 rng(0x5EEDC0FFEEULL);
    Vec q1(dim), q2(dim);
    for (auto& x : q1) x = rng.uniform() - 0.5;
    for (auto& x : q2) x = rng.uniform() - 0.5;
    normalize(q1);
    if (dim == 1) {
        out.values = {cov.apply(q1)[0] * q1[0], 0.0};
        out.vectors = {q1, Vec(1, 0.0)};
        return out;
    }
    orthonormalize_against(q1, q2);

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        Vec z1 = cov.apply(q1), z2 = cov.apply(q2);
        // Rayleigh-Ritz on span(q1, q2).
        const double a = dot(q1, z1), b = 0.5 * (dot(q1, z2) + dot(q2, z1)), c = dot(q2, z2);
        const double phi = 0.5 * std::atan2(2.0 * b, a - c);
        const double cs = std::cos(phi), sn = std::sin(phi);
        Vec r1(dim), r2(dim), w1(dim), w2(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            r1[i] = cs * q1[i] + sn * q2[i];
            r2[i] = -sn * q1[i] + cs * q2[i];
            w1[i] = cs * z1[i] + sn * z2[i];
            w2[i] = -sn * z1[i] + cs * z2[i];
        }
        const double t1 = dot(r1, w1), t2 = dot(r2, w2);
        if (t2 > t1) {
            std::swap(r1, r2);
            std::swap(w1, w2);
        }
        out.values = {std::max(t1, t2), std::min(t1, t2)};
        out.vectors = {r1, r2};

        Vec res1 = w1, res2 = w2;
        axpy(-out.values[0], r1, res1);
        axpy(-out.values[1], r2, res2);
        const double scale = std::max(std::abs(out.values[0]), 1e-300);
        if (norm(res1) <= kTolerance * scale && norm(res2) <= kTolerance * scale) break;

        q1 = std::move(w1);
        q2 = std::move(w2);
        if (norm(q1) == 0.0) break;
        normalize(q1);
        orthonormalize_against(q1, q2);
    }
    for (auto& v : out.values) v = std::max(v, 0.0);
    return out;
}

}  // namespace

Projection2D pca2(std::span<const double> data, std::size_t rows, std::size_t dim, LabelVector labels) {
    if (rows < 3) fail(ErrorKind::Validation, "PCA needs at least 3 rows, got " + std::to_string(rows));
    if (dim == 0 || data.size() != rows * dim)
        fail(ErrorKind::Validation, "data size does not match rows x dim");
    if (!labels.labels.empty() && labels.size() != rows)
        fail(ErrorKind::Validation, "label vector does not match the row count");
    double max_abs = 0.0;
    for (double x : data) {
        if (!std::isfinite(x)) fail(ErrorKind::Validation, "data contains non-finite values");
        max_abs = std::max(max_abs, std::abs(x));
    }

    Vec mean(dim, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += data[r * dim + j];
    for (double& m : mean) m /= static_cast<double>(rows);
    std::vector<double> centered(data.begin(), data.end());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < dim; ++j) centered[r * dim + j] -= mean[j];

    const Covariance cov(centered, rows, dim);
    const double floor = 1e-14 * max_abs;
    if (cov.trace() <= floor * floor * static_cast<double>(dim))
        fail(ErrorKind::DegenerateData, "all rows are equal; no variance to project");

    auto eig = top_two_eigenpairs(cov, dim);
    for (auto& v : eig.vectors) orient(v);

    Projection2D proj;
    proj.labels = std::move(labels);
    proj.explained_variance = eig.values;
    proj.coords.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* x = centered.data() + r * dim;
        double p = 0.0, q = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            p += x[j] * eig.vectors[0][j];
            q += x[j] * eig.vectors[1][j];
        }
        proj.coords[r] = {p, q};
    }
    proj.components = {std::move(eig.vectors[0]), std::move(eig.vectors[1])};
    return proj;
}

Projection2D pca2(const EmbeddingMatrix& data, LabelVector labels) {
    std::vector<double> values(data.values().begin(), data.values().end());
    return pca2(values, data.rows(), static_cast<std::size_t>(data.dim()), std::move(labels));
}

void export_scatter(const Projection2D& proj, const std::vector<std::string>& author_names,
                    const std::filesystem::path& path) {
    if (proj.labels.size() != proj.coords.size())
        fail(ErrorKind::Validation, "scatter labels do not match the point count");
    for (int label : proj.labels.labels)
        if (label < 0 || static_cast<std::size_t>(label) >= author_names.size())
            fail(ErrorKind::Validation, "scatter label " + std::to_string(label) + " has no author name");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << "x,y,author_index,author_name\n";
    for (std::size_t i = 0; i < proj.coords.size(); ++i) {
        const int a = proj.labels.labels[i];
        out << csv::number(proj.coords[i][0]) << ',' << csv::number(proj.coords[i][1]) << ',' << a << ','
            << csv::field(author_names[static_cast<std::size_t>(a)]) << '\n';
    }
    if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::vector<ScatterRow> read_scatter(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Load, "cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "x,y,author_index,author_name")
        fail(ErrorKind::Format, "scatter CSV header mismatch");
    std::vector<ScatterRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = csv::split(line);
        if (cells.size() != 4) fail(ErrorKind::Format, "scatter CSV row has wrong width");
        ScatterRow row;
        row.x = csv::parse_number(cells[0]);
        row.y = csv::parse_number(cells[1]);
        row.author_index = static_cast<int>(csv::parse_number(cells[2]));
        row.author_name = cells[3];
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace stylo

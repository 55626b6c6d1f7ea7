// Acceptance harness: one PASS/FAIL line per primary criterion, each checked
// at its stated tolerance and time limit. Exit status is nonzero on any FAIL.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "stylo/clustering.hpp"
#include "stylo/embedding.hpp"
#include "stylo/network.hpp"
#include "stylo/pipeline.hpp"
#include "stylo/projection.hpp"
#include "stylo/rng.hpp"
#include "stylo/similarity.hpp"
#include "support/synth.hpp"

using namespace stylo;
namespace fs = std::filesystem;
using Vec = std::vector<double>;

namespace {

struct Failure {
    std::string what;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

int failures = 0;

void criterion(const std::string& name, double limit_ms, const std::function<void()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
        body();
    } catch (const Failure& f) {
        ok = false;
        detail = f.what;
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ok && limit_ms > 0 && ms > limit_ms) {
        ok = false;
        detail = "exceeded " + std::to_string(static_cast<int>(limit_ms)) + " ms";
    }
    if (!ok) ++failures;
    std::printf("[%s] %s (%.0f ms)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), ms, detail.empty() ? "" : ": ",
                detail.c_str());
    std::fflush(stdout);
}

Vec random_vector(SplitMix64& rng, std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = rng.uniform() * 2.0 - 1.0;
    return v;
}

SimilarityMatrix random_symmetric(SplitMix64& rng, std::size_t n, bool quantized) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("a" + std::to_string(i));
    SimilarityMatrix m(n, names);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j)
            m(i, j) = m(j, i) = quantized ? static_cast<double>(rng.below(21)) / 20.0 : rng.uniform() * 2.0 - 1.0;
    }
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void metric_axioms() {
    SplitMix64 rng(1001);
    for (int pair = 0; pair < 10000; ++pair) {
        const std::size_t dim = 1 + rng.below(64);
        Vec v = random_vector(rng, dim), w = random_vector(rng, dim);
        const double c = cosine(v, w);
        expect(c == cosine(w, v), "cosine not symmetric");
        expect(c >= -1.0 && c <= 1.0, "cosine outside [-1, 1]");
        expect(std::abs(cosine(v, v) - 1.0) <= 1e-9, "cos(v, v) != 1");
        double nv = 0.0, nw = 0.0;
        for (double x : v) nv += x * x;
        for (double x : w) nw += x * x;
        for (auto& x : v) x /= std::sqrt(nv);
        for (auto& x : w) x /= std::sqrt(nw);
        const double e = euclidean(v, w);
        expect(std::abs(e * e - (2.0 - 2.0 * cosine(v, w))) <= 1e-6, "unit-vector identity violated");
    }
}

void hungarian_oracle() {
    SplitMix64 rng(1002);
    for (std::size_t k = 1; k <= 6; ++k) {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<std::vector<double>> cost(k, Vec(k));
            for (auto& row : cost)
                for (auto& x : row) x = rng.uniform() * 100.0 - 50.0;
            const auto a = hungarian(cost);
            double got = 0.0;
            for (std::size_t i = 0; i < k; ++i) got += cost[i][static_cast<std::size_t>(a[i])];
            std::vector<int> perm(k);
            std::iota(perm.begin(), perm.end(), 0);
            double best = std::numeric_limits<double>::infinity();
            do {
                double s = 0.0;
                for (std::size_t i = 0; i < k; ++i) s += cost[i][static_cast<std::size_t>(perm[i])];
                best = std::min(best, s);
            } while (std::next_permutation(perm.begin(), perm.end()));
            expect(got == best, "k=" + std::to_string(k) + " cost differs from brute force");
        }
    }
}

void kmeans_invariants() {
    SplitMix64 rng(1003);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 10 + rng.below(190), dim = 1 + rng.below(16);
        const int k = 1 + static_cast<int>(rng.below(8));
        Vec data(rows * dim);
        for (auto& x : data) x = rng.uniform() * 10.0 - 5.0;
        const std::uint64_t seed = rng.next();
        const auto fit = kmeans(data, rows, dim, k, seed);
        const auto again = kmeans(data, rows, dim, k, seed);
        expect(fit.assignments == again.assignments && fit.centroids == again.centroids &&
                   fit.inertia == again.inertia && fit.iterations == again.iterations,
               "non-deterministic fit");
        for (std::size_t i = 1; i < fit.inertia_history.size(); ++i)
            expect(fit.inertia_history[i] <= fit.inertia_history[i - 1], "inertia increased");
        for (int c = 0; c < k; ++c)
            for (std::size_t j = 0; j < dim; ++j) {
                double s = 0.0;
                std::size_t n = 0;
                for (std::size_t r = 0; r < rows; ++r)
                    if (fit.assignments[r] == c) {
                        s += data[r * dim + j];
                        ++n;
                    }
                expect(n > 0, "empty cluster in final fit");
                expect(std::abs(fit.centroids[static_cast<std::size_t>(c)][j] - s / static_cast<double>(n)) <= 1e-9,
                       "centroid differs from mean of its rows");
            }
    }
}

RunConfig synthetic_config(const testing::TempDir& dir, std::vector<testing::SynthAuthor> authors, int dim,
                           const std::string& granularity) {
    const auto manifest = testing::write_synth_corpus(dir.path(), authors);
    return load_config(testing::write_config(dir.path(), manifest, dim, 3, 42, granularity, "out"));
}

void synthetic_clustering() {
    testing::TempDir dir("accept-cluster");
    // 5 authors, 4 documents of 10 sentences: 40 sentences each.
    auto config = synthetic_config(dir, testing::disjoint_authors(5, 5, 4, 10), 256, "sentence");
    const auto prepared = prepare_corpus(config);
    expect(prepared.labels.size() == 200, "expected 200 sentence units");
    const auto embeddings = embed_corpus(config, prepared);
    auto score = [&](std::uint64_t seed) {
        const auto fit = kmeans(embeddings, 5, seed);
        return accuracy(fit.assignments, prepared.labels.labels, 5).accuracy;
    };
    const double at42 = score(42);
    expect(at42 == 1.0, "seed 42 accuracy " + std::to_string(at42));
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) good += score(seed) >= 0.9 ? 1 : 0;
    expect(good >= 9, std::to_string(good) + " of 10 seeds reached 0.9");
    expect(run_clustering(config).report.accuracy == 1.0, "pipeline run accuracy below 1.0");
}

void minmax_rescaling() {
    SplitMix64 rng(1005);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 3 + rng.below(10);
        const auto in = random_symmetric(rng, n, false);
        const auto out = minmax_rescale(in);
        double lo = 2.0, hi = -2.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    expect(out(i, j) == 1.0, "diagonal not pinned to 1");
                    continue;
                }
                lo = std::min(lo, out(i, j));
                hi = std::max(hi, out(i, j));
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = a + 1; b < n; ++b)
                        if (in(i, j) <= in(a, b)) expect(out(i, j) <= out(a, b), "order not preserved");
            }
        expect(std::abs(lo) <= 1e-12 && std::abs(hi - 1.0) <= 1e-12, "endpoints not 0 and 1");
    }
    auto flat = random_symmetric(rng, 5, false);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (i != j) flat(i, j) = 0.42;
    const auto out = minmax_rescale(flat);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) expect(out(i, j) == (i == j ? 1.0 : 0.0), "degenerate range rule");
}

void network_thresholds() {
    SplitMix64 rng(1006);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng.below(22);
        const auto m = minmax_rescale(random_symmetric(rng, n, trial % 2 == 0));
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        for (int step = 0; step <= 10; ++step) {
            const double t = step / 10.0;
            std::size_t independent = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) independent += m(i, j) >= t ? 1 : 0;
            const auto count = build_graph(m, t).edges.size();
            expect(count == independent, "edge count mismatch at t=" + std::to_string(t));
            expect(count <= previous, "edge count increased with threshold");
            previous = count;
        }
    }
}

void pca_oracle() {
    SplitMix64 rng(1007);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t rows = 3 + rng.below(10), dim = 1 + rng.below(8);
        Vec data(rows * dim);
        for (auto& x : data) x = rng.uniform() * 6.0 - 3.0;
        const auto p = pca2(data, rows, dim);

        Eigen::MatrixXd x(rows, dim);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < dim; ++j) x(r, j) = data[r * dim + j];
        const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
        const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows - 1);
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues().reverse();
        expect(std::abs(p.explained_variance[0] - ev(0)) <= 1e-6, "first variance differs from oracle");
        const double second = dim > 1 ? ev(1) : 0.0;
        expect(std::abs(p.explained_variance[1] - second) <= 1e-6, "second variance differs from oracle");

        Vec shifted = data;
        const Vec offset = random_vector(rng, dim);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < dim; ++j) shifted[r * dim + j] += 50.0 * offset[j];
        const auto q = pca2(shifted, rows, dim);
        for (std::size_t r = 0; r < rows; ++r)
            for (int c = 0; c < 2; ++c)
                expect(std::abs(p.coords[r][c] - q.coords[r][c]) <= 1e-8, "not translation invariant");
    }
}

void attribution_analog() {
    {
        testing::TempDir dir("accept-attr");
        auto authors = testing::disjoint_authors(5, 4, 3, 8);
        auto copy = authors[3];
        copy.name = "Verbatim Copyist";
        copy.copy_of = 3;
        authors.push_back(copy);
        const auto config = synthetic_config(dir, authors, 256, "document");
        const auto report = run_attribution(config, "Verbatim Copyist");
        expect(report.ranking.size() == 5, "ranking should list the 5 other authors");
        expect(report.ranking[0].author == "Author 3", "copied author not ranked first");
        expect(report.ranking[0].similarity >= 0.99, "copy similarity below 0.99");
    }
    {
        testing::TempDir dir("accept-22");
        const auto config = synthetic_config(dir, testing::disjoint_authors(22, 2, 2, 4), 256, "document");
        const auto report = run_attribution(config, "Author 0");
        expect(report.ranking.size() == 21, "22-author ranking should have 21 entries");
        expect(report.similarity.size() == 22, "similarity matrix should be 22 x 22");
    }
}

void cli_determinism() {
    testing::TempDir dir("accept-cli");
    synthetic_config(dir, testing::disjoint_authors(4, 4, 3, 6), 256, "sentence");
    const std::string base = std::string(STYLO_CLI_PATH) + " cluster --config " + (dir / "config.json").string();
    for (const char* out : {"run1", "run2"}) {
        const std::string cmd = base + " --out " + (dir / out).string() + " >/dev/null 2>&1";
        expect(std::system(cmd.c_str()) == 0, "cluster command failed");
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir / "run1")) {
        const auto name = entry.path().filename();
        expect(fs::exists(dir / "run2" / name), name.string() + " missing from second run");
        expect(slurp(entry.path()) == slurp(dir / "run2" / name), name.string() + " differs between runs");
        ++compared;
    }
    expect(compared >= 4, "expected fit.json, embeddings.emb, labels.json and scatter.csv");
}

void emb1_round_trip() {
    testing::TempDir dir("accept-emb");
    SplitMix64 rng(1010);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rows = trial == 0 ? 0 : rng.below(40);
        const int dim = trial == 0 ? kDefaultDim : 1 + static_cast<int>(rng.below(64));
        EmbeddingMatrix m(dim);
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<float> row(static_cast<std::size_t>(dim));
            for (auto& x : row) x = static_cast<float>((rng.uniform() * 2.0 - 1.0) * std::pow(10.0, rng.below(7) - 3.0));
            const std::string doc = "doc-" + std::to_string(rng.below(1000)) + (r % 5 == 0 ? "#x" : "");
            m.append(row, UnitId{doc, r % 2 == 0 ? std::optional<std::size_t>(r) : std::nullopt});
        }
        write_embeddings(m, dir / "m.emb");
        const auto back = load_embeddings(dir / "m.emb");
        expect(back == m, "round trip changed matrix " + std::to_string(trial));
    }
}

}  // namespace

int main() {
    criterion("metric axioms on 10000 random pairs (< 1 s)", 1000, metric_axioms);
    criterion("hungarian equals brute force for k <= 6, 200 matrices each (< 10 s)", 10000, hungarian_oracle);
    criterion("k-means monotone inertia, centroid means, determinism on 50 datasets (< 10 s)", 10000,
              kmeans_invariants);
    criterion("synthetic 5-author clustering: accuracy 1.0 at seed 42, >= 0.9 for 9 of 10 seeds (< 5 s)", 5000,
              synthetic_clustering);
    criterion("min-max rescale endpoints and order on 1000 matrices, degenerate rule", 0, minmax_rescaling);
    criterion("network edge counts match independent count and fall with threshold", 0, network_thresholds);
    criterion("pca variances match dense eigensolver on 20 matrices, translation invariance", 0, pca_oracle);
    criterion("attribution ranks verbatim copy first (>= 0.99); 22 authors give 21 candidates", 0,
              attribution_analog);
    criterion("cluster command twice gives byte-identical artifacts", 0, cli_determinism);
    criterion("EMB1 write/load exact on 100 random matrices including count 0", 0, emb1_round_trip);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

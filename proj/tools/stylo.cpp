// stylo: command-line front end for the stylometry pipeline.
//
//   stylo cluster   --config run.json [--seed N] [--out DIR]
//   stylo network   --config run.json
//   stylo attribute --config run.json --query "Author Name"
//   stylo embed     --config run.json
//   stylo preprocess --config run.json
//
// Exit codes: 0 success, 2 validation error, 1 any other failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "stylo/error.hpp"
#include "stylo/pipeline.hpp"

namespace {

constexpr int kValidationExit = 2;
constexpr int kRuntimeExit = 1;

nlohmann::ordered_json cluster_summary(const stylo::ClusterResult& r) {
    nlohmann::ordered_json j;
    j["units"] = r.embeddings.rows();
    j["k"] = r.fit.k();
    j["iterations"] = r.fit.iterations;
    j["inertia"] = r.fit.inertia;
    j["accuracy"] = r.report.accuracy;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stylometric clustering, author networks and attribution"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string query;

    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--out", out_dir, "override the output directory");

    auto* cluster = app.add_subcommand("cluster", "embed, cluster and score against author labels");
    auto* network = app.add_subcommand("network", "author similarity network from cluster centroids");
    auto* attribute = app.add_subcommand("attribute", "rank candidate authors for a query author");
    auto* embed = app.add_subcommand("embed", "write the EMB1 embedding file");
    auto* preprocess = app.add_subcommand("preprocess", "write the cleaned text units");
    attribute->add_option("--query", query, "author name to attribute")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidationExit;
    }

    try {
        auto config = stylo::load_config(config_path);
        if (seed) config.seed = *seed;
        if (!out_dir.empty()) config.out = out_dir;

        if (cluster->parsed()) {
            std::cout << cluster_summary(stylo::run_clustering(config)).dump(2) << '\n';
        } else if (network->parsed()) {
            const auto r = stylo::run_network(config);
            auto j = cluster_summary(r.clustering);
            j["edges_full"] = r.full.edges.size();
            j["edges_threshold"] = r.thresholded.edges.size();
            j["threshold"] = config.threshold;
            std::cout << j.dump(2) << '\n';
        } else if (attribute->parsed()) {
            std::cout << stylo::attribution_report_json(stylo::run_attribution(config, query));
        } else if (embed->parsed()) {
            const auto m = stylo::run_embed(config);
            std::cout << "wrote " << m.rows() << " x " << m.dim() << " embeddings to "
                      << (config.out / "embeddings.emb").string() << '\n';
        } else if (preprocess->parsed()) {
            const auto p = stylo::run_preprocess(config);
            std::cout << "wrote " << p.labels.size() << " units to " << (config.out / "units.jsonl").string()
                      << '\n';
        }
    } catch (const stylo::Error& e) {
        std::cerr << "stylo: " << e.what() << '\n';
        return e.kind() == stylo::ErrorKind::Validation ? kValidationExit : kRuntimeExit;
    } catch (const std::exception& e) {
        std::cerr << "stylo: " << e.what() << '\n';
        return kRuntimeExit;
    }
    return 0;
}

#include "stylo/network.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "stylo/error.hpp"

namespace stylo {

using nlohmann::json;

SimilarityMatrix author_similarity(const std::vector<std::vector<double>>& centroids,
                                   std::vector<std::string> names) {
    if (centroids.size() < 2) fail(ErrorKind::Validation, "author similarity needs at least 2 centroids");
    if (names.size() != centroids.size())
        fail(ErrorKind::Validation, "centroid count does not match author names");
    return similarity_matrix(centroids, std::move(names));
}

AuthorGraph build_graph(const SimilarityMatrix& m, std::optional<double> threshold) {
    if (threshold && !(*threshold >= 0.0 && *threshold <= 1.0))
        fail(ErrorKind::Validation, "threshold must lie in [0, 1]");
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && !(m(i, j) >= 0.0 && m(i, j) <= 1.0))
                fail(ErrorKind::Validation, "similarity matrix is not rescaled to [0, 1]; "
                                            "apply min-max rescaling first");

    AuthorGraph g;
    g.nodes = m.labels();
    g.connectivity.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = m(i, j);
            const bool keep = threshold ? w >= *threshold : w > 0.0;
            if (!keep) continue;
            g.edges.push_back({i, j, w});
            g.connectivity[i][j] = w;
            g.connectivity[j][i] = w;
        }
    return g;
}

namespace {

std::string dot_id(const std::string& name) {
    std::string id;
    for (unsigned char c : name) id += std::isalnum(c) || c == '_' ? static_cast<char>(c) : '_';
    if (id.empty() || std::isdigit(static_cast<unsigned char>(id[0]))) id.insert(0, "n");
    return id;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string to_dot(const AuthorGraph& g) {
    std::vector<std::string> ids;
    std::set<std::string> used;
    for (const auto& name : g.nodes) {
        std::string id = dot_id(name);
        for (int suffix = 2; used.contains(id); ++suffix) id = dot_id(name) + "_" + std::to_string(suffix);
        used.insert(id);
        ids.push_back(id);
    }
    std::ostringstream out;
    out << "graph authors {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out << "  " << ids[i] << " [label=" << quoted(g.nodes[i]) << "];\n";
    for (const auto& e : g.edges)
        out << "  " << ids[e.source] << " -- " << ids[e.target] << " [weight=" << csv::number(e.weight)
            << "];\n";
    out << "}\n";
    return out.str();
}

std::string to_graphml(const AuthorGraph& g) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <graph id=\"authors\" edgedefault=\"undirected\">\n";
    for (const auto& name : g.nodes) out << "    <node id=\"" << xml_escape(name) << "\"/>\n";
    for (const auto& e : g.edges)
        out << "    <edge source=\"" << xml_escape(g.nodes[e.source]) << "\" target=\""
            << xml_escape(g.nodes[e.target]) << "\"><data key=\"weight\">" << csv::number(e.weight)
            << "</data></edge>\n";
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

std::string to_json(const AuthorGraph& g) {
    nlohmann::ordered_json j;
    j["nodes"] = g.nodes;
    j["edges"] = json::array();
    for (const auto& e : g.edges) {
        nlohmann::ordered_json edge;
        edge["source"] = g.nodes[e.source];
        edge["target"] = g.nodes[e.target];
        edge["weight"] = e.weight;
        j["edges"].push_back(std::move(edge));
    }
    return j.dump(2) + "\n";
}

}  // namespace

std::string graph_to_string(const AuthorGraph& graph, GraphFormat format) {
    switch (format) {
        case GraphFormat::Dot: return to_dot(graph);
        case GraphFormat::GraphML: return to_graphml(graph);
        case GraphFormat::Json: return to_json(graph);
    }
    return {};
}

void export_graph(const AuthorGraph& graph, GraphFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << graph_to_string(graph, format);
    if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

AuthorGraph import_graph_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Load, "cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, "graph JSON '" + path.string() + "': " + e.what());
    }
    AuthorGraph g;
    try {
        g.nodes = j.at("nodes").get<std::vector<std::string>>();
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i], i);
        const std::size_t n = g.nodes.size();
        g.connectivity.assign(n, std::vector<double>(n, 0.0));
        for (const auto& e : j.at("edges")) {
            auto s = index.at(e.at("source").get<std::string>());
            auto t = index.at(e.at("target").get<std::string>());
            if (s > t) std::swap(s, t);
            const double w = e.at("weight").get<double>();
            g.edges.push_back({s, t, w});
            g.connectivity[s][t] = w;
            g.connectivity[t][s] = w;
        }
    } catch (const std::exception& e) {
        fail(ErrorKind::Format, "graph JSON '" + path.string() + "' is malformed: " + e.what());
    }
    return g;
}

}  // namespace stylo

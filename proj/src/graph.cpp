#include "lrpd/graph.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lrpd {

void Graph::add_edge(std::size_t u, std::size_t v) {
    if (u == v) throw std::invalid_argument("Graph::add_edge: loop");
    if (u > v) std::swap(u, v);
    if (v >= n_) throw std::invalid_argument("Graph::add_edge: vertex out of range");
    edges_.insert({u, v});
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::nonedges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (!edges_.count({i, j})) out.push_back({i, j});
    return out;
}

std::size_t Graph::degree(std::size_t v) const {
    std::size_t d = 0;
    for (const auto& e : edges_)
        if (e.first == v || e.second == v) ++d;
    return d;
}

std::size_t Graph::max_degree() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < n_; ++v) best = std::max(best, degree(v));
    return best;
}

Graph parse_edge_list(std::istream& in) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t declared_n = 0;
    std::size_t max_v = 0;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "n") {
            if (!(ls >> declared_n)) throw std::invalid_argument("edge list: bad 'n' line");
            continue;
        }
        std::size_t u = 0, v = 0;
        try {
            u = std::stoull(first);
        } catch (...) {
            throw std::invalid_argument("edge list: bad token '" + first + "'");
        }
        if (!(ls >> v)) throw std::invalid_argument("edge list: missing second endpoint");
        if (u == 0 || v == 0) throw std::invalid_argument("edge list: vertices are 1-indexed");
        pairs.push_back({u - 1, v - 1});
        max_v = std::max({max_v, u, v});
    }
    Graph g(std::max(declared_n, max_v));
    for (auto [u, v] : pairs) g.add_edge(u, v);
    return g;
}

Graph parse_dimacs_col(std::istream& in) {
    Graph g;
    bool have_header = false;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "c") continue;
        if (tag == "p") {
            std::string kind;
            std::size_t n = 0, m = 0;
            if (!(ls >> kind >> n >> m) || (kind != "edge" && kind != "edges"))
                throw std::invalid_argument("dimacs: bad problem line");
            g = Graph(n);
            have_header = true;
        } else if (tag == "e") {
            if (!have_header) throw std::invalid_argument("dimacs: edge before problem line");
            std::size_t u = 0, v = 0;
            if (!(ls >> u >> v) || u == 0 || v == 0)
                throw std::invalid_argument("dimacs: bad edge line");
            if (u != v) g.add_edge(u - 1, v - 1);
        }
    }
    if (!have_header) throw std::invalid_argument("dimacs: missing problem line");
    return g;
}

Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".col") return parse_dimacs_col(in);
    // sniff: DIMACS files start with 'c' or 'p' lines
    std::string first;
    std::streampos pos = in.tellg();
    if (std::getline(in, first)) {
        in.seekg(pos);
        if (!first.empty() && (first[0] == 'c' || first[0] == 'p')) return parse_dimacs_col(in);
    }
    in.clear();
    in.seekg(0);
    return parse_edge_list(in);
}

std::string format_edge_list(const Graph& g) {
    std::ostringstream out;
    out << "n " << g.vertex_count() << "\n";
    for (auto [u, v] : g.edges()) out << (u + 1) << " " << (v + 1) << "\n";
    return out.str();
}

}  // namespace lrpd

#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lrpd {

// Finite simple undirected loopless graph on vertices 0..n-1.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : n_(n) {}

    static Graph complete(std::size_t n) {
        Graph g(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
        return g;
    }
    static Graph path(std::size_t n) {
        Graph g(n);
        for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
        return g;
    }

    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }

    void add_vertex() { ++n_; }
    void add_edge(std::size_t u, std::size_t v);
    bool has_edge(std::size_t u, std::size_t v) const {
        if (u > v) std::swap(u, v);
        return edges_.count({u, v}) > 0;
    }

    // sorted (u < v), lexicographic
    std::vector<std::pair<std::size_t, std::size_t>> edges() const {
        return {edges_.begin(), edges_.end()};
    }
    std::vector<std::pair<std::size_t, std::size_t>> nonedges() const;

    std::size_t degree(std::size_t v) const;
    std::size_t max_degree() const;

private:
    std::size_t n_ = 0;
    std::set<std::pair<std::size_t, std::size_t>> edges_;
};

// 1-indexed "u v" pairs, one per line; '#' comments. Isolated vertices can be
// declared with a single "n <count>" header line (optional).
Graph parse_edge_list(std::istream& in);
// DIMACS .col: "p edge n m" plus "e u v" lines.
Graph parse_dimacs_col(std::istream& in);
Graph read_graph_file(const std::string& path);  // picks a parser by extension/content
std::string format_edge_list(const Graph& g);

}  // namespace lrpd

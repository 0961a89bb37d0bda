#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mivspool/matrix.hpp"

namespace mivspool {

using Vertex = std::int32_t;

// Immutable undirected attributed graph in compressed sparse row form.
// Adjacency is symmetric, per-row sorted, free of self loops and duplicates;
// treat instances as read-only after construction.
struct Graph {
    Vertex n = 0;
    std::vector<std::int64_t> row_ptr;  // size n + 1
    std::vector<Vertex> col_idx;
    Matrix features;                    // n x f
    std::vector<int> node_labels;       // empty, or one label per vertex
    int graph_label = -1;               // -1 when unset

    std::int64_t edge_count() const { return static_cast<std::int64_t>(col_idx.size()) / 2; }
    std::size_t feature_dim() const { return features.cols; }

    int degree(Vertex v) const { return static_cast<int>(row_ptr[v + 1] - row_ptr[v]); }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {col_idx.data() + row_ptr[v], static_cast<std::size_t>(row_ptr[v + 1] - row_ptr[v])};
    }

    bool has_edge(Vertex u, Vertex v) const;
};

// Validates and canonicalizes: symmetrizes the edge list, drops duplicates
// and self loops, sorts neighbor lists. An empty feature matrix defaults to
// a constant-1 column.
Graph build_graph(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                  Matrix features = {}, std::vector<int> node_labels = {}, int graph_label = -1);

// {v} union its neighbors, sorted ascending.
std::vector<Vertex> closed_neighborhood(const Graph& g, Vertex v);

struct Components {
    int count = 0;
    std::vector<int> id;  // dense component ids from 0, in order of first visit
};
Components connected_components(const Graph& g);

struct GraphStats {
    Vertex n = 0;
    std::int64_t edges = 0;
    int max_degree = 0;
    double density = 0.0;  // 2|E| / (n(n-1)); 0 for n < 2
};
GraphStats graph_stats(const Graph& g);

// Unique undirected edges as (u, v) with u < v, sorted.
std::vector<std::pair<Vertex, Vertex>> edge_list(const Graph& g);

// Relabels vertex i to perm[i]; perm must be a permutation of [0, n).
Graph permute_graph(const Graph& g, const std::vector<Vertex>& perm);

}  // namespace mivspool

#include "mivspool/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mivspool {

bool Graph::has_edge(Vertex u, Vertex v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

Graph build_graph(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges, Matrix features,
                  std::vector<int> node_labels, int graph_label) {
    if (n < 0) throw std::invalid_argument("vertex count must be nonnegative");
    if (features.rows == 0 && features.cols == 0) features = constant_features(n);
    if (features.rows != static_cast<std::size_t>(n))
        throw std::invalid_argument("feature matrix has " + std::to_string(features.rows) +
                                    " rows for " + std::to_string(n) + " vertices");
    if (!node_labels.empty() && node_labels.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("node label count does not match vertex count");

    std::vector<std::pair<Vertex, Vertex>> dir;
    dir.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                        ") out of range for n=" + std::to_string(n));
        if (u == v) continue;
        dir.emplace_back(u, v);
        dir.emplace_back(v, u);
    }
    std::sort(dir.begin(), dir.end());
    dir.erase(std::unique(dir.begin(), dir.end()), dir.end());

    Graph g;
    g.n = n;
    g.features = std::move(features);
    g.node_labels = std::move(node_labels);
    g.graph_label = graph_label;
    g.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    g.col_idx.reserve(dir.size());
    std::size_t pos = 0;
    for (Vertex v = 0; v < n; ++v) {
        while (pos < dir.size() && dir[pos].first == v) {
            g.col_idx.push_back(dir[pos].second);
            ++pos;
        }
        g.row_ptr[static_cast<std::size_t>(v) + 1] = static_cast<std::int64_t>(g.col_idx.size());
    }
    return g;
}

std::vector<Vertex> closed_neighborhood(const Graph& g, Vertex v) {
    if (v < 0 || v >= g.n) throw std::out_of_range("vertex out of range");
    auto nb = g.neighbors(v);
    std::vector<Vertex> out;
    out.reserve(nb.size() + 1);
    bool placed = false;
    for (Vertex u : nb) {
        if (!placed && v < u) {
            out.push_back(v);
            placed = true;
        }
        out.push_back(u);
    }
    if (!placed) out.push_back(v);
    return out;
}

Components connected_components(const Graph& g) {
    Components comp;
    comp.id.assign(g.n, -1);
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < g.n; ++s) {
        if (comp.id[s] != -1) continue;
        const int c = comp.count++;
        comp.id[s] = c;
        stack.assign(1, s);
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex u : g.neighbors(v)) {
                if (comp.id[u] == -1) {
                    comp.id[u] = c;
                    stack.push_back(u);
                }
            }
        }
    }
    return comp;
}

GraphStats graph_stats(const Graph& g) {
    GraphStats st;
    st.n = g.n;
    st.edges = g.edge_count();
    for (Vertex v = 0; v < g.n; ++v) st.max_degree = std::max(st.max_degree, g.degree(v));
    if (g.n > 1)
        st.density = 2.0 * static_cast<double>(st.edges) /
                     (static_cast<double>(g.n) * (static_cast<double>(g.n) - 1.0));
    return st;
}

std::vector<std::pair<Vertex, Vertex>> edge_list(const Graph& g) {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(static_cast<std::size_t>(g.edge_count()));
    for (Vertex v = 0; v < g.n; ++v)
        for (Vertex u : g.neighbors(v))
            if (v < u) out.emplace_back(v, u);
    return out;
}

Graph permute_graph(const Graph& g, const std::vector<Vertex>& perm) {
    if (perm.size() != static_cast<std::size_t>(g.n))
        throw std::invalid_argument("permutation size does not match vertex count");
    std::vector<std::uint8_t> seen(g.n, 0);
    for (Vertex p : perm) {
        if (p < 0 || p >= g.n || seen[p]) throw std::invalid_argument("not a permutation");
        seen[p] = 1;
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(static_cast<std::size_t>(g.edge_count()));
    for (auto [u, v] : edge_list(g)) edges.emplace_back(perm[u], perm[v]);
    Matrix feat(static_cast<std::size_t>(g.n), g.features.cols);
    for (Vertex v = 0; v < g.n; ++v) {
        auto src = g.features.row(v);
        auto dst = feat.row(static_cast<std::size_t>(perm[v]));
        std::copy(src.begin(), src.end(), dst.begin());
    }
    std::vector<int> labels;
    if (!g.node_labels.empty()) {
        labels.resize(g.n);
        for (Vertex v = 0; v < g.n; ++v) labels[perm[v]] = g.node_labels[v];
    }
    return build_graph(g.n, edges, std::move(feat), std::move(labels), g.graph_label);
}

}  // namespace mivspool

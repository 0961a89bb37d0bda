#include "mivspool/topk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mivspool {

TopkResult topk_select(const Graph& g, const ScoreVector& s, double ratio) {
    if (s.size() != static_cast<std::size_t>(g.n))
        throw std::invalid_argument("score length does not match vertex count");
    if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("ratio must be in (0, 1]");
    TopkResult r;
    r.k = std::min<Vertex>(g.n, static_cast<Vertex>(std::ceil(ratio * static_cast<double>(g.n))));
    std::vector<Vertex> order(g.n);
    std::iota(order.begin(), order.end(), Vertex{0});
    std::partial_sort(order.begin(), order.begin() + r.k, order.end(), [&s](Vertex a, Vertex b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return a < b;
    });
    r.idx.assign(order.begin(), order.begin() + r.k);
    std::sort(r.idx.begin(), r.idx.end());
    return r;
}

PooledLevel topk_reduce(const Graph& g, const TopkResult& sel, const ScoreVector& s) {
    ReductionMatrix S;
    S.rows = g.n;
    S.cols = sel.k;
    S.survivor_of_column = sel.idx;
    S.assignment.assign(g.n, kUnassigned);
    for (Vertex c = 0; c < sel.k; ++c) S.assignment[sel.idx[c]] = c;

    Matrix feats(static_cast<std::size_t>(sel.k), g.feature_dim());
    for (Vertex c = 0; c < sel.k; ++c) {
        const Vertex v = sel.idx[c];
        auto src = g.features.row(v);
        auto dst = feats.row(c);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] * s[v];
    }
    auto edges = reduce_adjacency(g, S);

    PooledLevel lvl;
    lvl.graph = build_graph(S.cols, edges, std::move(feats), {}, g.graph_label);
    lvl.S = std::move(S);
    lvl.scores = s;
    return lvl;
}

}  // namespace mivspool

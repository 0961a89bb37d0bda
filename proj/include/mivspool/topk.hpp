#pragma once

#include <vector>

#include "mivspool/graph.hpp"
#include "mivspool/reduction.hpp"
#include "mivspool/scoring.hpp"

namespace mivspool {

struct TopkResult {
    std::vector<Vertex> idx;  // kept vertices, sorted ascending
    Vertex k = 0;
};

// Keeps the ceil(ratio * n) highest-scoring vertices (ties: lower id).
// Requires 0 < ratio <= 1.
TopkResult topk_select(const Graph& g, const ScoreVector& s, double ratio);

// Induced-subgraph pooling: kept vertex v becomes its own cluster with
// features X_v * s_v; dropped vertices map to no cluster, so the reduction
// matrix is selective and pooled edges are exactly the induced edges.
PooledLevel topk_reduce(const Graph& g, const TopkResult& sel, const ScoreVector& s);

}  // namespace mivspool

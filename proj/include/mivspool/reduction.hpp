#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "mivspool/graph.hpp"
#include "mivspool/matrix.hpp"
#include "mivspool/mivs.hpp"
#include "mivspool/scoring.hpp"

namespace mivspool {

inline constexpr Vertex kUnassigned = -1;

// Sparse n_l x n_{l+1} reduction matrix with at most one nonzero per row.
// assignment[v] is the column of v's cluster, or kUnassigned when v maps to
// no cluster (selective pooling). survivor_of_column[c] is the vertex that
// owns column c; columns are ordered by ascending owner id.
struct ReductionMatrix {
    Vertex rows = 0;
    Vertex cols = 0;
    std::vector<Vertex> assignment;
    std::vector<Vertex> survivor_of_column;

    bool selective() const {
        for (Vertex a : assignment)
            if (a == kUnassigned) return true;
        return false;
    }
};

// Assigns each non-survivor to its highest-scoring surviving neighbor
// (ties: lower id). Requires a maximal survivor set so every non-survivor
// has at least one surviving neighbor.
ReductionMatrix build_assignment(const Graph& g, const ScoreVector& s, const MivsResult& mivs);

// Score-weighted cluster mean: row c of the result is
//   sum_{v in cluster c} s_v X_v / sum_{v in cluster c} s_v.
// Cluster members are accumulated in (score, id) ascending order, making the
// result bytes invariant under vertex relabeling when scores are distinct.
Matrix reduce_features(const Graph& g, const ScoreVector& s, const ReductionMatrix& S);

// Same map computed densely as a score-scaled reduction followed by column
// normalization. Cross-check path for tests.
Matrix reduce_features_matrix(const Graph& g, const ScoreVector& s, const ReductionMatrix& S);

// Plain per-cluster feature sum (no score weighting, no normalization).
Matrix reduce_features_sum(const Graph& g, const ReductionMatrix& S);

// Edges of the pooled graph: {a,b} iff some base edge joins cluster a to
// cluster b, a != b; rows with kUnassigned contribute nothing. Returned
// with a < b, sorted, deduplicated.
std::vector<std::pair<Vertex, Vertex>> reduce_adjacency(const Graph& g, const ReductionMatrix& S);

struct PooledLevel {
    Graph graph;
    ReductionMatrix S;
    ScoreVector scores;               // scores on the level's input graph
    std::optional<MivsResult> mivs;   // empty for top-k pooling
};

PooledLevel pool_once_scored(const Graph& g, const ScoreVector& s, PoolMode mode = PoolMode::plain);
PooledLevel pool_once(const Graph& g, const ScoreParams& params, PoolMode mode = PoolMode::plain);

struct Hierarchy {
    Graph base;
    std::vector<PooledLevel> levels;
};

// Repeated pooling. Level 1 uses params.seed, each further level re-mixes the
// previous level's seed. Stops early when a level reaches n <= 1.
Hierarchy pool_hierarchy(const Graph& g, const ScoreParams& params, int levels,
                         PoolMode mode = PoolMode::plain);

// Directional derivatives of reduce_features at a fixed assignment. The map
// is linear in X and rational in s, so the Jacobian-vector products below are
// exact; selection changes under score perturbation are deliberately frozen.
struct PoolJacobian {
    Vertex rows = 0;
    Vertex cols = 0;
    std::size_t f = 0;
    std::vector<Vertex> assignment;
    ScoreVector scores;
    std::vector<double> cluster_mass;  // sum of member scores per column
    Matrix base_features;
    Matrix reduced_features;

    Matrix jvp_features(const Matrix& dX) const;
    Matrix jvp_scores(std::span<const double> ds) const;
};

PoolJacobian pool_gradients(const Graph& g, const ScoreVector& s, const ReductionMatrix& S);

// One JSON object per line: a header, then each level's edges, assignment,
// and survivor columns.
void export_hierarchy_jsonl(const Hierarchy& h, std::ostream& out);

// Rows of space-separated %.17g values.
void write_features_text(const Matrix& m, std::ostream& out);

}  // namespace mivspool

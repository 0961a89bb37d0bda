#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "mivspool/graph.hpp"

namespace mivspool {

// Per-vertex relevance values in [0, 1]; drives both survivor selection and
// weighted aggregation.
using ScoreVector = std::vector<double>;

enum class Strategy {
    random,         // i.i.d. uniform [0, 1)
    projection,     // normalized projection of the features, squashed by a sigmoid
    gcn_attention,  // one symmetric-normalized propagation step, squashed by a sigmoid
    // a multi-view strategy slot is reserved here
};

struct ScoreParams {
    Strategy strategy = Strategy::random;
    std::uint64_t seed = 0;
    std::vector<double> weights;  // projection vector or f x 1 column, per strategy; may be
                                  // empty for gcn_attention/projection (seeded init)
};

ScoreVector score_random(const Graph& g, std::uint64_t seed);

// sigmoid(<X_i, p> / |p|); errors on a zero or mismatched projection vector.
ScoreVector score_projection(const Graph& g, std::span<const double> projection);

// One propagation step over the self-looped, degree-normalized adjacency:
// sigmoid of sum_{j in N(i) + i} (X_j w) / sqrt((d_i+1)(d_j+1)).
// Empty weights are initialized from the seed, uniform in [-1/sqrt(f), 1/sqrt(f)].
ScoreVector score_gcn_attention(const Graph& g, std::span<const double> weights,
                                std::uint64_t seed_if_unset = 0);

ScoreVector compute_scores(const Graph& g, const ScoreParams& params);

// JSON file {"strategy": "...", "weights": [...], "seed": ...}; weights and seed optional.
ScoreParams load_score_params(const std::filesystem::path& file);

const char* strategy_name(Strategy s);
Strategy strategy_from_name(std::string_view name);

}  // namespace mivspool

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mivspool/dataset.hpp"
#include "mivspool/scoring.hpp"

namespace mivspool {

enum class PoolMode { plain, comp };

// Snapshot of the selection state after one synchronous iteration.
struct MivsState {
    std::vector<std::uint8_t> survivor;   // monotone nondecreasing across iterations
    std::vector<std::uint8_t> candidate;  // monotone nonincreasing; disjoint from survivor
    int iteration = 0;
};

struct MivsResult {
    std::vector<Vertex> survivors;  // sorted ascending
    std::vector<std::uint8_t> is_survivor;
    int iterations = 0;
    std::vector<Vertex> relaxed_added;  // sorted; nonempty only in comp mode
    // Closed-neighborhood slots examined by the selection scans. Survivor
    // bookkeeping (blocking, list compaction) is amortized and not counted.
    std::uint64_t work_touches = 0;
    std::vector<std::uint64_t> touches_per_iteration;  // each <= 2|E| + n
};

// Synchronous local-maxima selection of a maximal independent vertex set.
// Each iteration promotes every candidate whose score is maximal over the
// candidates of its closed neighborhood (ties: lower id wins), then drops
// candidates with a survivor in their closed neighborhood; repeats until no
// candidate remains. All updates within an iteration read the previous
// iteration's state, so results are independent of vertex visit order.
MivsResult compute_mivs(const Graph& g, const ScoreVector& s, std::vector<MivsState>* trace = nullptr);

// Same selection, then forces the result up to ceil(n/2) survivors by adding
// the highest-scoring non-survivors (ties: lower id). Never removes a
// survivor; independence may break, maximality still holds.
MivsResult compute_mivs_comp(const Graph& g, const ScoreVector& s, std::vector<MivsState>* trace = nullptr);

struct MivsCheck {
    bool independent = false;  // no edge joins two survivors
    bool maximal = false;      // every non-survivor has a surviving neighbor
};
// Exhaustive edge scan, O(|E|). Independent of compute_mivs.
MivsCheck verify_mivs_bruteforce(const Graph& g, std::span<const Vertex> survivors);

// Enumerates every maximal independent set by subset scan; n <= 20.
// Oracle path only, shares no code with compute_mivs.
std::vector<std::vector<Vertex>> enumerate_maximal_independent_sets(const Graph& g);

struct LevelStats {
    double mean = 0;
    double stddev = 0;  // population standard deviation
    int max = 0;
    int samples = 0;
};

// Pools every graph `levels` times and aggregates the per-level iteration
// counts. Graph i is scored with params.seed replaced by seed + i.
std::vector<LevelStats> iteration_stats(const Dataset& ds, const ScoreParams& params, int levels,
                                        std::uint64_t seed, PoolMode mode = PoolMode::plain);

}  // namespace mivspool

#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mivspool/graph.hpp"
#include "mivspool/reduction.hpp"
#include "mivspool/scoring.hpp"

namespace mivspool {

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PoolOptions {
    std::string method = "mivs";  // mivs | mivs-comp | topk
    ScoreParams score;
    int levels = 1;
    double ratio = 0.5;  // topk only
    bool timing = false;
    unsigned threads = 0;  // 0 = hardware concurrency
    bool check_invariants = true;
};

struct ReportRow {
    int graph = 0;
    std::string method;
    int level = 0;
    Vertex n_before = 0;
    Vertex n_after = 0;
    double decimation_ratio = 0;
    double density_before = 0;
    double density_after = 0;
    int components_before = 0;
    int components_after = 0;
    int mivs_iterations = 0;  // -1 for topk
    std::int64_t score_ns = 0;
    std::int64_t select_ns = 0;
    std::int64_t reduce_ns = 0;
    std::int64_t wall_time_ns = 0;
};

// Pools every graph per the options, checking structural invariants unless
// disabled. Rows come back grouped by graph in input order regardless of the
// thread count.
std::vector<ReportRow> run_pool(const std::vector<Graph>& graphs, const PoolOptions& opt);

// One JSON object per row plus a trailing aggregate object. Timing fields
// appear only when opt.timing is set, keeping default output byte-identical
// across runs.
std::string report_to_jsonl(const std::vector<ReportRow>& rows, const PoolOptions& opt);
std::string report_to_csv(const std::vector<ReportRow>& rows, const PoolOptions& opt);

// Mirrors run_pool's per-level construction for one graph, for export.
Hierarchy pool_hierarchy_method(const Graph& g, const PoolOptions& opt);

struct VerifyOptions {
    Vertex max_n = 12;        // exhaustive family checks up to this size
    bool exhaustive = false;  // also compare against enumerated maximal sets
    bool inject_corruption = false;  // deliberately break one result; detector must fire
    std::uint64_t seed = 1;
    int random_graphs = 200;
};

struct VerifyOutcome {
    long checks = 0;
    long violations = 0;
};

// Runs the invariant battery over generated families and random graphs,
// logging one line per violation. Throws InvariantViolation if any check
// fails (including the injected one).
VerifyOutcome run_verify(const VerifyOptions& opt, std::ostream& log);

struct BenchRow {
    Vertex n = 0;
    std::int64_t score_ns = 0;
    std::int64_t select_ns = 0;
    std::int64_t reduce_ns = 0;
    std::int64_t total_ns = 0;
    int iterations = 0;
};

// Times one full pooling pass on sparse random graphs of the given sizes,
// keeping the fastest of `reps` repetitions per size.
std::vector<BenchRow> run_bench(const std::vector<Vertex>& sizes, std::uint64_t seed, int reps);

// Least-squares slope of log(total_ns) against log(n).
double loglog_slope(const std::vector<BenchRow>& rows);

}  // namespace mivspool

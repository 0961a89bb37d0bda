#include "mivspool/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "mivspool/dataset.hpp"
#include "mivspool/mivs.hpp"
#include "mivspool/rng.hpp"
#include "mivspool/topk.hpp"

namespace mivspool {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

void validate_options(const PoolOptions& opt) {
    if (opt.method != "mivs" && opt.method != "mivs-comp" && opt.method != "topk")
        throw std::invalid_argument("unknown method: " + opt.method);
    if (opt.levels < 1) throw std::invalid_argument("levels must be positive");
    if (opt.method == "topk" && !(opt.ratio > 0.0 && opt.ratio <= 1.0))
        throw std::invalid_argument("ratio must be in (0, 1]");
}

// Cross-cluster base edges, rebuilt directly from the assignment.
std::vector<std::pair<Vertex, Vertex>> quotient_edges(const Graph& g, const ReductionMatrix& S) {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (auto [u, v] : edge_list(g)) {
        const Vertex a = S.assignment[u];
        const Vertex b = S.assignment[v];
        if (a == kUnassigned || b == kUnassigned || a == b) continue;
        out.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void validate_level(int graph_idx, int level, const Graph& before, const PooledLevel& lvl,
                    const std::string& method) {
    auto fail = [&](const std::string& what) {
        throw InvariantViolation("graph " + std::to_string(graph_idx) + " level " +
                                 std::to_string(level) + " (" + method + "): " + what);
    };
    const ReductionMatrix& S = lvl.S;
    if (S.rows != before.n) fail("reduction row count does not match input size");
    if (S.cols != lvl.graph.n) fail("reduction column count does not match output size");
    if (static_cast<Vertex>(S.survivor_of_column.size()) != S.cols)
        fail("column owner list has the wrong size");
    for (Vertex c = 0; c < S.cols; ++c) {
        const Vertex v = S.survivor_of_column[c];
        if (v < 0 || v >= before.n) fail("column owner out of range");
        if (c > 0 && S.survivor_of_column[c - 1] >= v) fail("column owners not strictly ascending");
        if (S.assignment[v] != c) fail("column owner not mapped to its own column");
    }
    for (Vertex v = 0; v < S.rows; ++v) {
        const Vertex c = S.assignment[v];
        if (c == kUnassigned) {
            if (method != "topk") fail("unassigned vertex under clustering pooling");
            continue;
        }
        if (c < 0 || c >= S.cols) fail("assignment column out of range");
    }
    if (method != "topk") {
        if (!lvl.mivs) fail("missing selection result");
        const MivsResult& m = *lvl.mivs;
        const MivsCheck chk = verify_mivs_bruteforce(before, m.survivors);
        if (!chk.maximal) fail("survivor set is not maximal");
        if (method == "mivs" && !chk.independent) fail("survivor set is not independent");
        if (method == "mivs-comp") {
            std::vector<Vertex> core;
            std::set_difference(m.survivors.begin(), m.survivors.end(), m.relaxed_added.begin(),
                                m.relaxed_added.end(), std::back_inserter(core));
            if (!verify_mivs_bruteforce(before, core).independent)
                fail("pre-relaxation survivor core is not independent");
            if (static_cast<Vertex>(m.survivors.size()) < (before.n + 1) / 2)
                fail("relaxed survivor count below half the input size");
        }
        for (Vertex v = 0; v < S.rows; ++v) {
            if (m.is_survivor[v]) continue;
            const Vertex owner = S.survivor_of_column[S.assignment[v]];
            if (!before.has_edge(v, owner)) fail("vertex assigned to a non-neighbor");
        }
        if (connected_components(before).count != connected_components(lvl.graph).count)
            fail("component count changed");
    }
    if (quotient_edges(before, S) != edge_list(lvl.graph)) fail("pooled adjacency mismatch");
    if (before.n >= 1 && (lvl.graph.n < 1 || lvl.graph.n > before.n))
        fail("pooled size out of range");
}

std::vector<ReportRow> pool_graph_rows(int gi, const Graph& g0, const PoolOptions& opt) {
    std::vector<ReportRow> rows;
    std::vector<Graph> owned;
    owned.reserve(opt.levels);  // keeps `cur` stable across push_back
    const Graph* cur = &g0;
    ScoreParams p = opt.score;
    for (int level = 1; level <= opt.levels; ++level) {
        if (cur->n <= 1) break;
        const GraphStats before_stats = graph_stats(*cur);
        const int comps_before = connected_components(*cur).count;

        const auto t0 = Clock::now();
        ScoreVector scores = compute_scores(*cur, p);
        const auto t1 = Clock::now();
        auto t2 = t1;
        PooledLevel lvl;
        int iters = -1;
        if (opt.method == "topk") {
            TopkResult sel = topk_select(*cur, scores, opt.ratio);
            t2 = Clock::now();
            lvl = topk_reduce(*cur, sel, scores);
        } else {
            MivsResult mivs = opt.method == "mivs-comp" ? compute_mivs_comp(*cur, scores)
                                                        : compute_mivs(*cur, scores);
            t2 = Clock::now();
            iters = mivs.iterations;
            lvl.S = build_assignment(*cur, scores, mivs);
            Matrix feats = reduce_features(*cur, scores, lvl.S);
            auto edges = reduce_adjacency(*cur, lvl.S);
            lvl.graph = build_graph(lvl.S.cols, edges, std::move(feats), {}, cur->graph_label);
            lvl.scores = std::move(scores);
            lvl.mivs = std::move(mivs);
        }
        const auto t3 = Clock::now();
        if (opt.check_invariants) validate_level(gi, level, *cur, lvl, opt.method);

        ReportRow row;
        row.graph = gi;
        row.method = opt.method;
        row.level = level;
        row.n_before = cur->n;
        row.n_after = lvl.graph.n;
        row.decimation_ratio = static_cast<double>(row.n_after) / static_cast<double>(row.n_before);
        row.density_before = before_stats.density;
        row.density_after = graph_stats(lvl.graph).density;
        row.components_before = comps_before;
        row.components_after = connected_components(lvl.graph).count;
        row.mivs_iterations = iters;
        row.score_ns = ns_between(t0, t1);
        row.select_ns = ns_between(t1, t2);
        row.reduce_ns = ns_between(t2, t3);
        row.wall_time_ns = ns_between(t0, t3);
        rows.push_back(std::move(row));

        owned.push_back(std::move(lvl.graph));
        cur = &owned.back();
        p.seed = rng::splitmix64(p.seed);
    }
    return rows;
}

}  // namespace

std::vector<ReportRow> run_pool(const std::vector<Graph>& graphs, const PoolOptions& opt) {
    validate_options(opt);
    std::vector<std::vector<ReportRow>> per(graphs.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= graphs.size()) return;
            try {
                per[i] = pool_graph_rows(static_cast<int>(i), graphs[i], opt);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::size_t n_threads = opt.threads ? opt.threads : std::thread::hardware_concurrency();
    n_threads = std::max<std::size_t>(1, std::min(n_threads, graphs.size()));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<ReportRow> rows;
    for (auto& p : per) rows.insert(rows.end(), std::make_move_iterator(p.begin()),
                                    std::make_move_iterator(p.end()));
    return rows;
}

std::string report_to_jsonl(const std::vector<ReportRow>& rows, const PoolOptions& opt) {
    using json = nlohmann::ordered_json;
    std::string out;
    double sum_ratio = 0, sum_iters = 0;
    std::int64_t total_wall = 0;
    long iter_rows = 0;
    int graphs_seen = 0, last_graph = -1;
    for (const ReportRow& r : rows) {
        json j;
        j["record"] = "graph";
        j["graph"] = r.graph;
        j["method"] = r.method;
        j["level"] = r.level;
        j["n_before"] = r.n_before;
        j["n_after"] = r.n_after;
        j["decimation_ratio"] = r.decimation_ratio;
        j["density_before"] = r.density_before;
        j["density_after"] = r.density_after;
        j["components_before"] = r.components_before;
        j["components_after"] = r.components_after;
        j["mivs_iterations"] = r.mivs_iterations;
        if (opt.timing) {
            j["score_ns"] = r.score_ns;
            j["select_ns"] = r.select_ns;
            j["reduce_ns"] = r.reduce_ns;
            j["wall_time_ns"] = r.wall_time_ns;
        }
        out += j.dump();
        out += '\n';
        sum_ratio += r.decimation_ratio;
        if (r.mivs_iterations >= 0) {
            sum_iters += r.mivs_iterations;
            ++iter_rows;
        }
        total_wall += r.wall_time_ns;
        if (r.graph != last_graph) {
            ++graphs_seen;
            last_graph = r.graph;
        }
    }
    json agg;
    agg["record"] = "aggregate";
    agg["method"] = opt.method;
    agg["score"] = strategy_name(opt.score.strategy);
    agg["seed"] = opt.score.seed;
    agg["levels"] = opt.levels;
    agg["graphs"] = graphs_seen;
    agg["rows"] = rows.size();
    if (!rows.empty()) agg["mean_decimation_ratio"] = sum_ratio / static_cast<double>(rows.size());
    if (iter_rows > 0) agg["mean_mivs_iterations"] = sum_iters / static_cast<double>(iter_rows);
    if (opt.timing) agg["total_wall_ns"] = total_wall;
    out += agg.dump();
    out += '\n';
    return out;
}

std::string report_to_csv(const std::vector<ReportRow>& rows, const PoolOptions& opt) {
    std::string out =
        "graph,method,level,n_before,n_after,decimation_ratio,density_before,density_after,"
        "components_before,components_after,mivs_iterations";
    if (opt.timing) out += ",score_ns,select_ns,reduce_ns,wall_time_ns";
    out += '\n';
    char buf[64];
    auto put_double = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
    };
    for (const ReportRow& r : rows) {
        out += std::to_string(r.graph);
        out += ',';
        out += r.method;
        out += ',';
        out += std::to_string(r.level);
        out += ',';
        out += std::to_string(r.n_before);
        out += ',';
        out += std::to_string(r.n_after);
        out += ',';
        put_double(r.decimation_ratio);
        out += ',';
        put_double(r.density_before);
        out += ',';
        put_double(r.density_after);
        out += ',';
        out += std::to_string(r.components_before);
        out += ',';
        out += std::to_string(r.components_after);
        out += ',';
        out += std::to_string(r.mivs_iterations);
        if (opt.timing) {
            out += ',';
            out += std::to_string(r.score_ns);
            out += ',';
            out += std::to_string(r.select_ns);
            out += ',';
            out += std::to_string(r.reduce_ns);
            out += ',';
            out += std::to_string(r.wall_time_ns);
        }
        out += '\n';
    }
    return out;
}

Hierarchy pool_hierarchy_method(const Graph& g, const PoolOptions& opt) {
    validate_options(opt);
    if (opt.method != "topk")
        return pool_hierarchy(g, opt.score, opt.levels,
                              opt.method == "mivs-comp" ? PoolMode::comp : PoolMode::plain);
    Hierarchy h;
    h.base = g;
    h.levels.reserve(opt.levels);
    ScoreParams p = opt.score;
    const Graph* cur = &h.base;
    for (int l = 0; l < opt.levels; ++l) {
        if (cur->n <= 1) break;
        ScoreVector scores = compute_scores(*cur, p);
        TopkResult sel = topk_select(*cur, scores, opt.ratio);
        h.levels.push_back(topk_reduce(*cur, sel, scores));
        cur = &h.levels.back().graph;
        p.seed = rng::splitmix64(p.seed);
    }
    return h;
}

namespace {

struct Checker {
    std::ostream& log;
    long checks = 0;
    long violations = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++violations;
            log << "violation: " << what << '\n';
        }
    }
};

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) return std::numeric_limits<double>::infinity();
    double worst = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

void check_reduction(Checker& ck, const Graph& g, const ScoreVector& s, const MivsResult& m,
                     const std::string& tag) {
    const ReductionMatrix S = build_assignment(g, s, m);
    const Matrix feats = reduce_features(g, s, S);
    ck.expect(max_abs_diff(feats, reduce_features_matrix(g, s, S)) <= 1e-12,
              tag + ": loop and matrix reductions disagree");
    const auto edges = reduce_adjacency(g, S);
    ck.expect(edges == quotient_edges(g, S), tag + ": pooled adjacency mismatch");
    const Graph pooled = build_graph(S.cols, edges, feats, {}, g.graph_label);
    ck.expect(connected_components(g).count == connected_components(pooled).count,
              tag + ": component count changed");
}

void check_graph(Checker& ck, const Graph& g, const ScoreParams& sp, bool exhaustive,
                 const std::string& tag) {
    const ScoreVector s = compute_scores(g, sp);
    const MivsResult plain = compute_mivs(g, s);
    const MivsCheck chk = verify_mivs_bruteforce(g, plain.survivors);
    ck.expect(chk.independent, tag + ": survivor set not independent");
    ck.expect(chk.maximal, tag + ": survivor set not maximal");
    ck.expect(plain.iterations <= g.n, tag + ": iteration count above vertex count");
    const std::uint64_t per_iter_bound =
        2 * static_cast<std::uint64_t>(g.edge_count()) + static_cast<std::uint64_t>(g.n);
    for (std::uint64_t t : plain.touches_per_iteration)
        ck.expect(t <= per_iter_bound, tag + ": per-iteration work above 2|E|+n");

    const MivsResult comp = compute_mivs_comp(g, s);
    ck.expect(verify_mivs_bruteforce(g, comp.survivors).maximal, tag + ": relaxed set not maximal");
    ck.expect(static_cast<Vertex>(comp.survivors.size()) >= (g.n + 1) / 2,
              tag + ": relaxed set below half size");
    ck.expect(std::includes(comp.survivors.begin(), comp.survivors.end(), plain.survivors.begin(),
                            plain.survivors.end()),
              tag + ": relaxation removed a survivor");
    std::vector<Vertex> core;
    std::set_difference(comp.survivors.begin(), comp.survivors.end(), comp.relaxed_added.begin(),
                        comp.relaxed_added.end(), std::back_inserter(core));
    ck.expect(verify_mivs_bruteforce(g, core).independent,
              tag + ": pre-relaxation core not independent");

    check_reduction(ck, g, s, plain, tag + " plain");
    check_reduction(ck, g, s, comp, tag + " comp");

    if (exhaustive && g.n <= 20) {
        const auto family = enumerate_maximal_independent_sets(g);
        ck.expect(std::find(family.begin(), family.end(), plain.survivors) != family.end(),
                  tag + ": survivors not among enumerated maximal independent sets");
    }

    const TopkResult sel = topk_select(g, s, 0.5);
    ck.expect(sel.k == (g.n + 1) / 2, tag + ": top-half count wrong");
    const PooledLevel tl = topk_reduce(g, sel, s);
    std::vector<Vertex> col_of(g.n, kUnassigned);
    for (Vertex c = 0; c < sel.k; ++c) col_of[sel.idx[c]] = c;
    std::vector<std::pair<Vertex, Vertex>> induced;
    for (auto [u, v] : edge_list(g))
        if (col_of[u] != kUnassigned && col_of[v] != kUnassigned)
            induced.emplace_back(col_of[u], col_of[v]);
    std::sort(induced.begin(), induced.end());
    ck.expect(induced == edge_list(tl.graph), tag + ": induced subgraph mismatch");
    bool gated = true;
    for (Vertex c = 0; c < sel.k && gated; ++c) {
        auto src = g.features.row(sel.idx[c]);
        auto dst = tl.graph.features.row(c);
        for (std::size_t j = 0; j < src.size(); ++j)
            if (dst[j] != src[j] * s[sel.idx[c]]) gated = false;
    }
    ck.expect(gated, tag + ": selected features not score-gated");

    const MivsResult again = compute_mivs(g, s);
    ck.expect(again.survivors == plain.survivors && again.iterations == plain.iterations,
              tag + ": selection not deterministic");
}

}  // namespace

VerifyOutcome run_verify(const VerifyOptions& opt, std::ostream& log) {
    if (opt.max_n < 1 || opt.max_n > 20)
        throw std::invalid_argument("max-n must be in [1, 20]");
    if (opt.random_graphs < 0) throw std::invalid_argument("random graph count must be nonnegative");
    Checker ck{log};

    std::vector<std::pair<std::string, Graph>> corpus;
    for (Vertex n = 1; n <= opt.max_n; ++n) {
        corpus.emplace_back("path:" + std::to_string(n), gen_family(Family::path, n));
        corpus.emplace_back("star:" + std::to_string(n), gen_family(Family::star, n));
        corpus.emplace_back("complete:" + std::to_string(n), gen_family(Family::complete, n));
        if (n >= 3) corpus.emplace_back("cycle:" + std::to_string(n), gen_family(Family::cycle, n));
    }
    for (Vertex r = 2; r * r <= opt.max_n; ++r)
        for (Vertex c = r; r * c <= opt.max_n; ++c)
            corpus.emplace_back("grid:" + std::to_string(r) + "x" + std::to_string(c),
                                gen_grid(r, c));
    const double ps[3] = {0.05, 0.2, 0.5};
    for (int i = 0; i < opt.random_graphs; ++i) {
        const Vertex n = 4 + static_cast<Vertex>(i % 197);
        corpus.emplace_back("er:" + std::to_string(i),
                            gen_random_graph(n, ps[i % 3], opt.seed + static_cast<std::uint64_t>(i)));
    }

    const Strategy strategies[3] = {Strategy::random, Strategy::projection,
                                    Strategy::gcn_attention};
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& [name, g] = corpus[i];
        for (Strategy st : strategies) {
            ScoreParams sp;
            sp.strategy = st;
            sp.seed = opt.seed + i;
            const bool exhaustive = opt.exhaustive && g.n <= opt.max_n;
            check_graph(ck, g, sp, exhaustive, name + " " + strategy_name(st));
        }
    }

    if (opt.inject_corruption) {
        // deliberately corrupt claim; the detector must flag it
        const Graph p3 = gen_family(Family::path, 3);
        const std::vector<Vertex> bad = {0, 1};
        ck.expect(verify_mivs_bruteforce(p3, bad).independent, "injected adjacent survivor pair");
    }

    log << "checks " << ck.checks << ", violations " << ck.violations << '\n';
    if (ck.violations > 0)
        throw InvariantViolation(std::to_string(ck.violations) + " invariant violation(s), " +
                                 std::to_string(ck.checks) + " checks");
    return {ck.checks, ck.violations};
}

std::vector<BenchRow> run_bench(const std::vector<Vertex>& sizes, std::uint64_t seed, int reps) {
    if (sizes.empty()) throw std::invalid_argument("no sizes given");
    reps = std::max(1, reps);
    std::vector<BenchRow> out;
    out.reserve(sizes.size());
    for (Vertex n : sizes) {
        if (n < 1) throw std::invalid_argument("sizes must be positive");
        const double p = std::min(1.0, 3.0 / static_cast<double>(n));
        const Graph g = gen_random_graph(n, p, rng::mix(seed, static_cast<std::uint64_t>(n)));
        BenchRow best;
        best.n = n;
        best.total_ns = std::numeric_limits<std::int64_t>::max();
        for (int rep = 0; rep < reps; ++rep) {
            const auto t0 = Clock::now();
            const ScoreVector s = score_random(g, seed + static_cast<std::uint64_t>(rep));
            const auto t1 = Clock::now();
            const MivsResult mivs = compute_mivs(g, s);
            const auto t2 = Clock::now();
            const ReductionMatrix S = build_assignment(g, s, mivs);
            Matrix feats = reduce_features(g, s, S);
            const auto edges = reduce_adjacency(g, S);
            const Graph pooled = build_graph(S.cols, edges, std::move(feats));
            const auto t3 = Clock::now();
            const std::int64_t total = ns_between(t0, t3);
            if (total < best.total_ns) {
                best.score_ns = ns_between(t0, t1);
                best.select_ns = ns_between(t1, t2);
                best.reduce_ns = ns_between(t2, t3);
                best.total_ns = total;
                best.iterations = mivs.iterations;
            }
        }
        out.push_back(best);
    }
    return out;
}

double loglog_slope(const std::vector<BenchRow>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("need at least two sizes");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const BenchRow& r : rows) {
        const double x = std::log(static_cast<double>(r.n));
        const double y = std::log(static_cast<double>(std::max<std::int64_t>(1, r.total_ns)));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(rows.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace mivspool

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mivspool/dataset.hpp"
#include "mivspool/mivs.hpp"
#include "mivspool/report.hpp"

namespace {

using namespace mivspool;

// exit codes: 2 bad flags or values, 3 IO failure, 4 invariant violation, 1 anything else
constexpr int kExitBadArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

Graph graph_from_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    auto bad = [&](const std::string& why) {
        throw std::invalid_argument("bad generator spec '" + spec + "': " + why);
    };
    auto to_count = [&](const std::string& tok) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            bad("'" + tok + "' is not an integer");
        }
        if (used != tok.size()) bad("'" + tok + "' is not an integer");
        if (v < 1 || v > 100000000) bad("count out of range");
        return static_cast<Vertex>(v);
    };
    const std::string& kind = parts[0];
    if (kind == "path" || kind == "cycle" || kind == "star" || kind == "complete") {
        if (parts.size() != 2) bad("expected " + kind + ":N");
        const Family fam = kind == "path"    ? Family::path
                           : kind == "cycle" ? Family::cycle
                           : kind == "star"  ? Family::star
                                             : Family::complete;
        return gen_family(fam, to_count(parts[1]));
    }
    if (kind == "grid") {
        if (parts.size() != 2) bad("expected grid:RxC");
        const std::size_t x = parts[1].find('x');
        if (x == std::string::npos) bad("expected grid:RxC");
        return gen_grid(to_count(parts[1].substr(0, x)), to_count(parts[1].substr(x + 1)));
    }
    if (kind == "er") {
        if (parts.size() != 4) bad("expected er:N:P:SEED");
        const Vertex n = to_count(parts[1]);
        double p = 0;
        std::size_t used = 0;
        try {
            p = std::stod(parts[2], &used);
        } catch (const std::exception&) {
            bad("'" + parts[2] + "' is not a number");
        }
        if (used != parts[2].size()) bad("'" + parts[2] + "' is not a number");
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(parts[3], &used);
        } catch (const std::exception&) {
            bad("'" + parts[3] + "' is not an integer");
        }
        if (used != parts[3].size()) bad("'" + parts[3] + "' is not an integer");
        return gen_random_graph(n, p, seed);
    }
    bad("unknown kind '" + kind + "'");
    return {};  // unreachable
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

struct InputFlags {
    std::vector<std::string> tud;  // DIR NAME
    std::vector<std::string> gen;
};

std::vector<Graph> load_inputs(const InputFlags& in) {
    if (!in.tud.empty() && !in.gen.empty())
        throw std::invalid_argument("--tud and --gen are mutually exclusive");
    if (!in.tud.empty()) {
        Dataset ds = load_tud(in.tud[0], in.tud[1]);
        return std::move(ds.graphs);
    }
    if (in.gen.empty()) throw std::invalid_argument("no input: pass --tud DIR NAME or --gen SPEC");
    std::vector<Graph> graphs;
    graphs.reserve(in.gen.size());
    for (const std::string& spec : in.gen) graphs.push_back(graph_from_spec(spec));
    return graphs;
}

int cmd_pool(const InputFlags& in, PoolOptions opt, bool score_given,
             const std::string& weights_file, const std::string& out_path, bool csv,
             const std::string& export_path) {
    if (!weights_file.empty()) {
        const ScoreParams file_params = load_score_params(weights_file);
        opt.score.weights = file_params.weights;
        if (!score_given) opt.score.strategy = file_params.strategy;
    }
    const std::vector<Graph> graphs = load_inputs(in);
    const std::vector<ReportRow> rows = run_pool(graphs, opt);
    write_output(out_path, csv ? report_to_csv(rows, opt) : report_to_jsonl(rows, opt));

    if (!export_path.empty()) {
        if (graphs.size() != 1)
            throw std::invalid_argument("--export needs exactly one input graph");
        const Hierarchy h = pool_hierarchy_method(graphs[0], opt);
        std::ofstream out(export_path, std::ios::binary);
        if (!out) throw IoError("cannot open " + export_path + " for writing");
        export_hierarchy_jsonl(h, out);
        if (!out) throw IoError("write failed: " + export_path);
        for (std::size_t l = 0; l <= h.levels.size(); ++l) {
            const Matrix& feats = l == 0 ? h.base.features : h.levels[l - 1].graph.features;
            const std::string side = export_path + ".level" + std::to_string(l) + ".features.txt";
            std::ofstream fout(side, std::ios::binary);
            if (!fout) throw IoError("cannot open " + side + " for writing");
            write_features_text(feats, fout);
            if (!fout) throw IoError("write failed: " + side);
        }
    }
    return 0;
}

int cmd_stats(const InputFlags& in) {
    if (in.tud.size() != 2) throw std::invalid_argument("stats needs --tud DIR NAME");
    const Dataset ds = load_tud(in.tud[0], in.tud[1]);
    const DatasetStats st = dataset_stats(ds);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "dataset %s\ngraphs %d\nclasses %d\nvertices %.2f +- %.2f\nedges %.2f +- %.2f\n",
                  ds.name.c_str(), st.graph_count, st.class_count, st.mean_vertices,
                  st.std_vertices, st.mean_edges, st.std_edges);
    std::cout << buf;
    return 0;
}

int cmd_verify(const VerifyOptions& opt) {
    const VerifyOutcome outcome = run_verify(opt, std::cout);
    return outcome.violations == 0 ? 0 : kExitInvariant;
}

int cmd_bench(const std::vector<Vertex>& sizes, std::uint64_t seed, int reps,
              const std::string& out_path) {
    const std::vector<BenchRow> rows = run_bench(sizes, seed, reps);
    std::ostringstream out;
    for (const BenchRow& r : rows)
        out << "n=" << r.n << " score_ns=" << r.score_ns << " select_ns=" << r.select_ns
            << " reduce_ns=" << r.reduce_ns << " total_ns=" << r.total_ns
            << " iterations=" << r.iterations << '\n';
    if (rows.size() >= 2) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.4f", loglog_slope(rows));
        out << "loglog_slope=" << buf << '\n';
    }
    write_output(out_path, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"score-driven graph coarsening by maximal independent vertex sets"};
    app.require_subcommand(1);

    InputFlags in;
    PoolOptions opt;
    std::string score_name = "random";
    std::string weights_file;
    std::string out_path;
    std::string export_path;
    bool csv = false;

    auto add_input_flags = [&](CLI::App* cmd) {
        cmd->add_option("--tud", in.tud, "dataset directory and name")->expected(2);
        cmd->add_option("--gen", in.gen,
                        "generator spec: path:N cycle:N star:N complete:N grid:RxC er:N:P:SEED");
    };

    CLI::App* pool = app.add_subcommand("pool", "pool graphs and report per-level structure");
    add_input_flags(pool);
    CLI::Option* score_opt =
        pool->add_option("--score", score_name, "scoring strategy: random, projection, gcn")
            ->check(CLI::IsMember({"random", "projection", "gcn"}));
    pool->add_option("--weights", weights_file, "JSON file with scoring weights");
    pool->add_option("--seed", opt.score.seed, "base seed, advanced per level");
    pool->add_option("--levels", opt.levels, "pooling depth");
    pool->add_option("--method", opt.method, "mivs, mivs-comp, or topk")
        ->check(CLI::IsMember({"mivs", "mivs-comp", "topk"}));
    pool->add_option("--ratio", opt.ratio, "kept fraction for topk");
    pool->add_option("--out", out_path, "report file (stdout when omitted)");
    pool->add_flag("--csv", csv, "flatten the report to CSV");
    pool->add_flag("--timing", opt.timing, "include per-phase nanosecond timings");
    pool->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
    pool->add_option("--export", export_path,
                     "write the hierarchy as JSON lines plus per-level feature sidecars");
    pool->add_flag("--no-check,!--check", opt.check_invariants,
                   "skip structural invariant checks")
        ->default_val(true);

    VerifyOptions vopt;
    CLI::App* verify = app.add_subcommand("verify", "run the invariant battery");
    verify->add_option("--max-n", vopt.max_n, "largest exhaustively generated family size");
    verify->add_flag("--exhaustive", vopt.exhaustive,
                     "compare against enumerated maximal independent sets");
    verify->add_option("--random-graphs", vopt.random_graphs, "random corpus size");
    verify->add_option("--seed", vopt.seed, "corpus seed");
    verify->add_flag("--inject-corruption", vopt.inject_corruption,
                     "corrupt one claim to prove the detector fires")
        ->group("");  // hidden: test hook

    CLI::App* stats = app.add_subcommand("stats", "dataset statistics");
    add_input_flags(stats);

    std::vector<Vertex> sizes{1000, 10000, 100000};
    std::uint64_t bench_seed = 1;
    int reps = 3;
    CLI::App* bench = app.add_subcommand("bench", "time pooling on sparse random graphs");
    bench->add_option("--sizes", sizes, "graph sizes to time");
    bench->add_option("--seed", bench_seed, "generator seed");
    bench->add_option("--reps", reps, "repetitions per size (fastest kept)");
    bench->add_option("--out", out_path, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitBadArgs;
    }

    try {
        if (pool->parsed()) {
            opt.score.strategy = strategy_from_name(score_name);
            return cmd_pool(in, opt, score_opt->count() > 0, weights_file, out_path, csv,
                            export_path);
        }
        if (verify->parsed()) return cmd_verify(vopt);
        if (stats->parsed()) return cmd_stats(in);
        if (bench->parsed()) return cmd_bench(sizes, bench_seed, reps, out_path);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArgs;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArgs;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitBadArgs;
}

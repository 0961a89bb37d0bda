#include "mivspool/mivs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mivspool/reduction.hpp"
#include "mivspool/rng.hpp"

namespace mivspool {

MivsResult compute_mivs(const Graph& g, const ScoreVector& s, std::vector<MivsState>* trace) {
    if (s.size() != static_cast<std::size_t>(g.n))
        throw std::invalid_argument("score length does not match vertex count");
    for (double x : s)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite score");

    MivsResult res;
    res.is_survivor.assign(g.n, 0);
    std::vector<std::uint8_t> candidate(g.n, 1);
    std::vector<std::uint8_t> blocked(g.n, 0);  // has a survivor in the closed neighborhood
    std::vector<Vertex> active(g.n);
    std::iota(active.begin(), active.end(), Vertex{0});
    std::vector<Vertex> promoted, next;

    // u outranks v: higher score wins, then lower id
    auto outranks = [&s](Vertex u, Vertex v) {
        if (s[u] != s[v]) return s[u] > s[v];
        return u < v;
    };

    while (!active.empty()) {
        ++res.iterations;
        std::uint64_t touches = 0;
        // promote candidates that outrank every candidate neighbor; reads only
        // the previous iteration's candidate flags, so order does not matter
        promoted.clear();
        for (Vertex v : active) {
            ++touches;
            bool best = true;
            for (Vertex u : g.neighbors(v)) {
                ++touches;
                if (candidate[u] && outranks(u, v)) {
                    best = false;
                    break;
                }
            }
            if (best) promoted.push_back(v);
        }
        // bookkeeping: each vertex promotes at most once, so blocking pushes
        // amortize to one sweep over the whole run
        for (Vertex v : promoted) {
            res.is_survivor[v] = 1;
            candidate[v] = 0;
        }
        for (Vertex v : promoted)
            for (Vertex u : g.neighbors(v)) blocked[u] = 1;
        next.clear();
        for (Vertex v : active) {
            if (res.is_survivor[v]) continue;
            if (blocked[v]) {
                candidate[v] = 0;
                continue;
            }
            next.push_back(v);
        }
        active.swap(next);
        res.work_touches += touches;
        res.touches_per_iteration.push_back(touches);
        if (trace) {
            MivsState st;
            st.survivor = res.is_survivor;
            st.candidate = candidate;
            st.iteration = res.iterations;
            trace->push_back(std::move(st));
        }
    }
    for (Vertex v = 0; v < g.n; ++v)
        if (res.is_survivor[v]) res.survivors.push_back(v);
    return res;
}

MivsResult compute_mivs_comp(const Graph& g, const ScoreVector& s, std::vector<MivsState>* trace) {
    MivsResult res = compute_mivs(g, s, trace);
    const Vertex target = (g.n + 1) / 2;
    if (static_cast<Vertex>(res.survivors.size()) >= target) return res;

    std::vector<Vertex> rest;
    rest.reserve(g.n - res.survivors.size());
    for (Vertex v = 0; v < g.n; ++v)
        if (!res.is_survivor[v]) rest.push_back(v);
    const std::size_t need = static_cast<std::size_t>(target) - res.survivors.size();
    std::partial_sort(rest.begin(), rest.begin() + need, rest.end(), [&s](Vertex a, Vertex b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return a < b;
    });
    res.relaxed_added.assign(rest.begin(), rest.begin() + need);
    std::sort(res.relaxed_added.begin(), res.relaxed_added.end());
    for (Vertex v : res.relaxed_added) res.is_survivor[v] = 1;
    res.survivors.clear();
    for (Vertex v = 0; v < g.n; ++v)
        if (res.is_survivor[v]) res.survivors.push_back(v);
    return res;
}

MivsCheck verify_mivs_bruteforce(const Graph& g, std::span<const Vertex> survivors) {
    std::vector<std::uint8_t> in(g.n, 0);
    for (Vertex v : survivors) {
        if (v < 0 || v >= g.n) throw std::out_of_range("survivor out of range");
        in[v] = 1;
    }
    MivsCheck c{true, true};
    for (Vertex v = 0; v < g.n && c.independent; ++v) {
        if (!in[v]) continue;
        for (Vertex u : g.neighbors(v))
            if (in[u]) {
                c.independent = false;
                break;
            }
    }
    for (Vertex v = 0; v < g.n && c.maximal; ++v) {
        if (in[v]) continue;
        bool covered = false;
        for (Vertex u : g.neighbors(v))
            if (in[u]) {
                covered = true;
                break;
            }
        if (!covered) c.maximal = false;
    }
    return c;
}

std::vector<std::vector<Vertex>> enumerate_maximal_independent_sets(const Graph& g) {
    if (g.n > 20) throw std::invalid_argument("enumeration is capped at 20 vertices");
    std::vector<std::uint32_t> adj(g.n, 0);
    for (auto [u, v] : edge_list(g)) {
        adj[u] |= 1u << v;
        adj[v] |= 1u << u;
    }
    std::vector<std::vector<Vertex>> out;
    const std::uint32_t limit = 1u << g.n;
    for (std::uint32_t set = 0; set < limit; ++set) {
        bool ok = true;
        for (Vertex v = 0; v < g.n && ok; ++v) {
            if (set >> v & 1u)
                ok = (adj[v] & set) == 0;  // independent
            else
                ok = (adj[v] & set) != 0;  // cannot be added
        }
        if (!ok) continue;
        std::vector<Vertex> members;
        for (Vertex v = 0; v < g.n; ++v)
            if (set >> v & 1u) members.push_back(v);
        out.push_back(std::move(members));
    }
    return out;
}

std::vector<LevelStats> iteration_stats(const Dataset& ds, const ScoreParams& params, int levels,
                                        std::uint64_t seed, PoolMode mode) {
    if (levels < 1) throw std::invalid_argument("levels must be positive");
    if (ds.graphs.empty()) throw std::invalid_argument("empty dataset");
    std::vector<std::vector<int>> counts(levels);
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        ScoreParams p = params;
        p.seed = seed + i;
        Hierarchy h = pool_hierarchy(ds.graphs[i], p, levels, mode);
        for (std::size_t l = 0; l < h.levels.size(); ++l)
            if (h.levels[l].mivs) counts[l].push_back(h.levels[l].mivs->iterations);
    }
    std::vector<LevelStats> out(levels);
    for (int l = 0; l < levels; ++l) {
        const auto& c = counts[l];
        out[l].samples = static_cast<int>(c.size());
        if (c.empty()) continue;
        double sum = 0, sum2 = 0;
        for (int x : c) {
            sum += x;
            sum2 += static_cast<double>(x) * x;
            out[l].max = std::max(out[l].max, x);
        }
        const double m = static_cast<double>(c.size());
        out[l].mean = sum / m;
        out[l].stddev = std::sqrt(std::max(0.0, sum2 / m - out[l].mean * out[l].mean));
    }
    return out;
}

}  // namespace mivspool

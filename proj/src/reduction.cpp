#include "mivspool/reduction.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mivspool/rng.hpp"

namespace mivspool {

ReductionMatrix build_assignment(const Graph& g, const ScoreVector& s, const MivsResult& mivs) {
    if (s.size() != static_cast<std::size_t>(g.n))
        throw std::invalid_argument("score length does not match vertex count");
    ReductionMatrix S;
    S.rows = g.n;
    S.cols = static_cast<Vertex>(mivs.survivors.size());
    S.survivor_of_column = mivs.survivors;  // already ascending
    std::vector<Vertex> col_of(g.n, kUnassigned);
    for (Vertex c = 0; c < S.cols; ++c) col_of[mivs.survivors[c]] = c;
    S.assignment.assign(g.n, kUnassigned);
    for (Vertex v = 0; v < g.n; ++v) {
        if (mivs.is_survivor[v]) {
            S.assignment[v] = col_of[v];
            continue;
        }
        Vertex best = kUnassigned;
        for (Vertex u : g.neighbors(v)) {
            if (!mivs.is_survivor[u]) continue;
            if (best == kUnassigned || s[u] > s[best] || (s[u] == s[best] && u < best)) best = u;
        }
        if (best == kUnassigned)
            throw std::invalid_argument("vertex " + std::to_string(v) +
                                        " has no surviving neighbor; survivor set is not maximal");
        S.assignment[v] = col_of[best];
    }
    return S;
}

Matrix reduce_features(const Graph& g, const ScoreVector& s, const ReductionMatrix& S) {
    const std::size_t f = g.feature_dim();
    std::vector<std::vector<Vertex>> members(S.cols);
    for (Vertex v = 0; v < S.rows; ++v)
        if (S.assignment[v] != kUnassigned) members[S.assignment[v]].push_back(v);
    Matrix out(S.cols, f);
    for (Vertex c = 0; c < S.cols; ++c) {
        auto& mem = members[c];
        // (score, id) order fixes the accumulation sequence under relabeling
        std::sort(mem.begin(), mem.end(), [&s](Vertex a, Vertex b) {
            if (s[a] != s[b]) return s[a] < s[b];
            return a < b;
        });
        double mass = 0;
        auto row = out.row(c);
        for (Vertex v : mem) {
            mass += s[v];
            auto x = g.features.row(v);
            for (std::size_t j = 0; j < f; ++j) row[j] += s[v] * x[j];
        }
        if (mass == 0)
            throw std::invalid_argument("cluster " + std::to_string(c) + " has zero score mass");
        for (std::size_t j = 0; j < f; ++j) row[j] /= mass;
    }
    return out;
}

namespace {

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

}  // namespace

Matrix reduce_features_matrix(const Graph& g, const ScoreVector& s, const ReductionMatrix& S) {
    // score-scaled indicator columns, normalized to unit column sum
    Matrix Sn(static_cast<std::size_t>(S.rows), static_cast<std::size_t>(S.cols));
    std::vector<double> mass(S.cols, 0.0);
    for (Vertex v = 0; v < S.rows; ++v) {
        const Vertex c = S.assignment[v];
        if (c == kUnassigned) continue;
        Sn.at(v, c) = s[v];
        mass[c] += s[v];
    }
    for (Vertex c = 0; c < S.cols; ++c)
        if (mass[c] == 0)
            throw std::invalid_argument("cluster " + std::to_string(c) + " has zero score mass");
    for (Vertex v = 0; v < S.rows; ++v) {
        const Vertex c = S.assignment[v];
        if (c != kUnassigned) Sn.at(v, c) /= mass[c];
    }
    Matrix St(Sn.cols, Sn.rows);
    for (std::size_t i = 0; i < Sn.rows; ++i)
        for (std::size_t j = 0; j < Sn.cols; ++j) St.at(j, i) = Sn.at(i, j);
    return matmul(St, g.features);
}

Matrix reduce_features_sum(const Graph& g, const ReductionMatrix& S) {
    const std::size_t f = g.feature_dim();
    Matrix out(S.cols, f);
    for (Vertex v = 0; v < S.rows; ++v) {
        const Vertex c = S.assignment[v];
        if (c == kUnassigned) continue;
        auto x = g.features.row(v);
        auto row = out.row(c);
        for (std::size_t j = 0; j < f; ++j) row[j] += x[j];
    }
    return out;
}

std::vector<std::pair<Vertex, Vertex>> reduce_adjacency(const Graph& g, const ReductionMatrix& S) {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex v = 0; v < S.rows; ++v) {
        const Vertex a = S.assignment[v];
        if (a == kUnassigned) continue;
        for (Vertex u : g.neighbors(v)) {
            if (u < v) continue;  // each base edge once
            const Vertex b = S.assignment[u];
            if (b == kUnassigned || a == b) continue;
            out.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PooledLevel pool_once_scored(const Graph& g, const ScoreVector& s, PoolMode mode) {
    PooledLevel lvl;
    MivsResult mivs = mode == PoolMode::comp ? compute_mivs_comp(g, s) : compute_mivs(g, s);
    lvl.S = build_assignment(g, s, mivs);
    Matrix feats = reduce_features(g, s, lvl.S);
    auto edges = reduce_adjacency(g, lvl.S);
    lvl.graph = build_graph(lvl.S.cols, edges, std::move(feats), {}, g.graph_label);
    lvl.scores = s;
    lvl.mivs = std::move(mivs);
    return lvl;
}

PooledLevel pool_once(const Graph& g, const ScoreParams& params, PoolMode mode) {
    return pool_once_scored(g, compute_scores(g, params), mode);
}

Hierarchy pool_hierarchy(const Graph& g, const ScoreParams& params, int levels, PoolMode mode) {
    if (levels < 1) throw std::invalid_argument("levels must be positive");
    Hierarchy h;
    h.base = g;
    h.levels.reserve(levels);  // keeps `cur` stable across push_back
    ScoreParams p = params;
    const Graph* cur = &h.base;
    for (int l = 0; l < levels; ++l) {
        if (cur->n <= 1) break;
        h.levels.push_back(pool_once(*cur, p, mode));
        cur = &h.levels.back().graph;
        p.seed = rng::splitmix64(p.seed);
    }
    return h;
}

PoolJacobian pool_gradients(const Graph& g, const ScoreVector& s, const ReductionMatrix& S) {
    PoolJacobian J;
    J.rows = S.rows;
    J.cols = S.cols;
    J.f = g.feature_dim();
    J.assignment = S.assignment;
    J.scores = s;
    J.cluster_mass.assign(S.cols, 0.0);
    for (Vertex v = 0; v < S.rows; ++v)
        if (S.assignment[v] != kUnassigned) J.cluster_mass[S.assignment[v]] += s[v];
    for (Vertex c = 0; c < S.cols; ++c)
        if (J.cluster_mass[c] == 0)
            throw std::invalid_argument("cluster " + std::to_string(c) + " has zero score mass");
    J.base_features = g.features;
    J.reduced_features = reduce_features(g, s, S);
    return J;
}

Matrix PoolJacobian::jvp_features(const Matrix& dX) const {
    if (dX.rows != static_cast<std::size_t>(rows) || dX.cols != f)
        throw std::invalid_argument("feature perturbation shape mismatch");
    Matrix out(static_cast<std::size_t>(cols), f);
    for (Vertex v = 0; v < rows; ++v) {
        const Vertex c = assignment[v];
        if (c == kUnassigned) continue;
        const double w = scores[v] / cluster_mass[c];
        auto dx = dX.row(v);
        auto row = out.row(c);
        for (std::size_t j = 0; j < f; ++j) row[j] += w * dx[j];
    }
    return out;
}

Matrix PoolJacobian::jvp_scores(std::span<const double> ds) const {
    if (ds.size() != static_cast<std::size_t>(rows))
        throw std::invalid_argument("score perturbation length mismatch");
    Matrix out(static_cast<std::size_t>(cols), f);
    for (Vertex v = 0; v < rows; ++v) {
        const Vertex c = assignment[v];
        if (c == kUnassigned) continue;
        const double w = ds[v] / cluster_mass[c];
        auto x = base_features.row(v);
        auto r = reduced_features.row(c);
        auto row = out.row(c);
        for (std::size_t j = 0; j < f; ++j) row[j] += w * (x[j] - r[j]);
    }
    return out;
}

void export_hierarchy_jsonl(const Hierarchy& h, std::ostream& out) {
    using json = nlohmann::ordered_json;
    {
        json rec;
        rec["level"] = 0;
        rec["n"] = h.base.n;
        json edges = json::array();
        for (auto [u, v] : edge_list(h.base)) edges.push_back({u, v});
        rec["edges"] = std::move(edges);
        rec["survivor_map"] = json::array();
        rec["scores"] = json::array();
        out << rec.dump() << '\n';
    }
    for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const PooledLevel& lvl = h.levels[l];
        json rec;
        rec["level"] = l + 1;
        rec["n"] = lvl.graph.n;
        json edges = json::array();
        for (auto [u, v] : edge_list(lvl.graph)) edges.push_back({u, v});
        rec["edges"] = std::move(edges);
        rec["survivor_map"] = lvl.S.assignment;
        rec["scores"] = lvl.scores;
        rec["survivors"] = lvl.S.survivor_of_column;
        if (lvl.mivs) {
            rec["iterations"] = lvl.mivs->iterations;
            rec["relaxed_added"] = lvl.mivs->relaxed_added;
        }
        out << rec.dump() << '\n';
    }
}

void write_features_text(const Matrix& m, std::ostream& out) {
    char buf[40];
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
            if (j) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace mivspool

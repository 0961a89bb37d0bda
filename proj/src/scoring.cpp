#include "mivspool/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mivspool/dataset.hpp"
#include "mivspool/rng.hpp"

namespace mivspool {

namespace {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Uniform in [-1/sqrt(f), 1/sqrt(f)], a pure function of (seed, index).
std::vector<double> seeded_weights(std::size_t f, std::uint64_t seed) {
    if (f == 0) throw std::invalid_argument("feature-based scoring needs at least one feature column");
    const double bound = 1.0 / std::sqrt(static_cast<double>(f));
    std::vector<double> w(f);
    for (std::size_t j = 0; j < f; ++j) w[j] = (2.0 * rng::uniform01(seed, j) - 1.0) * bound;
    return w;
}

}  // namespace

ScoreVector score_random(const Graph& g, std::uint64_t seed) {
    ScoreVector s(g.n);
    for (Vertex v = 0; v < g.n; ++v) s[v] = rng::uniform01(seed, static_cast<std::uint64_t>(v));
    return s;
}

ScoreVector score_projection(const Graph& g, std::span<const double> projection) {
    if (projection.size() != g.feature_dim())
        throw std::invalid_argument("projection size does not match feature dimension");
    double norm2 = 0;
    for (double w : projection) norm2 += w * w;
    if (norm2 == 0) throw std::invalid_argument("projection vector is zero");
    const double inv_norm = 1.0 / std::sqrt(norm2);
    ScoreVector s(g.n);
    for (Vertex v = 0; v < g.n; ++v) {
        auto x = g.features.row(v);
        double dot = 0;
        for (std::size_t j = 0; j < x.size(); ++j) dot += x[j] * projection[j];
        s[v] = sigmoid(dot * inv_norm);
    }
    return s;
}

ScoreVector score_gcn_attention(const Graph& g, std::span<const double> weights,
                                std::uint64_t seed_if_unset) {
    const std::size_t f = g.feature_dim();
    std::vector<double> w(weights.begin(), weights.end());
    if (w.empty())
        w = seeded_weights(f, seed_if_unset);
    else if (w.size() != f)
        throw std::invalid_argument("weight size does not match feature dimension");

    std::vector<double> h(g.n);
    for (Vertex v = 0; v < g.n; ++v) {
        auto x = g.features.row(v);
        double dot = 0;
        for (std::size_t j = 0; j < f; ++j) dot += x[j] * w[j];
        h[v] = dot;
    }
    ScoreVector s(g.n);
    std::vector<double> terms;
    for (Vertex v = 0; v < g.n; ++v) {
        const double dv = static_cast<double>(g.degree(v)) + 1.0;
        terms.clear();
        terms.push_back(h[v] / dv);
        for (Vertex u : g.neighbors(v))
            terms.push_back(h[u] / std::sqrt(dv * (static_cast<double>(g.degree(u)) + 1.0)));
        // value-ordered accumulation keeps the sum independent of neighbor order
        std::sort(terms.begin(), terms.end());
        double acc = 0;
        for (double t : terms) acc += t;
        s[v] = sigmoid(acc);
    }
    return s;
}

ScoreVector compute_scores(const Graph& g, const ScoreParams& params) {
    switch (params.strategy) {
    case Strategy::random:
        return score_random(g, params.seed);
    case Strategy::projection:
        if (params.weights.empty())
            return score_projection(g, seeded_weights(g.feature_dim(), params.seed));
        return score_projection(g, params.weights);
    case Strategy::gcn_attention:
        return score_gcn_attention(g, params.weights, params.seed);
    }
    throw std::invalid_argument("unknown scoring strategy");
}

ScoreParams load_score_params(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("bad JSON in " + file.string() + ": " + e.what());
    }
    ScoreParams p;
    try {
        if (j.is_array()) {  // bare weight list
            p.weights = j.get<std::vector<double>>();
            return p;
        }
        if (!j.is_object()) throw IoError(file.string() + " must hold a JSON object or array");
        if (j.contains("strategy"))
            p.strategy = strategy_from_name(j["strategy"].get<std::string>());
        if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("weights")) p.weights = j["weights"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad field in " + file.string() + ": " + e.what());
    }
    return p;
}

const char* strategy_name(Strategy s) {
    switch (s) {
    case Strategy::random:
        return "random";
    case Strategy::projection:
        return "projection";
    case Strategy::gcn_attention:
        return "gcn";
    }
    return "unknown";
}

Strategy strategy_from_name(std::string_view name) {
    if (name == "random") return Strategy::random;
    if (name == "projection") return Strategy::projection;
    if (name == "gcn" || name == "gcn_attention") return Strategy::gcn_attention;
    throw std::invalid_argument("unknown scoring strategy: " + std::string(name));
}

}  // namespace mivspool

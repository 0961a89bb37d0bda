#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "mivspool/dataset.hpp"
#include "mivspool/scoring.hpp"

using namespace mivspool;

TEST_CASE("random scores are deterministic per (seed, vertex) and lie in [0,1)") {
    const Graph g = gen_family(Family::path, 8);
    const ScoreVector a = score_random(g, 3);
    const ScoreVector b = score_random(g, 3);
    CHECK(a == b);
    const ScoreVector c = score_random(g, 4);
    CHECK(a != c);  // two different seeds differ in at least one entry
    for (double v : a) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("projection scoring matches the sigmoid of the normalized inner product") {
    // unit basis vector picks out the first feature column
    Matrix x(1, 3);
    x.at(0, 0) = 1.0;
    const Graph g = build_graph(1, {}, x);
    const ScoreVector s = score_projection(g, std::vector<double>{1.0, 0.0, 0.0});
    CHECK(s[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("projection scores increase with the projected feature on a path") {
    Matrix x(5, 1);
    for (int i = 0; i < 5; ++i) x.at(i, 0) = i;
    const Graph g = build_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, x);
    const ScoreVector s = score_projection(g, std::vector<double>{1.0});
    for (int i = 1; i < 5; ++i) CHECK(s[i] > s[i - 1]);
}

TEST_CASE("projection scores are invariant to positive scaling of the direction") {
    const Graph g = gen_random_graph(20, 0.3, 5);
    Graph with_feats = g;
    with_feats.features = Matrix(20, 2);
    for (int i = 0; i < 20; ++i) {
        with_feats.features.at(i, 0) = std::sin(i * 0.7);
        with_feats.features.at(i, 1) = std::cos(i * 1.3);
    }
    const std::vector<double> p{0.4, -0.9};
    const std::vector<double> p_scaled{0.4 * 37.0, -0.9 * 37.0};
    const ScoreVector a = score_projection(with_feats, p);
    const ScoreVector b = score_projection(with_feats, p_scaled);
    for (int i = 0; i < 20; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("projection rejects mismatched or zero directions") {
    const Graph g = gen_family(Family::path, 3);  // constant 1-dim features
    CHECK_THROWS_AS(score_projection(g, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(score_projection(g, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("gcn scoring on a two-vertex graph") {
    // x0=[1], x1=[0], w=[1]: both vertices aggregate to 0.5 before the sigmoid
    Matrix x(2, 1);
    x.at(0, 0) = 1.0;
    x.at(1, 0) = 0.0;
    const Graph g = build_graph(2, {{0, 1}}, x);
    const ScoreVector s = score_gcn_attention(g, std::vector<double>{1.0});
    const double expected = 1.0 / (1.0 + std::exp(-0.5));
    CHECK(s[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gcn scoring with zero weights gives 0.5 everywhere") {
    const Graph g = gen_random_graph(15, 0.3, 2);
    const ScoreVector s = score_gcn_attention(g, std::vector<double>{0.0});
    for (double v : s) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("gcn scoring of an isolated vertex reduces to sigmoid of its own projection") {
    Matrix x(1, 1);
    x.at(0, 0) = 2.0;
    const Graph g = build_graph(1, {}, x);
    const ScoreVector s = score_gcn_attention(g, std::vector<double>{3.0});
    CHECK(s[0] == doctest::Approx(1.0 / (1.0 + std::exp(-6.0))).epsilon(1e-12));
}

TEST_CASE("gcn scoring seeds its own weights when none are given") {
    const Graph g = gen_random_graph(10, 0.4, 8);
    const ScoreVector a = score_gcn_attention(g, {}, 5);
    const ScoreVector b = score_gcn_attention(g, {}, 5);
    CHECK(a == b);
    const ScoreVector c = score_gcn_attention(g, {}, 6);
    CHECK(a != c);
    for (double v : a) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("compute_scores dispatches on strategy") {
    const Graph g = gen_family(Family::cycle, 6);
    ScoreParams p;
    p.strategy = Strategy::random;
    p.seed = 9;
    CHECK(compute_scores(g, p) == score_random(g, 9));
    p.strategy = Strategy::gcn_attention;
    CHECK(compute_scores(g, p) == score_gcn_attention(g, {}, 9));
}

TEST_CASE("strategy names round-trip and reject junk") {
    CHECK(strategy_from_name("random") == Strategy::random);
    CHECK(strategy_from_name("projection") == Strategy::projection);
    CHECK(strategy_from_name("gcn") == Strategy::gcn_attention);
    CHECK(strategy_from_name("gcn_attention") == Strategy::gcn_attention);
    CHECK_THROWS_AS(strategy_from_name("best"), std::invalid_argument);
    CHECK(strategy_name(Strategy::gcn_attention) == std::string("gcn"));
}

TEST_CASE("load_score_params reads bare arrays and objects") {
    const std::string path = "tmp_weights.json";
    {
        std::ofstream out(path);
        out << "[0.5, -1.0, 2.0]";
    }
    ScoreParams p = load_score_params(path);
    REQUIRE(p.weights.size() == 3);
    CHECK(p.weights[1] == doctest::Approx(-1.0));
    {
        std::ofstream out(path);
        out << R"({"strategy": "gcn", "seed": 17, "weights": [1.0, 2.0]})";
    }
    p = load_score_params(path);
    CHECK(p.strategy == Strategy::gcn_attention);
    CHECK(p.seed == 17);
    REQUIRE(p.weights.size() == 2);
    CHECK(p.weights[1] == doctest::Approx(2.0));
    {
        std::ofstream out(path);
        out << R"({"weights": [[1.0], [2.0]]})";  // nested lists are not a weight vector
    }
    CHECK_THROWS_AS(load_score_params(path), IoError);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_score_params(path), IoError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_score_params(path), IoError);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mivspool/dataset.hpp"
#include "mivspool/reduction.hpp"
#include "mivspool/rng.hpp"
#include "mivspool/scoring.hpp"

using namespace mivspool;

namespace {

Graph p5_with_features() {
    Matrix x(5, 1);
    const double vals[] = {10, 20, 30, 40, 50};
    for (int i = 0; i < 5; ++i) x.at(i, 0) = vals[i];
    return build_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, x);
}

const ScoreVector kP5Scores{0.1, 0.9, 0.2, 0.8, 0.3};

double max_abs_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.rows == b.rows);
    REQUIRE(a.cols == b.cols);
    double m = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace

TEST_CASE("assignment sends every vertex to its best surviving neighbor") {
    const Graph g = p5_with_features();
    const MivsResult mivs = compute_mivs(g, kP5Scores);
    const ReductionMatrix S = build_assignment(g, kP5Scores, mivs);
    CHECK(S.rows == 5);
    CHECK(S.cols == 2);
    CHECK(S.assignment == std::vector<Vertex>{0, 0, 0, 1, 1});
    CHECK(S.survivor_of_column == std::vector<Vertex>{1, 3});
    CHECK_FALSE(S.selective());
}

TEST_CASE("assignment breaks survivor ties by score then id") {
    // vertex 2 sees survivors 1 and 3 with equal scores: lower id wins
    const Graph p5 = gen_family(Family::path, 5);
    const ScoreVector s{0.1, 0.8, 0.2, 0.8, 0.3};
    const MivsResult mivs = compute_mivs(p5, s);
    REQUIRE(mivs.survivors == std::vector<Vertex>{1, 3});
    const ReductionMatrix S = build_assignment(p5, s, mivs);
    CHECK(S.assignment[2] == 0);
}

TEST_CASE("assignment rejects a non-maximal survivor set") {
    const Graph p5 = gen_family(Family::path, 5);
    MivsResult fake;
    fake.survivors = {1};
    fake.is_survivor.assign(5, 0);
    fake.is_survivor[1] = 1;
    fake.iterations = 1;
    CHECK_THROWS_AS(build_assignment(p5, kP5Scores, fake), std::invalid_argument);
}

TEST_CASE("reduced features are score-weighted cluster means") {
    const Graph g = p5_with_features();
    const MivsResult mivs = compute_mivs(g, kP5Scores);
    const ReductionMatrix S = build_assignment(g, kP5Scores, mivs);
    const Matrix r = reduce_features(g, kP5Scores, S);
    REQUIRE(r.rows == 2);
    REQUIRE(r.cols == 1);
    CHECK(r.at(0, 0) == doctest::Approx(25.0 / 1.2).epsilon(1e-12));
    CHECK(r.at(1, 0) == doctest::Approx(47.0 / 1.1).epsilon(1e-12));

    const Matrix sum = reduce_features_sum(g, S);
    CHECK(sum.at(0, 0) == doctest::Approx(60.0));  // 10 + 20 + 30
    CHECK(sum.at(1, 0) == doctest::Approx(90.0));  // 40 + 50
}

TEST_CASE("uniform scores turn the reduction into plain cluster means") {
    const Graph g = p5_with_features();
    const ScoreVector s{0.4, 0.9, 0.4, 0.9, 0.4};  // survivors {1, 3}
    const MivsResult mivs = compute_mivs(g, s);
    ReductionMatrix S = build_assignment(g, s, mivs);
    ScoreVector uniform(5, 0.7);
    const Matrix r = reduce_features(g, uniform, S);
    CHECK(r.at(0, 0) == doctest::Approx(20.0));  // mean of 10, 20, 30
    CHECK(r.at(1, 0) == doctest::Approx(45.0));  // mean of 40, 50

    // scaling each mean back up by its cluster size recovers the feature sum
    std::vector<int> cluster_size(S.cols, 0);
    for (Vertex v = 0; v < S.rows; ++v) ++cluster_size[S.assignment[v]];
    double reconstructed = 0;
    for (Vertex c = 0; c < S.cols; ++c) reconstructed += cluster_size[c] * r.at(c, 0);
    CHECK(reconstructed == doctest::Approx(10 + 20 + 30 + 40 + 50));
}

TEST_CASE("pooling an edgeless graph is the identity") {
    Matrix x(4, 2);
    for (int i = 0; i < 4; ++i) {
        x.at(i, 0) = 0.1 * i + 0.3;
        x.at(i, 1) = -1.5 * i;
    }
    const Graph g = build_graph(4, {}, x);
    const ScoreVector s{0.3, 0.9, 0.1, 0.7};
    const PooledLevel lvl = pool_once_scored(g, s, PoolMode::plain);
    CHECK(lvl.graph.n == 4);
    CHECK(lvl.graph.edge_count() == 0);
    CHECK(lvl.S.assignment == std::vector<Vertex>{0, 1, 2, 3});
    CHECK(lvl.S.survivor_of_column == std::vector<Vertex>{0, 1, 2, 3});
    for (std::size_t k = 0; k < x.data.size(); ++k)
        CHECK(lvl.graph.features.data[k] == doctest::Approx(x.data[k]).epsilon(1e-15));
    // the sum route is exactly the identity on singleton clusters
    CHECK(reduce_features_sum(g, lvl.S) == x);
}

TEST_CASE("loop and matrix reductions agree to 1e-12 on a random corpus") {
    for (int i = 0; i < 25; ++i) {
        Graph g = gen_random_graph(10 + i, 0.3, 2000 + i);
        g.features = Matrix(g.n, 3);
        for (Vertex v = 0; v < g.n; ++v)
            for (int j = 0; j < 3; ++j) g.features.at(v, j) = std::sin(v * 1.7 + j);
        const ScoreVector s = score_random(g, i);
        const MivsResult mivs = compute_mivs(g, s);
        const ReductionMatrix S = build_assignment(g, s, mivs);
        CHECK(max_abs_diff(reduce_features(g, s, S), reduce_features_matrix(g, s, S)) <= 1e-12);
    }
}

TEST_CASE("zero cluster score mass is an error, not a silent division") {
    Matrix x(1, 1, 5.0);
    const Graph g = build_graph(1, {}, x);
    const ScoreVector s{0.0};
    const MivsResult mivs = compute_mivs(g, s);
    const ReductionMatrix S = build_assignment(g, s, mivs);
    CHECK_THROWS_AS(reduce_features(g, s, S), std::invalid_argument);
    CHECK_THROWS_AS(reduce_features_matrix(g, s, S), std::invalid_argument);
    CHECK_THROWS_AS(pool_gradients(g, s, S), std::invalid_argument);
}

TEST_CASE("quotient adjacency on hand-checked shapes") {
    const Graph g = p5_with_features();
    const MivsResult mivs = compute_mivs(g, kP5Scores);
    const ReductionMatrix S = build_assignment(g, kP5Scores, mivs);
    CHECK(reduce_adjacency(g, S) == std::vector<std::pair<Vertex, Vertex>>{{0, 1}});

    // star: everything folds into the hub
    const Graph star = gen_family(Family::star, 4);
    const ScoreVector ss{0.9, 0.1, 0.2, 0.3};
    const ReductionMatrix Ss = build_assignment(star, ss, compute_mivs(star, ss));
    CHECK(Ss.cols == 1);
    CHECK(reduce_adjacency(star, Ss).empty());

    // two disjoint edges: two clusters, no quotient edge
    const Graph pair = build_graph(4, {{0, 1}, {2, 3}});
    const ScoreVector sp{0.9, 0.1, 0.8, 0.2};
    const ReductionMatrix Sp = build_assignment(pair, sp, compute_mivs(pair, sp));
    CHECK(Sp.cols == 2);
    CHECK(reduce_adjacency(pair, Sp).empty());
}

TEST_CASE("pooling one level matches the hand-built pipeline") {
    const Graph g = p5_with_features();
    const PooledLevel lvl = pool_once_scored(g, kP5Scores, PoolMode::plain);
    CHECK(lvl.graph.n == 2);
    CHECK(lvl.graph.edge_count() == 1);
    CHECK(lvl.graph.features.at(0, 0) == doctest::Approx(25.0 / 1.2));
    CHECK(lvl.scores == kP5Scores);
    REQUIRE(lvl.mivs.has_value());
    CHECK(lvl.mivs->survivors == std::vector<Vertex>{1, 3});
}

TEST_CASE("component count is preserved level by level") {
    for (int i = 0; i < 30; ++i) {
        const Graph g = gen_random_graph(25 + i, 0.08, 3000 + i);
        const int before = connected_components(g).count;
        for (PoolMode mode : {PoolMode::plain, PoolMode::comp}) {
            const PooledLevel lvl = pool_once_scored(g, score_random(g, i), mode);
            CHECK(connected_components(lvl.graph).count == before);
        }
    }
}

TEST_CASE("hierarchy on a path shrinks strictly until it bottoms out") {
    ScoreParams p;
    p.strategy = Strategy::random;
    p.seed = 5;
    const Graph p9 = gen_family(Family::path, 9);
    const Hierarchy h = pool_hierarchy(p9, p, 3);
    REQUIRE(!h.levels.empty());
    Vertex prev = 9;
    for (const PooledLevel& lvl : h.levels) {
        CHECK(lvl.graph.n < prev);
        prev = lvl.graph.n;
    }
}

TEST_CASE("complete graph collapses to a single vertex in one level") {
    ScoreParams p;
    p.strategy = Strategy::random;
    p.seed = 2;
    const Hierarchy h = pool_hierarchy(gen_family(Family::complete, 16), p, 1);
    REQUIRE(h.levels.size() == 1);
    CHECK(h.levels[0].graph.n == 1);
    CHECK(h.levels[0].graph.edge_count() == 0);
}

TEST_CASE("first hierarchy level equals a single pooling call") {
    const Graph g = gen_random_graph(40, 0.1, 77);
    ScoreParams p;
    p.strategy = Strategy::random;
    p.seed = 123;
    const Hierarchy h = pool_hierarchy(g, p, 2);
    const PooledLevel once = pool_once(g, p, PoolMode::plain);
    REQUIRE(!h.levels.empty());
    CHECK(h.levels[0].S.assignment == once.S.assignment);
    CHECK(h.levels[0].graph.features == once.graph.features);
    CHECK(edge_list(h.levels[0].graph) == edge_list(once.graph));
    CHECK_THROWS_AS(pool_hierarchy(g, p, 0), std::invalid_argument);
}

TEST_CASE("feature jvp matches the linear map exactly") {
    const Graph g = p5_with_features();
    const MivsResult mivs = compute_mivs(g, kP5Scores);
    const ReductionMatrix S = build_assignment(g, kP5Scores, mivs);
    const PoolJacobian jac = pool_gradients(g, kP5Scores, S);

    Matrix dX(5, 1);
    for (int i = 0; i < 5; ++i) dX.at(i, 0) = 0.1 * (i + 1);
    const Matrix jvp = jac.jvp_features(dX);

    // the reduction is linear in X, so the jvp is the reduction of dX
    Graph shifted = g;
    shifted.features = dX;
    const Matrix expect = reduce_features(shifted, kP5Scores, S);
    CHECK(max_abs_diff(jvp, expect) <= 1e-15);

    CHECK_THROWS_AS(jac.jvp_features(Matrix(4, 1)), std::invalid_argument);
}

TEST_CASE("score jvp matches central differences on random fixtures") {
    for (int i = 0; i < 20; ++i) {
        Graph g = gen_random_graph(12 + i, 0.3, 4000 + i);
        g.features = Matrix(g.n, 2);
        for (Vertex v = 0; v < g.n; ++v) {
            g.features.at(v, 0) = std::cos(v * 0.9);
            g.features.at(v, 1) = 0.5 * v;
        }
        const ScoreVector s = score_random(g, 60 + i);
        const MivsResult mivs = compute_mivs(g, s);
        const ReductionMatrix S = build_assignment(g, s, mivs);
        const PoolJacobian jac = pool_gradients(g, s, S);

        ScoreVector ds(g.n);
        for (Vertex v = 0; v < g.n; ++v) ds[v] = std::sin(v * 1.1 + i);
        const Matrix jvp = jac.jvp_scores(ds);

        const double h = 1e-6;
        ScoreVector plus = s, minus = s;
        for (Vertex v = 0; v < g.n; ++v) {
            plus[v] += h * ds[v];
            minus[v] -= h * ds[v];
        }
        const Matrix fp = reduce_features(g, plus, S);
        const Matrix fm = reduce_features(g, minus, S);
        double max_rel = 0;
        for (std::size_t k = 0; k < jvp.data.size(); ++k) {
            const double fd = (fp.data[k] - fm.data[k]) / (2 * h);
            const double denom = std::max(1.0, std::abs(fd));
            max_rel = std::max(max_rel, std::abs(jvp.data[k] - fd) / denom);
        }
        CHECK(max_rel < 1e-6);
    }
}

TEST_CASE("permutation equivariance: survivors map, edges relabel, features bit-equal") {
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = gen_random_graph(18, 0.25, 5000 + trial);
        g.features = Matrix(g.n, 2);
        for (Vertex v = 0; v < g.n; ++v) {
            g.features.at(v, 0) = v * 0.3 - 2;
            g.features.at(v, 1) = std::sin(v + trial);
        }
        // distinct scores so the outcome is order-free
        ScoreVector s(g.n);
        for (Vertex v = 0; v < g.n; ++v) s[v] = rng::uniform01(9000 + trial, v);

        std::vector<Vertex> perm(g.n);
        std::iota(perm.begin(), perm.end(), 0);
        rng::Stream st{static_cast<std::uint64_t>(trial) + 31};
        for (Vertex v = g.n - 1; v > 0; --v)
            std::swap(perm[v], perm[st.next_below(static_cast<std::uint64_t>(v) + 1)]);

        const Graph pg = permute_graph(g, perm);
        ScoreVector ps(g.n);
        for (Vertex v = 0; v < g.n; ++v) ps[perm[v]] = s[v];

        const PooledLevel a = pool_once_scored(g, s, PoolMode::plain);
        const PooledLevel b = pool_once_scored(pg, ps, PoolMode::plain);

        // survivor sets correspond under the permutation
        std::vector<Vertex> mapped;
        for (Vertex v : a.mivs->survivors) mapped.push_back(perm[v]);
        std::sort(mapped.begin(), mapped.end());
        CHECK(mapped == b.mivs->survivors);

        // columns are ordered by survivor id, so column c of a maps to the rank
        // of perm[survivor] among the permuted survivors
        const Vertex cols = a.S.cols;
        REQUIRE(b.S.cols == cols);
        std::vector<Vertex> col_map(cols);
        for (Vertex c = 0; c < cols; ++c) {
            const Vertex pv = perm[a.S.survivor_of_column[c]];
            const auto it = std::lower_bound(mapped.begin(), mapped.end(), pv);
            col_map[c] = static_cast<Vertex>(it - mapped.begin());
        }

        // features per cluster are bitwise identical
        for (Vertex c = 0; c < cols; ++c)
            for (std::size_t j = 0; j < a.graph.features.cols; ++j)
                CHECK(a.graph.features.at(c, j) == b.graph.features.at(col_map[c], j));

        // quotient edges agree after relabeling
        auto edges_a = edge_list(a.graph);
        for (auto& [u, v] : edges_a) {
            u = col_map[u];
            v = col_map[v];
            if (u > v) std::swap(u, v);
        }
        std::sort(edges_a.begin(), edges_a.end());
        CHECK(edges_a == edge_list(b.graph));
    }
}

TEST_CASE("gcn scores are bit-equal under relabeling") {
    Graph g = gen_random_graph(16, 0.3, 71);
    g.features = Matrix(g.n, 2);
    for (Vertex v = 0; v < g.n; ++v) {
        g.features.at(v, 0) = v * 0.25;
        g.features.at(v, 1) = std::cos(v * 0.4);
    }
    const std::vector<double> w{0.7, -0.3};
    std::vector<Vertex> perm{5, 3, 9, 0, 12, 7, 1, 15, 2, 10, 4, 13, 6, 14, 8, 11};
    const Graph pg = permute_graph(g, perm);
    const ScoreVector s = score_gcn_attention(g, w);
    const ScoreVector ps = score_gcn_attention(pg, w);
    for (Vertex v = 0; v < g.n; ++v) CHECK(s[v] == ps[perm[v]]);
}

TEST_CASE("hierarchy export emits one record per level with the expected keys") {
    const Graph g = p5_with_features();
    ScoreParams p;
    p.strategy = Strategy::random;
    p.seed = 3;
    const Hierarchy h = pool_hierarchy(g, p, 2);
    std::ostringstream out;
    export_hierarchy_jsonl(h, out);

    std::istringstream in(out.str());
    std::string line;
    std::vector<nlohmann::json> records;
    while (std::getline(in, line))
        if (!line.empty()) records.push_back(nlohmann::json::parse(line));
    REQUIRE(records.size() == h.levels.size() + 1);

    CHECK(records[0]["level"] == 0);
    CHECK(records[0]["n"] == 5);
    CHECK(records[0]["edges"].size() == 4);
    CHECK(records[0]["survivor_map"].empty());

    for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const nlohmann::json& rec = records[l + 1];
        CHECK(rec["level"] == static_cast<int>(l + 1));
        CHECK(rec["n"] == h.levels[l].graph.n);
        const std::size_t prev_n = l == 0 ? 5 : static_cast<std::size_t>(h.levels[l - 1].graph.n);
        CHECK(rec["survivor_map"].size() == prev_n);
        CHECK(rec["scores"].size() == prev_n);
        CHECK(rec["edges"].size() == static_cast<std::size_t>(h.levels[l].graph.edge_count()));
    }
}

TEST_CASE("feature matrices print one row per line at full precision") {
    Matrix m(2, 2);
    m.at(0, 0) = 0.1;
    m.at(0, 1) = 2;
    m.at(1, 0) = -3.25;
    m.at(1, 1) = 1.0 / 3.0;
    std::ostringstream out;
    write_features_text(m, out);
    std::istringstream in(out.str());
    double a, b;
    in >> a >> b;
    CHECK(a == 0.1);
    CHECK(b == 2.0);
    in >> a >> b;
    CHECK(a == -3.25);
    CHECK(b == 1.0 / 3.0);
}

#include <doctest.h>

#include <algorithm>

#include "mivspool/dataset.hpp"
#include "mivspool/scoring.hpp"
#include "mivspool/topk.hpp"

using namespace mivspool;

TEST_CASE("topk keeps the k best ids in ascending order") {
    const Graph p5 = gen_family(Family::path, 5);
    const ScoreVector s{0.1, 0.9, 0.2, 0.8, 0.3};
    const TopkResult sel = topk_select(p5, s, 0.4);
    CHECK(sel.k == 2);
    CHECK(sel.idx == std::vector<Vertex>{1, 3});
}

TEST_CASE("topk ties fall to the lower id") {
    const Graph g = build_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    const TopkResult sel = topk_select(g, ScoreVector(4, 0.5), 0.5);
    CHECK(sel.idx == std::vector<Vertex>{0, 1});
}

TEST_CASE("topk k is the ceiling of ratio times n, clamped to n") {
    const Graph g = build_graph(5, {});
    const ScoreVector s{0.5, 0.4, 0.3, 0.2, 0.1};
    CHECK(topk_select(g, s, 0.5).k == 3);   // ceil(2.5)
    CHECK(topk_select(g, s, 0.01).k == 1);  // never empty
    CHECK(topk_select(g, s, 1.0).k == 5);
    CHECK_THROWS_AS(topk_select(g, s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(topk_select(g, s, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(topk_select(g, ScoreVector(4, 0.1), 0.5), std::invalid_argument);
}

TEST_CASE("topk reduction takes the induced subgraph and gates features") {
    Matrix x(5, 1);
    for (int i = 0; i < 5; ++i) x.at(i, 0) = 10.0 * (i + 1);
    const Graph p5 = build_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, x);
    const ScoreVector s{0.1, 0.9, 0.2, 0.8, 0.3};
    const TopkResult sel = topk_select(p5, s, 0.4);
    const PooledLevel lvl = topk_reduce(p5, sel, s);

    // vertices 1 and 3 are not adjacent: the selection disconnects the path
    CHECK(lvl.graph.n == 2);
    CHECK(lvl.graph.edge_count() == 0);
    CHECK(connected_components(lvl.graph).count == 2);

    CHECK(lvl.graph.features.at(0, 0) == doctest::Approx(20.0 * 0.9));
    CHECK(lvl.graph.features.at(1, 0) == doctest::Approx(40.0 * 0.8));

    // dropped vertices have no column
    CHECK(lvl.S.selective());
    CHECK(lvl.S.assignment[0] == kUnassigned);
    CHECK(lvl.S.assignment[1] == 0);
    CHECK(lvl.S.assignment[2] == kUnassigned);
    CHECK(lvl.S.assignment[3] == 1);
    CHECK(lvl.S.survivor_of_column == std::vector<Vertex>{1, 3});
    CHECK_FALSE(lvl.mivs.has_value());
}

TEST_CASE("topk induced edges match a direct filter on a random corpus") {
    for (int i = 0; i < 25; ++i) {
        const Graph g = gen_random_graph(20 + i, 0.25, 6000 + i);
        const ScoreVector s = score_random(g, i);
        const TopkResult sel = topk_select(g, s, 0.5);
        const PooledLevel lvl = topk_reduce(g, sel, s);

        std::vector<Vertex> pos(g.n, kUnassigned);
        for (std::size_t c = 0; c < sel.idx.size(); ++c) pos[sel.idx[c]] = static_cast<Vertex>(c);
        std::vector<std::pair<Vertex, Vertex>> expect;
        for (const auto& [u, v] : edge_list(g))
            if (pos[u] != kUnassigned && pos[v] != kUnassigned)
                expect.emplace_back(pos[u], pos[v]);
        std::sort(expect.begin(), expect.end());
        CHECK(edge_list(lvl.graph) == expect);
    }
}

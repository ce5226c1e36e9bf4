#include "tim/graphs.hpp"
#include "tim/topology.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace tim;
using tim::test::ids;

namespace {

ConflictGraph graph1(std::size_t k, std::initializer_list<std::pair<int, int>> arcs)
{
    std::vector<ConflictGraph::Arc> v;
    for (auto [a, b] : arcs)
        v.emplace_back(a - 1, b - 1);
    return ConflictGraph(k, std::move(v));
}

// Smallest c such that some assignment of c colours is proper, by trying
// every assignment.
std::size_t chromatic_by_enumeration(const ConflictGraph & g)
{
    const auto n = g.size();
    if (n == 0)
        return 0;
    for (std::size_t c = 1; c <= n; ++c) {
        std::vector<std::size_t> col(n, 0);
        for (;;) {
            bool proper = true;
            for (auto [a, b] : g.arcs())
                proper = proper && col[a] != col[b];
            if (proper)
                return c;
            std::size_t i = 0;
            while (i < n && ++col[i] == c)
                col[i++] = 0;
            if (i == n)
                break;
        }
    }
    return n;
}

ConflictGraph random_graph(std::size_t n, double p, std::mt19937_64 & rng)
{
    std::bernoulli_distribution coin(p);
    std::vector<ConflictGraph::Arc> arcs;
    for (UserId a = 0; a < n; ++a)
        for (UserId b = 0; b < n; ++b)
            if (a != b && coin(rng))
                arcs.emplace_back(a, b);
    return ConflictGraph(n, std::move(arcs));
}

} // namespace

TEST_CASE("bipartition of a two-into-one star")
{
    const auto bp = bipartition(graph1(3, {{1, 3}, {2, 3}}));
    REQUIRE(bp);
    CHECK(bp->part_one == ids({1, 2}));
    CHECK(bp->part_two == ids({3}));
}

TEST_CASE("odd cycles are not bipartite and yield a witness")
{
    const auto triangle = graph1(3, {{1, 2}, {2, 3}, {3, 1}});
    CHECK_FALSE(bipartition(triangle));
    const auto cycle = odd_cycle(triangle);
    CHECK(cycle.size() == 3);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto g = random_graph(3 + trial % 10, 0.15, rng);
        const auto w = odd_cycle(g);
        if (bipartition(g)) {
            CHECK(w.empty());
            continue;
        }
        REQUIRE(w.size() % 2 == 1);
        std::set<UserId> distinct(w.begin(), w.end());
        CHECK(distinct.size() == w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            CHECK(g.adjacent(w[i], w[(i + 1) % w.size()]));
    }
}

TEST_CASE("bipartition places isolated vertices in part one and ignores directions")
{
    const auto bp = bipartition(graph1(5, {{4, 2}, {3, 4}}));
    REQUIRE(bp);
    CHECK(bp->part_one == ids({1, 2, 3, 5}));
    CHECK(bp->part_two == ids({4}));
}

TEST_CASE("six-user example: reduced graph bipartite with the stated partite sets, regular graph needs 3 colours")
{
    const auto t = parse_topology(test::six_user_example);
    const auto reduced = reduced_conflict_graph(t);
    CHECK(bipartition(reduced));
    CHECK(is_valid_bipartition(reduced, {ids({1, 3, 4}), ids({2, 5, 6})}));

    const auto regular = regular_conflict_graph(t);
    CHECK_FALSE(bipartition(regular));
    const auto c = chromatic_number(regular);
    CHECK(c.chromatic_number == 3);
    CHECK(is_valid_coloring(regular, c));
}

TEST_CASE("chromatic number of small graphs")
{
    CHECK(chromatic_number(graph1(3, {{1, 2}, {2, 3}, {3, 1}})).chromatic_number == 3);
    CHECK(chromatic_number(graph1(3, {{1, 3}, {2, 3}})).chromatic_number == 2);
    CHECK(chromatic_number(graph1(4, {})).chromatic_number == 1);
    CHECK(chromatic_number(graph1(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}})).chromatic_number == 4);
    CHECK(chromatic_number(ConflictGraph(0, {})).chromatic_number == 0);
}

TEST_CASE("exact colouring matches exhaustive enumeration")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 150; ++trial) {
        const auto g = random_graph(2 + trial % 7, 0.1 + 0.05 * (trial % 8), rng);
        const auto c = chromatic_number(g);
        CHECK_FALSE(c.heuristic);
        CHECK(is_valid_coloring(g, c));
        CHECK(c.chromatic_number == chromatic_by_enumeration(g));
    }
}

TEST_CASE("bipartite iff chromatic number at most two, exhaustively on four users")
{
    for (const auto & t : enumerate_topologies(4))
        for (const auto & g : {regular_conflict_graph(t), reduced_conflict_graph(t)}) {
            const auto bp = bipartition(g);
            const auto c = chromatic_number(g);
            CHECK(bp.has_value() == (c.chromatic_number <= 2));
            if (bp)
                CHECK(is_valid_bipartition(g, *bp));
            CHECK(is_valid_coloring(g, c));
        }
}

TEST_CASE("colouring above the exact limit is flagged heuristic but valid")
{
    std::mt19937_64 rng(5);
    const auto g = random_graph(30, 0.08, rng);
    const auto c = chromatic_number(g, 10);
    CHECK(c.heuristic);
    CHECK(is_valid_coloring(g, c));
    CHECK(c.chromatic_number >= chromatic_number(g).chromatic_number);
}

TEST_CASE("validators reject broken structures")
{
    const auto g = graph1(3, {{1, 3}, {2, 3}});
    CHECK_FALSE(is_valid_bipartition(g, {ids({1, 3}), ids({2})}));
    CHECK_FALSE(is_valid_bipartition(g, {ids({1, 2}), ids({})}));
    CHECK_FALSE(is_valid_bipartition(g, {ids({1, 2, 3}), ids({3})}));
    CHECK_FALSE(is_valid_coloring(g, Coloring{{1, 1, 1}, 1, false}));
    CHECK_FALSE(is_valid_coloring(g, Coloring{{1, 1, 3}, 3, false}));
    CHECK(is_valid_coloring(g, Coloring{{1, 1, 2}, 2, false}));
}

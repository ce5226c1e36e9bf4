#pragma once

#include "tim/topology.hpp"

#include <optional>
#include <vector>

namespace tim {

/// Two-colouring of the underlying undirected graph.
struct Bipartition {
    std::vector<UserId> part_one;
    std::vector<UserId> part_two;

    friend bool operator==(const Bipartition &, const Bipartition &) = default;
};

struct Coloring {
    /// color[v] in 1..chromatic_number
    std::vector<std::size_t> color;
    std::size_t chromatic_number = 0;
    /// Set when the graph exceeded the exact-search limit.
    bool heuristic = false;
};

inline constexpr std::size_t default_exact_coloring_limit = 40;

/// Arc directions are ignored. Within each connected component the side
/// holding the smallest vertex goes to part_one; isolated vertices land in
/// part_one as well.
std::optional<Bipartition> bipartition(const ConflictGraph & g);

/// An odd cycle of the underlying undirected graph as a vertex sequence
/// (first vertex not repeated), or empty when the graph is bipartite.
std::vector<UserId> odd_cycle(const ConflictGraph & g);

/// Exact DSATUR branch and bound up to `exact_limit` vertices, DSATUR greedy
/// beyond that.
Coloring chromatic_number(const ConflictGraph & g, std::size_t exact_limit = default_exact_coloring_limit);

bool is_valid_bipartition(const ConflictGraph & g, const Bipartition & bp);
bool is_valid_coloring(const ConflictGraph & g, const Coloring & c);

} // namespace tim

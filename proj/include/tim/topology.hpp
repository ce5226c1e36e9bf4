#pragma once

#include <cstddef>
#include <cstdint>
#include <ranges>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tim {

/// Users are indexed 0..K-1 in memory; text formats use 1..K.
using UserId = std::size_t;

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string & what);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Interference connectivity of a K-user network.
///
/// For every receiver j the set IN_j lists the transmitters heard above the
/// noise floor at D_j. The desired link T_j -> D_j is implicit and never
/// stored. Immutable after construction.
class InterferenceTopology {
public:
    InterferenceTopology() = default;

    /// Throws std::invalid_argument on self-interference or out-of-range ids.
    InterferenceTopology(std::size_t k, std::vector<std::vector<UserId>> interferers);

    /// Topology with no interference links.
    static InterferenceTopology isolated(std::size_t k);

    std::size_t size() const noexcept { return k_; }

    /// Sorted ascending, no duplicates.
    const std::vector<UserId> & interferers(UserId rx) const { return interferers_.at(rx); }

    /// True iff transmitter `tx` is in IN_rx.
    bool interferes(UserId tx, UserId rx) const noexcept { return linked_[tx * k_ + rx] != 0; }

    std::size_t link_count() const noexcept;

    friend bool operator==(const InterferenceTopology &, const InterferenceTopology &) = default;

private:
    std::size_t k_ = 0;
    std::vector<std::vector<UserId>> interferers_;
    std::vector<std::uint8_t> linked_;
};

/// Directed graph on K vertices; arc (i, j) means i conflicts with j.
class ConflictGraph {
public:
    using Arc = std::pair<UserId, UserId>;

    ConflictGraph() = default;
    ConflictGraph(std::size_t k, std::vector<Arc> arcs);

    std::size_t size() const noexcept { return k_; }

    /// Sorted lexicographically, unique.
    const std::vector<Arc> & arcs() const noexcept { return arcs_; }
    bool has_arc(UserId from, UserId to) const noexcept { return adjacency_[from * k_ + to] != 0; }
    bool adjacent(UserId a, UserId b) const noexcept { return has_arc(a, b) || has_arc(b, a); }

    std::size_t out_degree(UserId v) const { return out_degree_.at(v); }

    /// Neighbours in the underlying undirected graph, ascending.
    const std::vector<UserId> & neighbours(UserId v) const { return neighbours_.at(v); }

    friend bool operator==(const ConflictGraph & a, const ConflictGraph & b)
    {
        return a.k_ == b.k_ && a.arcs_ == b.arcs_;
    }

private:
    std::size_t k_ = 0;
    std::vector<Arc> arcs_;
    std::vector<std::uint8_t> adjacency_;
    std::vector<std::size_t> out_degree_;
    std::vector<std::vector<UserId>> neighbours_;
};

/// Parses the `K=<int>` / `<j>: <i1>,<i2>` text format.
InterferenceTopology parse_topology(std::string_view text);

/// Canonical text form: ascending lists, empty receivers omitted.
std::string serialize(const InterferenceTopology & topo);

/// Arc (i, j) iff i is in IN_j.
ConflictGraph regular_conflict_graph(const InterferenceTopology & topo);

/// A transmitter is accompanied when it interferes at some receiver k != i
/// together with at least one other transmitter.
bool is_accompanied(const InterferenceTopology & topo, UserId tx);

/// The regular conflict graph with the out-arcs of unaccompanied
/// transmitters removed.
ConflictGraph reduced_conflict_graph(const InterferenceTopology & topo);

/// Connected components of the co-interference relation, each sorted, the
/// list ordered by smallest member.
std::vector<std::vector<UserId>> alignment_components(const InterferenceTopology & topo);

/// True iff two users of one alignment component conflict with each other.
bool has_internal_conflict(const InterferenceTopology & topo);

inline constexpr std::size_t max_enumeration_users = 5;

/// Number of distinct topologies on k users: 2^(k(k-1)).
std::uint64_t topology_count(std::size_t k);

/// The `index`-th topology in lexicographic order of the k(k-1)-bit link
/// indicator. Links are ordered by (receiver, transmitter); the first link
/// is the most significant bit.
InterferenceTopology topology_at(std::size_t k, std::uint64_t index);

/// Lazily enumerates every topology on k users exactly once.
/// Throws std::invalid_argument when k exceeds max_enumeration_users.
inline auto enumerate_topologies(std::size_t k)
{
    const auto count = topology_count(k);
    return std::views::iota(std::uint64_t{0}, count)
        | std::views::transform([k](std::uint64_t i) { return topology_at(k, i); });
}

} // namespace tim

#pragma once

#include "tim/graphs.hpp"
#include "tim/topology.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tim {

/// Binary activation matrix of a retransmission scheme: user i sends its
/// single symbol in every slot s with active(i, s) == true.
class RetransmissionPattern {
public:
    RetransmissionPattern() = default;

    /// `rows[i][s]` must be 0 or 1 and every row must contain a 1.
    explicit RetransmissionPattern(const std::vector<std::vector<int>> & rows);

    std::size_t users() const noexcept { return k_; }
    std::size_t slots() const noexcept { return n_; }
    bool active(UserId user, std::size_t slot) const { return bits_.at(user * n_ + slot) != 0; }
    std::vector<int> row(UserId user) const;

    /// Same pattern with slots relabelled by reversing their order.
    RetransmissionPattern slots_reversed() const;

    /// One line per user, space-separated 0/1 per slot.
    std::string to_text() const;

    friend bool operator==(const RetransmissionPattern &, const RetransmissionPattern &) = default;

private:
    std::size_t k_ = 0;
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
};

using Complex = std::complex<double>;

/// Per-link slot gains; entry (tx, rx) holds the diagonal of H_{tx,rx}.
class ChannelBlock {
public:
    explicit ChannelBlock(std::size_t n = 0) : n_(n) {}

    std::size_t slots() const noexcept { return n_; }

    /// Throws on length mismatch or an exactly-zero entry.
    void set(UserId tx, UserId rx, std::vector<Complex> gains);
    bool contains(UserId tx, UserId rx) const { return gains_.count({tx, rx}) != 0; }

    /// Throws std::out_of_range when the link is missing.
    const std::vector<Complex> & gains(UserId tx, UserId rx) const;

    const std::map<std::pair<UserId, UserId>, std::vector<Complex>> & links() const noexcept { return gains_; }

private:
    std::size_t n_;
    std::map<std::pair<UserId, UserId>, std::vector<Complex>> gains_;
};

/// i.i.d. unit-variance circularly-symmetric complex normal gains for every
/// link of `topo` (desired links included). With `all_links` every ordered
/// pair is populated.
ChannelBlock draw_generic_channels(const InterferenceTopology & topo, std::size_t n, std::mt19937_64 & rng,
                                   bool all_links = false);

struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational &, const Rational &) = default;
};

struct SchemeResult {
    bool feasible = false;
    std::optional<RetransmissionPattern> pattern;
    /// Achieved symmetric DoF; zero when the scheme is infeasible.
    Rational dof_per_user;
};

inline constexpr double default_rank_tolerance = 1e-9;

/// Two-slot pattern from a bipartition of the reduced conflict graph.
/// Throws std::invalid_argument when `bp` is not a bipartition of `g`.
RetransmissionPattern synthesize_pattern(const ConflictGraph & g, const Bipartition & bp);

/// Per-user check that the desired signal keeps one dimension outside the
/// interference span. Throws on missing gains or a slot-count mismatch.
std::vector<bool> verify_decodability(const InterferenceTopology & topo, const RetransmissionPattern & pat,
                                      const ChannelBlock & ch, double tol = default_rank_tolerance);

/// Half symmetric DoF via retransmission iff the reduced graph is bipartite.
SchemeResult feasibility(const InterferenceTopology & topo);

/// TDMA over a minimum colouring of the regular conflict graph.
SchemeResult avoidance_schedule(const InterferenceTopology & topo,
                                std::size_t exact_limit = default_exact_coloring_limit);

inline constexpr std::size_t brute_force_max_bits = 24;

/// Exhaustive search over K x n binary patterns (denser patterns first,
/// starting at all-ones) for one that decodes every user on each of `draws`
/// independent generic channel blocks. Throws std::length_error when K*n
/// exceeds brute_force_max_bits.
std::optional<RetransmissionPattern> brute_force_search(const InterferenceTopology & topo, std::size_t n,
                                                        std::size_t draws, std::uint64_t seed);

} // namespace tim

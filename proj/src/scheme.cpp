#include "tim/scheme.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tim {

RetransmissionPattern::RetransmissionPattern(const std::vector<std::vector<int>> & rows)
    : k_(rows.size()), n_(rows.empty() ? 0 : rows.front().size())
{
    bits_.reserve(k_ * n_);
    for (std::size_t i = 0; i < k_; ++i) {
        if (rows[i].size() != n_)
            throw std::invalid_argument("pattern rows differ in length");
        bool any = false;
        for (int v : rows[i]) {
            if (v != 0 && v != 1)
                throw std::invalid_argument("pattern entries must be 0 or 1");
            any = any || v == 1;
            bits_.push_back(static_cast<std::uint8_t>(v));
        }
        if (!any)
            throw std::invalid_argument("user " + std::to_string(i + 1) + " never transmits");
    }
}

std::vector<int> RetransmissionPattern::row(UserId user) const
{
    std::vector<int> r(n_);
    for (std::size_t s = 0; s < n_; ++s)
        r[s] = active(user, s) ? 1 : 0;
    return r;
}

RetransmissionPattern RetransmissionPattern::slots_reversed() const
{
    std::vector<std::vector<int>> rows;
    for (UserId i = 0; i < k_; ++i) {
        auto r = row(i);
        std::reverse(r.begin(), r.end());
        rows.push_back(std::move(r));
    }
    return RetransmissionPattern(rows);
}

std::string RetransmissionPattern::to_text() const
{
    std::ostringstream out;
    for (UserId i = 0; i < k_; ++i) {
        for (std::size_t s = 0; s < n_; ++s)
            out << (s ? " " : "") << (active(i, s) ? 1 : 0);
        out << '\n';
    }
    return out.str();
}

void ChannelBlock::set(UserId tx, UserId rx, std::vector<Complex> gains)
{
    if (gains.size() != n_)
        throw std::invalid_argument("gain vector has " + std::to_string(gains.size()) + " slots, block has "
                                    + std::to_string(n_));
    if (std::any_of(gains.begin(), gains.end(), [](Complex g) { return g == Complex{}; }))
        throw std::invalid_argument("channel gains must be nonzero");
    gains_[{tx, rx}] = std::move(gains);
}

const std::vector<Complex> & ChannelBlock::gains(UserId tx, UserId rx) const
{
    auto it = gains_.find({tx, rx});
    if (it == gains_.end())
        throw std::out_of_range("no gains for link " + std::to_string(tx + 1) + " -> " + std::to_string(rx + 1));
    return it->second;
}

ChannelBlock draw_generic_channels(const InterferenceTopology & topo, std::size_t n, std::mt19937_64 & rng,
                                   bool all_links)
{
    std::normal_distribution<double> half_var(0.0, std::sqrt(0.5));
    ChannelBlock ch(n);
    auto draw = [&] {
        std::vector<Complex> g(n);
        for (auto & x : g)
            do {
                x = Complex(half_var(rng), half_var(rng));
            } while (x == Complex{});
        return g;
    };
    for (UserId rx = 0; rx < topo.size(); ++rx)
        for (UserId tx = 0; tx < topo.size(); ++tx)
            if (tx == rx || all_links || topo.interferes(tx, rx))
                ch.set(tx, rx, draw());
    return ch;
}

RetransmissionPattern synthesize_pattern(const ConflictGraph & g, const Bipartition & bp)
{
    if (!is_valid_bipartition(g, bp))
        throw std::invalid_argument("not a bipartition of the conflict graph");

    std::vector<int> side(g.size(), 0);
    for (UserId v : bp.part_two)
        side[v] = 1;

    // The part holding the smallest vertex with outgoing arcs takes slot 1.
    int first_slot_side = 0;
    for (UserId v = 0; v < g.size(); ++v)
        if (g.out_degree(v) > 0) {
            first_slot_side = side[v];
            break;
        }

    std::vector<std::vector<int>> rows(g.size());
    for (UserId v = 0; v < g.size(); ++v) {
        if (g.out_degree(v) == 0)
            rows[v] = {1, 1};
        else if (side[v] == first_slot_side)
            rows[v] = {1, 0};
        else
            rows[v] = {0, 1};
    }
    return RetransmissionPattern(rows);
}

namespace {

Eigen::Index numeric_rank(const Eigen::MatrixXcd & m, double tol)
{
    if (m.cols() == 0 || m.rows() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto & sv = svd.singularValues();
    const double largest = sv.size() ? sv(0) : 0.0;
    if (largest == 0.0)
        return 0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) >= tol * largest)
            ++r;
    return r;
}

// Masked gain vector scaled to unit norm; empty when the user is silent in
// every slot. Column scaling leaves the rank unchanged.
std::optional<Eigen::VectorXcd> masked_column(const std::vector<Complex> & gains, const RetransmissionPattern & pat,
                                              UserId user)
{
    const auto n = static_cast<Eigen::Index>(gains.size());
    Eigen::VectorXcd v(n);
    for (Eigen::Index s = 0; s < n; ++s)
        v(s) = pat.active(user, static_cast<std::size_t>(s)) ? gains[static_cast<std::size_t>(s)] : Complex{};
    const double norm = v.norm();
    if (norm == 0.0)
        return std::nullopt;
    return v / norm;
}

bool user_decodable(const InterferenceTopology & topo, const RetransmissionPattern & pat, const ChannelBlock & ch,
                    UserId rx, double tol)
{
    const auto n = static_cast<Eigen::Index>(pat.slots());
    std::vector<Eigen::VectorXcd> cols;
    for (UserId tx : topo.interferers(rx))
        if (auto c = masked_column(ch.gains(tx, rx), pat, tx))
            cols.push_back(std::move(*c));

    const auto desired = masked_column(ch.gains(rx, rx), pat, rx);
    if (!desired)
        return false;

    Eigen::MatrixXcd stacked(n, static_cast<Eigen::Index>(cols.size()) + 1);
    for (std::size_t c = 0; c < cols.size(); ++c)
        stacked.col(static_cast<Eigen::Index>(c)) = cols[c];
    stacked.col(static_cast<Eigen::Index>(cols.size())) = *desired;

    const auto interference_rank = numeric_rank(stacked.leftCols(static_cast<Eigen::Index>(cols.size())), tol);
    return numeric_rank(stacked, tol) == interference_rank + 1;
}

} // namespace

std::vector<bool> verify_decodability(const InterferenceTopology & topo, const RetransmissionPattern & pat,
                                      const ChannelBlock & ch, double tol)
{
    if (pat.slots() != ch.slots())
        throw std::invalid_argument("pattern has " + std::to_string(pat.slots()) + " slots, channel block has "
                                    + std::to_string(ch.slots()));
    if (pat.users() != topo.size())
        throw std::invalid_argument("pattern and topology disagree on the user count");

    std::vector<bool> ok(topo.size());
    for (UserId rx = 0; rx < topo.size(); ++rx)
        ok[rx] = user_decodable(topo, pat, ch, rx, tol);
    return ok;
}

SchemeResult feasibility(const InterferenceTopology & topo)
{
    const auto g = reduced_conflict_graph(topo);
    auto bp = bipartition(g);
    if (!bp)
        return {};
    return {true, synthesize_pattern(g, *bp), {1, 2}};
}

SchemeResult avoidance_schedule(const InterferenceTopology & topo, std::size_t exact_limit)
{
    const auto colouring = chromatic_number(regular_conflict_graph(topo), exact_limit);
    const auto chi = std::max<std::size_t>(colouring.chromatic_number, 1);
    std::vector<std::vector<int>> rows(topo.size(), std::vector<int>(chi, 0));
    for (UserId v = 0; v < topo.size(); ++v)
        rows[v][colouring.color[v] - 1] = 1;
    return {true, RetransmissionPattern(rows), {1, chi}};
}

std::optional<RetransmissionPattern> brute_force_search(const InterferenceTopology & topo, std::size_t n,
                                                        std::size_t draws, std::uint64_t seed)
{
    const auto k = topo.size();
    const auto bits = k * n;
    if (n == 0 || bits > brute_force_max_bits)
        throw std::length_error("brute-force search over " + std::to_string(bits) + " pattern bits exceeds the limit of "
                                + std::to_string(brute_force_max_bits));

    std::mt19937_64 rng(seed);
    std::vector<ChannelBlock> blocks;
    for (std::size_t d = 0; d < draws; ++d)
        blocks.push_back(draw_generic_channels(topo, n, rng));

    const std::uint64_t all_ones = (std::uint64_t{1} << bits) - 1;
    const std::uint64_t row_mask = (std::uint64_t{1} << n) - 1;
    std::vector<std::vector<int>> rows(k, std::vector<int>(n));

    for (std::uint64_t rank = 0; rank <= all_ones; ++rank) {
        const auto word = all_ones - rank;
        bool rows_ok = true;
        for (UserId i = 0; i < k && rows_ok; ++i) {
            const auto shift = bits - (i + 1) * n;
            const auto r = (word >> shift) & row_mask;
            rows_ok = r != 0;
            for (std::size_t s = 0; s < n; ++s)
                rows[i][s] = static_cast<int>((r >> (n - 1 - s)) & 1U);
        }
        if (!rows_ok)
            continue;

        const RetransmissionPattern pat(rows);
        const bool passes = std::all_of(blocks.begin(), blocks.end(), [&](const ChannelBlock & ch) {
            for (UserId rx = 0; rx < k; ++rx)
                if (!user_decodable(topo, pat, ch, rx, default_rank_tolerance))
                    return false;
            return true;
        });
        if (passes)
            return pat;
    }
    return std::nullopt;
}

} // namespace tim

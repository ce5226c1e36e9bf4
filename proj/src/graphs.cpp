#include "tim/graphs.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace tim {

namespace {

struct BfsColoring {
    std::vector<int> side;       // 0 / 1
    std::vector<UserId> parent;
    std::vector<std::size_t> depth;
    // First edge joining two vertices of the same side, if any.
    std::optional<std::pair<UserId, UserId>> clash;
};

BfsColoring bfs_two_colour(const ConflictGraph & g)
{
    const auto n = g.size();
    BfsColoring r{std::vector<int>(n, -1), std::vector<UserId>(n), std::vector<std::size_t>(n, 0), std::nullopt};
    for (UserId start = 0; start < n; ++start) {
        if (r.side[start] != -1)
            continue;
        r.side[start] = 0;
        r.parent[start] = start;
        std::queue<UserId> q;
        q.push(start);
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            for (UserId u : g.neighbours(v)) {
                if (r.side[u] == -1) {
                    r.side[u] = 1 - r.side[v];
                    r.parent[u] = v;
                    r.depth[u] = r.depth[v] + 1;
                    q.push(u);
                } else if (r.side[u] == r.side[v] && !r.clash) {
                    r.clash = std::make_pair(v, u);
                }
            }
        }
    }
    return r;
}

} // namespace

std::optional<Bipartition> bipartition(const ConflictGraph & g)
{
    const auto r = bfs_two_colour(g);
    if (r.clash)
        return std::nullopt;
    Bipartition bp;
    for (UserId v = 0; v < g.size(); ++v)
        (r.side[v] == 0 ? bp.part_one : bp.part_two).push_back(v);
    return bp;
}

std::vector<UserId> odd_cycle(const ConflictGraph & g)
{
    const auto r = bfs_two_colour(g);
    if (!r.clash)
        return {};
    // Both endpoints share a side, so their tree paths to the common
    // ancestor have equal parity and close an odd cycle with the clash edge.
    auto [a, b] = *r.clash;
    std::vector<UserId> up_a{a}, up_b{b};
    while (r.depth[a] > r.depth[b]) {
        a = r.parent[a];
        up_a.push_back(a);
    }
    while (r.depth[b] > r.depth[a]) {
        b = r.parent[b];
        up_b.push_back(b);
    }
    while (a != b) {
        a = r.parent[a];
        b = r.parent[b];
        up_a.push_back(a);
        up_b.push_back(b);
    }
    up_b.pop_back();
    std::reverse(up_b.begin(), up_b.end());
    up_a.insert(up_a.end(), up_b.begin(), up_b.end());
    return up_a;
}

namespace {

class DsaturSearch {
public:
    explicit DsaturSearch(const ConflictGraph & g)
        : g_(g), n_(g.size()), colour_(n_, 0), neighbour_colours_(n_, std::vector<std::size_t>(n_ + 2, 0)),
          saturation_(n_, 0)
    {
    }

    std::vector<std::size_t> greedy()
    {
        for (std::size_t step = 0; step < n_; ++step) {
            const auto v = pick();
            std::size_t c = 1;
            while (neighbour_colours_[v][c] != 0)
                ++c;
            assign(v, c);
        }
        return colour_;
    }

    /// Returns the best colouring found; `best_k` starts as an upper bound.
    std::vector<std::size_t> exact(std::vector<std::size_t> incumbent, std::size_t lower_bound)
    {
        best_ = std::move(incumbent);
        best_k_ = *std::max_element(best_.begin(), best_.end());
        lower_bound_ = lower_bound;
        if (best_k_ > lower_bound_)
            expand(0, 0);
        return best_;
    }

private:
    UserId pick() const
    {
        UserId best = n_;
        for (UserId v = 0; v < n_; ++v) {
            if (colour_[v] != 0)
                continue;
            if (best == n_ || saturation_[v] > saturation_[best]
                || (saturation_[v] == saturation_[best] && g_.neighbours(v).size() > g_.neighbours(best).size()))
                best = v;
        }
        return best;
    }

    void assign(UserId v, std::size_t c)
    {
        colour_[v] = c;
        for (UserId u : g_.neighbours(v))
            if (neighbour_colours_[u][c]++ == 0)
                ++saturation_[u];
    }

    void unassign(UserId v)
    {
        const auto c = colour_[v];
        colour_[v] = 0;
        for (UserId u : g_.neighbours(v))
            if (--neighbour_colours_[u][c] == 0)
                --saturation_[u];
    }

    void expand(std::size_t coloured, std::size_t used)
    {
        if (best_k_ <= lower_bound_)
            return;
        if (coloured == n_) {
            if (used < best_k_) {
                best_k_ = used;
                best_ = colour_;
            }
            return;
        }
        const auto v = pick();
        for (std::size_t c = 1; c <= used + 1 && c < best_k_; ++c) {
            if (neighbour_colours_[v][c] != 0)
                continue;
            assign(v, c);
            expand(coloured + 1, std::max(used, c));
            unassign(v);
            if (best_k_ <= lower_bound_)
                return;
        }
    }

    const ConflictGraph & g_;
    std::size_t n_;
    std::vector<std::size_t> colour_;
    std::vector<std::vector<std::size_t>> neighbour_colours_;
    std::vector<std::size_t> saturation_;
    std::vector<std::size_t> best_;
    std::size_t best_k_ = 0;
    std::size_t lower_bound_ = 1;
};

std::size_t greedy_clique_size(const ConflictGraph & g)
{
    std::size_t best = g.size() > 0 ? 1 : 0;
    for (UserId seed = 0; seed < g.size(); ++seed) {
        std::vector<UserId> clique{seed};
        auto candidates = g.neighbours(seed);
        std::sort(candidates.begin(), candidates.end(), [&](UserId a, UserId b) {
            return g.neighbours(a).size() > g.neighbours(b).size();
        });
        for (UserId c : candidates)
            if (std::all_of(clique.begin(), clique.end(), [&](UserId m) { return g.adjacent(m, c); }))
                clique.push_back(c);
        best = std::max(best, clique.size());
    }
    return best;
}

} // namespace

Coloring chromatic_number(const ConflictGraph & g, std::size_t exact_limit)
{
    Coloring result;
    if (g.size() == 0)
        return result;

    auto colours = DsaturSearch(g).greedy();
    result.heuristic = g.size() > exact_limit;
    if (!result.heuristic) {
        std::size_t lower = greedy_clique_size(g);
        if (bipartition(g))
            lower = std::max<std::size_t>(lower, g.arcs().empty() ? 1 : 2);
        else
            lower = std::max<std::size_t>(lower, 3);
        colours = DsaturSearch(g).exact(std::move(colours), lower);
    }
    result.chromatic_number = *std::max_element(colours.begin(), colours.end());
    result.color = std::move(colours);
    return result;
}

bool is_valid_bipartition(const ConflictGraph & g, const Bipartition & bp)
{
    std::vector<int> side(g.size(), -1);
    auto place = [&](const std::vector<UserId> & part, int s) {
        for (UserId v : part) {
            if (v >= g.size() || side[v] != -1)
                return false;
            side[v] = s;
        }
        return true;
    };
    if (!place(bp.part_one, 0) || !place(bp.part_two, 1))
        return false;
    if (std::find(side.begin(), side.end(), -1) != side.end())
        return false;
    return std::none_of(g.arcs().begin(), g.arcs().end(),
                        [&](const auto & a) { return side[a.first] == side[a.second]; });
}

bool is_valid_coloring(const ConflictGraph & g, const Coloring & c)
{
    if (c.color.size() != g.size())
        return false;
    std::set<std::size_t> used;
    for (auto col : c.color) {
        if (col < 1 || col > c.chromatic_number)
            return false;
        used.insert(col);
    }
    if (used.size() != c.chromatic_number)
        return false;
    return std::none_of(g.arcs().begin(), g.arcs().end(),
                        [&](const auto & a) { return c.color[a.first] == c.color[a.second]; });
}

} // namespace tim

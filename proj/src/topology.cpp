#include "tim/topology.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

namespace tim {

ParseError::ParseError(std::size_t line, const std::string & what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

InterferenceTopology::InterferenceTopology(std::size_t k, std::vector<std::vector<UserId>> interferers)
    : k_(k), interferers_(std::move(interferers)), linked_(k * k, 0)
{
    if (interferers_.size() != k)
        throw std::invalid_argument("interferer table has " + std::to_string(interferers_.size())
                                    + " rows, expected " + std::to_string(k));

    for (UserId rx = 0; rx < k; ++rx) {
        auto & list = interferers_[rx];
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        for (UserId tx : list) {
            if (tx >= k)
                throw std::invalid_argument("transmitter " + std::to_string(tx + 1) + " out of range 1.."
                                            + std::to_string(k));
            if (tx == rx)
                throw std::invalid_argument("receiver " + std::to_string(rx + 1)
                                            + " lists its own transmitter as interferer");
            linked_[tx * k + rx] = 1;
        }
    }
}

InterferenceTopology InterferenceTopology::isolated(std::size_t k)
{
    return InterferenceTopology(k, std::vector<std::vector<UserId>>(k));
}

std::size_t InterferenceTopology::link_count() const noexcept
{
    return std::accumulate(interferers_.begin(), interferers_.end(), std::size_t{0},
                           [](std::size_t acc, const auto & l) { return acc + l.size(); });
}

ConflictGraph::ConflictGraph(std::size_t k, std::vector<Arc> arcs)
    : k_(k), arcs_(std::move(arcs)), adjacency_(k * k, 0), out_degree_(k, 0), neighbours_(k)
{
    std::sort(arcs_.begin(), arcs_.end());
    arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
    for (auto [from, to] : arcs_) {
        if (from >= k || to >= k)
            throw std::invalid_argument("arc references a vertex outside 1.." + std::to_string(k));
        if (from == to)
            throw std::invalid_argument("self-loop on vertex " + std::to_string(from + 1));
        adjacency_[from * k + to] = 1;
        ++out_degree_[from];
    }
    for (UserId v = 0; v < k; ++v)
        for (UserId u = 0; u < k; ++u)
            if (u != v && adjacent(v, u))
                neighbours_[v].push_back(u);
}

namespace {

std::string_view trim(std::string_view s)
{
    constexpr std::string_view ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, long long & out)
{
    s = trim(s);
    if (s.empty())
        return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

InterferenceTopology parse_topology(std::string_view text)
{
    std::size_t line_no = 0;
    long long k = -1;
    std::vector<std::vector<UserId>> table;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        if (k < 0) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos || trim(line.substr(0, eq)) != "K")
                throw ParseError(line_no, "expected header 'K=<int>'");
            if (!parse_int(line.substr(eq + 1), k) || k < 1)
                throw ParseError(line_no, "user count must be a positive integer");
            table.assign(static_cast<std::size_t>(k), {});
            continue;
        }

        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(line_no, "expected '<receiver>: <transmitters>'");
        long long rx = 0;
        if (!parse_int(line.substr(0, colon), rx))
            throw ParseError(line_no, "receiver index is not an integer");
        if (rx < 1 || rx > k)
            throw ParseError(line_no, "receiver " + std::to_string(rx) + " out of range 1.." + std::to_string(k));

        auto rest = trim(line.substr(colon + 1));
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = rest.substr(0, comma);
            long long tx = 0;
            if (!parse_int(item, tx))
                throw ParseError(line_no, "malformed transmitter index '" + std::string(trim(item)) + "'");
            if (tx < 1 || tx > k)
                throw ParseError(line_no,
                                 "transmitter " + std::to_string(tx) + " out of range 1.." + std::to_string(k));
            if (tx == rx)
                throw ParseError(line_no, "receiver " + std::to_string(rx) + " cannot be interfered by itself");
            table[static_cast<std::size_t>(rx - 1)].push_back(static_cast<UserId>(tx - 1));
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
            if (trim(rest).empty())
                throw ParseError(line_no, "trailing comma");
        }
    }

    if (k < 0)
        throw ParseError(line_no, "missing header 'K=<int>'");
    return InterferenceTopology(static_cast<std::size_t>(k), std::move(table));
}

std::string serialize(const InterferenceTopology & topo)
{
    std::ostringstream out;
    out << "K=" << topo.size() << '\n';
    for (UserId rx = 0; rx < topo.size(); ++rx) {
        const auto & list = topo.interferers(rx);
        if (list.empty())
            continue;
        out << rx + 1 << ": ";
        for (std::size_t i = 0; i < list.size(); ++i)
            out << (i ? "," : "") << list[i] + 1;
        out << '\n';
    }
    return out.str();
}

ConflictGraph regular_conflict_graph(const InterferenceTopology & topo)
{
    std::vector<ConflictGraph::Arc> arcs;
    for (UserId rx = 0; rx < topo.size(); ++rx)
        for (UserId tx : topo.interferers(rx))
            arcs.emplace_back(tx, rx);
    return ConflictGraph(topo.size(), std::move(arcs));
}

bool is_accompanied(const InterferenceTopology & topo, UserId tx)
{
    for (UserId rx = 0; rx < topo.size(); ++rx) {
        if (rx == tx || !topo.interferes(tx, rx))
            continue;
        // tx itself is in IN_rx, so a second entry means company.
        if (topo.interferers(rx).size() >= 2)
            return true;
    }
    return false;
}

ConflictGraph reduced_conflict_graph(const InterferenceTopology & topo)
{
    std::vector<ConflictGraph::Arc> arcs;
    std::vector<bool> accompanied(topo.size());
    for (UserId tx = 0; tx < topo.size(); ++tx)
        accompanied[tx] = is_accompanied(topo, tx);
    for (UserId rx = 0; rx < topo.size(); ++rx)
        for (UserId tx : topo.interferers(rx))
            if (accompanied[tx])
                arcs.emplace_back(tx, rx);
    return ConflictGraph(topo.size(), std::move(arcs));
}

namespace {

std::vector<UserId> alignment_labels(const InterferenceTopology & topo)
{
    std::vector<UserId> parent(topo.size());
    std::iota(parent.begin(), parent.end(), UserId{0});
    auto find = [&](UserId v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    for (UserId rx = 0; rx < topo.size(); ++rx) {
        const auto & list = topo.interferers(rx);
        for (std::size_t a = 1; a < list.size(); ++a) {
            auto ra = find(list[0]);
            auto rb = find(list[a]);
            if (ra != rb)
                parent[std::max(ra, rb)] = std::min(ra, rb);
        }
    }
    std::vector<UserId> label(topo.size());
    for (UserId v = 0; v < topo.size(); ++v)
        label[v] = find(v);
    return label;
}

} // namespace

std::vector<std::vector<UserId>> alignment_components(const InterferenceTopology & topo)
{
    const auto label = alignment_labels(topo);
    std::vector<std::vector<UserId>> by_root(topo.size());
    for (UserId v = 0; v < topo.size(); ++v)
        by_root[label[v]].push_back(v);
    std::vector<std::vector<UserId>> out;
    for (auto & c : by_root)
        if (!c.empty())
            out.push_back(std::move(c));
    // Roots are component minima, so by_root order is already by smallest member.
    return out;
}

bool has_internal_conflict(const InterferenceTopology & topo)
{
    const auto label = alignment_labels(topo);
    for (UserId rx = 0; rx < topo.size(); ++rx)
        for (UserId tx : topo.interferers(rx))
            if (label[tx] == label[rx])
                return true;
    return false;
}

std::uint64_t topology_count(std::size_t k)
{
    if (k > max_enumeration_users)
        throw std::invalid_argument("refusing to enumerate topologies for K=" + std::to_string(k) + " (limit K<="
                                    + std::to_string(max_enumeration_users) + ")");
    return std::uint64_t{1} << (k * (k == 0 ? 0 : k - 1));
}

InterferenceTopology topology_at(std::size_t k, std::uint64_t index)
{
    const auto count = topology_count(k);
    if (index >= count)
        throw std::out_of_range("topology index out of range");
    const std::size_t links = k * (k == 0 ? 0 : k - 1);
    std::vector<std::vector<UserId>> table(k);
    std::size_t bit = 0;
    for (UserId rx = 0; rx < k; ++rx)
        for (UserId tx = 0; tx < k; ++tx) {
            if (tx == rx)
                continue;
            if ((index >> (links - 1 - bit)) & 1U)
                table[rx].push_back(tx);
            ++bit;
        }
    return InterferenceTopology(k, std::move(table));
}

} // namespace tim

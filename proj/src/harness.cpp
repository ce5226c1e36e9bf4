#include "tim/harness.hpp"

#include "tim/graphs.hpp"
#include "tim/scheme.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tim {

CdfFilter parse_cdf_filter(std::string_view name)
{
    if (name == "retx-not-avoidance")
        return CdfFilter::retx_not_avoidance;
    if (name == "retx")
        return CdfFilter::retx_feasible;
    if (name == "all")
        return CdfFilter::all;
    throw std::invalid_argument("unknown filter '" + std::string(name) + "'");
}

const char * to_string(CdfFilter f) noexcept
{
    switch (f) {
    case CdfFilter::retx_not_avoidance:
        return "retx-not-avoidance";
    case CdfFilter::retx_feasible:
        return "retx";
    case CdfFilter::all:
        return "all";
    }
    return "?";
}

void ExperimentConfig::validate() const
{
    network.validate();
    if (trials < 1)
        throw std::invalid_argument("trial count must be at least 1");
    if (k_first > k_last)
        throw std::invalid_argument("empty femto-count range");
    if (k_step < 1)
        throw std::invalid_argument("femto-count step must be at least 1");
}

std::vector<std::size_t> ExperimentConfig::k_values() const
{
    std::vector<std::size_t> ks;
    for (auto k = k_first; k <= k_last; k += k_step)
        ks.push_back(k);
    return ks;
}

ChannelOptions ExperimentConfig::channel() const
{
    ChannelOptions opt;
    opt.shadowing = network.shadowing_std_db > 0;
    opt.shadowing_std_db = network.shadowing_std_db;
    opt.fading = rates.fading;
    return opt;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Runs fn(i) for i in [0, count) on `workers` threads. Each index is
// processed exactly once; callers store results by index.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn && fn)
{
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        });
}

double binomial_stderr(double p, std::size_t n)
{
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

std::string fixed(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

NetworkConfig with_femtos(const NetworkConfig & base, std::size_t k)
{
    auto cfg = base;
    cfg.femto_count = k;
    return cfg;
}

} // namespace

std::uint64_t trial_seed(std::uint64_t master, std::size_t k, std::uint64_t trial) noexcept
{
    return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(k)) ^ trial);
}

TrialDraw draw_trial(const ExperimentConfig & cfg, std::size_t femto_count, std::mt19937_64 & rng)
{
    const auto net = with_femtos(cfg.network, femto_count);
    TrialDraw d;
    d.realization = sample_realization(net, rng);
    d.links = draw_link_budgets(d.realization, PathlossParams::from(net), cfg.channel(), rng);
    d.topology = extract_topology(d.links, net.noise_dbm, cfg.threshold);
    return d;
}

std::string layout_label(const NetworkConfig & cfg)
{
    if (const auto * g = std::get_if<GridSpec>(&cfg.layout))
        return std::to_string(g->a) + "x" + std::to_string(g->b);
    return "hex";
}

std::vector<FeasibilityRow> run_feasibility_sweep(const ExperimentConfig & cfg)
{
    cfg.validate();
    struct Outcome {
        bool retx = false;
        bool avoidance = false;
        bool alignment = false;
    };

    std::vector<FeasibilityRow> rows;
    for (auto k : cfg.k_values()) {
        std::vector<Outcome> outcomes(cfg.trials);
        parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
            std::mt19937_64 rng(trial_seed(cfg.seed, k, t));
            const auto d = draw_trial(cfg, k, rng);
            outcomes[t] = {bipartition(reduced_conflict_graph(d.topology)).has_value(),
                           bipartition(regular_conflict_graph(d.topology)).has_value(),
                           !has_internal_conflict(d.topology)};
        });

        FeasibilityRow row;
        row.k = k;
        row.layout = layout_label(cfg.network);
        row.trials = cfg.trials;
        const auto n = static_cast<double>(cfg.trials);
        row.fraction_retx = static_cast<double>(std::count_if(outcomes.begin(), outcomes.end(), [](auto o) { return o.retx; })) / n;
        row.fraction_avoidance
            = static_cast<double>(std::count_if(outcomes.begin(), outcomes.end(), [](auto o) { return o.avoidance; })) / n;
        row.fraction_alignment
            = static_cast<double>(std::count_if(outcomes.begin(), outcomes.end(), [](auto o) { return o.alignment; })) / n;
        row.stderr_retx = binomial_stderr(row.fraction_retx, cfg.trials);
        row.stderr_avoidance = binomial_stderr(row.fraction_avoidance, cfg.trials);
        row.stderr_alignment = binomial_stderr(row.fraction_alignment, cfg.trials);
        rows.push_back(std::move(row));
    }
    return rows;
}

CdfResult run_rate_cdf(const ExperimentConfig & cfg)
{
    cfg.validate();
    const auto k = cfg.k_first;

    struct TrialRates {
        bool kept = false;
        std::vector<double> retx, avoidance, benchmark;
    };
    std::vector<TrialRates> per_trial(cfg.trials);

    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        std::mt19937_64 rng(trial_seed(cfg.seed, k, t));
        const auto d = draw_trial(cfg, k, rng);
        const bool retx_ok = bipartition(reduced_conflict_graph(d.topology)).has_value();
        const bool avoid_half = bipartition(regular_conflict_graph(d.topology)).has_value();
        bool keep = true;
        switch (cfg.filter) {
        case CdfFilter::retx_not_avoidance:
            keep = retx_ok && !avoid_half;
            break;
        case CdfFilter::retx_feasible:
            keep = retx_ok;
            break;
        case CdfFilter::all:
            break;
        }
        if (!keep)
            return;

        const auto report = evaluate_rates(d.topology, d.links, cfg.network.noise_dbm, cfg.rates, rng);
        auto & out = per_trial[t];
        out.kept = true;
        for (UserId u = 0; u < d.topology.size(); ++u) {
            if (cfg.femto_only && u < d.realization.macro_count)
                continue;
            if (!report.retransmission.empty())
                out.retx.push_back(report.retransmission[u]);
            out.avoidance.push_back(report.avoidance[u]);
            out.benchmark.push_back(report.benchmark[u]);
        }
    });

    CdfResult result;
    result.trials = cfg.trials;
    for (const auto & t : per_trial) {
        if (!t.kept)
            continue;
        ++result.realizations;
        result.retransmission.insert(result.retransmission.end(), t.retx.begin(), t.retx.end());
        result.avoidance.insert(result.avoidance.end(), t.avoidance.begin(), t.avoidance.end());
        result.benchmark.insert(result.benchmark.end(), t.benchmark.begin(), t.benchmark.end());
    }
    std::sort(result.retransmission.begin(), result.retransmission.end());
    std::sort(result.avoidance.begin(), result.avoidance.end());
    std::sort(result.benchmark.begin(), result.benchmark.end());
    result.empty = result.realizations == 0;
    return result;
}

double ComparisonResult::fraction_retx() const noexcept
{
    return trials ? static_cast<double>(retx_feasible) / static_cast<double>(trials) : 0.0;
}

double ComparisonResult::fraction_alignment() const noexcept
{
    return trials ? static_cast<double>(alignment_feasible) / static_cast<double>(trials) : 0.0;
}

ComparisonResult run_scheme_comparison(const ExperimentConfig & cfg)
{
    cfg.validate();
    const auto k = cfg.k_first;
    std::vector<std::pair<bool, bool>> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        std::mt19937_64 rng(trial_seed(cfg.seed, k, t));
        const auto d = draw_trial(cfg, k, rng);
        outcomes[t] = {bipartition(reduced_conflict_graph(d.topology)).has_value(), !has_internal_conflict(d.topology)};
    });

    ComparisonResult r;
    r.trials = cfg.trials;
    for (auto [retx, align] : outcomes) {
        r.retx_feasible += retx;
        r.alignment_feasible += align;
        r.retx_not_alignment += retx && !align;
    }
    return r;
}

double quantile(const std::vector<double> & sorted, double q)
{
    if (sorted.empty())
        throw std::invalid_argument("quantile of an empty sample");
    q = std::clamp(q, 0.0, 1.0);
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

std::string set_text(const std::vector<UserId> & s)
{
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? "," : "") + std::to_string(s[i] + 1);
    return out + "}";
}

std::string arcs_text(const ConflictGraph & g)
{
    if (g.arcs().empty())
        return "(none)";
    std::string out;
    for (std::size_t i = 0; i < g.arcs().size(); ++i) {
        const auto [a, b] = g.arcs()[i];
        out += (i ? " " : "") + std::string("(") + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")";
    }
    return out;
}

std::string dof_text(const Rational & r)
{
    if (r.num == 0)
        return "0";
    if (r.den == 1)
        return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

} // namespace

std::string analyze(std::string_view topology_text)
{
    const auto topo = parse_topology(topology_text);
    const auto regular = regular_conflict_graph(topo);
    const auto reduced = reduced_conflict_graph(topo);

    std::ostringstream out;
    out << "users: " << topo.size() << '\n';
    out << "interference:";
    if (topo.link_count() == 0)
        out << " none";
    out << '\n';
    for (UserId rx = 0; rx < topo.size(); ++rx)
        if (!topo.interferers(rx).empty())
            out << "  IN_" << rx + 1 << " = " << set_text(topo.interferers(rx)) << '\n';

    out << "regular conflict graph: " << arcs_text(regular) << '\n';
    out << "reduced conflict graph: " << arcs_text(reduced) << '\n';

    const auto retx = feasibility(topo);
    if (const auto bp = bipartition(reduced)) {
        out << "reduced graph bipartite: yes, parts " << set_text(bp->part_one) << " and " << set_text(bp->part_two)
            << '\n';
    } else {
        auto cycle = odd_cycle(reduced);
        out << "reduced graph bipartite: no, odd cycle";
        for (UserId v : cycle)
            out << ' ' << v + 1;
        out << '\n';
    }

    out << "retransmission: " << (retx.feasible ? "feasible" : "infeasible") << ", symmetric DoF "
        << (retx.feasible ? dof_text(retx.dof_per_user) : "< 1/2") << '\n';
    if (retx.pattern)
        out << "pattern (rows = users, columns = slots):\n" << retx.pattern->to_text();

    out << "alignment components:";
    for (const auto & c : alignment_components(topo))
        out << ' ' << set_text(c);
    out << '\n';
    out << "internal conflict: " << (has_internal_conflict(topo) ? "yes" : "no") << '\n';

    const auto colouring = chromatic_number(regular);
    const auto avoid = avoidance_schedule(topo);
    out << "regular graph chromatic number: " << colouring.chromatic_number
        << (colouring.heuristic ? " (heuristic upper bound)" : "") << '\n';
    out << "avoidance: symmetric DoF " << dof_text(avoid.dof_per_user) << '\n';
    return out.str();
}

void write_sweep_csv(std::ostream & out, const std::vector<FeasibilityRow> & rows)
{
    out << "K,grid,fraction_retx_feasible,fraction_avoidance_feasible,fraction_alignment_feasible,trials,"
           "stderr_retx,stderr_avoidance,stderr_alignment\n";
    for (const auto & r : rows)
        out << r.k << ',' << r.layout << ',' << fixed(r.fraction_retx) << ',' << fixed(r.fraction_avoidance) << ','
            << fixed(r.fraction_alignment) << ',' << r.trials << ',' << fixed(r.stderr_retx) << ','
            << fixed(r.stderr_avoidance) << ',' << fixed(r.stderr_alignment) << '\n';
}

void write_cdf_csv(std::ostream & out, const CdfResult & result)
{
    out << "scheme,rate,empirical_cdf\n";
    auto emit = [&](const char * name, const std::vector<double> & rates) {
        for (std::size_t i = 0; i < rates.size(); ++i)
            out << name << ',' << fixed(rates[i], 9) << ','
                << fixed(static_cast<double>(i + 1) / static_cast<double>(rates.size()), 9) << '\n';
    };
    emit("retransmission", result.retransmission);
    emit("avoidance", result.avoidance);
    emit("benchmark", result.benchmark);
}

void write_comparison_csv(std::ostream & out, const ExperimentConfig & cfg, const ComparisonResult & result)
{
    out << "K,grid,trials,fraction_retx_feasible,fraction_alignment_feasible,retx_not_alignment\n";
    out << cfg.k_first << ',' << layout_label(cfg.network) << ',' << result.trials << ','
        << fixed(result.fraction_retx()) << ',' << fixed(result.fraction_alignment()) << ','
        << result.retx_not_alignment << '\n';
}

} // namespace tim

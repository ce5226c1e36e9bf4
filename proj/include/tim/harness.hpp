#pragma once

#include "tim/netgen.hpp"
#include "tim/phy.hpp"
#include "tim/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace tim {

enum class CdfFilter {
    retx_not_avoidance, ///< retransmission reaches 1/2, avoidance does not
    retx_feasible,
    all,
};

CdfFilter parse_cdf_filter(std::string_view name);
const char * to_string(CdfFilter f) noexcept;

struct ExperimentConfig {
    NetworkConfig network;
    std::size_t trials = 10000;
    /// Femto counts swept: k_first, k_first + k_step, ... <= k_last.
    std::size_t k_first = 10;
    std::size_t k_last = 10;
    std::size_t k_step = 1;
    CdfFilter filter = CdfFilter::retx_not_avoidance;
    /// Pool only femto users into rate CDFs.
    bool femto_only = false;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    ThresholdMode threshold = ThresholdMode::long_term;
    RateOptions rates;

    void validate() const;
    std::vector<std::size_t> k_values() const;
    ChannelOptions channel() const;
};

/// Seed of the generator driving trial `trial` at femto count `k`;
/// independent of how trials are spread over workers.
std::uint64_t trial_seed(std::uint64_t master, std::size_t k, std::uint64_t trial) noexcept;

struct TrialDraw {
    NetworkRealization realization;
    LinkMatrix links;
    InterferenceTopology topology;
};

/// Realization, link budgets and extracted topology of one trial. `rng` is
/// left positioned for any follow-up fading draws.
TrialDraw draw_trial(const ExperimentConfig & cfg, std::size_t femto_count, std::mt19937_64 & rng);

struct FeasibilityRow {
    std::size_t k = 0;
    std::string layout;
    double fraction_retx = 0.0;
    double fraction_avoidance = 0.0;
    double fraction_alignment = 0.0;
    std::size_t trials = 0;
    double stderr_retx = 0.0;
    double stderr_avoidance = 0.0;
    double stderr_alignment = 0.0;
};

/// Per femto count: how often the reduced graph is bipartite, the regular
/// graph is bipartite, and no internal conflict exists.
std::vector<FeasibilityRow> run_feasibility_sweep(const ExperimentConfig & cfg);

struct CdfResult {
    bool empty = true;
    std::size_t trials = 0;
    std::size_t realizations = 0;
    /// Sorted ascending.
    std::vector<double> retransmission;
    std::vector<double> avoidance;
    std::vector<double> benchmark;
};

/// Pooled per-user rates over realizations passing cfg.filter, at the
/// femto count cfg.k_first.
CdfResult run_rate_cdf(const ExperimentConfig & cfg);

struct ComparisonResult {
    std::size_t trials = 0;
    std::size_t retx_feasible = 0;
    std::size_t alignment_feasible = 0;
    /// Must stay zero: bipartite reduced graph implies no internal conflict.
    std::size_t retx_not_alignment = 0;

    double fraction_retx() const noexcept;
    double fraction_alignment() const noexcept;
};

/// Retransmission versus fixed-channel alignment at femto count cfg.k_first.
ComparisonResult run_scheme_comparison(const ExperimentConfig & cfg);

/// Human-readable feasibility report for one topology file.
/// Parse errors propagate as ParseError.
std::string analyze(std::string_view topology_text);

/// Linear-interpolated quantile of sorted data, q in [0, 1].
double quantile(const std::vector<double> & sorted, double q);

std::string layout_label(const NetworkConfig & cfg);

void write_sweep_csv(std::ostream & out, const std::vector<FeasibilityRow> & rows);
void write_cdf_csv(std::ostream & out, const CdfResult & result);
void write_comparison_csv(std::ostream & out, const ExperimentConfig & cfg, const ComparisonResult & result);

} // namespace tim

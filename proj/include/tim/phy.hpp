#pragma once

#include "tim/graphs.hpp"
#include "tim/netgen.hpp"
#include "tim/scheme.hpp"
#include "tim/topology.hpp"

#include <random>
#include <vector>

namespace tim {

inline constexpr double speed_of_light = 3.0e8;

/// ITU-R P.1411 line-of-sight parameters.
struct PathlossParams {
    double frequency_hz = 0.0;
    double wavelength_m = 0.0;
    double bs_height_m = 0.0;
    double ms_height_m = 0.0;
    double breakpoint_m = 0.0;
    double breakpoint_loss_db = 0.0;

    static PathlossParams make(double frequency_hz, double bs_height_m, double ms_height_m);
    static PathlossParams from(const NetworkConfig & cfg)
    {
        return make(cfg.carrier_hz, cfg.bs_height_m, cfg.ms_height_m);
    }
};

/// Two-slope LoS transmission loss in dB: 20 dB/decade up to the
/// breakpoint, 40 dB/decade beyond. Throws std::domain_error for d <= 0.
double itu1411_pathloss(double distance_m, const PathlossParams & p);

double dbm_to_mw(double dbm) noexcept;
double mw_to_dbm(double mw) noexcept;

/// How "Rayleigh fading with parameter 1" is read.
enum class FadingScale {
    unit_mean_power, ///< |g|^2 ~ Exp(1)
    unit_sigma,      ///< Rayleigh sigma = 1, so E|g|^2 = 2
};

double fading_mean_power(FadingScale s) noexcept;

struct ChannelOptions {
    bool shadowing = true;
    double shadowing_std_db = 10.0;
    FadingScale fading = FadingScale::unit_mean_power;
    /// Shorter separations are evaluated at this distance.
    double min_distance_m = 1.0;
};

struct LinkBudget {
    double distance_m = 0.0;
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    /// One fast-fading power sample; only used by the instantaneous
    /// threshold mode.
    double fading_power = 1.0;
    /// Long-term received power: tx power minus pathloss and shadowing.
    double rx_power_dbm = 0.0;

    double instantaneous_rx_dbm() const noexcept;
};

LinkBudget draw_link(double tx_power_dbm, double distance_m, const PathlossParams & p, const ChannelOptions & opt,
                     std::mt19937_64 & rng);

/// All ordered transmitter/receiver pairs of one realization.
class LinkMatrix {
public:
    LinkMatrix() = default;
    explicit LinkMatrix(std::size_t users) : k_(users), links_(users * users) {}

    std::size_t users() const noexcept { return k_; }
    LinkBudget & at(UserId tx, UserId rx) { return links_.at(tx * k_ + rx); }
    const LinkBudget & at(UserId tx, UserId rx) const { return links_.at(tx * k_ + rx); }

private:
    std::size_t k_ = 0;
    std::vector<LinkBudget> links_;
};

LinkMatrix draw_link_budgets(const NetworkRealization & real, const PathlossParams & p, const ChannelOptions & opt,
                             std::mt19937_64 & rng);

enum class ThresholdMode {
    long_term,     ///< pathloss + shadowing
    instantaneous, ///< additionally one fading sample
};

/// Transmitter i joins IN_j (i != j) iff its power at receiver j reaches the
/// noise floor.
InterferenceTopology extract_topology(const LinkMatrix & links, double noise_dbm,
                                      ThresholdMode mode = ThresholdMode::long_term);

/// Rayleigh-faded slot gains around each link's long-term power, in units of
/// sqrt(mW). With `include_weak` every ordered pair is populated, otherwise
/// only desired links and links of `topo`.
ChannelBlock draw_channel_block(const LinkMatrix & links, const InterferenceTopology & topo, std::size_t n,
                                bool include_weak, FadingScale fading, std::mt19937_64 & rng);

/// Linear-MMSE rate per user over the pattern's block, normalised by the
/// block length. Every link present in `ch` contributes interference.
std::vector<double> rate_retransmission(const RetransmissionPattern & pat, const ChannelBlock & ch, double noise_dbm);

/// (1/chi) log2(1 + SINR) with same-colour interference in slot 1 of `ch`.
std::vector<double> rate_avoidance(const Coloring & coloring, const ChannelBlock & ch, double noise_dbm);

/// Half the interference-free rate from the slot-1 desired gain.
std::vector<double> rate_benchmark(const ChannelBlock & ch, std::size_t users, double noise_dbm);

/// Same, using long-term SNR without fast fading.
std::vector<double> rate_benchmark_long_term(const LinkMatrix & links, double noise_dbm);

struct RateReport {
    bool retransmission_feasible = false;
    bool avoidance_half_dof = false;
    std::size_t chromatic_number = 0;
    /// Empty when retransmission is infeasible.
    std::vector<double> retransmission;
    std::vector<double> avoidance;
    std::vector<double> benchmark;
};

struct RateOptions {
    FadingScale fading = FadingScale::unit_mean_power;
    bool benchmark_long_term = false;
    std::size_t exact_coloring_limit = default_exact_coloring_limit;
};

/// Evaluates all three schemes on one fresh two-slot channel block that
/// includes the weak links.
RateReport evaluate_rates(const InterferenceTopology & topo, const LinkMatrix & links, double noise_dbm,
                          const RateOptions & opt, std::mt19937_64 & rng);

} // namespace tim

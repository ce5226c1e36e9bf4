#include "tim/phy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tim {

PathlossParams PathlossParams::make(double frequency_hz, double bs_height_m, double ms_height_m)
{
    if (!(frequency_hz > 0) || !(bs_height_m > 0) || !(ms_height_m > 0))
        throw std::invalid_argument("frequency and antenna heights must be positive");
    PathlossParams p;
    p.frequency_hz = frequency_hz;
    p.wavelength_m = speed_of_light / frequency_hz;
    p.bs_height_m = bs_height_m;
    p.ms_height_m = ms_height_m;
    p.breakpoint_m = 4 * bs_height_m * ms_height_m / p.wavelength_m;
    p.breakpoint_loss_db = std::abs(
        20 * std::log10(p.wavelength_m * p.wavelength_m / (8 * std::numbers::pi * bs_height_m * ms_height_m)));
    return p;
}

double itu1411_pathloss(double distance_m, const PathlossParams & p)
{
    if (!(distance_m > 0))
        throw std::domain_error("pathloss distance must be positive");
    const double slope = distance_m <= p.breakpoint_m ? 20.0 : 40.0;
    return p.breakpoint_loss_db + 6.0 + slope * std::log10(distance_m / p.breakpoint_m);
}

double dbm_to_mw(double dbm) noexcept
{
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw) noexcept
{
    return 10.0 * std::log10(mw);
}

double fading_mean_power(FadingScale s) noexcept
{
    return s == FadingScale::unit_sigma ? 2.0 : 1.0;
}

double LinkBudget::instantaneous_rx_dbm() const noexcept
{
    return rx_power_dbm + 10.0 * std::log10(fading_power);
}

LinkBudget draw_link(double tx_power_dbm, double distance_m, const PathlossParams & p, const ChannelOptions & opt,
                     std::mt19937_64 & rng)
{
    if (!(distance_m > 0))
        throw std::domain_error("link distance must be positive");
    LinkBudget b;
    b.distance_m = distance_m;
    b.pathloss_db = itu1411_pathloss(std::max(distance_m, opt.min_distance_m), p);
    if (opt.shadowing && opt.shadowing_std_db > 0)
        b.shadowing_db = std::normal_distribution<double>(0.0, opt.shadowing_std_db)(rng);
    do {
        b.fading_power = std::exponential_distribution<double>(1.0 / fading_mean_power(opt.fading))(rng);
    } while (b.fading_power == 0.0);
    b.rx_power_dbm = tx_power_dbm - b.pathloss_db - b.shadowing_db;
    return b;
}

LinkMatrix draw_link_budgets(const NetworkRealization & real, const PathlossParams & p, const ChannelOptions & opt,
                             std::mt19937_64 & rng)
{
    const auto k = real.users();
    LinkMatrix m(k);
    for (UserId tx = 0; tx < k; ++tx)
        for (UserId rx = 0; rx < k; ++rx) {
            // Coincident nodes are evaluated at the minimum distance.
            const double d = std::max(distance(real.transmitters[tx].position, real.receivers[rx]), 1e-9);
            m.at(tx, rx) = draw_link(real.transmitters[tx].power_dbm, d, p, opt, rng);
        }
    return m;
}

InterferenceTopology extract_topology(const LinkMatrix & links, double noise_dbm, ThresholdMode mode)
{
    const auto k = links.users();
    std::vector<std::vector<UserId>> table(k);
    for (UserId rx = 0; rx < k; ++rx)
        for (UserId tx = 0; tx < k; ++tx) {
            if (tx == rx)
                continue;
            const auto & b = links.at(tx, rx);
            const double level = mode == ThresholdMode::long_term ? b.rx_power_dbm : b.instantaneous_rx_dbm();
            if (level >= noise_dbm)
                table[rx].push_back(tx);
        }
    return InterferenceTopology(k, std::move(table));
}

ChannelBlock draw_channel_block(const LinkMatrix & links, const InterferenceTopology & topo, std::size_t n,
                                bool include_weak, FadingScale fading, std::mt19937_64 & rng)
{
    if (n < 1)
        throw std::invalid_argument("channel block needs at least one slot");
    if (links.users() != topo.size())
        throw std::invalid_argument("link matrix and topology disagree on the user count");
    std::normal_distribution<double> component(0.0, std::sqrt(fading_mean_power(fading) / 2.0));
    ChannelBlock ch(n);
    for (UserId rx = 0; rx < topo.size(); ++rx)
        for (UserId tx = 0; tx < topo.size(); ++tx) {
            if (!(tx == rx || include_weak || topo.interferes(tx, rx)))
                continue;
            const double amplitude = std::sqrt(dbm_to_mw(links.at(tx, rx).rx_power_dbm));
            std::vector<Complex> g(n);
            for (auto & x : g) {
                Complex f;
                do {
                    f = Complex(component(rng), component(rng));
                } while (f == Complex{});
                x = amplitude * f;
            }
            ch.set(tx, rx, std::move(g));
        }
    return ch;
}

std::vector<double> rate_retransmission(const RetransmissionPattern & pat, const ChannelBlock & ch, double noise_dbm)
{
    if (pat.slots() != ch.slots())
        throw std::invalid_argument("pattern and channel block differ in slot count");
    const auto n = static_cast<Eigen::Index>(pat.slots());
    const auto k = pat.users();
    // Work in noise-normalised units so the covariance is I + sum b b^H.
    const double inv_amplitude = 1.0 / std::sqrt(dbm_to_mw(noise_dbm));

    auto masked = [&](UserId tx, UserId rx) {
        const auto & g = ch.gains(tx, rx);
        Eigen::VectorXcd v(n);
        for (Eigen::Index s = 0; s < n; ++s)
            v(s) = pat.active(tx, static_cast<std::size_t>(s)) ? g[static_cast<std::size_t>(s)] * inv_amplitude
                                                               : Complex{};
        return v;
    };

    std::vector<Eigen::MatrixXcd> covariance(k, Eigen::MatrixXcd::Identity(n, n));
    for (const auto & [link, gains] : ch.links()) {
        const auto [tx, rx] = link;
        if (tx == rx)
            continue;
        if (tx >= k || rx >= k)
            throw std::invalid_argument("channel block references users outside the pattern");
        const auto b = masked(tx, rx);
        covariance[rx] += b * b.adjoint();
    }

    std::vector<double> rates(k);
    for (UserId j = 0; j < k; ++j) {
        const auto d = masked(j, j);
        const Eigen::LDLT<Eigen::MatrixXcd> solver(covariance[j]);
        const double sinr = std::max(0.0, (d.adjoint() * solver.solve(d))(0, 0).real());
        rates[j] = std::log2(1.0 + sinr) / static_cast<double>(n);
    }
    return rates;
}

std::vector<double> rate_avoidance(const Coloring & coloring, const ChannelBlock & ch, double noise_dbm)
{
    const auto k = coloring.color.size();
    const double noise = dbm_to_mw(noise_dbm);
    const double chi = static_cast<double>(std::max<std::size_t>(coloring.chromatic_number, 1));
    std::vector<double> signal(k, 0.0);
    std::vector<double> interference(k, 0.0);
    for (const auto & [link, gains] : ch.links()) {
        const auto [tx, rx] = link;
        if (tx >= k || rx >= k)
            throw std::invalid_argument("channel block references users outside the colouring");
        const double power = std::norm(gains.front());
        if (tx == rx)
            signal[rx] = power;
        else if (coloring.color[tx] == coloring.color[rx])
            interference[rx] += power;
    }
    std::vector<double> rates(k);
    for (UserId j = 0; j < k; ++j)
        rates[j] = std::log2(1.0 + signal[j] / (noise + interference[j])) / chi;
    return rates;
}

std::vector<double> rate_benchmark(const ChannelBlock & ch, std::size_t users, double noise_dbm)
{
    const double noise = dbm_to_mw(noise_dbm);
    std::vector<double> rates(users);
    for (UserId j = 0; j < users; ++j)
        rates[j] = 0.5 * std::log2(1.0 + std::norm(ch.gains(j, j).front()) / noise);
    return rates;
}

std::vector<double> rate_benchmark_long_term(const LinkMatrix & links, double noise_dbm)
{
    const double noise = dbm_to_mw(noise_dbm);
    std::vector<double> rates(links.users());
    for (UserId j = 0; j < links.users(); ++j)
        rates[j] = 0.5 * std::log2(1.0 + dbm_to_mw(links.at(j, j).rx_power_dbm) / noise);
    return rates;
}

RateReport evaluate_rates(const InterferenceTopology & topo, const LinkMatrix & links, double noise_dbm,
                          const RateOptions & opt, std::mt19937_64 & rng)
{
    RateReport report;
    const auto retx = feasibility(topo);
    const auto regular = regular_conflict_graph(topo);
    const auto colouring = chromatic_number(regular, opt.exact_coloring_limit);
    report.retransmission_feasible = retx.feasible;
    report.avoidance_half_dof = bipartition(regular).has_value();
    report.chromatic_number = colouring.chromatic_number;

    const auto ch = draw_channel_block(links, topo, 2, true, opt.fading, rng);
    if (retx.feasible)
        report.retransmission = rate_retransmission(*retx.pattern, ch, noise_dbm);
    report.avoidance = rate_avoidance(colouring, ch, noise_dbm);
    report.benchmark = opt.benchmark_long_term ? rate_benchmark_long_term(links, noise_dbm)
                                               : rate_benchmark(ch, topo.size(), noise_dbm);
    return report;
}

} // namespace tim

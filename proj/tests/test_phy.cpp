#include "tim/phy.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace tim;
using tim::test::ids;

namespace {

const PathlossParams default_params = PathlossParams::make(2.4e9, 1.5, 1.5);

ChannelOptions no_shadowing()
{
    ChannelOptions opt;
    opt.shadowing = false;
    return opt;
}

// Closed-form MMSE SINR for two slots: d^H (I + sum b b^H)^-1 d with the
// 2x2 inverse written out.
double mmse_two_slots(const std::vector<Complex> & d, const std::vector<std::vector<Complex>> & interferers)
{
    Complex a = 1, b = 0, c = 0, e = 1; // [[a, b], [c, e]]
    for (const auto & v : interferers) {
        a += v[0] * std::conj(v[0]);
        b += v[0] * std::conj(v[1]);
        c += v[1] * std::conj(v[0]);
        e += v[1] * std::conj(v[1]);
    }
    const Complex det = a * e - b * c;
    const Complex y0 = (e * d[0] - b * d[1]) / det;
    const Complex y1 = (-c * d[0] + a * d[1]) / det;
    return (std::conj(d[0]) * y0 + std::conj(d[1]) * y1).real();
}

Complex cn(std::mt19937_64 & rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    return {n(rng), n(rng)};
}

NetworkRealization pairs(std::vector<std::pair<Point, Point>> tx_rx, double power)
{
    NetworkRealization r;
    for (auto [t, x] : tx_rx) {
        r.transmitters.push_back({NodeKind::femto, t, power});
        r.receivers.push_back(x);
    }
    return r;
}

} // namespace

TEST_CASE("pathloss parameters")
{
    CHECK(default_params.wavelength_m == doctest::Approx(0.125));
    CHECK(default_params.breakpoint_m == doctest::Approx(72.0));
    CHECK(default_params.breakpoint_loss_db == doctest::Approx(71.17).epsilon(1e-4));
    CHECK_THROWS_AS(PathlossParams::make(0, 1.5, 1.5), std::invalid_argument);
}

TEST_CASE("ITU-1411 pathloss values")
{
    CHECK(std::abs(itu1411_pathloss(72, default_params) - 77.17) < 0.05);
    CHECK(std::abs(itu1411_pathloss(720, default_params) - 117.17) < 0.05);
    CHECK(std::abs(itu1411_pathloss(7.2, default_params) - 57.17) < 0.05);

    const double lbp = std::abs(20 * std::log10(0.125 * 0.125 / (8 * std::numbers::pi * 1.5 * 1.5)));
    for (double d : {0.5, 3.0, 50.0, 72.0, 100.0, 5000.0}) {
        const double slope = d <= 72 ? 20 : 40;
        CHECK(itu1411_pathloss(d, default_params) == doctest::Approx(lbp + 6 + slope * std::log10(d / 72)));
    }

    CHECK_THROWS_AS(itu1411_pathloss(0, default_params), std::domain_error);
    CHECK_THROWS_AS(itu1411_pathloss(-3, default_params), std::domain_error);
}

TEST_CASE("pathloss is continuous and strictly increasing")
{
    const double bp = default_params.breakpoint_m;
    const double below = itu1411_pathloss(bp * (1 - 1e-12), default_params);
    const double above = itu1411_pathloss(bp * (1 + 1e-12), default_params);
    CHECK(std::abs(above - below) < 1e-9);
    CHECK(std::abs(itu1411_pathloss(bp, default_params) - default_params.breakpoint_loss_db - 6) < 1e-9);

    double previous = -std::numeric_limits<double>::infinity();
    for (double d = 0.1; d < 20000; d *= 1.01) {
        const double l = itu1411_pathloss(d, default_params);
        CHECK(l > previous);
        previous = l;
    }
}

TEST_CASE("dBm conversions")
{
    CHECK(dbm_to_mw(0) == doctest::Approx(1));
    CHECK(dbm_to_mw(20) == doctest::Approx(100));
    CHECK(mw_to_dbm(1e-10) == doctest::Approx(-100));
}

TEST_CASE("draw_link long-term power")
{
    std::mt19937_64 rng(1);
    CHECK(draw_link(20, 72, default_params, no_shadowing(), rng).rx_power_dbm
          == doctest::Approx(-57.17).epsilon(1e-3));
    CHECK(std::abs(draw_link(10, 10, default_params, no_shadowing(), rng).rx_power_dbm - -50.0) < 0.05);

    const auto b = draw_link(20, 0.2, default_params, no_shadowing(), rng);
    CHECK(b.pathloss_db == doctest::Approx(itu1411_pathloss(1.0, default_params)));
    CHECK(b.distance_m == 0.2);
    CHECK(b.fading_power > 0);
    CHECK(b.instantaneous_rx_dbm() == doctest::Approx(b.rx_power_dbm + 10 * std::log10(b.fading_power)));
}

TEST_CASE("shadowing and fading statistics")
{
    std::mt19937_64 rng(2);
    ChannelOptions opt;
    const int draws = 100000;
    double sum = 0, sum2 = 0, fading = 0;
    for (int i = 0; i < draws; ++i) {
        const auto b = draw_link(10, 300, default_params, opt, rng);
        sum += b.rx_power_dbm;
        sum2 += b.rx_power_dbm * b.rx_power_dbm;
        fading += b.fading_power;
    }
    const double mean = sum / draws;
    const double std = std::sqrt(sum2 / draws - mean * mean);
    CHECK(std::abs(std - 10.0) <= 0.2);
    CHECK(std::abs(mean - (10 - itu1411_pathloss(300, default_params))) < 0.2);
    CHECK(std::abs(fading / draws - 1.0) <= 0.02);

    opt.fading = FadingScale::unit_sigma;
    fading = 0;
    for (int i = 0; i < draws; ++i)
        fading += draw_link(10, 300, default_params, opt, rng).fading_power;
    CHECK(std::abs(fading / draws - 2.0) <= 0.04);
}

TEST_CASE("extract_topology thresholds long-term power at the noise floor")
{
    std::mt19937_64 rng(3);

    SUBCASE("two pairs ten kilometres apart do not interfere")
    {
        auto r = pairs({{{0, 0}, {0, 5}}, {{10000, 0}, {10000, 5}}}, 20);
        const auto links = draw_link_budgets(r, default_params, no_shadowing(), rng);
        CHECK(links.at(0, 1).rx_power_dbm == doctest::Approx(-142.9).epsilon(1e-3));
        CHECK(extract_topology(links, -100).link_count() == 0);
    }

    SUBCASE("two femto pairs twenty metres apart interfere mutually")
    {
        auto r = pairs({{{0, 0}, {0, 0}}, {{20, 0}, {20, 0}}}, 10);
        const auto links = draw_link_budgets(r, default_params, no_shadowing(), rng);
        CHECK(std::abs(links.at(0, 1).rx_power_dbm - -56.0) < 0.1);
        const auto t = extract_topology(links, -100);
        CHECK(t.interferers(0) == ids({2}));
        CHECK(t.interferers(1) == ids({1}));
    }

    SUBCASE("an infinitely low floor connects everything")
    {
        auto r = pairs({{{0, 0}, {0, 1}}, {{9000, 0}, {9000, 1}}, {{0, 9000}, {1, 9000}}}, 10);
        const auto links = draw_link_budgets(r, default_params, ChannelOptions{}, rng);
        CHECK(extract_topology(links, -std::numeric_limits<double>::infinity()).link_count() == 6);
    }

    SUBCASE("raising the noise floor never adds links")
    {
        NetworkConfig cfg;
        cfg.femto_count = 30;
        for (int trial = 0; trial < 20; ++trial) {
            const auto real = sample_realization(cfg, rng);
            const auto links = draw_link_budgets(real, default_params, ChannelOptions{}, rng);
            for (auto mode : {ThresholdMode::long_term, ThresholdMode::instantaneous}) {
                auto previous = extract_topology(links, -140, mode);
                for (double noise = -130; noise <= -60; noise += 10) {
                    const auto t = extract_topology(links, noise, mode);
                    for (UserId tx = 0; tx < t.size(); ++tx)
                        for (UserId rx = 0; rx < t.size(); ++rx)
                            CHECK((!t.interferes(tx, rx) || previous.interferes(tx, rx)));
                    previous = t;
                }
            }
        }
    }
}

TEST_CASE("channel blocks")
{
    std::mt19937_64 rng(4);
    auto r = pairs({{{0, 0}, {0, 3}}, {{15, 0}, {15, 3}}, {{5000, 0}, {5000, 3}}}, 10);
    const auto links = draw_link_budgets(r, default_params, no_shadowing(), rng);
    const auto topo = extract_topology(links, -100);
    REQUIRE(topo.interferers(0) == ids({2}));
    REQUIRE(topo.interferers(2).empty());

    const auto narrow = draw_channel_block(links, topo, 2, false, FadingScale::unit_mean_power, rng);
    std::set<std::pair<UserId, UserId>> keys;
    for (const auto & [link, g] : narrow.links()) {
        keys.insert(link);
        CHECK(g.size() == 2);
    }
    CHECK(keys == std::set<std::pair<UserId, UserId>>{{0, 0}, {1, 1}, {2, 2}, {1, 0}, {0, 1}});

    const auto wide = draw_channel_block(links, topo, 3, true, FadingScale::unit_mean_power, rng);
    CHECK(wide.links().size() == 9);
    CHECK(wide.gains(2, 0).size() == 3);

    CHECK_THROWS_AS(draw_channel_block(links, topo, 0, true, FadingScale::unit_mean_power, rng),
                    std::invalid_argument);
}

TEST_CASE("channel gain power matches the long-term power")
{
    std::mt19937_64 rng(5);
    LinkMatrix links(1);
    links.at(0, 0).rx_power_dbm = -60;
    const auto topo = InterferenceTopology::isolated(1);
    const std::size_t n = 100000;
    for (auto [scale, expected] : {std::pair{FadingScale::unit_mean_power, 1.0}, {FadingScale::unit_sigma, 2.0}}) {
        const auto ch = draw_channel_block(links, topo, n, false, scale, rng);
        double power = 0;
        for (auto g : ch.gains(0, 0))
            power += std::norm(g);
        CHECK(std::abs(power / n / dbm_to_mw(-60) - expected) <= 0.02 * expected);
    }
}

TEST_CASE("retransmission MMSE rates")
{
    const double noise_dbm = 0; // 1 mW, so |h|^2 reads as SNR

    SUBCASE("single user on both slots")
    {
        ChannelBlock ch(2);
        ch.set(0, 0, {Complex(2, 0), Complex(2, 0)});
        const auto r = rate_retransmission(RetransmissionPattern({{1, 1}}), ch, noise_dbm);
        CHECK(r[0] == doctest::Approx(0.5 * std::log2(1 + 2 * 4.0)));
    }

    SUBCASE("single user on one slot")
    {
        ChannelBlock ch(2);
        ch.set(0, 0, {Complex(0, 3), Complex(5, 0)});
        const auto r = rate_retransmission(RetransmissionPattern({{1, 0}}), ch, noise_dbm);
        CHECK(r[0] == doctest::Approx(0.5 * std::log2(1 + 9.0)));
    }

    SUBCASE("noise scaling")
    {
        ChannelBlock ch(2);
        ch.set(0, 0, {Complex(1e-5, 0), Complex(1e-5, 0)});
        const auto r = rate_retransmission(RetransmissionPattern({{1, 1}}), ch, -100);
        CHECK(r[0] == doctest::Approx(0.5 * std::log2(1 + 2.0)));
    }

    SUBCASE("clean second slot lower-bounds the rate")
    {
        std::mt19937_64 rng(6);
        const RetransmissionPattern pat({{1, 0}, {1, 0}, {1, 1}});
        for (int trial = 0; trial < 200; ++trial) {
            ChannelBlock ch(2);
            for (UserId tx = 0; tx < 3; ++tx)
                for (UserId rx = 0; rx < 3; ++rx)
                    ch.set(tx, rx, {cn(rng) * (tx == rx ? 3.0 : 30.0), cn(rng) * (tx == rx ? 3.0 : 30.0)});
            const auto r = rate_retransmission(pat, ch, noise_dbm);
            CHECK(r[2] >= 0.5 * std::log2(1 + std::norm(ch.gains(2, 2)[1])) - 1e-12);
        }
    }

    SUBCASE("agrees with the closed-form two-slot MMSE")
    {
        std::mt19937_64 rng(7);
        const RetransmissionPattern pat({{1, 0}, {0, 1}, {1, 1}, {1, 0}});
        for (int trial = 0; trial < 200; ++trial) {
            ChannelBlock ch(2);
            for (UserId tx = 0; tx < 4; ++tx)
                for (UserId rx = 0; rx < 4; ++rx)
                    if (tx == rx || (tx + rx + trial) % 3 != 0)
                        ch.set(tx, rx, {cn(rng) * 4.0, cn(rng) * 4.0});
            const auto rates = rate_retransmission(pat, ch, noise_dbm);
            for (UserId j = 0; j < 4; ++j) {
                auto masked = [&](UserId tx) {
                    auto g = ch.gains(tx, j);
                    for (std::size_t s = 0; s < 2; ++s)
                        if (!pat.active(tx, s))
                            g[s] = 0;
                    return g;
                };
                std::vector<std::vector<Complex>> interferers;
                for (UserId i = 0; i < 4; ++i)
                    if (i != j && ch.contains(i, j))
                        interferers.push_back(masked(i));
                CHECK(rates[j] == doctest::Approx(0.5 * std::log2(1 + mmse_two_slots(masked(j), interferers))));
            }
        }
    }

    SUBCASE("without interference two looks beat the benchmark")
    {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 100; ++trial) {
            ChannelBlock ch(2);
            for (UserId u = 0; u < 3; ++u)
                ch.set(u, u, {cn(rng) * 10.0, cn(rng) * 10.0});
            const auto retx = rate_retransmission(RetransmissionPattern({{1, 1}, {1, 1}, {1, 1}}), ch, noise_dbm);
            const auto bench = rate_benchmark(ch, 3, noise_dbm);
            for (UserId u = 0; u < 3; ++u)
                CHECK(retx[u] >= bench[u]);
        }
    }

    ChannelBlock three(3);
    three.set(0, 0, {1, 1, 1});
    CHECK_THROWS_AS(rate_retransmission(RetransmissionPattern({{1, 1}}), three, noise_dbm), std::invalid_argument);
}

TEST_CASE("avoidance and benchmark rates")
{
    const double noise_dbm = 0;

    ChannelBlock single(2);
    single.set(0, 0, {Complex(0, 2), Complex(1, 0)});
    CHECK(rate_avoidance(Coloring{{1}, 1, false}, single, noise_dbm)[0] == doctest::Approx(std::log2(5.0)));

    ChannelBlock two(2);
    two.set(0, 0, {Complex(2, 0), Complex(1, 0)});
    two.set(1, 1, {Complex(1, 1), Complex(1, 0)});
    two.set(0, 1, {Complex(7, 0), Complex(1, 0)});
    const auto avoid = rate_avoidance(Coloring{{1, 2}, 2, false}, two, noise_dbm);
    CHECK(avoid[0] == doctest::Approx(0.5 * std::log2(5.0)));
    CHECK(avoid[1] == doctest::Approx(0.5 * std::log2(3.0)));
    const auto shared = rate_avoidance(Coloring{{1, 1}, 2, false}, two, noise_dbm);
    CHECK(shared[1] == doctest::Approx(0.5 * std::log2(1 + 2.0 / 50)));

    for (auto [snr, rate] : {std::pair{0.0, 0.0}, {3.0, 1.0}, {15.0, 2.0}}) {
        ChannelBlock ch(2);
        if (snr > 0) {
            ch.set(0, 0, {Complex(std::sqrt(snr), 0), Complex(9, 9)});
            CHECK(rate_benchmark(ch, 1, noise_dbm)[0] == doctest::Approx(rate));
        } else {
            CHECK_THROWS_AS(ch.set(0, 0, {Complex(0, 0), Complex(1, 0)}), std::invalid_argument);
            LinkMatrix lm(1);
            lm.at(0, 0).rx_power_dbm = -std::numeric_limits<double>::infinity();
            CHECK(rate_benchmark_long_term(lm, noise_dbm)[0] == doctest::Approx(rate));
        }
    }

    LinkMatrix lm(1);
    lm.at(0, 0).rx_power_dbm = 10 * std::log10(15.0);
    CHECK(rate_benchmark_long_term(lm, noise_dbm)[0] == doctest::Approx(2.0));
}

TEST_CASE("evaluate_rates on sampled networks")
{
    NetworkConfig cfg;
    cfg.femto_count = 25;
    std::mt19937_64 rng(9);
    std::size_t checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto real = sample_realization(cfg, rng);
        const auto links = draw_link_budgets(real, default_params, ChannelOptions{}, rng);
        const auto topo = extract_topology(links, cfg.noise_dbm);

        const auto seed = rng();
        std::mt19937_64 a(seed), b(seed);
        const auto report = evaluate_rates(topo, links, cfg.noise_dbm, RateOptions{}, a);
        const auto again = evaluate_rates(topo, links, cfg.noise_dbm, RateOptions{}, b);
        CHECK(report.retransmission == again.retransmission);
        CHECK(report.avoidance == again.avoidance);
        CHECK(report.benchmark == again.benchmark);

        CHECK(report.retransmission_feasible == feasibility(topo).feasible);
        CHECK(report.retransmission.size() == (report.retransmission_feasible ? topo.size() : 0));
        CHECK(report.avoidance.size() == topo.size());
        for (auto r : report.retransmission)
            CHECK(r >= 0);
        for (auto r : report.avoidance)
            CHECK(r >= 0);
        if (report.chromatic_number >= 2) {
            for (UserId u = 0; u < topo.size(); ++u)
                CHECK(report.avoidance[u] <= report.benchmark[u] + 1e-12);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

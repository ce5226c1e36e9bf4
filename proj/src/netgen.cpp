#include "tim/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace tim {

double distance(Point a, Point b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

Cell::Cell(Point center, std::vector<Point> vertices) : center_(center), vertices_(std::move(vertices))
{
    if (vertices_.size() < 3)
        throw std::invalid_argument("a cell needs at least three vertices");
}

namespace {

double cross(Point o, Point a, Point b) noexcept
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

} // namespace

bool Cell::contains(Point p) const noexcept
{
    const auto n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto & a = vertices_[i];
        const auto & b = vertices_[(i + 1) % n];
        const double scale = distance(a, b);
        if (cross(a, b, p) < -1e-9 * scale)
            return false;
    }
    return true;
}

double Cell::distance_to_boundary(Point p) const noexcept
{
    double best = std::numeric_limits<double>::infinity();
    const auto n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto & a = vertices_[i];
        const auto & b = vertices_[(i + 1) % n];
        best = std::min(best, std::abs(cross(a, b, p)) / distance(a, b));
    }
    return best;
}

double Cell::radius_along(double angle) const noexcept
{
    const Point dir{std::cos(angle), std::sin(angle)};
    double best = std::numeric_limits<double>::infinity();
    const auto n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto & a = vertices_[i];
        const auto & b = vertices_[(i + 1) % n];
        // Solve center + t*dir = a + u*(b-a).
        const Point e{b.x - a.x, b.y - a.y};
        const double denom = dir.x * e.y - dir.y * e.x;
        if (std::abs(denom) < 1e-15)
            continue;
        const Point w{a.x - center_.x, a.y - center_.y};
        const double t = (w.x * e.y - w.y * e.x) / denom;
        const double u = (w.x * dir.y - w.y * dir.x) / denom;
        if (t > 0 && u >= -1e-12 && u <= 1 + 1e-12)
            best = std::min(best, t);
    }
    return best;
}

double Cell::area() const noexcept
{
    double twice = 0.0;
    const auto n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto & a = vertices_[i];
        const auto & b = vertices_[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return std::abs(twice) / 2.0;
}

std::optional<std::size_t> Deployment::cell_of(Point p) const noexcept
{
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].contains(p))
            return i;
    return std::nullopt;
}

Deployment grid_layout(std::size_t a, std::size_t b, double side)
{
    if (a < 1 || b < 1 || !(side > 0))
        throw std::invalid_argument("grid layout needs a,b >= 1 and a positive side");
    Deployment d;
    const double w = side / static_cast<double>(a);
    const double h = side / static_cast<double>(b);
    for (std::size_t row = 0; row < b; ++row)
        for (std::size_t col = 0; col < a; ++col) {
            const double x0 = w * static_cast<double>(col);
            const double y0 = h * static_cast<double>(row);
            d.cells.emplace_back(Point{x0 + w / 2, y0 + h / 2},
                                 std::vector<Point>{{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}});
        }
    d.lower = {0.0, 0.0};
    d.upper = {side, side};
    return d;
}

Deployment hex_layout(double side)
{
    if (!(side > 0))
        throw std::invalid_argument("hexagon side must be positive");
    constexpr std::size_t rows = 3;
    constexpr std::size_t cols = 4;
    const double spacing = std::numbers::sqrt3 * side;

    Deployment d;
    d.lower = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    d.upper = {-d.lower.x, -d.lower.y};
    for (std::size_t row = 0; row < rows; ++row)
        for (std::size_t col = 0; col < cols; ++col) {
            const double offset = (row % 2 == 1) ? spacing / 2 : 0.0;
            const Point c{spacing / 2 + spacing * static_cast<double>(col) + offset,
                          side + 1.5 * side * static_cast<double>(row)};
            std::vector<Point> v;
            for (int k = 0; k < 6; ++k) {
                const double ang = std::numbers::pi / 6 + std::numbers::pi / 3 * k;
                v.push_back({c.x + side * std::cos(ang), c.y + side * std::sin(ang)});
                d.lower = {std::min(d.lower.x, v.back().x), std::min(d.lower.y, v.back().y)};
                d.upper = {std::max(d.upper.x, v.back().x), std::max(d.upper.y, v.back().y)};
            }
            d.cells.emplace_back(c, std::move(v));
        }
    return d;
}

void NetworkConfig::validate() const
{
    if (const auto * g = std::get_if<GridSpec>(&layout)) {
        if (g->a < 1 || g->b < 1 || !(g->side_m > 0))
            throw std::invalid_argument("grid layout needs a,b >= 1 and R > 0");
    } else if (!(std::get<HexSpec>(layout).side_m > 0)) {
        throw std::invalid_argument("hexagon side must be positive");
    }
    if (!(femto_radius_m > 0))
        throw std::invalid_argument("femto radius must be positive");
    if (!(carrier_hz > 0) || !(bs_height_m > 0) || !(ms_height_m > 0))
        throw std::invalid_argument("carrier frequency and antenna heights must be positive");
    if (shadowing_std_db < 0)
        throw std::invalid_argument("shadowing std must be non-negative");
    if (!(bias.macro_rx_beta > 0) || bias.femto_edge_exponent < 0)
        throw std::invalid_argument("invalid placement bias parameters");
}

Deployment NetworkConfig::deployment() const
{
    if (const auto * g = std::get_if<GridSpec>(&layout))
        return grid_layout(g->a, g->b, g->side_m);
    return hex_layout(std::get<HexSpec>(layout).side_m);
}

const char * to_string(NodeKind kind) noexcept
{
    return kind == NodeKind::macro ? "macro" : "femto";
}

namespace {

Point uniform_in_box(const Deployment & d, std::mt19937_64 & rng)
{
    std::uniform_real_distribution<double> ux(d.lower.x, d.upper.x);
    std::uniform_real_distribution<double> uy(d.lower.y, d.upper.y);
    const double x = ux(rng);
    return {x, uy(rng)};
}

Point center_biased(const Cell & cell, double beta, std::mt19937_64 & rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double angle = 2 * std::numbers::pi * unit(rng);
    // Inverse CDF of Beta(1, beta).
    const double frac = 1.0 - std::pow(1.0 - unit(rng), 1.0 / beta);
    const double r = frac * cell.radius_along(angle);
    return {cell.center().x + r * std::cos(angle), cell.center().y + r * std::sin(angle)};
}

Point edge_biased(const Deployment & d, double exponent, std::mt19937_64 & rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const auto p = uniform_in_box(d, rng);
        const auto cell = d.cell_of(p);
        if (!cell)
            continue;
        const auto & c = d.cells[*cell];
        const double closeness = 1.0 - c.distance_to_boundary(p) / c.inradius();
        if (unit(rng) < std::pow(std::clamp(closeness, 0.0, 1.0), exponent))
            return p;
    }
}

Point in_disk(const Deployment & d, Point center, double radius, std::mt19937_64 & rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const double r = radius * std::sqrt(unit(rng));
        const double angle = 2 * std::numbers::pi * unit(rng);
        const Point p{center.x + r * std::cos(angle), center.y + r * std::sin(angle)};
        if (d.contains(p))
            return p;
    }
}

} // namespace

NetworkRealization sample_realization(const NetworkConfig & cfg, std::mt19937_64 & rng)
{
    cfg.validate();
    const auto dep = cfg.deployment();

    NetworkRealization real;
    real.macro_count = dep.cells.size();
    for (const auto & cell : dep.cells) {
        real.transmitters.push_back({NodeKind::macro, cell.center(), cfg.macro_power_dbm});
        real.receivers.push_back(center_biased(cell, cfg.bias.macro_rx_beta, rng));
    }
    for (std::size_t f = 0; f < cfg.femto_count; ++f) {
        const auto bs = edge_biased(dep, cfg.bias.femto_edge_exponent, rng);
        real.transmitters.push_back({NodeKind::femto, bs, cfg.femto_power_dbm});
        real.receivers.push_back(in_disk(dep, bs, cfg.femto_radius_m, rng));
    }
    return real;
}

NetworkRealization sample_realization(const NetworkConfig & cfg)
{
    std::mt19937_64 rng(cfg.seed);
    return sample_realization(cfg, rng);
}

namespace {

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

void write_transmitters_csv(std::ostream & out, const NetworkRealization & real)
{
    out << "node_id,kind,x_m,y_m,tx_power_dbm\n";
    for (std::size_t i = 0; i < real.transmitters.size(); ++i) {
        const auto & t = real.transmitters[i];
        out << i + 1 << ',' << to_string(t.kind) << ',' << fixed(t.position.x, 3) << ',' << fixed(t.position.y, 3)
            << ',' << fixed(t.power_dbm, 2) << '\n';
    }
}

void write_receivers_csv(std::ostream & out, const NetworkRealization & real)
{
    out << "node_id,kind,x_m,y_m\n";
    for (std::size_t i = 0; i < real.receivers.size(); ++i)
        out << i + 1 << ',' << to_string(real.transmitters[i].kind) << ',' << fixed(real.receivers[i].x, 3) << ','
            << fixed(real.receivers[i].y, 3) << '\n';
}

} // namespace tim

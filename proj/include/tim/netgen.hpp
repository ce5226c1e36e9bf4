#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <variant>
#include <vector>

namespace tim {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point &, const Point &) = default;
};

double distance(Point a, Point b) noexcept;

/// Convex cell (partition rectangle or hexagon) with vertices in
/// counter-clockwise order around `center`.
class Cell {
public:
    Cell(Point center, std::vector<Point> vertices);

    Point center() const noexcept { return center_; }
    const std::vector<Point> & vertices() const noexcept { return vertices_; }

    /// Boundary points count as inside.
    bool contains(Point p) const noexcept;

    /// Distance from an interior point to the nearest edge.
    double distance_to_boundary(Point p) const noexcept;

    /// Distance from the center to the boundary along direction `angle`.
    double radius_along(double angle) const noexcept;

    /// Largest distance_to_boundary over the cell (reached at the center).
    double inradius() const noexcept { return distance_to_boundary(center_); }

    double area() const noexcept;

private:
    Point center_;
    std::vector<Point> vertices_;
};

/// The deployment region as a union of cells; macro BS i sits at the center
/// of cell i.
struct Deployment {
    std::vector<Cell> cells;
    Point lower{};
    Point upper{};

    bool contains(Point p) const noexcept { return cell_of(p).has_value(); }
    std::optional<std::size_t> cell_of(Point p) const noexcept;
};

/// a columns by b rows of equal rectangles tiling the [0,R]^2 square,
/// numbered with the column index varying fastest.
Deployment grid_layout(std::size_t a, std::size_t b, double side);

inline constexpr std::size_t hex_cell_count = 12;

/// Twelve pointy-top hexagons of the given side in three offset rows of four.
Deployment hex_layout(double side);

struct GridSpec {
    std::size_t a = 4;
    std::size_t b = 3;
    double side_m = 10000.0;
};

struct HexSpec {
    double side_m = 1800.0;
};

/// Shape parameters of the placement biases.
struct PlacementBias {
    /// Macro receiver radius fraction ~ Beta(1, macro_rx_beta); larger pulls
    /// receivers towards the cell center.
    double macro_rx_beta = 3.0;
    /// Femto BS acceptance probability (1 - d_edge / d_edge_max)^exponent.
    double femto_edge_exponent = 1.0;
};

struct NetworkConfig {
    std::variant<GridSpec, HexSpec> layout = GridSpec{};
    std::size_t femto_count = 10;
    double femto_radius_m = 10.0;
    double macro_power_dbm = 20.0;
    double femto_power_dbm = 10.0;
    double noise_dbm = -100.0;
    double carrier_hz = 2.4e9;
    double bs_height_m = 1.5;
    double ms_height_m = 1.5;
    double shadowing_std_db = 10.0;
    PlacementBias bias;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on a non-physical configuration.
    void validate() const;
    Deployment deployment() const;
};

enum class NodeKind { macro, femto };

const char * to_string(NodeKind kind) noexcept;

struct Transmitter {
    NodeKind kind = NodeKind::macro;
    Point position;
    double power_dbm = 0.0;

    friend bool operator==(const Transmitter &, const Transmitter &) = default;
};

/// One Monte Carlo draw of node positions. Receiver i is served by
/// transmitter i; macro users come first, in cell order.
struct NetworkRealization {
    std::vector<Transmitter> transmitters;
    std::vector<Point> receivers;
    std::size_t macro_count = 0;

    std::size_t users() const noexcept { return transmitters.size(); }

    friend bool operator==(const NetworkRealization &, const NetworkRealization &) = default;
};

NetworkRealization sample_realization(const NetworkConfig & cfg, std::mt19937_64 & rng);

/// Seeds a fresh generator from cfg.seed.
NetworkRealization sample_realization(const NetworkConfig & cfg);

/// Columns node_id,kind,x_m,y_m,tx_power_dbm.
void write_transmitters_csv(std::ostream & out, const NetworkRealization & real);

/// Columns node_id,kind,x_m,y_m; node_id matches the serving transmitter.
void write_receivers_csv(std::ostream & out, const NetworkRealization & real);

} // namespace tim

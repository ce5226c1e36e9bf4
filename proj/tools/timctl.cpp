// Command-line front end: topology analysis and Monte Carlo experiments.

#include "tim/harness.hpp"
#include "tim/phy.hpp"
#include "tim/topology.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <regex>
#include <sstream>

namespace {

struct Options {
    std::string layout = "grid";
    std::string grid = "4x3";
    double grid_side = 10000.0;
    double hex_side = 1800.0;
    std::size_t k = 10;
    std::string k_range = "5..30:5";
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string out;
    std::string filter = "retx-not-avoidance";
    bool femto_only = false;
    double femto_radius = 10.0;
    double macro_power = 20.0;
    double femto_power = 10.0;
    double noise = -100.0;
    double shadowing_std = 10.0;
    double macro_beta = 3.0;
    double femto_edge_exponent = 1.0;
    std::string fading = "unit-mean";
    std::string threshold = "long-term";
    bool benchmark_long_term = false;
    std::size_t exact_limit = tim::default_exact_coloring_limit;
};

void add_network_options(CLI::App * app, Options & o)
{
    app->add_option("--layout", o.layout, "Macro layout")->check(CLI::IsMember({"grid", "hex"}));
    app->add_option("--grid", o.grid, "Macro grid as AxB (columns x rows)");
    app->add_option("--grid-side", o.grid_side, "Side of the square area in meters");
    app->add_option("--hex-side", o.hex_side, "Hexagon side in meters");
    app->add_option("--femto-radius", o.femto_radius, "Femto cell radius in meters");
    app->add_option("--macro-power", o.macro_power, "Macro transmit power in dBm");
    app->add_option("--femto-power", o.femto_power, "Femto transmit power in dBm");
    app->add_option("--noise", o.noise, "Noise power in dBm");
    app->add_option("--shadowing-std", o.shadowing_std, "Shadowing standard deviation in dB (0 disables)");
    app->add_option("--macro-beta", o.macro_beta, "Center bias of macro receivers, Beta(1, b)");
    app->add_option("--femto-edge-exponent", o.femto_edge_exponent, "Edge bias exponent of femto BS placement");
    app->add_option("--threshold", o.threshold, "Topology threshold")
        ->check(CLI::IsMember({"long-term", "instantaneous"}));
    app->add_option("--fading", o.fading, "Rayleigh scale convention")
        ->check(CLI::IsMember({"unit-mean", "unit-sigma"}));
    app->add_option("--seed", o.seed, "Master seed");
    app->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "Output CSV path (default stdout)");
    app->add_option("--config", "key=value file mirroring the flags; flags take precedence");
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string & text)
{
    static const std::regex re(R"(^\s*(\d+)\s*(?:x|X|\*|×)\s*(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw std::invalid_argument("grid must look like 4x3, got '" + text + "'");
    return {std::stoul(m[1]), std::stoul(m[2])};
}

void parse_k_range(const std::string & text, tim::ExperimentConfig & cfg)
{
    static const std::regex re(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*(?::\s*(\d+))?)?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw std::invalid_argument("K range must look like lo..hi or lo..hi:step, got '" + text + "'");
    cfg.k_first = std::stoul(m[1]);
    cfg.k_last = m[2].matched ? std::stoul(m[2]) : cfg.k_first;
    cfg.k_step = m[3].matched ? std::stoul(m[3]) : 1;
}

tim::ExperimentConfig build_config(const Options & o)
{
    tim::ExperimentConfig cfg;
    auto & net = cfg.network;
    if (o.layout == "hex") {
        net.layout = tim::HexSpec{o.hex_side};
    } else {
        auto [a, b] = parse_grid(o.grid);
        net.layout = tim::GridSpec{a, b, o.grid_side};
    }
    net.femto_radius_m = o.femto_radius;
    net.macro_power_dbm = o.macro_power;
    net.femto_power_dbm = o.femto_power;
    net.noise_dbm = o.noise;
    net.shadowing_std_db = o.shadowing_std;
    net.bias.macro_rx_beta = o.macro_beta;
    net.bias.femto_edge_exponent = o.femto_edge_exponent;
    net.seed = o.seed;

    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.k_first = cfg.k_last = o.k;
    cfg.filter = tim::parse_cdf_filter(o.filter);
    cfg.femto_only = o.femto_only;
    cfg.threshold = o.threshold == "instantaneous" ? tim::ThresholdMode::instantaneous : tim::ThresholdMode::long_term;
    cfg.rates.fading = o.fading == "unit-sigma" ? tim::FadingScale::unit_sigma : tim::FadingScale::unit_mean_power;
    cfg.rates.benchmark_long_term = o.benchmark_long_term;
    cfg.rates.exact_coloring_limit = o.exact_limit;
    cfg.validate();
    return cfg;
}

// Output sink: the --out file when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string & path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw std::runtime_error("cannot open '" + path + "' for writing");
        }
    }

    std::ostream & stream() { return file_ ? *file_ : std::cout; }

    void close()
    {
        if (file_) {
            file_->close();
            if (!*file_)
                throw std::runtime_error("write failed");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string read_file(const std::string & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(const std::string & s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// Turns the lines of a key=value config file into --key=value arguments,
// dropping keys the subcommand does not know.
std::vector<std::string> config_arguments(const std::string & path, CLI::App * sub)
{
    std::istringstream in(read_file(path));
    std::vector<std::string> args;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
        auto key = trim(line.substr(0, eq));
        while (!key.empty() && key.front() == '-')
            key.erase(0, 1);
        if (sub && sub->get_option_no_throw("--" + key))
            args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
    return args;
}

// Command line with any --config file expanded in place of the option, right
// after the subcommand so that explicit flags, which come later, win.
std::vector<std::string> expand_config(CLI::App & app, int argc, char ** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    auto * sub = args.empty() ? nullptr : app.get_subcommand_no_throw(args.front());
    std::vector<std::string> out;
    std::vector<std::string> from_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            from_file = config_arguments(args[++i], sub);
        } else if (args[i].rfind("--config=", 0) == 0) {
            from_file = config_arguments(args[i].substr(9), sub);
        } else {
            out.push_back(args[i]);
        }
    }
    if (!from_file.empty() && !out.empty())
        out.insert(out.begin() + 1, from_file.begin(), from_file.end());
    return out;
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Half symmetric DoF feasibility of retransmission schemes"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Options o;

    std::string topology_path;
    auto * analyze = app.add_subcommand("analyze", "Report conflict graphs, feasibility and patterns for a topology file");
    analyze->add_option("file", topology_path, "Topology file")->required();

    auto * sweep = app.add_subcommand("sweep", "Feasibility fractions versus femto count");
    add_network_options(sweep, o);
    sweep->add_option("--K-range", o.k_range, "Femto counts lo..hi[:step]");

    auto * cdf = app.add_subcommand("cdf", "Pooled user-rate CDFs on filtered realizations");
    add_network_options(cdf, o);
    cdf->add_option("--K", o.k, "Femto count");
    cdf->add_option("--filter", o.filter, "Realization filter")
        ->check(CLI::IsMember({"retx-not-avoidance", "retx", "all"}));
    cdf->add_flag("--femto-only", o.femto_only, "Pool femto users only");
    cdf->add_flag("--benchmark-long-term", o.benchmark_long_term, "Benchmark SNR without fast fading");
    cdf->add_option("--exact-limit", o.exact_limit, "Largest user count colored exactly");

    auto * compare = app.add_subcommand("compare", "Retransmission versus alignment feasibility");
    add_network_options(compare, o);
    compare->add_option("--K", o.k, "Femto count");

    std::string prefix = "realization";
    auto * realize = app.add_subcommand("realize", "Dump one realization as CSV plus its topology file");
    add_network_options(realize, o);
    realize->add_option("--K", o.k, "Femto count");
    realize->add_option("--prefix", prefix, "Output path prefix");

    std::vector<std::string> args;
    try {
        args = expand_config(app, argc, argv);
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError & e) {
        return app.exit(e);
    }

    try {
        if (*analyze) {
            std::cout << tim::analyze(read_file(topology_path));
            return 0;
        }

        auto cfg = build_config(o);

        if (*sweep) {
            parse_k_range(o.k_range, cfg);
            cfg.validate();
            Sink sink(o.out);
            tim::write_sweep_csv(sink.stream(), tim::run_feasibility_sweep(cfg));
            sink.close();
        } else if (*cdf) {
            if (cdf->get_option("--trials")->count() == 0)
                cfg.trials = 1000;
            const auto result = tim::run_rate_cdf(cfg);
            Sink sink(o.out);
            tim::write_cdf_csv(sink.stream(), result);
            sink.close();
            if (result.empty) {
                std::cerr << "no realization out of " << result.trials << " passed filter '"
                          << tim::to_string(cfg.filter) << "'\n";
                return 3;
            }
            std::cerr << result.realizations << " of " << result.trials << " realizations passed the filter\n";
        } else if (*compare) {
            const auto result = tim::run_scheme_comparison(cfg);
            Sink sink(o.out);
            tim::write_comparison_csv(sink.stream(), cfg, result);
            sink.close();
        } else if (*realize) {
            std::mt19937_64 rng(cfg.seed);
            const auto d = tim::draw_trial(cfg, o.k, rng);
            std::ofstream tx(prefix + "_tx.csv", std::ios::binary);
            std::ofstream rx(prefix + "_rx.csv", std::ios::binary);
            std::ofstream topo(prefix + "_topology.txt", std::ios::binary);
            if (!tx || !rx || !topo)
                throw std::runtime_error("cannot write files with prefix '" + prefix + "'");
            tim::write_transmitters_csv(tx, d.realization);
            tim::write_receivers_csv(rx, d.realization);
            topo << tim::serialize(d.topology);
        }
    } catch (const tim::ParseError & e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

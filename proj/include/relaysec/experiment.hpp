#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "relaysec/secrecy.hpp"

namespace relaysec {

// Invalid or inconsistent configuration; the message names the field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Batch-run configuration. Angles are accepted in degrees and converted once;
// everything downstream works in radians. The seed is always explicit; no
// wall-clock seeding anywhere.
struct ExperimentConfig {
    int order = 4;
    std::vector<double> snr_db = {10.0};
    double theta_start_deg = 0.0;
    double theta_stop_deg = 90.0;
    double theta_step_deg = 5.0;
    std::optional<double> alpha = 1.0;
    std::optional<double> relay_power_db;
    Engine engine = Engine::MonteCarlo;
    std::optional<Engine> engine_dest;  // per-quantity overrides of `engine`
    std::optional<Engine> engine_eave;
    std::int64_t trials = 100000;
    int nodes = 24;
    std::uint64_t seed = 1;
    std::string out;

    std::vector<double> theta_grid_rad() const {
        std::vector<double> grid;
        if (!(theta_step_deg > 0.0)) return grid;
        for (std::int64_t k = 0;; ++k) {
            const double deg = theta_start_deg + static_cast<double>(k) * theta_step_deg;
            if (deg > theta_stop_deg + 1e-9) break;
            grid.push_back(deg_to_rad(deg));
        }
        return grid;
    }

    SystemParams params_at(double snr, double theta_rad) const {
        SystemParams p;
        p.order = order;
        p.p1 = p.p2 = db_to_linear(snr);
        p.theta = theta_rad;
        if (relay_power_db)
            p.relay_power = db_to_linear(*relay_power_db);
        else
            p.alpha_override = alpha;
        return p;
    }

    void validate() const {
        if (order < 2) throw ConfigError("order: modulation order must be >= 2");
        if (snr_db.empty()) throw ConfigError("snr_db: at least one SNR point required");
        if (!(theta_step_deg > 0.0))
            throw ConfigError("theta: step must be positive");
        if (theta_grid_rad().empty())
            throw ConfigError("theta: grid is empty (start > stop)");
        if (trials < 1000) throw ConfigError("trials: must be >= 1000");
        if (nodes < 2) throw ConfigError("nodes: must be >= 2");
        if (alpha.has_value() == relay_power_db.has_value())
            throw ConfigError(
                "alpha/relay_power_db: exactly one must be set");
        if (alpha && !(*alpha > 0.0))
            throw ConfigError("alpha: must be positive");
    }
};

inline Engine parse_engine(const std::string& s) {
    if (s == "mc") return Engine::MonteCarlo;
    if (s == "quad") return Engine::Quadrature;
    if (s == "oracle") return Engine::GridOracle;
    throw ConfigError("engine: expected one of mc, quad, oracle, got '" + s +
                      "'");
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse number '" + v + "'");
    }
}

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse integer '" + v + "'");
    }
}

inline std::vector<double> parse_double_list(const std::string& key,
                                             const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

}  // namespace detail

// Applies one key = value entry. Setting alpha clears relay_power_db and
// vice versa; asking for both explicitly is rejected by validate().
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
    const std::string v = detail::trim(value);
    if (key == "order") {
        cfg.order = static_cast<int>(detail::parse_int(key, v));
    } else if (key == "snr_db") {
        cfg.snr_db = detail::parse_double_list(key, v);
    } else if (key == "theta_start_deg") {
        cfg.theta_start_deg = detail::parse_double(key, v);
    } else if (key == "theta_stop_deg") {
        cfg.theta_stop_deg = detail::parse_double(key, v);
    } else if (key == "theta_step_deg") {
        cfg.theta_step_deg = detail::parse_double(key, v);
    } else if (key == "alpha") {
        cfg.alpha = detail::parse_double(key, v);
        cfg.relay_power_db.reset();
    } else if (key == "relay_power_db") {
        cfg.relay_power_db = detail::parse_double(key, v);
        cfg.alpha.reset();
    } else if (key == "engine") {
        cfg.engine = parse_engine(v);
    } else if (key == "engine_dest") {
        cfg.engine_dest = parse_engine(v);
    } else if (key == "engine_eave") {
        cfg.engine_eave = parse_engine(v);
    } else if (key == "trials") {
        cfg.trials = detail::parse_int(key, v);
    } else if (key == "nodes") {
        cfg.nodes = static_cast<int>(detail::parse_int(key, v));
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, v));
    } else if (key == "out") {
        cfg.out = v;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

// Flat key = value file with '#' comments.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        apply_config_entry(cfg, detail::trim(line.substr(0, eq)),
                           line.substr(eq + 1));
    }
}

// One output row per (theta, SNR) grid point. Column order is fixed.
struct SweepRow {
    double theta_rad = 0.0;
    double snr_db = 0.0;
    double d_min = 0.0;
    double p_e = 0.0;
    double p_e_stderr = 0.0;
    double i_xs_yd = 0.0;
    double i_xs_yd_stderr = 0.0;
    double i_xs_ye = 0.0;
    double i_xs_ye_stderr = 0.0;
    double secrecy_rate = 0.0;
    double secrecy_rate_raw = 0.0;
    double upper_bound = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

inline constexpr const char* kSweepCsvHeader =
    "theta_rad,snr_db,d_min,p_e,p_e_stderr,i_xs_yd,i_xs_yd_stderr,"
    "i_xs_ye,i_xs_ye_stderr,secrecy_rate,secrecy_rate_raw,upper_bound,"
    "samples,seed";

namespace detail {

inline std::string fmt6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace detail

inline std::string to_csv_line(const SweepRow& r) {
    using detail::fmt6;
    std::string s;
    s += fmt6(r.theta_rad);
    s += ',';
    s += fmt6(r.snr_db);
    s += ',';
    s += fmt6(r.d_min);
    s += ',';
    s += fmt6(r.p_e);
    s += ',';
    s += fmt6(r.p_e_stderr);
    s += ',';
    s += fmt6(r.i_xs_yd);
    s += ',';
    s += fmt6(r.i_xs_yd_stderr);
    s += ',';
    s += fmt6(r.i_xs_ye);
    s += ',';
    s += fmt6(r.i_xs_ye_stderr);
    s += ',';
    s += fmt6(r.secrecy_rate);
    s += ',';
    s += fmt6(r.secrecy_rate_raw);
    s += ',';
    s += fmt6(r.upper_bound);
    s += ',';
    s += std::to_string(r.samples);
    s += ',';
    s += std::to_string(r.seed);
    return s;
}

// Runs fn(0..n-1) on a small worker pool. Results must be written to
// per-index slots; output order is then independent of scheduling.
template <class Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > 8) workers = 8;
    if (n < 2 || workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Evaluates the full (SNR x theta) grid. Row seeds derive from
// (config.seed, row index), so the output is deterministic and
// byte-reproducible for a fixed config.
inline std::vector<SweepRow> compute_sweep(const ExperimentConfig& config) {
    config.validate();
    const std::vector<double> grid = config.theta_grid_rad();
    const std::size_t per_snr = grid.size();
    const std::size_t n = per_snr * config.snr_db.size();

    auto make_spec = [&](Engine kind) {
        EngineSpec spec;
        spec.kind = kind;
        spec.precision =
            kind == Engine::Quadrature ? config.nodes : config.trials;
        return spec;
    };
    const EngineSpec dest_spec =
        make_spec(config.engine_dest.value_or(config.engine));
    const EngineSpec eave_spec =
        make_spec(config.engine_eave.value_or(config.engine));

    std::vector<SweepRow> rows(n);
    parallel_for(n, [&](std::size_t i) {
        const double snr = config.snr_db[i / per_snr];
        const double theta = grid[i % per_snr];
        const std::uint64_t row_seed = stream_seed(config.seed, i);
        const SecrecyPoint pt = secrecy_point(
            config.params_at(snr, theta), dest_spec.with_seed(row_seed),
            eave_spec.with_seed(row_seed), config.trials, row_seed);
        SweepRow& r = rows[i];
        r.theta_rad = pt.theta;
        r.snr_db = snr;
        r.d_min = pt.d_min;
        r.p_e = pt.p_e.value;
        r.p_e_stderr = pt.p_e.std_err;
        r.i_xs_yd = pt.i_destination.value;
        r.i_xs_yd_stderr = pt.i_destination.std_err;
        r.i_xs_ye = pt.i_eavesdropper.value;
        r.i_xs_ye_stderr = pt.i_eavesdropper.std_err;
        r.secrecy_rate = pt.rate.value;
        r.secrecy_rate_raw = pt.rate.raw;
        r.upper_bound = pt.upper_bound.value;
        r.samples = config.trials;
        r.seed = row_seed;
    });
    return rows;
}

inline void write_sweep_csv(const std::string& path,
                            const std::vector<SweepRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << kSweepCsvHeader << '\n';
    for (const SweepRow& r : rows) out << to_csv_line(r) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing output file '" + path + "'");
}

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
    std::vector<SweepRow> rows = compute_sweep(config);
    write_sweep_csv(config.out.empty() ? "sweep.csv" : config.out, rows);
    return rows;
}

enum class Figure { Fig2, Fig3, Fig4 };

inline Figure parse_figure(const std::string& id) {
    if (id == "fig2") return Figure::Fig2;
    if (id == "fig3") return Figure::Fig3;
    if (id == "fig4") return Figure::Fig4;
    throw ConfigError("unknown figure id '" + id + "'");
}

// Which configuration fields the user set explicitly; figure defaults fill
// the rest.
struct ExplicitFields {
    bool snr_db = false;
    bool theta = false;
    bool out = false;
};

inline ExperimentConfig figure_config(Figure fig, ExperimentConfig cfg,
                                      const ExplicitFields& explicit_fields) {
    if (!explicit_fields.theta) {
        cfg.theta_start_deg = 0.0;
        cfg.theta_stop_deg = 180.0;
        cfg.theta_step_deg = fig == Figure::Fig2 ? 1.0 : 2.0;
    }
    if (!explicit_fields.snr_db) {
        switch (fig) {
            case Figure::Fig2: cfg.snr_db = {10.0, 20.0}; break;
            case Figure::Fig3: cfg.snr_db = {5.0, 10.0}; break;
            case Figure::Fig4: cfg.snr_db = {20.0}; break;
        }
    }
    if (!explicit_fields.out) {
        switch (fig) {
            case Figure::Fig2: cfg.out = "fig2.csv"; break;
            case Figure::Fig3: cfg.out = "fig3.csv"; break;
            case Figure::Fig4: cfg.out = "fig4.csv"; break;
        }
    }
    return cfg;
}

// Reproduces one of the three study sweeps. All SweepRow columns are
// populated for every figure, so any column can be plotted from any file.
inline std::vector<SweepRow> reproduce_figure(
    Figure fig, const ExperimentConfig& config,
    const ExplicitFields& explicit_fields = {}) {
    return run_sweep(figure_config(fig, config, explicit_fields));
}

}  // namespace relaysec

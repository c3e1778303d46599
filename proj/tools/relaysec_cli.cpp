// Command-line driver: parameter sweeps, study-figure reproduction, the
// verification suite and the extremal-phase search, all emitting
// reproducible seeded CSV.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relaysec/experiment.hpp"
#include "relaysec/verify.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    std::int64_t trials = 0;
    int nodes = 0;
    int order = 0;
    double alpha = 0.0;
    double relay_power_db = 0.0;
    std::string engine;
    std::string engine_dest;
    std::string engine_eave;
    std::string out;
    double theta_start = 0.0;
    double theta_stop = 0.0;
    double theta_step = 0.0;
    std::vector<double> snr_db;
};

// Adds the shared flag set to one subcommand. Every config-file key has a
// matching flag; flags win over the file, the file wins over defaults.
void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path,
                    "key = value config file (# comments)");
    cmd->add_option("--seed", opt.seed, "base RNG seed");
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials per point");
    cmd->add_option("--nodes", opt.nodes, "quadrature nodes per axis");
    cmd->add_option("--order", opt.order, "PSK modulation order M");
    auto* alpha =
        cmd->add_option("--alpha", opt.alpha, "pin the relay gain directly");
    auto* relay = cmd->add_option("--relay-power", opt.relay_power_db,
                                  "relay power constraint, dB");
    alpha->excludes(relay);
    relay->excludes(alpha);
    cmd->add_option("--engine", opt.engine,
                    "information engine: mc, quad or oracle");
    cmd->add_option("--engine-dest", opt.engine_dest,
                    "engine override for the destination information");
    cmd->add_option("--engine-eave", opt.engine_eave,
                    "engine override for the eavesdropper information");
    cmd->add_option("--out", opt.out, "output CSV path");
    cmd->add_option("--theta-start", opt.theta_start, "phase grid start, deg");
    cmd->add_option("--theta-stop", opt.theta_stop, "phase grid stop, deg");
    cmd->add_option("--theta-step", opt.theta_step, "phase grid step, deg");
    cmd->add_option("--snr-db", opt.snr_db, "SNR list, dB")
        ->delimiter(',');
}

// Defaults -> config file -> explicit flags.
relaysec::ExperimentConfig build_config(const CLI::App* cmd,
                                        const CliOptions& opt,
                                        relaysec::ExplicitFields* fields) {
    relaysec::ExperimentConfig cfg;
    if (cmd->count("--config") > 0) relaysec::load_config_file(cfg, opt.config_path);
    if (cmd->count("--seed") > 0) cfg.seed = opt.seed;
    if (cmd->count("--trials") > 0) cfg.trials = opt.trials;
    if (cmd->count("--nodes") > 0) cfg.nodes = opt.nodes;
    if (cmd->count("--order") > 0) cfg.order = opt.order;
    if (cmd->count("--alpha") > 0) {
        cfg.alpha = opt.alpha;
        cfg.relay_power_db.reset();
    }
    if (cmd->count("--relay-power") > 0) {
        cfg.relay_power_db = opt.relay_power_db;
        cfg.alpha.reset();
    }
    if (cmd->count("--engine") > 0) cfg.engine = relaysec::parse_engine(opt.engine);
    if (cmd->count("--engine-dest") > 0)
        cfg.engine_dest = relaysec::parse_engine(opt.engine_dest);
    if (cmd->count("--engine-eave") > 0)
        cfg.engine_eave = relaysec::parse_engine(opt.engine_eave);
    if (cmd->count("--out") > 0) cfg.out = opt.out;
    if (cmd->count("--theta-start") > 0) cfg.theta_start_deg = opt.theta_start;
    if (cmd->count("--theta-stop") > 0) cfg.theta_stop_deg = opt.theta_stop;
    if (cmd->count("--theta-step") > 0) cfg.theta_step_deg = opt.theta_step;
    if (cmd->count("--snr-db") > 0) cfg.snr_db = opt.snr_db;
    if (fields) {
        fields->snr_db = cmd->count("--snr-db") > 0;
        fields->theta = cmd->count("--theta-start") > 0 ||
                        cmd->count("--theta-stop") > 0 ||
                        cmd->count("--theta-step") > 0;
        fields->out = cmd->count("--out") > 0;
    }
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{
        "Secrecy-rate simulator for a two-hop amplify-and-forward relay "
        "channel with M-PSK source and friendly jamming"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "evaluate the (theta, SNR) grid and write CSV");
    CLI::App* fig2 = app.add_subcommand(
        "fig2", "minimum distance and symbol error rate vs phase");
    CLI::App* fig3 = app.add_subcommand(
        "fig3", "secrecy rate and upper bound vs phase, low SNR");
    CLI::App* fig4 = app.add_subcommand(
        "fig4", "secrecy rate and upper bound vs phase, high SNR");
    CLI::App* verify = app.add_subcommand(
        "verify", "run the library invariant checks and report pass/fail");
    CLI::App* extremal = app.add_subcommand(
        "extremal-phases",
        "search the phase extremizing the minimum distance");
    for (CLI::App* cmd : {sweep, fig2, fig3, fig4, verify, extremal})
        add_common_flags(cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 2;
    }

    CLI::App* cmd = app.get_subcommands().front();
    relaysec::ExplicitFields fields;
    relaysec::ExperimentConfig cfg = build_config(cmd, opt, &fields);

    if (cmd == sweep) {
        if (cfg.out.empty()) cfg.out = "sweep.csv";
        const auto rows = relaysec::run_sweep(cfg);
        std::printf("wrote %zu rows to %s\n", rows.size(), cfg.out.c_str());
        return 0;
    }
    if (cmd == fig2 || cmd == fig3 || cmd == fig4) {
        const relaysec::Figure fig = relaysec::parse_figure(cmd->get_name());
        const auto final_cfg = relaysec::figure_config(fig, cfg, fields);
        const auto rows = relaysec::run_sweep(final_cfg);
        std::printf("wrote %zu rows to %s\n", rows.size(),
                    final_cfg.out.c_str());
        return 0;
    }
    if (cmd == verify) {
        const relaysec::VerifyReport report = relaysec::run_verify(cfg);
        relaysec::print_verify_report(report, std::cout);
        return report.all_pass() ? 0 : 1;
    }
    // extremal-phases: the step defaults to 0.1 degrees, far finer than the
    // sweep default, so only an explicit --theta-step overrides it.
    relaysec::SystemParams params =
        cfg.params_at(cfg.snr_db.front(), 0.0);
    const double step_rad = cmd->count("--theta-step") > 0
                                ? relaysec::deg_to_rad(cfg.theta_step_deg)
                                : std::numbers::pi / 1800.0;
    const relaysec::ExtremalPhases ext =
        relaysec::extremal_phases(params, step_rad);
    std::string text;
    char buf[64];
    std::snprintf(buf, sizeof buf, "theta_h_rad = %.10g\n", ext.theta_h);
    text += buf;
    std::snprintf(buf, sizeof buf, "theta_l_rad = %.10g\n", ext.theta_l);
    text += buf;
    std::snprintf(buf, sizeof buf, "theta_h_deg = %.10g\n",
                  relaysec::rad_to_deg(ext.theta_h));
    text += buf;
    std::snprintf(buf, sizeof buf, "theta_l_deg = %.10g\n",
                  relaysec::rad_to_deg(ext.theta_l));
    text += buf;
    std::snprintf(buf, sizeof buf, "d_min_h = %.10g\n", ext.d_min_h);
    text += buf;
    std::snprintf(buf, sizeof buf, "d_min_l = %.10g\n", ext.d_min_l);
    text += buf;
    std::fputs(text.c_str(), stdout);
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) throw relaysec::IoError("cannot open output file '" + cfg.out + "'");
        f << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const relaysec::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const relaysec::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

// Drives the real binary through std::system; exercises the subcommand
// surface, exit codes and the CSV determinism contract.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_path() {
    const char* p = std::getenv("RELAYSEC_CLI");
    REQUIRE_MESSAGE(p != nullptr, "RELAYSEC_CLI must point at the binary");
    return p;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = "cli_out_tmp.txt";
    const std::string cmd =
        cli_path() + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    std::remove(out_file.c_str());
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

constexpr const char* kTinySweep =
    "sweep --theta-start 0 --theta-stop 10 --theta-step 5 --snr-db 10 "
    "--trials 2000";

}  // namespace

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("sweep --help").exit_code == 0);
}

TEST_CASE("missing or unknown subcommands are config errors") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("sweep --no-such-flag 1").exit_code == 2);
}

TEST_CASE("sweep writes a well-formed deterministic csv") {
    TempFile a("cli_sweep_a.csv");
    TempFile b("cli_sweep_b.csv");
    const RunResult r1 =
        run_cli(std::string(kTinySweep) + " --seed 7 --out " + a.path);
    CHECK(r1.exit_code == 0);
    const RunResult r2 =
        run_cli(std::string(kTinySweep) + " --seed 7 --out " + b.path);
    CHECK(r2.exit_code == 0);

    const std::string ta = slurp(a.path);
    CHECK(ta ==
          slurp(b.path));  // byte-identical across identical runs
    CHECK(ta.rfind("theta_rad,snr_db,d_min,p_e,p_e_stderr,", 0) == 0);
    CHECK(ta.find('\r') == std::string::npos);

    TempFile c("cli_sweep_c.csv");
    const RunResult r3 = run_cli(std::string(kTinySweep) +
                                 " --seed 8 --out " + c.path);
    CHECK(r3.exit_code == 0);
    CHECK(slurp(c.path) != ta);
}

TEST_CASE("invalid grids are rejected with exit code 2") {
    const RunResult r = run_cli(
        "sweep --theta-start 10 --theta-stop 0 --theta-step 5 --snr-db 10");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("theta") != std::string::npos);
}

TEST_CASE("alpha and relay power are mutually exclusive flags") {
    CHECK(run_cli("sweep --alpha 1 --relay-power 3").exit_code == 2);
}

TEST_CASE("unwritable outputs are io errors") {
    const RunResult r =
        run_cli(std::string(kTinySweep) + " --out no_such_dir_zz/x.csv");
    CHECK(r.exit_code == 3);
}

TEST_CASE("config files feed the sweep and bad keys are named") {
    TempFile cfg("cli_cfg_tmp.cfg");
    TempFile out("cli_cfg_out.csv");
    {
        std::ofstream f(cfg.path);
        f << "# tiny run\n";
        f << "theta_stop_deg = 10\n";
        f << "theta_step_deg = 5\n";
        f << "snr_db = 10\n";
        f << "trials = 2000\n";
        f << "seed = 4\n";
    }
    const RunResult ok =
        run_cli("sweep --config " + cfg.path + " --out " + out.path);
    CHECK(ok.exit_code == 0);
    int lines = 0;
    for (char c : slurp(out.path))
        if (c == '\n') ++lines;
    CHECK(lines == 4);  // header + three grid points

    {
        std::ofstream f(cfg.path);
        f << "not_a_key = 1\n";
    }
    const RunResult bad = run_cli("sweep --config " + cfg.path);
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("not_a_key") != std::string::npos);
}

TEST_CASE("figure subcommands accept overrides") {
    TempFile out("cli_fig2_tmp.csv");
    const RunResult r = run_cli(
        "fig2 --theta-start 0 --theta-stop 90 --theta-step 45 --trials 2000 "
        "--seed 3 --out " + out.path);
    CHECK(r.exit_code == 0);
    const std::string text = slurp(out.path);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 3 * 2);  // header + 3 phases x {10, 20} dB
    CHECK(run_cli("fig9").exit_code == 2);
}

TEST_CASE("verify reports failures through the exit code") {
    const RunResult ok = run_cli("verify --trials 20000 --seed 2");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("FAIL") == std::string::npos);
    CHECK(ok.output.find("checks, 0 failed") != std::string::npos);

    const RunResult starved = run_cli("verify --trials 20000 --nodes 2 --seed 2");
    CHECK(starved.exit_code == 1);
    CHECK(starved.output.find("FAIL info.engine_agreement_quadrature") !=
          std::string::npos);
}

TEST_CASE("extremal phases subcommand reports the known extremizers") {
    const RunResult r = run_cli("extremal-phases --snr-db 10");
    CHECK(r.exit_code == 0);
    double theta_h = -1.0, theta_l = -1.0;
    std::istringstream is(r.output);
    std::string line;
    while (std::getline(is, line)) {
        std::sscanf(line.c_str(), "theta_h_rad = %lf", &theta_h);
        std::sscanf(line.c_str(), "theta_l_rad = %lf", &theta_l);
    }
    CHECK(std::abs(theta_h - 0.0) <= 2e-3);
    CHECK(std::abs(theta_l - 0.5235987756) <= 2e-3);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "relaysec/experiment.hpp"

namespace relaysec {

// One row of the verification report. Every check is normalized so that it
// passes iff measured <= threshold.
struct VerifyCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline constexpr int kVerifyCheckCount = 27;

namespace verify_detail {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

// |complex sample correlation| of two zero-mean-ish sequences.
inline double abs_correlation(const std::vector<cplx>& a,
                              const std::vector<cplx>& b) {
    cplx num = 0.0;
    double da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * std::conj(b[i]);
        da += std::norm(a[i]);
        db += std::norm(b[i]);
    }
    return std::abs(num) / std::sqrt(da * db);
}

// Independent pairwise scan used to cross-check min_distance.
inline double min_distance_by_scan(const SumConstellation& sc) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sc.points.size(); ++i) {
        for (std::size_t j = 0; j < sc.points.size(); ++j) {
            if (j == i) continue;
            if (sc.labels[i].first == sc.labels[j].first) continue;
            best = std::min(best, std::abs(sc.points[i] - sc.points[j]));
        }
    }
    return best < 1e-12 ? 0.0 : best;
}

inline int naive_ml_detect(cplx y, const GaussianMixtureChannel& ch,
                           bool& usable) {
    const int m = ch.order;
    int best = 0;
    double best_sum = -1.0;
    double total = 0.0;
    for (int s = 0; s < m; ++s) {
        double sum = 0.0;
        for (int d = 0; d < m; ++d) {
            sum += std::exp(
                -std::norm(y - ch.means[static_cast<std::size_t>(s) * m + d]) /
                ch.noise_variance);
        }
        total += sum;
        if (sum > best_sum) {
            best_sum = sum;
            best = s;
        }
    }
    usable = total > 0.0;
    return best;
}

}  // namespace verify_detail

// Desk-scale run of every module invariant. Honors the configured seed,
// Monte Carlo trial count and quadrature node count (so a deliberately
// starved configuration fails the engine-agreement check); everything else
// is fixed at desk scale.
inline VerifyReport run_verify(const ExperimentConfig& config) {
    using namespace verify_detail;
    config.validate();
    VerifyReport report;
    auto add = [&](const std::string& name, double measured,
                   double threshold) {
        report.checks.push_back(
            {name, measured, threshold, measured <= threshold});
    };
    const std::uint64_t seed = config.seed;

    SystemParams unit;
    unit.alpha_override = 1.0;

    // ---- constellation ----
    {
        double worst_period = 0.0, worst_reflect = 0.0;
        for (int m : {2, 4}) {
            SystemParams p = unit;
            p.order = m;
            const double period = 2.0 * std::numbers::pi / m;
            for (double th : {0.1, 0.37, 1.0, 2.2}) {
                const double d0 = min_distance_at(p, th);
                worst_period = std::max(
                    worst_period, std::abs(d0 - min_distance_at(p, th + period)));
                worst_reflect = std::max(
                    worst_reflect, std::abs(d0 - min_distance_at(p, -th)));
            }
        }
        add("constellation.min_distance_period", worst_period, 1e-12);
        add("constellation.min_distance_reflection", worst_reflect, 1e-12);

        double worst_no_jammer = 0.0;
        for (int m : {2, 3, 4, 8}) {
            for (double p1 : {1.0, 4.0}) {
                SystemParams p = unit;
                p.order = m;
                p.p1 = p1;
                p.p2 = 0.0;
                const double expect =
                    2.0 * std::sqrt(p1) * std::sin(std::numbers::pi / m);
                worst_no_jammer = std::max(
                    worst_no_jammer,
                    std::abs(min_distance_at(p, 0.3) - expect));
            }
        }
        add("constellation.min_distance_no_jammer", worst_no_jammer, 1e-12);

        Rng rng(stream_seed(seed, 0xC0));
        double worst_scan = 0.0;
        for (int draw = 0; draw < 40; ++draw) {
            SystemParams p = unit;
            p.order = 2 + rng.uniform_index(4);
            p.p1 = 0.1 + 4.0 * rng.uniform();
            p.p2 = 4.0 * rng.uniform();
            p.theta = 2.0 * std::numbers::pi * rng.uniform();
            const SumConstellation sc = sum_constellation(p);
            worst_scan = std::max(
                worst_scan,
                std::abs(min_distance(sc) - min_distance_by_scan(sc)));
        }
        add("constellation.min_distance_brute_force", worst_scan, 1e-12);

        // Reflection symmetry: searching half the fundamental period reaches
        // the same extremal values as the full period.
        const ExtremalPhases full = extremal_phases(unit);
        double half_min = std::numeric_limits<double>::infinity();
        double half_max = -1.0;
        const double half_period = std::numbers::pi / unit.order;
        for (std::int64_t k = 0;; ++k) {
            const double th = static_cast<double>(k) * (std::numbers::pi / 1800.0);
            if (th > half_period + 1e-15) break;
            const double d = min_distance_at(unit, th);
            half_min = std::min(half_min, d);
            half_max = std::max(half_max, d);
        }
        add("constellation.extremal_half_period",
            std::max(std::abs(full.d_min_h - half_min),
                     std::abs(full.d_min_l - half_max)),
            1e-9);
    }

    // ---- channel ----
    {
        constexpr std::int64_t n = 100000;
        double worst_eave = 0.0, worst_dest = 0.0;
        for (double a : {0.5, 1.0, 2.0}) {
            SystemParams p = unit.with_power(db_to_linear(10.0));
            p.alpha_override = a;
            const auto samples = simulate_two_phase(p, n, stream_seed(seed, 0xA0 + static_cast<std::uint64_t>(a * 2)));
            std::vector<double> e2(samples.size()), d2(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const auto& r = samples[i];
                e2[i] = std::norm(r.ye_bar - r.x_s - r.x_d);
                d2[i] = std::norm(r.yd - r.x_s);
            }
            const auto me = mean_se(e2);
            const auto md = mean_se(d2);
            worst_eave = std::max(
                worst_eave,
                std::abs(me.mean - eavesdropper_noise_variance(a)) / me.se);
            worst_dest = std::max(
                worst_dest, std::abs(md.mean - (1.0 + 1.0 / (a * a))) / md.se);
        }
        add("channel.eavesdropper_noise_variance", worst_eave, 4.0);
        add("channel.destination_noise_variance", worst_dest, 4.0);

        SystemParams pr = unit;
        pr.alpha_override.reset();
        pr.relay_power = 3.0;
        const auto samples = simulate_two_phase(pr, n, stream_seed(seed, 0xA8));
        std::vector<double> power(samples.size());
        std::vector<cplx> n1(samples.size()), n2(samples.size()),
            n3(samples.size()), n4(samples.size());
        const double a = amplification_factor(pr);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& r = samples[i];
            power[i] = std::norm(r.y1p);
            n1[i] = r.y1 - r.x_s - r.x_d;
            n2[i] = r.ye - r.x_s - r.x_d;
            n3[i] = r.y2 - r.y1p;
            n4[i] = r.yep - r.y1p;
        }
        const auto mp = mean_se(power);
        add("channel.relay_output_power", std::abs(mp.mean - *pr.relay_power) / mp.se,
            4.0);
        (void)a;

        double worst_corr = 0.0;
        const std::vector<cplx>* noises[4] = {&n1, &n2, &n3, &n4};
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                worst_corr =
                    std::max(worst_corr, abs_correlation(*noises[i], *noises[j]));
        add("channel.noise_cross_correlation", worst_corr,
            4.0 / std::sqrt(static_cast<double>(n)));

        const auto again = simulate_two_phase(pr, 4096, stream_seed(seed, 0xA9));
        const auto again2 = simulate_two_phase(pr, 4096, stream_seed(seed, 0xA9));
        std::int64_t mismatches = 0;
        for (std::size_t i = 0; i < again.size(); ++i) {
            if (again[i].s != again2[i].s || again[i].d != again2[i].d ||
                again[i].ye_bar != again2[i].ye_bar ||
                again[i].yd != again2[i].yd)
                ++mismatches;
        }
        add("channel.simulator_determinism", static_cast<double>(mismatches),
            0.0);

        // Combined observation from the sample-level path vs the channel
        // abstraction: two-sample variance agreement.
        SystemParams p10 = unit.with_power(db_to_linear(10.0)).with_theta(0.4);
        const auto sim = simulate_two_phase(p10, n, stream_seed(seed, 0xAA));
        const GaussianMixtureChannel ch = eavesdropper_channel(p10);
        Rng rng(stream_seed(seed, 0xAB));
        std::vector<double> v_sim(sim.size()), v_ch(sim.size());
        for (std::size_t i = 0; i < sim.size(); ++i) {
            v_sim[i] = std::norm(sim[i].ye_bar - sim[i].x_s - sim[i].x_d);
            v_ch[i] = std::norm(rng.complex_gaussian(ch.noise_variance));
        }
        const auto ms = mean_se(v_sim);
        const auto mc = mean_se(v_ch);
        add("channel.combined_observation_distribution",
            std::abs(ms.mean - mc.mean) /
                std::sqrt(ms.se * ms.se + mc.se * mc.se),
            4.0);
    }

    // ---- info ----
    {
        EngineSpec mc{Engine::MonteCarlo, 20000, stream_seed(seed, 0xB0)};
        Rng rng(stream_seed(seed, 0xB1));
        double worst_range = 0.0;
        for (int draw = 0; draw < 6; ++draw) {
            SystemParams p = unit;
            p.p1 = 5.0 * rng.uniform();
            p.p2 = 5.0 * rng.uniform();
            p.theta = rng.uniform();
            const Estimate ie =
                mi_eavesdropper(p, mc.with_seed(stream_seed(seed, 0xB2, draw)));
            const double over =
                std::max(-ie.raw, ie.raw - std::log2(double(p.order)));
            if (over > 0.0)
                worst_range = std::max(worst_range, over / (3.0 * ie.std_err));
        }
        add("info.mi_range", worst_range, 1.0);

        double worst_cond = -std::numeric_limits<double>::infinity();
        double worst_floor = -std::numeric_limits<double>::infinity();
        for (double th : {0.0, 0.4}) {
            SystemParams p = unit.with_power(db_to_linear(5.0)).with_theta(th);
            const GaussianMixtureChannel ch = eavesdropper_channel(p);
            const Estimate h = mixture_entropy(
                ch, Conditioning::None, mc.with_seed(stream_seed(seed, 0xB3)));
            const Estimate hc = mixture_entropy(
                ch, Conditioning::OnSource,
                mc.with_seed(stream_seed(seed, 0xB4)));
            const double se3 =
                3.0 * combined_std_err(h.std_err, hc.std_err);
            worst_cond = std::max(worst_cond, (hc.value - h.value) / se3);
            const double floor = std::log2(std::numbers::pi * std::numbers::e *
                                           ch.noise_variance);
            worst_floor =
                std::max(worst_floor, (floor - hc.value) / (3.0 * hc.std_err));
        }
        add("info.conditioning_reduces_entropy", worst_cond, 1.0);
        add("info.conditional_entropy_floor", worst_floor, 1.0);

        // Engine agreement against the grid oracle; honors configured trial
        // and node counts.
        EngineSpec mc_cfg{Engine::MonteCarlo, config.trials,
                          stream_seed(seed, 0xB5)};
        EngineSpec quad{Engine::Quadrature, config.nodes, 1};
        EngineSpec oracle{Engine::GridOracle, 0, 1};
        double worst_mc = 0.0, worst_quad = 0.0;
        for (int m : {2, 4}) {
            for (double th : {0.0, std::numbers::pi / 6}) {
                SystemParams p =
                    unit.with_power(db_to_linear(10.0)).with_theta(th);
                p.order = m;
                const AwgnChannel dch = destination_channel(p);
                const Estimate d_mc = mi_discrete_awgn(dch, mc_cfg);
                const Estimate d_q = mi_discrete_awgn(dch, quad);
                const Estimate d_o = mi_discrete_awgn(dch, oracle);
                worst_mc = std::max(worst_mc,
                                    std::abs(d_mc.value - d_o.value) /
                                        std::max(0.02, 3.0 * d_mc.std_err));
                worst_quad =
                    std::max(worst_quad, std::abs(d_q.value - d_o.value) / 0.02);
                const Estimate e_mc = mi_eavesdropper(p, mc_cfg);
                const Estimate e_q = mi_eavesdropper(p, quad);
                const Estimate e_o = mi_eavesdropper(p, oracle);
                worst_mc = std::max(worst_mc,
                                    std::abs(e_mc.value - e_o.value) /
                                        std::max(0.02, 3.0 * e_mc.std_err));
                worst_quad =
                    std::max(worst_quad, std::abs(e_q.value - e_o.value) / 0.02);
            }
        }
        add("info.engine_agreement_monte_carlo", worst_mc, 1.0);
        add("info.engine_agreement_quadrature", worst_quad, 1.0);

        EngineSpec quad24{Engine::Quadrature, 24, 1};
        int violations = 0;
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 10; ++k) {
            AwgnChannel ch;
            ch.order = 4;
            ch.noise_variance = 0.5 * std::pow(10.0, k / 4.5);  // 0.5 .. 50
            const PskConstellation a = psk_alphabet(4);
            for (const cplx& x : a.points) ch.means.push_back(2.0 * x);
            const double mi = mi_discrete_awgn(ch, quad24).value;
            if (mi >= prev) ++violations;
            prev = mi;
        }
        add("info.awgn_mi_monotone", static_cast<double>(violations), 0.0);

        const AwgnChannel dch = destination_channel(unit.with_power(2.0));
        const Estimate half =
            mi_discrete_awgn(dch, EngineSpec{Engine::MonteCarlo, 20000,
                                             stream_seed(seed, 0xB6)});
        const Estimate full =
            mi_discrete_awgn(dch, EngineSpec{Engine::MonteCarlo, 40000,
                                             stream_seed(seed, 0xB7)});
        const double ratio = half.std_err / full.std_err;
        add("info.mc_stderr_scaling",
            std::abs(ratio / std::numbers::sqrt2 - 1.0), 0.2);

        // Entropy of the combined observation never exceeds the label
        // entropy plus the noise entropy.
        double worst_cap = -std::numeric_limits<double>::infinity();
        for (double snr : {5.0, 10.0, 20.0}) {
            for (double th : {0.0, std::numbers::pi / 6, std::numbers::pi / 4}) {
                SystemParams p = unit.with_power(db_to_linear(snr)).with_theta(th);
                const GaussianMixtureChannel ch = eavesdropper_channel(p);
                const Estimate h = mixture_entropy(
                    ch, Conditioning::None,
                    mc.with_seed(stream_seed(seed, 0xB8, static_cast<std::uint64_t>(snr * 10 + th * 100))));
                const double cap =
                    2.0 * std::log2(double(p.order)) +
                    std::log2(std::numbers::pi * std::numbers::e *
                              ch.noise_variance);
                worst_cap =
                    std::max(worst_cap, (h.value - cap) / (3.0 * h.std_err));
            }
        }
        add("info.mixture_entropy_cap", worst_cap, 1.0);
    }

    // ---- detection ----
    {
        SystemParams p = unit.with_power(db_to_linear(10.0)).with_theta(0.3);
        const GaussianMixtureChannel ch = eavesdropper_channel(p);
        Rng rng(stream_seed(seed, 0xD0));
        std::int64_t mismatch = 0;
        for (int i = 0; i < 4000; ++i) {
            const cplx y = ch.means[rng.uniform_index(16)] +
                           rng.complex_gaussian(ch.noise_variance);
            bool usable = false;
            const int naive = naive_ml_detect(y, ch, usable);
            if (usable && naive != ml_detect(y, ch)) ++mismatch;
        }
        add("detection.ml_matches_naive", static_cast<double>(mismatch), 0.0);

        const cplx rot = std::polar(1.0, 0.77);
        GaussianMixtureChannel chr = ch;
        for (cplx& mu : chr.means) mu *= rot;
        std::int64_t rot_mismatch = 0;
        Rng rng2(stream_seed(seed, 0xD1));
        for (int i = 0; i < 2000; ++i) {
            const cplx y = ch.means[rng2.uniform_index(16)] +
                           rng2.complex_gaussian(ch.noise_variance);
            if (ml_detect(y, ch) != ml_detect(rot * y, chr)) ++rot_mismatch;
        }
        add("detection.rotation_invariance", static_cast<double>(rot_mismatch),
            0.0);

        double worst_period = 0.0;
        const double period = std::numbers::pi / 2.0;
        for (int k = 0; k < 6; ++k) {
            const double th = deg_to_rad(15.0 * k);
            const SerResult a =
                estimate_ser(p.with_theta(th), 20000, stream_seed(seed, 0xD2, k));
            const SerResult b = estimate_ser(p.with_theta(th + period), 20000,
                                             stream_seed(seed, 0xD3, k));
            const double se = combined_std_err(a.p_e.std_err, b.p_e.std_err);
            if (se > 0.0)
                worst_period = std::max(
                    worst_period,
                    std::abs(a.p_e.value - b.p_e.value) / (4.0 * se));
        }
        add("detection.ser_periodicity", worst_period, 1.0);

        const SerResult s1 = estimate_ser(p, 20000, stream_seed(seed, 0xD4));
        const SerResult s2 = estimate_ser(p, 20000, stream_seed(seed, 0xD4));
        add("detection.seed_determinism",
            std::abs(s1.p_e.value - s2.p_e.value), 0.0);
    }

    // ---- secrecy ----
    {
        EngineSpec mc{Engine::MonteCarlo, 20000, 0};
        double worst_chain = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 9; ++k) {
            SystemParams p = unit.with_power(db_to_linear(10.0))
                                 .with_theta(deg_to_rad(10.0 * k));
            const std::uint64_t s = stream_seed(seed, 0xE0, k);
            const Estimate i_dest = mi_discrete_awgn(
                destination_channel(p), mc.with_seed(stream_seed(s, 1)));
            const Estimate i_eave =
                mi_eavesdropper(p, mc.with_seed(stream_seed(s, 2)));
            const Estimate pe =
                estimate_ser(p, 20000, stream_seed(s, 3)).p_e;
            const Estimate bound = fano_upper_bound(p, pe, i_dest);
            const double raw = i_dest.value - i_eave.value;
            const double se = std::sqrt(i_dest.std_err * i_dest.std_err +
                                        i_eave.std_err * i_eave.std_err +
                                        bound.std_err * bound.std_err);
            worst_chain =
                std::max(worst_chain, (raw - bound.value) / (3.0 * se));
        }
        add("secrecy.rate_within_upper_bound", worst_chain, 1.0);

        SystemParams p4 = unit;
        Estimate i_dest_fixed{1.2, 0.0, 1, Engine::Quadrature, 1.2};
        int violations = 0;
        double prev = -std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 100; ++k) {
            Estimate pe{0.75 * k / 100.0, 0.0, 1, Engine::MonteCarlo,
                        0.75 * k / 100.0};
            const double b = fano_upper_bound(p4, pe, i_dest_fixed).raw;
            if (b < prev - 1e-12) ++violations;
            prev = b;
        }
        add("secrecy.bound_monotone_in_error_rate",
            static_cast<double>(violations), 0.0);

        EngineSpec mcp{Engine::MonteCarlo, 20000, 0};
        double worst_translate = 0.0;
        for (double th : {0.2, 0.6}) {
            SystemParams pa = unit.with_power(db_to_linear(10.0)).with_theta(th);
            SystemParams pb = pa.with_theta(th + std::numbers::pi / 2.0);
            const std::uint64_t sa = stream_seed(seed, 0xE1);
            const std::uint64_t sb = stream_seed(seed, 0xE2);
            const SecrecyPoint a = secrecy_point(pa, mcp, 20000, sa);
            const SecrecyPoint b = secrecy_point(pb, mcp, 20000, sb);
            auto gap = [&](const Estimate& x, const Estimate& y) {
                const double se = combined_std_err(x.std_err, y.std_err);
                return se > 0.0 ? std::abs(x.raw - y.raw) / (4.0 * se) : 0.0;
            };
            worst_translate = std::max(
                {worst_translate, gap(a.i_destination, b.i_destination),
                 gap(a.i_eavesdropper, b.i_eavesdropper), gap(a.rate, b.rate),
                 gap(a.p_e, b.p_e), gap(a.upper_bound, b.upper_bound)});
        }
        add("secrecy.period_translation", worst_translate, 1.0);

        // Common rotation of both constellations leaves the raw rate
        // difference unchanged (checked with the deterministic engine).
        SystemParams p = unit.with_power(db_to_linear(10.0)).with_theta(0.4);
        EngineSpec quad{Engine::Quadrature, 24, 1};
        const cplx rot = std::polar(1.0, 1.1);
        AwgnChannel dch = destination_channel(p);
        GaussianMixtureChannel ech = eavesdropper_channel(p);
        auto raw_diff = [&](const AwgnChannel& d, const GaussianMixtureChannel& e) {
            const double id = mi_discrete_awgn(d, quad).value;
            const double h = mixture_entropy(e, Conditioning::None, quad).value;
            const double hc =
                mixture_entropy(e, Conditioning::OnSource, quad).value;
            return id - (h - hc);
        };
        const double base_diff = raw_diff(dch, ech);
        for (cplx& mu : dch.means) mu *= rot;
        for (cplx& mu : ech.means) mu *= rot;
        add("secrecy.rotation_invariance",
            std::abs(raw_diff(dch, ech) - base_diff), 1e-4);
    }

    return report;
}

inline void print_verify_report(const VerifyReport& report, std::ostream& os) {
    int failed = 0;
    for (const auto& c : report.checks) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %-45s measured=%-12.5g threshold=%g",
                      c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                      c.threshold);
        os << buf << '\n';
        if (!c.pass) ++failed;
    }
    os << report.checks.size() << " checks, " << failed << " failed\n";
}

}  // namespace relaysec

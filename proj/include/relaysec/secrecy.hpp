#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "relaysec/constellation.hpp"
#include "relaysec/detection.hpp"
#include "relaysec/info.hpp"

namespace relaysec {

// Achievable secrecy rate max(0, I(X_s;Y_d) - I(X_s;Ye_bar)) in bits, with
// the raw (unclamped) difference kept for comparisons; clamping is a
// reporting convention only.
inline Estimate secrecy_rate(const SystemParams& params,
                             const EngineSpec& spec) {
    const Estimate i_dest =
        mi_discrete_awgn(destination_channel(params),
                         spec.with_seed(stream_seed(spec.seed, 0x64657374ull)));
    const Estimate i_eave = mi_eavesdropper(
        params, spec.with_seed(stream_seed(spec.seed, 0x65617665ull)));

    Estimate est;
    est.engine = spec.kind;
    est.raw = i_dest.value - i_eave.value;
    est.value = std::max(0.0, est.raw);
    est.std_err = combined_std_err(i_dest.std_err, i_eave.std_err);
    est.n = i_dest.n;
    return est;
}

// Upper bound on the secrecy rate from the eavesdropper's symbol error
// probability: H2(p_e) + p_e log2(M-1) - H(X_s|Y_d), with H(X_s|Y_d)
// computed as log2 M - I(X_s;Y_d) (exact for the uniform input). Clamped at
// zero; standard error propagated through the entropy derivative.
inline Estimate fano_upper_bound(const SystemParams& params,
                                 const Estimate& p_e,
                                 const Estimate& i_destination) {
    params.validate();
    const double p = p_e.value;
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("error probability must lie in [0, 1]");
    const double m = static_cast<double>(params.order);
    const double h_cond_dest = std::log2(m) - i_destination.value;

    Estimate est;
    est.engine = p_e.engine;
    est.raw = binary_entropy(p) + p * std::log2(m - 1.0) - h_cond_dest;
    est.value = std::max(0.0, est.raw);
    double deriv = std::log2(m - 1.0);
    if (p > 0.0 && p < 1.0) deriv += std::log2((1.0 - p) / p);
    else deriv = 0.0;  // entropy derivative diverges at the endpoints
    est.std_err =
        combined_std_err(deriv * p_e.std_err, i_destination.std_err);
    est.n = p_e.n;
    return est;
}

// Everything the sweep reports about one (theta, SNR) operating point.
struct SecrecyPoint {
    double theta = 0.0;
    double snr_db = 0.0;
    double d_min = 0.0;
    Estimate i_destination;
    Estimate i_eavesdropper;
    Estimate rate;        // clamped at 0, raw kept
    Estimate p_e;
    Estimate upper_bound; // clamped at 0, raw kept
};

inline SecrecyPoint secrecy_point(const SystemParams& params,
                                  const EngineSpec& dest_spec,
                                  const EngineSpec& eave_spec,
                                  std::int64_t ser_trials,
                                  std::uint64_t seed) {
    SecrecyPoint pt;
    pt.theta = params.theta;
    pt.snr_db = linear_to_db(params.p1);
    pt.d_min = min_distance(sum_constellation(params));
    pt.i_destination =
        mi_discrete_awgn(destination_channel(params),
                         dest_spec.with_seed(stream_seed(seed, 0x64657374ull)));
    pt.i_eavesdropper = mi_eavesdropper(
        params, eave_spec.with_seed(stream_seed(seed, 0x65617665ull)));
    pt.rate.engine = eave_spec.kind;
    pt.rate.raw = pt.i_destination.value - pt.i_eavesdropper.value;
    pt.rate.value = std::max(0.0, pt.rate.raw);
    pt.rate.std_err = combined_std_err(pt.i_destination.std_err,
                                       pt.i_eavesdropper.std_err);
    pt.rate.n = pt.i_destination.n;
    pt.p_e = estimate_ser(params, ser_trials, stream_seed(seed, 0x736572ull))
                 .p_e;
    pt.upper_bound = fano_upper_bound(params, pt.p_e, pt.i_destination);
    return pt;
}

inline SecrecyPoint secrecy_point(const SystemParams& params,
                                  const EngineSpec& spec,
                                  std::int64_t ser_trials,
                                  std::uint64_t seed) {
    return secrecy_point(params, spec, spec, ser_trials, seed);
}

struct PropositionReport {
    double snr_db = 0.0;
    double theta_h = 0.0;      // phase minimizing d_min
    double theta_l = 0.0;      // phase maximizing d_min
    double argmax_theta = 0.0; // grid phase maximizing the raw rate
    double argmin_theta = 0.0; // grid phase minimizing the raw rate
    double rate_max = 0.0;
    double rate_min = 0.0;
    double tolerance = 0.0;    // one grid step
    bool pass = false;
    std::vector<double> rates; // raw rate per grid point
};

namespace detail {

// Distance between phases modulo the period, folding in the reflection twin.
inline double phase_image_distance(double a, double b, double period) {
    auto circ = [period](double x, double y) {
        double d = std::fmod(std::abs(x - y), period);
        return std::min(d, period - d);
    };
    return std::min(circ(a, b), circ(a, period - b));
}

}  // namespace detail

// High-SNR claim check: the raw secrecy rate over the phase grid should be
// maximized within one grid step of theta_h and minimized within one step of
// theta_l (or any period translate / reflection twin). A single-point grid
// degenerates to the argmax clause alone.
inline PropositionReport proposition_check(const SystemParams& params_base,
                                           double snr_db,
                                           std::span<const double> theta_grid,
                                           const EngineSpec& spec) {
    if (theta_grid.empty())
        throw std::invalid_argument("theta grid must be nonempty");
    const SystemParams base = params_base.with_power(db_to_linear(snr_db));
    base.validate();

    PropositionReport rep;
    rep.snr_db = snr_db;
    const ExtremalPhases ext = extremal_phases(base);
    rep.theta_h = ext.theta_h;
    rep.theta_l = ext.theta_l;

    rep.rates.reserve(theta_grid.size());
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        const Estimate r =
            secrecy_rate(base.with_theta(theta_grid[i]),
                         spec.with_seed(stream_seed(spec.seed, i)));
        rep.rates.push_back(r.raw);
        if (r.raw > rep.rates[imax]) imax = i;
        if (r.raw < rep.rates[imin]) imin = i;
    }
    rep.argmax_theta = theta_grid[imax];
    rep.argmin_theta = theta_grid[imin];
    rep.rate_max = rep.rates[imax];
    rep.rate_min = rep.rates[imin];

    double step = 1e-9;
    for (std::size_t i = 0; i + 1 < theta_grid.size(); ++i)
        step = std::max(step, theta_grid[i + 1] - theta_grid[i]);
    rep.tolerance = step + 1e-12;

    const double period = 2.0 * std::numbers::pi / base.order;
    const bool max_ok = detail::phase_image_distance(rep.argmax_theta,
                                                     rep.theta_h, period) <=
                        rep.tolerance;
    if (theta_grid.size() == 1) {
        rep.pass = max_ok;
    } else {
        const bool min_ok = detail::phase_image_distance(
                                rep.argmin_theta, rep.theta_l, period) <=
                            rep.tolerance;
        rep.pass = max_ok && min_ok;
    }
    return rep;
}

}  // namespace relaysec

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "relaysec/channel.hpp"
#include "relaysec/estimate.hpp"
#include "relaysec/info.hpp"
#include "relaysec/rng.hpp"

namespace relaysec {

// Near-ties in log likelihood below this are broken toward the smallest
// source index, so symmetric observations decide deterministically.
constexpr double kMlTieTolerance = 1e-9;

// Maximum-likelihood source detection with the jammer symbol unknown: argmax
// over the source index of the jammer-marginalized likelihood
// sum_d exp(-|y - mu_{s,d}|^2 / var). Constant factors cancel.
inline int ml_detect(cplx y, const GaussianMixtureChannel& channel) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
        throw std::invalid_argument("observation must be finite");
    const int m = channel.order;
    const double var = channel.noise_variance;
    int best = 0;
    double best_score = 0.0;
    for (int s = 0; s < m; ++s) {
        LogSumExp lse;
        for (int d = 0; d < m; ++d) {
            lse.add(-std::norm(y - channel.means[static_cast<std::size_t>(s) * m + d]) / var);
        }
        const double score = lse.value();
        if (s == 0 || score > best_score + kMlTieTolerance) {
            best = s;
            best_score = score;
        }
    }
    return best;
}

// Diagnostic variant: joint ML over (source, jammer) pairs, projected to the
// source index. Ties (squared distances within 1e-24, the coincidence
// threshold squared) go to the smallest flat index.
inline int ml_detect_joint(cplx y, const GaussianMixtureChannel& channel) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
        throw std::invalid_argument("observation must be finite");
    std::size_t best = 0;
    double best_d2 = std::norm(y - channel.means[0]);
    for (std::size_t i = 1; i < channel.means.size(); ++i) {
        const double d2 = std::norm(y - channel.means[i]);
        if (d2 + 1e-24 < best_d2) {
            best = i;
            best_d2 = d2;
        }
    }
    return channel.labels[best].first;
}

struct SerResult {
    Estimate p_e;
    double theta = 0.0;
    double snr_db = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo symbol error probability of the eavesdropper's ML detector
// over uniform (source, jammer) draws and channel noise. The observation is
// drawn as mean + noise, which is distributed identically to the two-phase
// sample path. Binomial standard error.
inline SerResult estimate_ser(const SystemParams& params, std::int64_t trials,
                              std::uint64_t seed) {
    params.validate();
    if (trials < 1000)
        throw std::invalid_argument("trial count must be >= 1000");
    const GaussianMixtureChannel channel = eavesdropper_channel(params);
    const int m = channel.order;

    constexpr std::int64_t kBlock = 4096;
    std::int64_t errors = 0;
    for (std::int64_t b0 = 0; b0 < trials; b0 += kBlock) {
        Rng rng(stream_seed(seed, static_cast<std::uint64_t>(b0 / kBlock)));
        const std::int64_t b1 = std::min(trials, b0 + kBlock);
        for (std::int64_t i = b0; i < b1; ++i) {
            const int s = rng.uniform_index(m);
            const int d = rng.uniform_index(m);
            const cplx y = channel.means[static_cast<std::size_t>(s) * m + d] +
                           rng.complex_gaussian(channel.noise_variance);
            if (ml_detect(y, channel) != s) ++errors;
        }
    }

    SerResult r;
    const double p = static_cast<double>(errors) / static_cast<double>(trials);
    r.p_e = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials,
             Engine::MonteCarlo, p};
    r.theta = params.theta;
    r.snr_db = linear_to_db(params.p1);
    r.trials = trials;
    r.seed = seed;
    return r;
}

// One SER estimate per phase grid point, with independent per-point streams
// derived from (seed, grid index).
inline std::vector<SerResult> ser_phase_profile(const SystemParams& params,
                                                std::span<const double> theta_grid,
                                                std::int64_t trials,
                                                std::uint64_t seed) {
    if (theta_grid.empty())
        throw std::invalid_argument("theta grid must be nonempty");
    std::vector<SerResult> out;
    out.reserve(theta_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        out.push_back(estimate_ser(params.with_theta(theta_grid[i]), trials,
                                   stream_seed(seed, i)));
    }
    return out;
}

}  // namespace relaysec

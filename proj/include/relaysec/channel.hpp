#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relaysec/constellation.hpp"
#include "relaysec/params.hpp"
#include "relaysec/rng.hpp"

namespace relaysec {

// Relay gain: either pinned directly, or set so the relay output power
// E|Y1'|^2 = alpha^2 * (P1 + P2 + 1) meets the relay power constraint.
inline double amplification_factor(const SystemParams& params) {
    params.validate();
    if (params.alpha_override) return *params.alpha_override;
    return std::sqrt(*params.relay_power / (params.p1 + params.p2 + 1.0));
}

enum class Combining {
    // Combined observation with weights (alpha+1) on the direct copy and
    // alpha on the relayed copy, normalized by alpha^2+alpha+1.
    WeightedSum,
    // True variance-weighted maximal ratio combining of the two copies.
    // Coincides with WeightedSum at alpha = 1, strictly smaller noise
    // variance elsewhere.
    VarianceWeighted,
};

inline double eavesdropper_noise_variance(double alpha,
                                          Combining combining =
                                              Combining::WeightedSum) {
    const double a2 = alpha * alpha;
    if (combining == Combining::VarianceWeighted)
        return (a2 + 1.0) / (2.0 * a2 + 1.0);
    const double den = a2 + alpha + 1.0;
    return (a2 * a2 + 2.0 * a2 + 2.0 * alpha + 1.0) / (den * den);
}

// Eavesdropper's effective observation: the M^2 labeled sum-constellation
// points plus complex Gaussian noise. Means are source-major, matching
// SumConstellation (means[s*M + d] has label (s, d)); labels are
// equiprobable with prior 1/M^2.
struct GaussianMixtureChannel {
    int order = 0;
    double noise_variance = 0.0;
    std::vector<cplx> means;
    std::vector<std::pair<int, int>> labels;
};

inline GaussianMixtureChannel eavesdropper_channel(
    const SystemParams& params, Combining combining = Combining::WeightedSum) {
    SumConstellation sc = sum_constellation(params);
    GaussianMixtureChannel ch;
    ch.order = sc.order;
    ch.noise_variance =
        eavesdropper_noise_variance(amplification_factor(params), combining);
    ch.means = std::move(sc.points);
    ch.labels = std::move(sc.labels);
    return ch;
}

// Destination's observation after relay amplification and removal of its own
// jamming contribution: the scaled source alphabet plus noise of total
// variance 1 + 1/alpha^2, prior 1/M.
struct AwgnChannel {
    int order = 0;
    double noise_variance = 0.0;
    std::vector<cplx> means;
};

inline AwgnChannel destination_channel(const SystemParams& params) {
    const double alpha = amplification_factor(params);
    AwgnChannel ch;
    ch.order = params.order;
    ch.noise_variance = 1.0 + 1.0 / (alpha * alpha);
    const PskConstellation alphabet = psk_alphabet(params.order);
    const double a1 = std::sqrt(params.p1);
    ch.means.reserve(alphabet.points.size());
    for (const cplx& x : alphabet.points) ch.means.push_back(a1 * x);
    return ch;
}

// One sample of every intermediate signal of the two-phase protocol.
struct TwoPhaseSample {
    int s = 0;  // source symbol index
    int d = 0;  // jammer symbol index
    cplx x_s;   // scaled source symbol
    cplx x_d;   // scaled, rotated jammer symbol
    cplx y1;    // relay reception (MA phase)
    cplx ye;    // eavesdropper reception (MA phase)
    cplx y1p;   // relay transmission (BC phase)
    cplx y2;    // destination reception (BC phase)
    cplx yep;   // eavesdropper reception (BC phase)
    cplx ye_bar;  // eavesdropper combined observation
    cplx yd;    // destination observation after self-interference removal
};

// Sample-level simulator used to cross-validate the channel abstractions.
// Every intermediate signal is constructed literally; the combined
// eavesdropper observation uses weights (alpha+1) on ye and alpha on yep,
// normalized by alpha^2+alpha+1, and yd = (y2 - alpha*x_d)/alpha.
//
// Samples are generated in deterministic blocks with per-block derived
// streams, so identical (params, n, seed) reproduce bit-identically and
// blocks could be filled in parallel.
inline std::vector<TwoPhaseSample> simulate_two_phase(
    const SystemParams& params, std::int64_t n, std::uint64_t seed) {
    params.validate();
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");

    constexpr std::int64_t kBlock = 4096;
    const int m = params.order;
    const PskConstellation alphabet = psk_alphabet(m);
    const double alpha = amplification_factor(params);
    const double a1 = std::sqrt(params.p1);
    const double a2 = std::sqrt(params.p2);
    const cplx rot = std::polar(1.0, params.theta);
    const double comb_den = alpha * alpha + alpha + 1.0;

    std::vector<TwoPhaseSample> out(static_cast<std::size_t>(n));
    for (std::int64_t b0 = 0; b0 < n; b0 += kBlock) {
        Rng rng(stream_seed(seed, static_cast<std::uint64_t>(b0 / kBlock)));
        const std::int64_t b1 = std::min(n, b0 + kBlock);
        for (std::int64_t i = b0; i < b1; ++i) {
            TwoPhaseSample& r = out[static_cast<std::size_t>(i)];
            r.s = rng.uniform_index(m);
            r.d = rng.uniform_index(m);
            const cplx n1 = rng.complex_gaussian(1.0);
            const cplx n2 = rng.complex_gaussian(1.0);
            const cplx n3 = rng.complex_gaussian(1.0);
            const cplx n4 = rng.complex_gaussian(1.0);
            r.x_s = a1 * alphabet.points[r.s];
            r.x_d = a2 * rot * alphabet.points[r.d];
            r.y1 = r.x_s + r.x_d + n1;
            r.ye = r.x_s + r.x_d + n2;
            r.y1p = alpha * r.y1;
            r.y2 = r.y1p + n3;
            r.yep = r.y1p + n4;
            r.ye_bar = ((alpha + 1.0) * r.ye + alpha * r.yep) / comb_den;
            r.yd = (r.y2 - alpha * r.x_d) / alpha;
        }
    }
    return out;
}

}  // namespace relaysec

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "relaysec/channel.hpp"
#include "relaysec/estimate.hpp"
#include "relaysec/rng.hpp"

namespace relaysec {

inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("probability must lie in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Streaming log-sum-exp: running max with rescaled running sum, so no term
// ever underflows relative to the leader.
class LogSumExp {
  public:
    void add(double x) {
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }
    double value() const { return max_ + std::log(sum_); }

  private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

// log of the equiprobable-mixture density at y, natural log.
inline double log_mixture_density(std::span<const cplx> means, double variance,
                                  cplx y) {
    LogSumExp lse;
    for (const cplx& mu : means) lse.add(-std::norm(y - mu) / variance);
    return lse.value() - std::log(static_cast<double>(means.size())) -
           std::log(std::numbers::pi * variance);
}

struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;  // sum to sqrt(pi)
};

namespace detail {

// Orthonormal Hermite recurrence; value of the degree-n polynomial and, via
// h_n' = sqrt(2n) h_{n-1}, everything Newton needs.
inline void hermite_pair(int n, double t, double& hn, double& hnm1) {
    double h0 = 1.0 / std::pow(std::numbers::pi, 0.25);
    if (n == 0) {
        hn = h0;
        hnm1 = 0.0;
        return;
    }
    double h1 = std::sqrt(2.0) * t * h0;
    for (int k = 1; k < n; ++k) {
        const double h2 = t * std::sqrt(2.0 / (k + 1)) * h1 -
                          std::sqrt(static_cast<double>(k) / (k + 1)) * h0;
        h0 = h1;
        h1 = h2;
    }
    hn = h1;
    hnm1 = h0;
}

inline GaussHermite compute_gauss_hermite(int n) {
    // Roots bracketed by a fine scan of sign changes, then bisection plus a
    // few Newton polish steps. All roots lie inside +-sqrt(2n+1).
    const double bound = std::sqrt(2.0 * n + 1.0) + 1.0;
    const double scan = 1e-3;
    GaussHermite gh;
    auto eval = [n](double t) {
        double hn, hm;
        hermite_pair(n, t, hn, hm);
        return hn;
    };
    double prev_t = -bound;
    double prev_v = eval(prev_t);
    for (double t = -bound + scan; t <= bound + scan / 2; t += scan) {
        const double v = eval(t);
        if ((prev_v < 0.0) != (v < 0.0)) {
            double lo = prev_t, hi = t;
            double flo = prev_v;
            for (int it = 0; it < 64; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = eval(mid);
                if ((flo < 0.0) != (fm < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            double root = 0.5 * (lo + hi);
            for (int it = 0; it < 4; ++it) {
                double hn, hm;
                hermite_pair(n, root, hn, hm);
                const double deriv = std::sqrt(2.0 * n) * hm;
                if (deriv != 0.0) root -= hn / deriv;
            }
            double hn, hm;
            hermite_pair(n, root, hn, hm);
            gh.nodes.push_back(root);
            gh.weights.push_back(1.0 / (n * hm * hm));
        }
        prev_t = t;
        prev_v = v;
    }
    if (static_cast<int>(gh.nodes.size()) != n)
        throw std::runtime_error("Gauss-Hermite root scan failed");
    return gh;
}

}  // namespace detail

inline const GaussHermite& gauss_hermite(int n) {
    if (n < 1 || n > 200)
        throw std::invalid_argument("quadrature nodes per axis must be 1..200");
    static std::mutex mu;
    static std::map<int, GaussHermite> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, detail::compute_gauss_hermite(n)).first;
    return it->second;
}

namespace detail {

constexpr double kLn2 = std::numbers::ln2;

struct MeanStdErr {
    double mean = 0.0;
    double std_err = 0.0;
};

// Streaming mean/variance (Welford).
class Accumulator {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    MeanStdErr finish() const {
        const double var = n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
        return {mean_, std::sqrt(var / static_cast<double>(n_))};
    }

  private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

constexpr std::int64_t kMcBlock = 4096;

// Monte Carlo differential entropy of an equiprobable Gaussian mixture:
// draw y from the mixture, average -log2 p(y). Unbiased under the exact
// density.
inline MeanStdErr entropy_mc(std::span<const cplx> means, double variance,
                             std::int64_t samples, std::uint64_t seed) {
    Accumulator acc;
    const int k = static_cast<int>(means.size());
    for (std::int64_t b0 = 0; b0 < samples; b0 += kMcBlock) {
        Rng rng(stream_seed(seed, static_cast<std::uint64_t>(b0 / kMcBlock)));
        const std::int64_t b1 = std::min(samples, b0 + kMcBlock);
        for (std::int64_t i = b0; i < b1; ++i) {
            const cplx y =
                means[rng.uniform_index(k)] + rng.complex_gaussian(variance);
            acc.add(-log_mixture_density(means, variance, y) / kLn2);
        }
    }
    return acc.finish();
}

// Tensor Gauss-Hermite expectation of f(mu + noise) for complex noise of the
// given total variance: node offset is sigma*(t_i + i t_j), weight
// w_i*w_j/pi.
template <class F>
inline double gauss_hermite_expect(const GaussHermite& gh, cplx mu,
                                   double variance, F&& f) {
    const double sigma = std::sqrt(variance);
    double total = 0.0;
    const std::size_t n = gh.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const cplx y = mu + cplx(sigma * gh.nodes[i], sigma * gh.nodes[j]);
            row += gh.weights[j] * f(y);
        }
        total += gh.weights[i] * row;
    }
    return total / std::numbers::pi;
}

inline double entropy_quadrature(std::span<const cplx> means, double variance,
                                 int nodes) {
    const GaussHermite& gh = gauss_hermite(nodes);
    double h = 0.0;
    for (const cplx& mu : means) {
        h += gauss_hermite_expect(gh, mu, variance, [&](cplx y) {
            return -log_mixture_density(means, variance, y);
        });
    }
    return h / (static_cast<double>(means.size()) * kLn2);
}

constexpr double kOracleStepFraction = 20.0;  // grid step = sigma / 20
constexpr double kOraclePadSigmas = 6.0;      // truncation beyond max |mean|

// Rectangular integration of -p log2 p over the truncated complex plane.
// The pre-build reference engine; intended for M <= 4 validation.
inline std::pair<double, std::int64_t> entropy_grid(
    std::span<const cplx> means, double variance) {
    const double sigma = std::sqrt(variance);
    double max_abs = 0.0;
    for (const cplx& mu : means) max_abs = std::max(max_abs, std::abs(mu));
    const double extent = max_abs + kOraclePadSigmas * sigma;
    const double step = sigma / kOracleStepFraction;
    const std::int64_t half = static_cast<std::int64_t>(extent / step) + 1;

    double h = 0.0;
    std::int64_t points = 0;
    for (std::int64_t ix = -half; ix <= half; ++ix) {
        const double x = static_cast<double>(ix) * step;
        for (std::int64_t iy = -half; iy <= half; ++iy) {
            const double y = static_cast<double>(iy) * step;
            const double logp =
                log_mixture_density(means, variance, cplx(x, y));
            const double p = std::exp(logp);
            if (p > 0.0) h -= p * logp;
            ++points;
        }
    }
    return {h * step * step / kLn2, points};
}

}  // namespace detail

enum class Conditioning { None, OnSource };

// Differential entropy of the eavesdropper observation, in bits.
// Conditioning::None integrates the full M^2-component mixture;
// Conditioning::OnSource averages, over the source symbol, the entropy of
// the M-component sub-mixture left by the unknown jammer symbol.
inline Estimate mixture_entropy(const GaussianMixtureChannel& channel,
                                Conditioning conditioning,
                                const EngineSpec& spec) {
    if (channel.means.empty())
        throw std::invalid_argument("mixture must have at least one component");
    if (!(channel.noise_variance > 0.0))
        throw std::invalid_argument("noise variance must be positive");

    const double var = channel.noise_variance;
    const std::span<const cplx> all(channel.means);
    Estimate est;
    est.engine = spec.kind;

    if (conditioning == Conditioning::None) {
        switch (spec.kind) {
            case Engine::MonteCarlo: {
                const auto r =
                    detail::entropy_mc(all, var, spec.precision, spec.seed);
                est.value = r.mean;
                est.std_err = r.std_err;
                est.n = spec.precision;
                break;
            }
            case Engine::Quadrature: {
                est.value = detail::entropy_quadrature(
                    all, var, static_cast<int>(spec.precision));
                est.n = spec.precision;
                break;
            }
            case Engine::GridOracle: {
                const auto [h, pts] = detail::entropy_grid(all, var);
                est.value = h;
                est.n = pts;
                break;
            }
        }
        est.raw = est.value;
        return est;
    }

    // OnSource: per-source sub-mixtures are the contiguous source-major runs.
    const int m = channel.order;
    auto sub = [&](int s) { return all.subspan(static_cast<std::size_t>(s) * m, m); };

    switch (spec.kind) {
        case Engine::MonteCarlo: {
            detail::Accumulator acc;
            for (std::int64_t b0 = 0; b0 < spec.precision;
                 b0 += detail::kMcBlock) {
                Rng rng(stream_seed(spec.seed,
                                    static_cast<std::uint64_t>(
                                        b0 / detail::kMcBlock)));
                const std::int64_t b1 =
                    std::min(spec.precision, b0 + detail::kMcBlock);
                for (std::int64_t i = b0; i < b1; ++i) {
                    const int s = rng.uniform_index(m);
                    const int d = rng.uniform_index(m);
                    const cplx y = channel.means[static_cast<std::size_t>(s) * m + d] +
                                   rng.complex_gaussian(var);
                    acc.add(-log_mixture_density(sub(s), var, y) /
                            detail::kLn2);
                }
            }
            const auto r = acc.finish();
            est.value = r.mean;
            est.std_err = r.std_err;
            est.n = spec.precision;
            break;
        }
        case Engine::Quadrature: {
            const GaussHermite& gh =
                gauss_hermite(static_cast<int>(spec.precision));
            double h = 0.0;
            for (int s = 0; s < m; ++s) {
                const auto means_s = sub(s);
                for (int d = 0; d < m; ++d) {
                    h += detail::gauss_hermite_expect(
                        gh, means_s[d], var, [&](cplx y) {
                            return -log_mixture_density(means_s, var, y);
                        });
                }
            }
            est.value = h / (static_cast<double>(m) * m * detail::kLn2);
            est.n = spec.precision;
            break;
        }
        case Engine::GridOracle: {
            double h = 0.0;
            std::int64_t pts = 0;
            for (int s = 0; s < m; ++s) {
                const auto [hs, p] = detail::entropy_grid(sub(s), var);
                h += hs;
                pts += p;
            }
            est.value = h / m;
            est.n = pts;
            break;
        }
    }
    est.raw = est.value;
    return est;
}

// I(X_s; Y_d) for the uniform discrete input over the channel means, in
// bits. Guaranteed in [0, log2 M] after clamping; the raw value is kept.
inline Estimate mi_discrete_awgn(const AwgnChannel& channel,
                                 const EngineSpec& spec) {
    if (channel.means.empty())
        throw std::invalid_argument("channel must have at least one input");
    if (!(channel.noise_variance > 0.0))
        throw std::invalid_argument("noise variance must be positive");

    const double var = channel.noise_variance;
    const std::span<const cplx> means(channel.means);
    const int m = static_cast<int>(means.size());
    const double log2m = std::log2(static_cast<double>(m));

    // Information loss at input s under noise n:
    // log2 sum_{s'} exp((|n|^2 - |mu_s + n - mu_{s'}|^2) / var).
    auto loss = [&](int s, cplx n) {
        const cplx y = means[s] + n;
        LogSumExp lse;
        const double n2 = std::norm(n) / var;
        for (const cplx& mu : means) lse.add(n2 - std::norm(y - mu) / var);
        return lse.value() / detail::kLn2;
    };

    Estimate est;
    est.engine = spec.kind;
    switch (spec.kind) {
        case Engine::MonteCarlo: {
            detail::Accumulator acc;
            for (std::int64_t b0 = 0; b0 < spec.precision;
                 b0 += detail::kMcBlock) {
                Rng rng(stream_seed(spec.seed,
                                    static_cast<std::uint64_t>(
                                        b0 / detail::kMcBlock)));
                const std::int64_t b1 =
                    std::min(spec.precision, b0 + detail::kMcBlock);
                for (std::int64_t i = b0; i < b1; ++i) {
                    acc.add(loss(rng.uniform_index(m),
                                 rng.complex_gaussian(var)));
                }
            }
            const auto r = acc.finish();
            est.raw = log2m - r.mean;
            est.std_err = r.std_err;
            est.n = spec.precision;
            break;
        }
        case Engine::Quadrature: {
            const GaussHermite& gh =
                gauss_hermite(static_cast<int>(spec.precision));
            double total = 0.0;
            for (int s = 0; s < m; ++s) {
                total += detail::gauss_hermite_expect(
                    gh, cplx(0.0, 0.0), var, [&](cplx n) { return loss(s, n); });
            }
            est.raw = log2m - total / m;
            est.n = spec.precision;
            break;
        }
        case Engine::GridOracle: {
            const auto [h, pts] = detail::entropy_grid(means, var);
            est.raw = h - std::log2(std::numbers::pi * std::numbers::e * var);
            est.n = pts;
            break;
        }
    }
    est.value = std::clamp(est.raw, 0.0, log2m);
    return est;
}

// I(X_s; Ye_bar): difference of the unconditioned and source-conditioned
// mixture entropies, clamped to [0, log2 M] with the raw difference kept.
inline Estimate mi_eavesdropper(const SystemParams& params,
                                const EngineSpec& spec) {
    const GaussianMixtureChannel channel = eavesdropper_channel(params);
    const Estimate h = mixture_entropy(
        channel, Conditioning::None,
        spec.with_seed(stream_seed(spec.seed, 0x66756c6cull)));
    const Estimate hc = mixture_entropy(
        channel, Conditioning::OnSource,
        spec.with_seed(stream_seed(spec.seed, 0x636f6e64ull)));

    Estimate est;
    est.engine = spec.kind;
    est.raw = h.value - hc.value;
    est.value = std::clamp(est.raw, 0.0,
                           std::log2(static_cast<double>(params.order)));
    est.std_err = combined_std_err(h.std_err, hc.std_err);
    est.n = h.n;
    return est;
}

}  // namespace relaysec

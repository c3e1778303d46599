#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relaysec/params.hpp"

namespace relaysec {

using cplx = std::complex<double>;

// M points exp(i*2*pi*m/M), m = 0..M-1. Zero-mean, unit-magnitude alphabet.
struct PskConstellation {
    int order = 0;
    std::vector<cplx> points;
};

inline PskConstellation psk_alphabet(int order) {
    if (order < 2)
        throw std::invalid_argument("modulation order must be >= 2");
    PskConstellation c;
    c.order = order;
    c.points.reserve(order);
    for (int m = 0; m < order; ++m) {
        const double phi = 2.0 * std::numbers::pi * m / order;
        c.points.emplace_back(std::cos(phi), std::sin(phi));
    }
    return c;
}

// The M^2 superposed points sqrt(P1)*x_s + sqrt(P2)*e^{i theta}*x_d, labeled
// by (source index, jammer index). Entries are source-major:
// points[s*M + d] carries label (s, d).
struct SumConstellation {
    int order = 0;
    double theta = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    std::vector<cplx> points;
    std::vector<std::pair<int, int>> labels;
};

inline SumConstellation sum_constellation(const SystemParams& params) {
    params.validate();
    const int m = params.order;
    const PskConstellation alphabet = psk_alphabet(m);
    const double a1 = std::sqrt(params.p1);
    const double a2 = std::sqrt(params.p2);
    const cplx rot = std::polar(1.0, params.theta);

    SumConstellation sc;
    sc.order = m;
    sc.theta = params.theta;
    sc.p1 = params.p1;
    sc.p2 = params.p2;
    sc.points.reserve(static_cast<std::size_t>(m) * m);
    sc.labels.reserve(static_cast<std::size_t>(m) * m);
    for (int s = 0; s < m; ++s) {
        const cplx xs = a1 * alphabet.points[s];
        for (int d = 0; d < m; ++d) {
            sc.points.push_back(xs + a2 * rot * alphabet.points[d]);
            sc.labels.emplace_back(s, d);
        }
    }
    return sc;
}

// Minimum Euclidean distance over pairs whose source labels differ. Pairs
// with equal source index never cause a source-detection error and are
// excluded. Coincident cross-source points (distance < 1e-12) report 0.
inline double min_distance(const SumConstellation& sc) {
    const std::size_t k = sc.points.size();
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (sc.labels[i].first == sc.labels[j].first) continue;
            const double d2 = std::norm(sc.points[i] - sc.points[j]);
            if (d2 < best_sq) best_sq = d2;
        }
    }
    const double d = std::sqrt(best_sq);
    return d < 1e-12 ? 0.0 : d;
}

inline double min_distance_at(const SystemParams& params, double theta) {
    return min_distance(sum_constellation(params.with_theta(theta)));
}

// Phases extremizing the source-distinguishing minimum distance over one
// fundamental period [0, 2*pi/M). theta_h minimizes d_min (worst separation,
// highest eavesdropper error), theta_l maximizes it. Grid search; ties go to
// the smallest phase.
struct ExtremalPhases {
    double theta_h = 0.0;
    double theta_l = 0.0;
    double d_min_h = 0.0;
    double d_min_l = 0.0;
};

inline ExtremalPhases extremal_phases(const SystemParams& params,
                                      double grid_step =
                                          std::numbers::pi / 1800.0) {
    params.validate();
    if (!(grid_step > 0.0) || grid_step > std::numbers::pi / 180.0)
        throw std::invalid_argument(
            "grid step must lie in (0, pi/180] radians");
    const double period = 2.0 * std::numbers::pi / params.order;
    constexpr double kTieTol = 1e-12;

    ExtremalPhases out;
    bool first = true;
    for (std::int64_t k = 0;; ++k) {
        const double theta = static_cast<double>(k) * grid_step;
        if (theta >= period - 1e-15) break;
        const double d = min_distance_at(params, theta);
        if (first) {
            out = {theta, theta, d, d};
            first = false;
            continue;
        }
        if (d < out.d_min_h - kTieTol) {
            out.theta_h = theta;
            out.d_min_h = d;
        }
        if (d > out.d_min_l + kTieTol) {
            out.theta_l = theta;
            out.d_min_l = d;
        }
    }
    return out;
}

}  // namespace relaysec

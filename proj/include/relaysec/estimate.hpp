#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace relaysec {

enum class Engine { MonteCarlo, Quadrature, GridOracle };

inline std::string_view engine_name(Engine e) {
    switch (e) {
        case Engine::MonteCarlo: return "monte-carlo";
        case Engine::Quadrature: return "quadrature";
        case Engine::GridOracle: return "grid-oracle";
    }
    return "?";
}

// A numeric value in bits with its standard error and sample/node count; the
// return type of every stochastic or numeric-integration computation.
// Deterministic engines report std_err = 0. `raw` keeps the pre-clamp value
// for operations that clamp their result.
struct Estimate {
    double value = 0.0;
    double std_err = 0.0;
    std::int64_t n = 0;
    Engine engine = Engine::MonteCarlo;
    double raw = 0.0;
};

// Engine selection for the information-measure computations: precision is the
// Monte Carlo sample count or the quadrature nodes per axis (ignored by the
// grid oracle, which derives its grid from the mixture geometry).
struct EngineSpec {
    Engine kind = Engine::MonteCarlo;
    std::int64_t precision = 100000;
    std::uint64_t seed = 1;

    EngineSpec with_seed(std::uint64_t s) const {
        EngineSpec e = *this;
        e.seed = s;
        return e;
    }
};

inline double combined_std_err(double a, double b) { return std::hypot(a, b); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace relaysec

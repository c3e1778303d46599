#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace relaysec {

// Operating point of the two-hop link. All four noise sources are
// circularly-symmetric complex Gaussian with total variance 1 (0.5 per real
// dimension). Exactly one of relay_power / alpha_override fixes the relay
// gain: relay_power derives the gain from the relay's output power
// constraint, alpha_override pins it directly.
struct SystemParams {
    double p1 = 1.0;     // source power, linear
    double p2 = 1.0;     // jammer power, linear
    double theta = 0.0;  // source/jammer phase difference, radians
    int order = 4;       // M-PSK modulation order
    std::optional<double> relay_power;
    std::optional<double> alpha_override;

    void validate() const {
        if (order < 2)
            throw std::invalid_argument("modulation order must be >= 2");
        if (!(p1 >= 0.0) || !(p2 >= 0.0))
            throw std::invalid_argument("powers must be nonnegative");
        if (!std::isfinite(theta))
            throw std::invalid_argument("theta must be finite");
        if (relay_power.has_value() == alpha_override.has_value())
            throw std::invalid_argument(
                "exactly one of relay_power and alpha_override must be set");
        if (relay_power && !(*relay_power > 0.0))
            throw std::invalid_argument("relay power must be positive");
        if (alpha_override && !(*alpha_override > 0.0))
            throw std::invalid_argument("alpha must be positive");
    }

    SystemParams with_theta(double t) const {
        SystemParams p = *this;
        p.theta = t;
        return p;
    }

    SystemParams with_power(double p) const {
        SystemParams q = *this;
        q.p1 = p;
        q.p2 = p;
        return q;
    }
};

}  // namespace relaysec

#include "fairjudge/engine.hpp"

#include <cmath>
#include <string>

namespace fairjudge {

void HyperParams::validate() const {
    for (double v : {alpha1, alpha2, beta1, beta2})
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("hyperparameters must be finite and non-negative");
}

int max_iterations_bound(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 2.0))
        throw std::invalid_argument("epsilon must lie in (0, 2), got " + std::to_string(epsilon));
    double steps = std::log(epsilon / 2.0) / std::log(0.75);
    // epsilon = 2 * (3/4)^k must give exactly k despite log rounding.
    double nearest = std::round(steps);
    if (std::abs(steps - nearest) < 1e-9)
        steps = nearest;
    return 2 + static_cast<int>(std::ceil(steps));
}

} // namespace fairjudge

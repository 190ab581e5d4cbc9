#include "kaczmarz/random.hpp"

#include <cmath>

namespace kaczmarz {

double Rng::gaussian() {
    // sqrt(2/e) bounds |v| over the acceptance region.
    static const double kVMax = std::sqrt(2.0 / std::exp(1.0));
    for (;;) {
        const double u = 1.0 - uniform();  // (0, 1]
        const double v = (2.0 * uniform() - 1.0) * kVMax;
        const double x = v / u;
        if (x * x <= -4.0 * std::log(u)) return x;
    }
}

}  // namespace kaczmarz

#include "capm/rng.hpp"

#include <cmath>

namespace capm {

double Rng::normal() {
    if (spare_) {
        const double value = *spare_;
        spare_.reset();
        return value;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    return u * factor;
}

}  // namespace capm

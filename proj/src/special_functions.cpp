#include "capm/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "capm/errors.hpp"

namespace capm::special {

namespace {

constexpr int kMaxIterations = 20000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b) / front factor, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) {
            return h;
        }
    }
    throw std::runtime_error(
        fmt::format("incomplete beta continued fraction did not converge (a={}, b={}, x={})", a, b,
                    x));
}

// std::lgamma writes the global signgam on glibc; the reentrant form does not.
double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// x^a y^b / (a B(a, b))
double front_factor(double a, double b, double x, double y) {
    const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                             a * std::log(x) + b * std::log(y);
    return std::exp(log_front) / a;
}

// y = 1 - x, supplied by the caller when it is known more precisely than 1 - x.
double incomplete_beta_complemented(double a, double b, double x, double y) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (y <= 0.0) {
        return 1.0;
    }
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front_factor(a, b, x, y) * beta_continued_fraction(a, b, x);
    }
    return 1.0 - front_factor(b, a, y, x) * beta_continued_fraction(b, a, y);
}

void check_df(double df) {
    if (!(df >= 1.0)) {
        throw DomainError(fmt::format("degrees of freedom must be >= 1, got {}", df));
    }
}

// P(T >= |t|) with the beta argument split into x = df/(df+t^2) and its exact complement.
double upper_tail_abs(double t, double df) {
    const double t2 = t * t;
    if (std::isinf(t2)) {
        return 0.0;
    }
    const double denom = df + t2;
    return 0.5 * incomplete_beta_complemented(0.5 * df, 0.5, df / denom, t2 / denom);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw DomainError(fmt::format("incomplete beta outside domain (a={}, b={}, x={})", a, b, x));
    }
    return incomplete_beta_complemented(a, b, x, 1.0 - x);
}

double student_t_sf(double t, double df) {
    check_df(df);
    if (std::isnan(t)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double tail = upper_tail_abs(t, df);
    return t >= 0.0 ? tail : 1.0 - tail;
}

double student_t_two_sided(double t, double df) {
    check_df(df);
    if (std::isnan(t)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::min(1.0, 2.0 * upper_tail_abs(t, df));
}

double student_t_quantile(double p, double df) {
    check_df(df);
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(fmt::format("quantile probability must lie in (0, 1), got {}", p));
    }
    if (p == 0.5) {
        return 0.0;
    }
    if (p < 0.5) {
        return -student_t_quantile(1.0 - p, df);
    }
    const double target = 1.0 - p;
    double lo = 0.0;
    double hi = 1.0;
    while (upper_tail_abs(hi, df) > target) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (upper_tail_abs(mid, df) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace capm::special

#include "chainrisk/special.hpp"

#include <cmath>
#include <limits>

#include "chainrisk/error.hpp"

namespace chainrisk {
namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEpsilon = 1e-16;

void check_args(double a, double x) {
    if (!std::isfinite(a) || !std::isfinite(x)) {
        throw DomainError("incomplete gamma: non-finite argument");
    }
    if (a <= 0.0) {
        throw DomainError("incomplete gamma: shape must be positive");
    }
    if (x < 0.0) {
        throw DomainError("incomplete gamma: x must be nonnegative");
    }
}

// log of x^a e^{-x} / Γ(a)
double log_prefactor(double a, double x) {
    return a * std::log(x) - x - log_gamma(a);
}

// P(a, x) by the power series; valid for x < a + 1.
double lower_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon) {
            break;
        }
    }
    return sum * std::exp(log_prefactor(a, x));
}

// Q(a, x) by the modified Lentz continued fraction; valid for x >= a + 1.
double upper_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEpsilon;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) {
            break;
        }
    }
    return std::exp(log_prefactor(a, x)) * h;
}

}  // namespace

double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

double regularized_lower_gamma(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        return std::fmin(1.0, lower_series(a, x));
    }
    return std::fmax(0.0, 1.0 - upper_fraction(a, x));
}

double regularized_upper_gamma(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        return std::fmax(0.0, 1.0 - lower_series(a, x));
    }
    return std::fmin(1.0, upper_fraction(a, x));
}

}  // namespace chainrisk

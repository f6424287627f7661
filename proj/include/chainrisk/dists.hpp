#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "chainrisk/rng.hpp"

namespace chainrisk {

struct Exponential {
    double rate;
};

struct Gamma {
    double shape;
    double rate;
};

/// Weibull with scale α and shape β: f(y) = (β/α)(y/α)^{β-1} exp(-(y/α)^β).
struct Weibull {
    double scale;
    double shape;
};

enum class Family { Exponential, Gamma, Weibull };

/// One of the three parametric time laws. Immutable; all parameters are
/// validated strictly positive and finite on construction.
class Distribution {
public:
    using Law = std::variant<Exponential, Gamma, Weibull>;

    Distribution(Exponential law);
    Distribution(Gamma law);
    Distribution(Weibull law);

    static Distribution exponential(double rate) { return Distribution(Exponential{rate}); }
    static Distribution gamma(double shape, double rate) { return Distribution(Gamma{shape, rate}); }
    static Distribution weibull(double scale, double shape) {
        return Distribution(Weibull{scale, shape});
    }

    Family family() const noexcept;
    const Law& law() const noexcept { return law_; }

    /// Density at t >= 0. At t = 0 the value is the right limit, which is
    /// +inf for gamma / Weibull shapes below one.
    double pdf(double t) const;
    double cdf(double t) const;
    /// 1 - cdf(t) without cancellation.
    double sf(double t) const;
    double mean() const;
    /// Exponent a with pdf(t) ~ c·t^{a-1} as t → 0: the shape for gamma and
    /// Weibull, 1 for exponential.
    double origin_exponent() const;

    /// Smallest x with sf(x) <= tail, for tail in (0, 1).
    double upper_quantile(double tail) const;
    double quantile(double p) const { return upper_quantile(1.0 - p); }

    /// Draws one variate. Exponential and Weibull consume exactly one
    /// uniform (inverse CDF). Gamma uses the Marsaglia-Tsang squeeze with a
    /// Box-Muller normal: three uniforms per attempt, plus one final uniform
    /// when shape < 1.
    double sample(UniformSource& u) const;

    /// Canonical text form, e.g. "gamma shape=2 rate=1"; parse_distribution
    /// in the config module reads it back.
    std::string describe() const;

    friend bool operator==(const Distribution& a, const Distribution& b);

private:
    Law law_;
};

bool operator==(const Distribution& a, const Distribution& b);

/// Parameters of the CDF of the sum of two independent gamma variates.
struct GammaSumSeriesParams {
    double shape1;
    double rate1;
    double shape2;
    double rate2;
    double tolerance = 1e-10;
    std::size_t max_terms = 10000;
};

/// Mixture representation of a two-gamma sum: the sum is distributed as
/// Σ_l weights[l] · Gamma(total_shape + l, max_rate).
struct GammaSumSeries {
    double total_shape;
    double max_rate;
    double scale_constant;                // C = Π (rate_i / max_rate)^{shape_i}
    std::vector<double> recursion;        // δ_l, δ_0 = 1
    std::vector<double> weights;          // C · δ_l
    double tail_mass;                     // 1 - Σ weights, a bound on the truncation error
};

/// Builds the gamma-sum mixture, adding terms until the unassigned
/// mixture mass drops below the tolerance. Throws ConvergenceError when
/// max_terms is reached first.
GammaSumSeries gamma_sum_series(const GammaSumSeriesParams& p);

/// P(X1 + X2 <= t) with X_i ~ Gamma(shape_i, rate_i), clamped to [0, 1].
double gamma_sum_cdf(const GammaSumSeriesParams& p, double t);
double gamma_sum_cdf(const GammaSumSeries& series, double t);

}  // namespace chainrisk

#include "chainrisk/dists.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chainrisk/error.hpp"
#include "chainrisk/special.hpp"

namespace chainrisk {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        std::ostringstream msg;
        msg << what << " must be positive and finite, got " << v;
        throw DomainError(msg.str());
    }
}

void require_time(double t) {
    if (!std::isfinite(t)) throw DomainError("time argument is not finite");
    if (t < 0.0) throw DomainError("time argument is negative");
}

double gamma_pdf(double shape, double rate, double t) {
    if (t == 0.0) {
        if (shape < 1.0) return std::numeric_limits<double>::infinity();
        return shape == 1.0 ? rate : 0.0;
    }
    return std::exp((shape - 1.0) * std::log(t) + shape * std::log(rate) - rate * t -
                    log_gamma(shape));
}

double standard_gamma_draw(double shape, UniformSource& u) {
    const double boosted = shape < 1.0 ? shape + 1.0 : shape;
    const double d = boosted - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    double value = 0.0;
    for (;;) {
        const double u1 = u.next_uniform();
        const double u2 = u.next_uniform();
        const double x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        const double accept = u.next_uniform();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double x2 = x * x;
        if (accept < 1.0 - 0.0331 * x2 * x2 ||
            std::log(accept) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            value = d * v;
            break;
        }
    }
    if (shape < 1.0) {
        value *= std::pow(u.next_uniform(), 1.0 / shape);
    }
    return value;
}

}  // namespace

Distribution::Distribution(Exponential law) : law_(law) {
    require_positive(law.rate, "exponential rate");
}

Distribution::Distribution(Gamma law) : law_(law) {
    require_positive(law.shape, "gamma shape");
    require_positive(law.rate, "gamma rate");
}

Distribution::Distribution(Weibull law) : law_(law) {
    require_positive(law.scale, "weibull scale");
    require_positive(law.shape, "weibull shape");
}

Family Distribution::family() const noexcept {
    return std::visit(overloaded{[](const Exponential&) { return Family::Exponential; },
                                 [](const Gamma&) { return Family::Gamma; },
                                 [](const Weibull&) { return Family::Weibull; }},
                      law_);
}

double Distribution::pdf(double t) const {
    require_time(t);
    return std::visit(
        overloaded{
            [t](const Exponential& e) { return e.rate * std::exp(-e.rate * t); },
            [t](const Gamma& g) { return gamma_pdf(g.shape, g.rate, t); },
            [t](const Weibull& w) {
                if (t == 0.0) {
                    if (w.shape < 1.0) return std::numeric_limits<double>::infinity();
                    return w.shape == 1.0 ? 1.0 / w.scale : 0.0;
                }
                const double z = t / w.scale;
                return (w.shape / w.scale) * std::pow(z, w.shape - 1.0) *
                       std::exp(-std::pow(z, w.shape));
            }},
        law_);
}

double Distribution::cdf(double t) const {
    require_time(t);
    return std::visit(
        overloaded{[t](const Exponential& e) { return -std::expm1(-e.rate * t); },
                   [t](const Gamma& g) { return regularized_lower_gamma(g.shape, g.rate * t); },
                   [t](const Weibull& w) { return -std::expm1(-std::pow(t / w.scale, w.shape)); }},
        law_);
}

double Distribution::sf(double t) const {
    require_time(t);
    return std::visit(
        overloaded{[t](const Exponential& e) { return std::exp(-e.rate * t); },
                   [t](const Gamma& g) { return regularized_upper_gamma(g.shape, g.rate * t); },
                   [t](const Weibull& w) { return std::exp(-std::pow(t / w.scale, w.shape)); }},
        law_);
}

double Distribution::mean() const {
    return std::visit(
        overloaded{[](const Exponential& e) { return 1.0 / e.rate; },
                   [](const Gamma& g) { return g.shape / g.rate; },
                   [](const Weibull& w) { return w.scale * std::tgamma(1.0 + 1.0 / w.shape); }},
        law_);
}

double Distribution::upper_quantile(double tail) const {
    if (!(tail > 0.0 && tail < 1.0)) {
        throw DomainError("quantile tail mass must lie in (0, 1)");
    }
    if (const auto* e = std::get_if<Exponential>(&law_)) {
        return -std::log(tail) / e->rate;
    }
    if (const auto* w = std::get_if<Weibull>(&law_)) {
        return w->scale * std::pow(-std::log(tail), 1.0 / w->shape);
    }
    const auto& g = std::get<Gamma>(law_);
    // Bracket then bisect on the upper regularized gamma.
    double lo = 0.0;
    double hi = (g.shape + 1.0) / g.rate;
    while (regularized_upper_gamma(g.shape, g.rate * hi) > tail) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_upper_gamma(g.shape, g.rate * mid) > tail) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

double Distribution::sample(UniformSource& u) const {
    return std::visit(
        overloaded{[&u](const Exponential& e) { return -std::log1p(-u.next_uniform()) / e.rate; },
                   [&u](const Gamma& g) { return standard_gamma_draw(g.shape, u) / g.rate; },
                   [&u](const Weibull& w) {
                       return w.scale * std::pow(-std::log1p(-u.next_uniform()), 1.0 / w.shape);
                   }},
        law_);
}

double Distribution::origin_exponent() const {
    return std::visit(overloaded{[](const Exponential&) { return 1.0; },
                                 [](const Gamma& g) { return g.shape; },
                                 [](const Weibull& w) { return w.shape; }},
                      law_);
}

std::string Distribution::describe() const {
    std::ostringstream out;
    out.precision(17);
    std::visit(overloaded{[&out](const Exponential& e) { out << "exponential rate=" << e.rate; },
                          [&out](const Gamma& g) {
                              out << "gamma shape=" << g.shape << " rate=" << g.rate;
                          },
                          [&out](const Weibull& w) {
                              out << "weibull scale=" << w.scale << " shape=" << w.shape;
                          }},
               law_);
    return out.str();
}

bool operator==(const Distribution& a, const Distribution& b) {
    if (a.law_.index() != b.law_.index()) return false;
    return std::visit(
        overloaded{[&b](const Exponential& e) { return e.rate == std::get<Exponential>(b.law_).rate; },
                   [&b](const Gamma& g) {
                       const auto& o = std::get<Gamma>(b.law_);
                       return g.shape == o.shape && g.rate == o.rate;
                   },
                   [&b](const Weibull& w) {
                       const auto& o = std::get<Weibull>(b.law_);
                       return w.scale == o.scale && w.shape == o.shape;
                   }},
        a.law_);
}

// Gamma-sum mixture for two gammas. With R the larger rate and
// q_i = 1 - rate_i / R:
//   γ_j = Σ_i shape_i q_i^j / j,   δ_{l+1} = (1/(l+1)) Σ_{i=1}^{l+1} i γ_i δ_{l+1-i}.
GammaSumSeries gamma_sum_series(const GammaSumSeriesParams& p) {
    require_positive(p.shape1, "shape1");
    require_positive(p.shape2, "shape2");
    require_positive(p.rate1, "rate1");
    require_positive(p.rate2, "rate2");
    require_positive(p.tolerance, "tolerance");
    if (p.max_terms == 0) throw DomainError("max_terms must be positive");

    GammaSumSeries s;
    s.total_shape = p.shape1 + p.shape2;
    s.max_rate = std::fmax(p.rate1, p.rate2);
    const double q1 = 1.0 - p.rate1 / s.max_rate;
    const double q2 = 1.0 - p.rate2 / s.max_rate;
    s.scale_constant = std::exp(p.shape1 * std::log(p.rate1 / s.max_rate) +
                                p.shape2 * std::log(p.rate2 / s.max_rate));

    std::vector<double> gamma_coef{0.0};  // 1-based
    s.recursion.push_back(1.0);
    s.weights.push_back(s.scale_constant);
    double assigned = s.scale_constant;
    double pow1 = 1.0;
    double pow2 = 1.0;
    while (1.0 - assigned > p.tolerance) {
        if (s.weights.size() >= p.max_terms) {
            std::ostringstream msg;
            msg << "gamma-sum series: " << s.weights.size()
                << " terms used, unassigned mass " << 1.0 - assigned << " above tolerance "
                << p.tolerance;
            throw ConvergenceError(msg.str(), s.weights.size());
        }
        const std::size_t next = s.recursion.size();  // l + 1
        pow1 *= q1;
        pow2 *= q2;
        gamma_coef.push_back((p.shape1 * pow1 + p.shape2 * pow2) / static_cast<double>(next));
        double acc = 0.0;
        for (std::size_t i = 1; i <= next; ++i) {
            acc += static_cast<double>(i) * gamma_coef[i] * s.recursion[next - i];
        }
        const double delta = acc / static_cast<double>(next);
        s.recursion.push_back(delta);
        s.weights.push_back(s.scale_constant * delta);
        assigned += s.weights.back();
    }
    s.tail_mass = std::fmax(0.0, 1.0 - assigned);
    return s;
}

double gamma_sum_cdf(const GammaSumSeries& s, double t) {
    require_time(t);
    if (t == 0.0) return 0.0;
    const double x = s.max_rate * t;
    double sum = 0.0;
    for (std::size_t l = 0; l < s.weights.size(); ++l) {
        if (s.weights[l] == 0.0) continue;
        sum += s.weights[l] * regularized_lower_gamma(s.total_shape + static_cast<double>(l), x);
    }
    return std::fmin(1.0, std::fmax(0.0, sum));
}

double gamma_sum_cdf(const GammaSumSeriesParams& p, double t) {
    return gamma_sum_cdf(gamma_sum_series(p), t);
}

}  // namespace chainrisk

#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "chainrisk/error.hpp"

namespace chainrisk {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    // Optional relative tolerance against a coarse estimate of the whole
    // integral; the effective target is max(abs_tol, rel_tol * |I|).
    double rel_tol = 0.0;
    int max_depth = 50;
    // The interval is first cut into this many panels so that narrow bumps
    // are not missed by the five-point start of the recursion.
    int initial_panels = 16;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    long evaluations = 0;
};

namespace detail {

template <class F>
class SimpsonIntegrator {
public:
    SimpsonIntegrator(F& f, int max_depth) : f_(f), max_depth_(max_depth) {}

    double eval(double x) {
        ++evaluations;
        return f_(x);
    }

    // Simpson on [a, b] with fa, fm, fb known and whole = Simpson estimate.
    double refine(double a, double b, double fa, double fm, double fb, double whole, double tol,
                  int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::fabs(delta) <= 15.0 * tol) {
            error += std::fabs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (depth >= max_depth_ || !(lm > a && rm < b)) {
            converged = false;
            error += std::fabs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    double error = 0.0;
    bool converged = true;
    long evaluations = 0;

private:
    F& f_;
    int max_depth_;
};

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction on [a, b]
/// (b < a gives the negated integral over [b, a]).
///
/// Non-finite integrand values at the two outer endpoints (integrable
/// singularities of densities at 0) are replaced by the value a tiny step
/// inside the interval.
template <class F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    QuadratureResult result;
    if (a == b) return result;
    if (b < a) {
        result = adaptive_simpson(std::forward<F>(f), b, a, opts);
        result.value = -result.value;
        return result;
    }
    auto g = [&](double x) { return f(x); };
    detail::SimpsonIntegrator<decltype(g)> integrator(g, opts.max_depth);

    const int panels = opts.initial_panels < 1 ? 1 : opts.initial_panels;
    const double width = (b - a) / panels;
    const double nudge = width * 1e-12;

    auto endpoint = [&](double x, double inward) {
        double v = integrator.eval(x);
        if (!std::isfinite(v)) v = integrator.eval(x + inward);
        return std::isfinite(v) ? v : 0.0;
    };

    struct Panel {
        double a, b, fa, fm, fb, whole;
    };
    std::vector<Panel> list;
    list.reserve(static_cast<std::size_t>(panels));
    double f_left = endpoint(a, nudge);
    double coarse = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + width * i;
        const double pb = (i + 1 == panels) ? b : a + width * (i + 1);
        const double f_right = (i + 1 == panels) ? endpoint(pb, -nudge) : integrator.eval(pb);
        const double f_mid = integrator.eval(0.5 * (pa + pb));
        const double whole = (pb - pa) / 6.0 * (f_left + 4.0 * f_mid + f_right);
        list.push_back({pa, pb, f_left, f_mid, f_right, whole});
        coarse += whole;
        f_left = f_right;
    }

    double tol = opts.abs_tol;
    if (opts.rel_tol > 0.0) tol = std::fmax(tol, opts.rel_tol * std::fabs(coarse));
    const double panel_tol = tol / panels;

    double sum = 0.0;
    for (const auto& p : list) {
        sum += integrator.refine(p.a, p.b, p.fa, p.fm, p.fb, p.whole, panel_tol, 0);
    }
    result.value = sum;
    result.error_estimate = integrator.error;
    result.converged = integrator.converged && std::isfinite(sum);
    result.evaluations = integrator.evaluations;
    return result;
}

/// ∫_0^b f for integrands that may blow up like s^{exponent-1} at the
/// origin (densities of shape < 1). For exponent < 1 the substitution
/// s = b·v^{1/exponent} makes the integrand bounded; otherwise this is
/// plain adaptive_simpson.
template <class F>
QuadratureResult adaptive_simpson_origin(F&& f, double b, double exponent,
                                         const QuadratureOptions& opts = {}) {
    if (!(exponent > 0.0) || exponent >= 1.0 || !(b > 0.0)) {
        return adaptive_simpson(std::forward<F>(f), 0.0, b, opts);
    }
    const double q = 1.0 / exponent;
    auto g = [&](double v) {
        if (v <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        return f(b * std::pow(v, q)) * b * q * std::pow(v, q - 1.0);
    };
    return adaptive_simpson(g, 0.0, 1.0, opts);
}

/// As adaptive_simpson, but throws NumericalError (carrying the achieved
/// estimate) when the tolerance could not be met.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    const QuadratureResult r = adaptive_simpson(std::forward<F>(f), a, b, opts);
    if (!r.converged) {
        std::ostringstream msg;
        msg << "adaptive Simpson did not converge on [" << a << ", " << b
            << "]: estimate " << r.value << ", error " << r.error_estimate;
        throw NumericalError(msg.str(), r.value);
    }
    return r.value;
}

/// Throwing form of adaptive_simpson_origin. When the result is small
/// enough that abs_tol no longer bounds its relative error by `rel_target`,
/// a second pass runs with abs_tol = rel_target·|result| (tail
/// probabilities such as p_mk at large m are quotients' denominators).
template <class F>
double integrate_origin(F&& f, double b, double exponent, const QuadratureOptions& opts = {},
                        double rel_target = 1e-9) {
    const QuadratureResult r = adaptive_simpson_origin(f, b, exponent, opts);
    if (!r.converged) {
        std::ostringstream msg;
        msg << "adaptive Simpson did not converge on [0, " << b << "]: estimate " << r.value
            << ", error " << r.error_estimate;
        throw NumericalError(msg.str(), r.value);
    }
    const double wanted = rel_target * std::fabs(r.value);
    if (!(wanted < opts.abs_tol) || !(wanted > 0.0)) return r.value;
    QuadratureOptions fine = opts;
    fine.abs_tol = std::fmax(wanted, std::numeric_limits<double>::min());
    fine.rel_tol = 0.0;
    const QuadratureResult refined = adaptive_simpson_origin(f, b, exponent, fine);
    // A refinement that stalls still meets the caller's absolute tolerance.
    if (refined.converged || refined.error_estimate <= opts.abs_tol) return refined.value;
    return r.value;
}

}  // namespace chainrisk

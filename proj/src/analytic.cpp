#include "chainrisk/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chainrisk/error.hpp"

namespace chainrisk {
namespace {

void check_time(double t) {
    if (!std::isfinite(t) || t < 0.0) throw DomainError("time must be finite and nonnegative");
}

// ∫ y f_Y(y) P(Z_m > y) dy = E[Y; Y < Z_m]
double detected_detect_moment(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    const Distribution& y = spec.detect();
    return integrate_detect_range(
        spec, [&](double s) { return s * y.pdf(s) * z_m_sf(spec, s); }, y.origin_exponent(), quad);
}

// ∫ f_Y(y) P(Z_m > y) dy = 1 - p_mk
double detected_prob(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    const Distribution& y = spec.detect();
    return integrate_detect_range(
        spec, [&](double s) { return y.pdf(s) * z_m_sf(spec, s); }, y.origin_exponent(), quad);
}

// ∫ s f_Z(s) P(Y > s) ds = E[Z_m; Z_m < Y]
double hacked_hack_moment(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    const Distribution& y = spec.detect();
    return integrate_detect_range(
        spec, [&](double s) { return s * z_m_pdf(spec, s) * y.sf(s); }, z_m_origin_exponent(spec),
        quad);
}

struct FirstCycleGrid {
    double hack_prob = 0.0;
    std::vector<double> detected;        // H1(t_i) = P(Y <= t_i, Y <= Z_m)
    std::vector<double> detected_reset;  // H2(t_i) = P(Y + W <= t_i, Y <= Z_m)
};

FirstCycleGrid first_cycle_grid(const BlockchainSpec& spec, double step, std::size_t cells,
                                const QuadratureOptions& quad) {
    FirstCycleGrid out;
    out.hack_prob = hack_detect_prob(spec, quad);
    const Distribution& y = spec.detect();
    const Distribution& w = spec.reset();
    const std::size_t n = cells + 1;

    QuadratureOptions cell_quad = quad;
    cell_quad.initial_panels = 1;
    cell_quad.abs_tol = std::max(quad.abs_tol / static_cast<double>(cells), 1e-15);
    cell_quad.rel_tol = 0.0;

    // Mass of the detected-first density h(y) = f_Y(y) P(Z_m > y) per cell.
    std::vector<double> cell_mass(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        const double a = step * static_cast<double>(j - 1);
        const double b = step * static_cast<double>(j);
        const auto h = [&](double s) { return y.pdf(s) * z_m_sf(spec, s); };
        const auto r = j == 1 ? adaptive_simpson_origin(h, b, y.origin_exponent(), cell_quad)
                              : adaptive_simpson(h, a, b, cell_quad);
        cell_mass[j] = std::max(0.0, r.value);
    }

    // Reset CDF at cell-midpoint offsets (l + 1/2) · step.
    std::vector<double> reset_mid(n, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        reset_mid[l] = w.cdf(step * (static_cast<double>(l) + 0.5));
    }

    out.detected.assign(n, 0.0);
    out.detected_reset.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        out.detected[i] = out.detected[i - 1] + cell_mass[i];
        double acc = 0.0;
        for (std::size_t j = 1; j <= i; ++j) acc += cell_mass[j] * reset_mid[i - j];
        out.detected_reset[i] = acc;
    }
    return out;
}

}  // namespace

double conditional_detect_mean(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    const double q = detected_prob(spec, quad);
    if (!(q > 0.0)) {
        throw ConditioningError("E[Y | Y < Z_m] is undefined: every cycle ends in a hack (p_mk = 1)");
    }
    return detected_detect_moment(spec, quad) / q;
}

double conditional_hack_mean(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    const double p = hack_detect_prob(spec, quad);
    if (!(p > 0.0)) {
        throw ConditioningError("E[Z_m | Z_m < Y] is undefined: no cycle ends in a hack (p_mk = 0)");
    }
    return hacked_hack_moment(spec, quad) / p;
}

double mean_functional_time(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    const double p = hack_detect_prob(spec, quad);
    if (!(p > 0.0)) {
        throw ConditioningError("E[T_m] is infinite: no cycle ends in a hack (p_mk = 0)");
    }
    const double numerator = detected_detect_moment(spec, quad) + (1.0 - p) * spec.reset().mean() +
                             hacked_hack_moment(spec, quad);
    return numerator / p;
}

double functional_survival_term(const BlockchainSpec& spec, double t) {
    check_time(t);
    return z_m_sf(spec, t) * spec.detect().sf(t);
}

double resetting_term(const BlockchainSpec& spec, double t, const QuadratureOptions& quad) {
    check_time(t);
    if (t == 0.0) return 0.0;
    const Distribution& y = spec.detect();
    const Distribution& w = spec.reset();
    const double upper = std::min(t, detect_support_end(spec));
    const double b = integrate_origin(
        [&](double s) { return w.sf(std::max(0.0, t - s)) * z_m_sf(spec, s) * y.pdf(s); }, upper,
        y.origin_exponent(), quad);
    return std::clamp(b, 0.0, 1.0);
}

GridOptions resolve_grid(const BlockchainSpec& spec, GridOptions grid,
                         const QuadratureOptions& quad) {
    if (grid.cells == 0) throw DomainError("grid needs at least one cell");
    if (!(grid.horizon > 0.0)) {
        grid.horizon = 20.0 * mean_functional_time(spec, quad);
    }
    if (grid.step > 0.0) {
        grid.cells = static_cast<std::size_t>(std::ceil(grid.horizon / grid.step - 1e-9));
        grid.horizon = grid.step * static_cast<double>(grid.cells);
    } else {
        grid.step = grid.horizon / static_cast<double>(grid.cells);
    }
    return grid;
}

std::vector<double> cycle_length_cdf(const BlockchainSpec& spec, const GridOptions& grid,
                                     const QuadratureOptions& quad) {
    const GridOptions g = resolve_grid(spec, grid, quad);
    const FirstCycleGrid first = first_cycle_grid(spec, g.step, g.cells, quad);
    const double q = 1.0 - first.hack_prob;
    if (!(q > 0.0)) {
        throw ConditioningError("cycle length is undefined: every cycle ends in a hack (p_mk = 1)");
    }
    std::vector<double> cdf(first.detected_reset.size());
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        cdf[i] = std::clamp(first.detected_reset[i] / q, 0.0, 1.0);
    }
    return cdf;
}

RenewalGrid renewal_function(const BlockchainSpec& spec, const GridOptions& grid,
                             const QuadratureOptions& quad) {
    const GridOptions g = resolve_grid(spec, grid, quad);
    const FirstCycleGrid first = first_cycle_grid(spec, g.step, g.cells, quad);
    const std::size_t n = g.cells + 1;

    RenewalGrid out;
    out.step = g.step;
    out.horizon = g.horizon;
    out.hack_prob = first.hack_prob;
    const double q = 1.0 - first.hack_prob;

    // Defective increment law F̃ = P(Y + W <= t, Y <= Z_m).
    const std::vector<double>& defective = first.detected_reset;
    out.cycle_cdf.assign(n, 0.0);
    if (q > 0.0) {
        for (std::size_t i = 0; i < n; ++i) out.cycle_cdf[i] = std::clamp(defective[i] / q, 0.0, 1.0);
    }

    std::vector<double> jump(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        jump[j] = defective[j] - defective[j - 1];
        const double share = q > 0.0 ? jump[j] / q : 0.0;
        if (share > 0.5) {
            std::ostringstream msg;
            msg << "renewal grid step " << g.step << " too coarse: one cell carries " << share
                << " of the cycle-length law";
            throw NumericalError(msg.str(), share);
        }
    }

    // G_i = F̃_i + Σ_{j=1}^{i} ΔF̃_j (G_{i-j} + G_{i-j+1}) / 2, solved for G_i.
    out.g.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = defective[i] + 0.5 * jump[1] * out.g[i - 1];
        for (std::size_t j = 2; j <= i; ++j) {
            acc += 0.5 * jump[j] * (out.g[i - j] + out.g[i - j + 1]);
        }
        out.g[i] = acc / (1.0 - 0.5 * jump[1]);
    }

    out.functional.assign(n, 0.0);
    out.resetting.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.functional[i] = functional_survival_term(spec, out.time(i));
        out.resetting[i] = std::max(0.0, first.detected[i] - first.detected_reset[i]);
    }
    return out;
}

double renewal_residual(const RenewalGrid& grid) {
    const std::size_t n = grid.size();
    const double q = grid.continue_prob();
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double conv = 0.0;
        for (std::size_t j = 1; j <= i; ++j) {
            const double jump = q * (grid.cycle_cdf[j] - grid.cycle_cdf[j - 1]);
            conv += jump * grid.g[i - j];
        }
        worst = std::max(worst, std::fabs(grid.g[i] - (q * grid.cycle_cdf[i] + conv)));
    }
    return worst;
}

std::vector<double> instantaneous_prob_nodes(const RenewalGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> first(n);
    for (std::size_t i = 0; i < n; ++i) first[i] = grid.functional[i] + grid.resetting[i];
    std::vector<double> prob(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = first[i];
        for (std::size_t j = 1; j <= i; ++j) {
            const double dg = grid.g[j] - grid.g[j - 1];
            acc += 0.5 * dg * (first[i - j] + first[i - j + 1]);
        }
        prob[i] = std::clamp(acc, 0.0, 1.0);
    }
    return prob;
}

std::vector<double> instantaneous_prob(const RenewalGrid& grid, std::span<const double> t_grid) {
    for (double t : t_grid) {
        check_time(t);
        if (t > grid.horizon * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "t = " << t << " lies beyond the renewal grid horizon " << grid.horizon;
            throw DomainError(msg.str());
        }
    }
    const std::vector<double> nodes = instantaneous_prob_nodes(grid);
    std::vector<double> out;
    out.reserve(t_grid.size());
    const std::size_t last = nodes.size() - 1;
    for (double t : t_grid) {
        const double pos = std::min(t / grid.step, static_cast<double>(last));
        const auto i = std::min(static_cast<std::size_t>(pos), last);
        if (i == last) {
            out.push_back(nodes[last]);
            continue;
        }
        const double frac = pos - static_cast<double>(i);
        out.push_back(std::clamp(nodes[i] + frac * (nodes[i + 1] - nodes[i]), 0.0, 1.0));
    }
    return out;
}

std::vector<double> instantaneous_prob(const BlockchainSpec& spec, std::span<const double> t_grid,
                                       GridOptions grid, const QuadratureOptions& quad) {
    if (!(grid.horizon > 0.0) && !t_grid.empty()) {
        grid.horizon = *std::max_element(t_grid.begin(), t_grid.end());
    }
    if (!(grid.horizon > 0.0)) grid.horizon = 1.0;
    return instantaneous_prob(renewal_function(spec, grid, quad), t_grid);
}

}  // namespace chainrisk

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chainrisk/model.hpp"
#include "chainrisk/quadrature.hpp"

namespace chainrisk {

/// E[Y | Y < Z_m]. Throws ConditioningError when p_mk = 1.
double conditional_detect_mean(const BlockchainSpec& spec, const QuadratureOptions& quad = {});

/// E[Z_m | Z_m < Y]. Throws ConditioningError when p_mk = 0.
double conditional_hack_mean(const BlockchainSpec& spec, const QuadratureOptions& quad = {});

/// E[T_m] = (1-p)/p · (E[Y | Y < Z_m] + E[W]) + E[Z_m | Z_m < Y], evaluated
/// in the undivided form (E[Y; Y<Z] + (1-p) E[W] + E[Z; Z<Y]) / p so that
/// p = 1 needs no special case. Throws ConditioningError when p = 0.
double mean_functional_time(const BlockchainSpec& spec, const QuadratureOptions& quad = {});

/// A(t) = P(t < min(Z_m, Y)): still in the first functional period at t.
double functional_survival_term(const BlockchainSpec& spec, double t);

/// B(t) = P(Y <= t < Y + W, Y <= Z_m): in the first re-set at t.
double resetting_term(const BlockchainSpec& spec, double t, const QuadratureOptions& quad = {});

struct GridOptions {
    double step = 0.0;     // 0: horizon / cells
    double horizon = 0.0;  // 0: 20 · E[T_m]
    std::size_t cells = 4096;
};

/// Discretized renewal quantities on t_i = i · step, i = 0..cells.
///
/// `cycle_cdf` is the law of one renewal increment Y_1 + W_1 with
/// Y_1 ~ Y | Y < Z_m. A cycle is followed by another only with probability
/// 1 - p_mk, so the renewal function counting completed re-sets is
/// G = F̃ + F̃ ∗ G with the defective increment law F̃ = (1 - p_mk) · cycle_cdf;
/// `g` holds that G.
struct RenewalGrid {
    double step = 0.0;
    double horizon = 0.0;
    double hack_prob = 0.0;
    std::vector<double> cycle_cdf;
    std::vector<double> g;
    // First-cycle terms on the same grid.
    std::vector<double> functional;  // A(t_i)
    std::vector<double> resetting;   // B(t_i)

    std::size_t size() const noexcept { return g.size(); }
    double time(std::size_t i) const noexcept { return step * static_cast<double>(i); }
    double continue_prob() const noexcept { return 1.0 - hack_prob; }
};

/// Resolves GridOptions defaults (horizon from E[T_m], step from cells).
GridOptions resolve_grid(const BlockchainSpec& spec, GridOptions grid,
                         const QuadratureOptions& quad = {});

/// CDF of Y_1 + W_1 on the grid (0, step, ..., horizon). Throws
/// ConditioningError when p_mk = 1.
std::vector<double> cycle_length_cdf(const BlockchainSpec& spec, const GridOptions& grid,
                                     const QuadratureOptions& quad = {});

/// Solves the renewal equation forward with trapezoid weights. Throws
/// NumericalError when one cell carries more than half of the increment
/// law (grid too coarse).
RenewalGrid renewal_function(const BlockchainSpec& spec, const GridOptions& grid = {},
                             const QuadratureOptions& quad = {});

/// max_i |G_i - (F̃_i + Σ_{j<=i} ΔF̃_j G_{i-j})|, the residual of the solution
/// against the left-endpoint discretization of the renewal equation.
double renewal_residual(const RenewalGrid& grid);

/// P_mk(t) = A(t) + B(t) + ∫_0^t [A + B](t - s) dG(s) on the grid nodes.
std::vector<double> instantaneous_prob_nodes(const RenewalGrid& grid);

/// P_mk(t) at arbitrary t in [0, horizon] (linear interpolation between
/// nodes), clamped to [0, 1]. Throws DomainError beyond the horizon.
std::vector<double> instantaneous_prob(const RenewalGrid& grid, std::span<const double> t_grid);

/// Convenience overload building its own grid; an unset horizon defaults
/// to the largest requested time.
std::vector<double> instantaneous_prob(const BlockchainSpec& spec, std::span<const double> t_grid,
                                       GridOptions grid = {}, const QuadratureOptions& quad = {});

}  // namespace chainrisk

#pragma once

#include <cstdint>
#include <cstddef>
#include <variant>
#include <vector>

#include "chainrisk/model.hpp"
#include "chainrisk/montecarlo.hpp"
#include "chainrisk/quadrature.hpp"

namespace chainrisk {

/// a · m^b + c, a per-unit-time money rate as a function of the quorum m.
struct RateExpr {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;

    double operator()(int m) const;
};

inline double rate_value(const RateExpr& e, int m) { return e(m); }

struct EconSpec {
    RateExpr revenue;     // R(m)
    RateExpr reset_cost;  // C_1(m), paid while re-setting
    RateExpr run_cost;    // C_2(m), paid while functional

    EconSpec scaled(double factor) const;
};

/// E_m[TNR] = {E[N_1] E[Y | Y < Z_m] + E[Z_m | Z_m < Y]} (R - C_2) - E[N_1] E[W] C_1
/// with E[N_1] = (1 - p)/p. Throws ConditioningError when p = 0.
double expected_total_net_revenue(const BlockchainSpec& spec, const EconSpec& econ,
                                  const QuadratureOptions& quad = {});

/// E_m[NR] = E_m[TNR] / E[T_m].
double expected_net_revenue_rate(const BlockchainSpec& spec, const EconSpec& econ,
                                 const QuadratureOptions& quad = {});

/// Ratio estimate of E_m[NR] from simulated histories, with a delta-method
/// standard error.
EstimateWithError estimate_net_revenue_rate(const BlockchainSpec& spec, const EconSpec& econ,
                                            std::size_t n_reps, std::uint64_t seed,
                                            const McOptions& opts = {});

struct AnalyticEngine {
    QuadratureOptions quad;
};

struct MonteCarloEngine {
    std::size_t n_reps = 30000;
    std::uint64_t seed = 0;
    McOptions options;
    // Common random numbers: every m uses the same seed. Otherwise sweep
    // point m uses substream_key(seed, Auxiliary, m) as its seed.
    bool common_random_numbers = true;
};

using Engine = std::variant<AnalyticEngine, MonteCarloEngine>;

struct CurvePoint {
    int m = 0;
    double value = 0.0;
    double std_error = 0.0;  // 0 for the analytic engine
};

struct OptimizationResult {
    int best_m = 0;
    double best_value = 0.0;
    // True when a neighbour of best_m lies within 2 standard errors of the
    // maximum (Monte Carlo engine only).
    bool statistically_tied = false;
    std::vector<CurvePoint> curve;
};

/// Smallest index attaining the maximum value of `curve`.
std::size_t argmax_smallest(const std::vector<CurvePoint>& curve);

/// Evaluates E_m[NR] for every m in [m_lo, m_hi] on `base` (laws kept, quorum
/// replaced) and returns the smallest maximizing m with the full curve.
/// Evaluation failures are rethrown as the same error type prefixed with
/// the offending m.
OptimizationResult optimize_m(const BlockchainSpec& base, const EconSpec& econ, int m_lo, int m_hi,
                              const Engine& engine);

}  // namespace chainrisk

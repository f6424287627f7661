#include "chainrisk/econ.hpp"

#include <cmath>
#include <string>

#include "chainrisk/analytic.hpp"
#include "chainrisk/error.hpp"

namespace chainrisk {
namespace {

struct CycleTerms {
    double p;
    double expected_cycles;  // E[N_1]
    double detect_mean;      // E[Y | Y < Z_m], 0 when p = 1
    double hack_mean;        // E[Z_m | Z_m < Y]
};

CycleTerms cycle_terms(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    CycleTerms t{};
    t.p = hack_detect_prob(spec, quad);
    if (!(t.p > 0.0)) {
        throw ConditioningError("net revenue is undefined over an infinite horizon (p_mk = 0)");
    }
    t.expected_cycles = (1.0 - t.p) / t.p;
    t.detect_mean = t.p < 1.0 ? conditional_detect_mean(spec, quad) : 0.0;
    t.hack_mean = conditional_hack_mean(spec, quad);
    return t;
}

template <class E>
[[noreturn]] void rethrow_at(const E& e, int m) {
    throw E("m = " + std::to_string(m) + ": " + e.what());
}

}  // namespace

double RateExpr::operator()(int m) const {
    if (m < 1) throw DomainError("rate expressions are evaluated at m >= 1");
    return a * std::pow(static_cast<double>(m), b) + c;
}

EconSpec EconSpec::scaled(double factor) const {
    EconSpec s = *this;
    for (RateExpr* r : {&s.revenue, &s.reset_cost, &s.run_cost}) {
        r->a *= factor;
        r->c *= factor;
    }
    return s;
}

double expected_total_net_revenue(const BlockchainSpec& spec, const EconSpec& econ,
                                  const QuadratureOptions& quad) {
    const CycleTerms t = cycle_terms(spec, quad);
    const int m = spec.m();
    const double uptime = t.expected_cycles * t.detect_mean + t.hack_mean;
    return uptime * (econ.revenue(m) - econ.run_cost(m)) -
           t.expected_cycles * spec.reset().mean() * econ.reset_cost(m);
}

double expected_net_revenue_rate(const BlockchainSpec& spec, const EconSpec& econ,
                                 const QuadratureOptions& quad) {
    return expected_total_net_revenue(spec, econ, quad) / mean_functional_time(spec, quad);
}

EstimateWithError estimate_net_revenue_rate(const BlockchainSpec& spec, const EconSpec& econ,
                                            std::size_t n_reps, std::uint64_t seed,
                                            const McOptions& opts) {
    if (n_reps < 2) throw DomainError("at least two replications are required");
    const auto reps = simulate_replications(spec, n_reps, seed, opts);
    const int m = spec.m();
    const double margin = econ.revenue(m) - econ.run_cost(m);
    const double reset_rate = econ.reset_cost(m);
    std::vector<double> revenue(n_reps);
    std::vector<double> time(n_reps);
    for (std::size_t i = 0; i < n_reps; ++i) {
        const auto& r = reps[i];
        revenue[i] = (r.detect_time_total + r.final_hack_time) * margin - reset_rate * r.reset_time_total;
        time[i] = r.functional_time;
    }
    const EstimateWithError rev = summarize(revenue, seed);
    const EstimateWithError t = summarize(time, seed);
    const double ratio = rev.mean / t.mean;
    std::vector<double> linear(n_reps);
    for (std::size_t i = 0; i < n_reps; ++i) linear[i] = (revenue[i] - ratio * time[i]) / t.mean;
    EstimateWithError out = summarize(linear, seed);
    out.mean = ratio;
    return out;
}

std::size_t argmax_smallest(const std::vector<CurvePoint>& curve) {
    if (curve.empty()) throw DomainError("empty curve has no maximum");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].value > curve[best].value) best = i;
    }
    return best;
}

OptimizationResult optimize_m(const BlockchainSpec& base, const EconSpec& econ, int m_lo, int m_hi,
                              const Engine& engine) {
    if (m_lo < 1 || m_hi < m_lo) throw DomainError("m range must be nonempty and start at 1 or above");
    OptimizationResult result;
    for (int m = m_lo; m <= m_hi; ++m) {
        CurvePoint point;
        point.m = m;
        try {
            const BlockchainSpec spec = base.with_quorum(m);
            if (const auto* a = std::get_if<AnalyticEngine>(&engine)) {
                point.value = expected_net_revenue_rate(spec, econ, a->quad);
            } else {
                const auto& mc = std::get<MonteCarloEngine>(engine);
                const std::uint64_t seed =
                    mc.common_random_numbers
                        ? mc.seed
                        : substream_key(mc.seed, StreamId::Auxiliary, static_cast<std::uint64_t>(m));
                const auto est = estimate_net_revenue_rate(spec, econ, mc.n_reps, seed, mc.options);
                point.value = est.mean;
                point.std_error = est.std_error;
            }
        } catch (const ConditioningError& e) {
            rethrow_at(e, m);
        } catch (const RunawayError& e) {
            rethrow_at(e, m);
        } catch (const DomainError& e) {
            rethrow_at(e, m);
        } catch (const NumericalError& e) {
            throw NumericalError("m = " + std::to_string(m) + ": " + e.what(), e.estimate());
        }
        result.curve.push_back(point);
    }
    const std::size_t best = argmax_smallest(result.curve);
    result.best_m = result.curve[best].m;
    result.best_value = result.curve[best].value;
    for (std::size_t nb : {best - 1, best + 1}) {
        if (nb >= result.curve.size()) continue;  // wraps for best == 0
        const double gap = result.best_value - result.curve[nb].value;
        const double se = std::hypot(result.curve[best].std_error, result.curve[nb].std_error);
        if (se > 0.0 && gap <= 2.0 * se) result.statistically_tied = true;
    }
    return result;
}

}  // namespace chainrisk

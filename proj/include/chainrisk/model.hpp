#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "chainrisk/dists.hpp"
#include "chainrisk/quadrature.hpp"

namespace chainrisk {

enum class AttackMode { Destructive, Ransom };

/// Number of nodes a hacker must breach: ⌊n/2⌋+1 for destructive attacks,
/// all n for ransom attacks. Throws DomainError for n < 2.
int quorum_m(int n, AttackMode mode);

/// An n-node blockchain attacked by k independent hackers.
///
/// Each hacker j breaches nodes one after another with iid times drawn from
/// `hackers[j]`; the chain is hacked once some hacker has breached `m`
/// nodes before the monitoring team detects the attack (time Y ~ detect).
/// A detected attack triggers a re-set of duration W ~ reset, after which
/// every hacker starts over.
class BlockchainSpec {
public:
    /// Quorum derived from the node count and attack mode.
    static BlockchainSpec from_nodes(int n, AttackMode mode, std::vector<Distribution> hackers,
                                     Distribution detect, Distribution reset);

    /// Quorum given directly (allows m = 1, which no node count >= 2
    /// produces; used for closed-form checks and sweeps over m).
    static BlockchainSpec from_quorum(int m, std::vector<Distribution> hackers, Distribution detect,
                                      Distribution reset);

    int m() const noexcept { return m_; }
    std::size_t k() const noexcept { return hackers_.size(); }
    std::optional<int> n() const noexcept { return n_; }
    AttackMode mode() const noexcept { return mode_; }
    const std::vector<Distribution>& hackers() const noexcept { return hackers_; }
    const Distribution& detect() const noexcept { return detect_; }
    const Distribution& reset() const noexcept { return reset_; }

    /// Same laws, different quorum (node count dropped).
    BlockchainSpec with_quorum(int m) const;
    /// `count` copies of hacker 0's law.
    BlockchainSpec with_hacker_count(std::size_t count) const;

private:
    BlockchainSpec(int m, std::optional<int> n, AttackMode mode, std::vector<Distribution> hackers,
                   Distribution detect, Distribution reset);

    int m_;
    std::optional<int> n_;
    AttackMode mode_;
    std::vector<Distribution> hackers_;
    Distribution detect_;
    Distribution reset_;
};

/// CDF of the time hacker j (0-based) needs to breach m nodes.
double hacker_sum_cdf(const BlockchainSpec& spec, std::size_t j, double z);
double hacker_sum_sf(const BlockchainSpec& spec, std::size_t j, double z);
double hacker_sum_pdf(const BlockchainSpec& spec, std::size_t j, double z);

/// Z_m, the earliest time any hacker completes a breach of m nodes.
double z_m_cdf(const BlockchainSpec& spec, double z);
/// P(Z_m > z) = Π_j P(S_j > z).
double z_m_sf(const BlockchainSpec& spec, double z);
/// Σ_j f_{S_j}(z) Π_{l≠j} (1 - F_{S_l}(z)).
double z_m_pdf(const BlockchainSpec& spec, double z);

/// Exponent a with f_{Z_m}(z) ~ c·z^{a-1} as z → 0 (m times the smallest
/// hacker shape).
double z_m_origin_exponent(const BlockchainSpec& spec);

/// Upper end of the truncated support used for integrals against the detect
/// law: the point beyond which Y carries less than 1e-12 of its mass.
double detect_support_end(const BlockchainSpec& spec);

/// ∫_0^∞ f for integrands bounded by a multiple of the detect density, with
/// `exponent` the power of a possible singularity at 0. The range ends at
/// detect_support_end; when the result is so small that the detect tail
/// beyond it could exceed 1e-9 of the value, the range is extended to the
/// quantile where it cannot.
template <class F>
double integrate_detect_range(const BlockchainSpec& spec, F&& f, double exponent,
                              const QuadratureOptions& quad = {}) {
    double end = detect_support_end(spec);
    double value = integrate_origin(f, end, exponent, quad);
    const double tail = 1e-9 * std::fabs(value);
    if (tail > 0.0 && tail < spec.detect().sf(end)) {
        end = spec.detect().upper_quantile(std::fmax(tail, 1e-300));
        value = integrate_origin(f, end, exponent, quad);
    }
    return value;
}

/// p_mk = P(Z_m <= Y) = ∫ F_{Z_m}(s) dF_Y(s), the probability a cycle ends
/// in a successful hack. Throws NumericalError if the quadrature fails.
double hack_detect_prob(const BlockchainSpec& spec, const QuadratureOptions& quad = {});

/// Transition matrix of the embedded chain over {functional, hacked,
/// re-setting} (indices 0, 1, 2).
struct TransitionMatrix {
    std::array<std::array<double, 3>, 3> rows{};

    TransitionMatrix operator*(const TransitionMatrix& other) const;
};

TransitionMatrix transition_matrix(double p);

/// lim_{t→∞} P_mk(t): 0 whenever p_mk > 0, 1 in the degenerate p_mk = 0 case.
double limiting_functional_prob(double p);
double limiting_functional_prob(const BlockchainSpec& spec);

}  // namespace chainrisk

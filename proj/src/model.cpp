#include "chainrisk/model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "chainrisk/error.hpp"
#include "chainrisk/special.hpp"

namespace chainrisk {
namespace {

struct GammaParams {
    double shape;
    double rate;
};

// Law of the sum of m iid hacking times: Gamma(m·shape, rate).
GammaParams hacker_sum_law(const Distribution& d, int m) {
    if (const auto* e = std::get_if<Exponential>(&d.law())) {
        return {static_cast<double>(m), e->rate};
    }
    if (const auto* g = std::get_if<Gamma>(&d.law())) {
        return {m * g->shape, g->rate};
    }
    throw UnsupportedFamilyError("hacking-time law " + d.describe() +
                                 " is not closed under convolution (use exponential or gamma)");
}

void check_hacker_laws(const std::vector<Distribution>& hackers) {
    if (hackers.empty()) throw DomainError("at least one hacker is required");
    for (const auto& h : hackers) {
        (void)hacker_sum_law(h, 1);
    }
}

const Distribution& hacker_at(const BlockchainSpec& spec, std::size_t j) {
    if (j >= spec.k()) {
        std::ostringstream msg;
        msg << "hacker index " << j << " out of range (k = " << spec.k() << ")";
        throw DomainError(msg.str());
    }
    return spec.hackers()[j];
}

void check_time(double z) {
    if (!std::isfinite(z) || z < 0.0) throw DomainError("time must be finite and nonnegative");
}

}  // namespace

int quorum_m(int n, AttackMode mode) {
    if (n < 2) throw DomainError("a blockchain needs at least two nodes, got n = " + std::to_string(n));
    return mode == AttackMode::Destructive ? n / 2 + 1 : n;
}

BlockchainSpec::BlockchainSpec(int m, std::optional<int> n, AttackMode mode,
                               std::vector<Distribution> hackers, Distribution detect,
                               Distribution reset)
    : m_(m),
      n_(n),
      mode_(mode),
      hackers_(std::move(hackers)),
      detect_(std::move(detect)),
      reset_(std::move(reset)) {
    if (m_ < 1) throw DomainError("quorum m must be at least 1, got " + std::to_string(m_));
    if (n_ && m_ > *n_) throw DomainError("quorum m exceeds node count n");
    check_hacker_laws(hackers_);
}

BlockchainSpec BlockchainSpec::from_nodes(int n, AttackMode mode, std::vector<Distribution> hackers,
                                          Distribution detect, Distribution reset) {
    return BlockchainSpec(quorum_m(n, mode), n, mode, std::move(hackers), std::move(detect),
                          std::move(reset));
}

BlockchainSpec BlockchainSpec::from_quorum(int m, std::vector<Distribution> hackers,
                                           Distribution detect, Distribution reset) {
    return BlockchainSpec(m, std::nullopt, AttackMode::Destructive, std::move(hackers),
                          std::move(detect), std::move(reset));
}

BlockchainSpec BlockchainSpec::with_quorum(int m) const {
    return BlockchainSpec(m, std::nullopt, mode_, hackers_, detect_, reset_);
}

BlockchainSpec BlockchainSpec::with_hacker_count(std::size_t count) const {
    return BlockchainSpec(m_, n_, mode_, std::vector<Distribution>(count, hackers_.front()), detect_,
                          reset_);
}

double hacker_sum_cdf(const BlockchainSpec& spec, std::size_t j, double z) {
    check_time(z);
    const auto law = hacker_sum_law(hacker_at(spec, j), spec.m());
    return regularized_lower_gamma(law.shape, law.rate * z);
}

double hacker_sum_sf(const BlockchainSpec& spec, std::size_t j, double z) {
    check_time(z);
    const auto law = hacker_sum_law(hacker_at(spec, j), spec.m());
    return regularized_upper_gamma(law.shape, law.rate * z);
}

double hacker_sum_pdf(const BlockchainSpec& spec, std::size_t j, double z) {
    check_time(z);
    const auto law = hacker_sum_law(hacker_at(spec, j), spec.m());
    return Distribution::gamma(law.shape, law.rate).pdf(z);
}

double z_m_cdf(const BlockchainSpec& spec, double z) {
    check_time(z);
    // 1 - Π(1 - F_j), evaluated as -expm1(Σ log1p(-F_j)) while every F_j is
    // small so that tiny probabilities keep their relative precision.
    double log_survival = 0.0;
    bool small = true;
    for (std::size_t j = 0; j < spec.k() && small; ++j) {
        const double f = hacker_sum_cdf(spec, j, z);
        if (f >= 0.5) {
            small = false;
        } else {
            log_survival += std::log1p(-f);
        }
    }
    if (small) return -std::expm1(log_survival);
    return 1.0 - z_m_sf(spec, z);
}

double z_m_sf(const BlockchainSpec& spec, double z) {
    double prod = 1.0;
    for (std::size_t j = 0; j < spec.k(); ++j) {
        prod *= hacker_sum_sf(spec, j, z);
    }
    return prod;
}

double z_m_pdf(const BlockchainSpec& spec, double z) {
    check_time(z);
    const std::size_t k = spec.k();
    std::vector<double> sf(k);
    std::vector<double> pdf(k);
    for (std::size_t j = 0; j < k; ++j) {
        sf[j] = hacker_sum_sf(spec, j, z);
        pdf[j] = hacker_sum_pdf(spec, j, z);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double term = pdf[j];
        for (std::size_t l = 0; l < k; ++l) {
            if (l != j) term *= sf[l];
        }
        total += term;
    }
    return total;
}

double z_m_origin_exponent(const BlockchainSpec& spec) {
    double smallest = INFINITY;
    for (const auto& h : spec.hackers()) smallest = std::fmin(smallest, h.origin_exponent());
    return smallest * spec.m();
}

double detect_support_end(const BlockchainSpec& spec) {
    return spec.detect().upper_quantile(1e-12);
}

double hack_detect_prob(const BlockchainSpec& spec, const QuadratureOptions& quad) {
    const Distribution& detect = spec.detect();
    const double p = integrate_detect_range(
        spec, [&](double s) { return z_m_cdf(spec, s) * detect.pdf(s); }, detect.origin_exponent(),
        quad);
    return std::fmin(1.0, std::fmax(0.0, p));
}

TransitionMatrix TransitionMatrix::operator*(const TransitionMatrix& other) const {
    TransitionMatrix out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int l = 0; l < 3; ++l) acc += rows[i][l] * other.rows[l][j];
            out.rows[i][j] = acc;
        }
    }
    return out;
}

TransitionMatrix transition_matrix(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("hack probability must lie in [0, 1]");
    }
    TransitionMatrix t;
    t.rows[0] = {0.0, p, 1.0 - p};
    t.rows[1] = {0.0, 1.0, 0.0};
    t.rows[2] = {1.0, 0.0, 0.0};
    return t;
}

double limiting_functional_prob(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("hack probability must lie in [0, 1]");
    }
    // P(∞) = (1 - p) P(∞) has the unique solution 0 unless p = 0.
    return p > 0.0 ? 0.0 : 1.0;
}

double limiting_functional_prob(const BlockchainSpec&) {
    // Every supported hacking and detect law has a positive density on
    // (0, ∞), so p_mk > 0 even when it underflows numerically.
    return 0.0;
}

}  // namespace chainrisk

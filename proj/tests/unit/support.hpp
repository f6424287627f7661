#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "chainrisk/model.hpp"
#include "chainrisk/rng.hpp"

namespace testing {

using chainrisk::BlockchainSpec;
using chainrisk::Distribution;

inline Distribution exp1() { return Distribution::exponential(1.0); }

/// Exp(1) hacking, detect and reset; quorum m, k hackers.
inline BlockchainSpec canonical(int m = 1, std::size_t k = 1) {
    return BlockchainSpec::from_quorum(m, std::vector<Distribution>(k, exp1()), exp1(), exp1());
}

inline bool close_rel(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

/// Tiny deterministic generator for property tests (not the production RNG).
class PropertyRng {
public:
    explicit PropertyRng(std::uint64_t seed) : state_(seed) {}
    double uniform(double lo, double hi) {
        state_ = chainrisk::splitmix64(state_);
        const double u = static_cast<double>(state_ >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int integer(int lo, int hi) {
        return lo + static_cast<int>(uniform(0.0, 1.0) * (hi - lo + 1)) % (hi - lo + 1);
    }

private:
    std::uint64_t state_;
};

/// One-sample Kolmogorov-Smirnov statistic of `sample` against `cdf`.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// 99% critical value of the KS statistic, asymptotic form.
inline double ks_critical_99(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace testing

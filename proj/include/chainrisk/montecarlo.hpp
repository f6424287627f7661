#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chainrisk/model.hpp"
#include "chainrisk/rng.hpp"

namespace chainrisk {

/// One attack cycle. Draw order from the source: hacker 0's m breach
/// times, hacker 1's m breach times, ..., then Y, then W.
struct CycleDraw {
    double y = 0.0;  // detect time
    double w = 0.0;  // re-set time (drawn always, used only when not hacked)
    double z = 0.0;  // Z_m
    bool hacked = false;  // z < y
};

CycleDraw draw_cycle(const BlockchainSpec& spec, UniformSource& u);

/// One simulated history up to the first successful hack.
struct ReplicationOutcome {
    std::uint64_t cycles = 0;        // N_1, detected-and-reset cycles
    double functional_time = 0.0;    // T_m
    double final_hack_time = 0.0;    // terminal Z_m draw
    double detect_time_total = 0.0;  // Σ y over the N_1 detected cycles
    double reset_time_total = 0.0;   // Σ w over the N_1 detected cycles
};

inline constexpr std::uint64_t kDefaultCycleCap = 10'000'000;

/// Runs cycles until one is hacked. If `reset_epochs` is given, the time at
/// which each completed re-set ends is appended to it.
ReplicationOutcome simulate_functional_time(const BlockchainSpec& spec, UniformSource& u,
                                            std::uint64_t cycle_cap = kDefaultCycleCap,
                                            std::vector<double>* reset_epochs = nullptr);

struct EstimateWithError {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

/// Mean and standard error of `values`, reduced in index order.
EstimateWithError summarize(std::span<const double> values, std::uint64_t seed);

struct McOptions {
    std::uint64_t cycle_cap = kDefaultCycleCap;
    // Worker threads; 0 means std::thread::hardware_concurrency(). Results
    // do not depend on this value.
    unsigned threads = 1;
};

/// Replication i always uses substream (seed, Replication, i).
std::vector<ReplicationOutcome> simulate_replications(const BlockchainSpec& spec, std::size_t n_reps,
                                                      std::uint64_t seed, const McOptions& opts = {});

EstimateWithError estimate_mean_functional_time(const BlockchainSpec& spec, std::size_t n_reps,
                                                std::uint64_t seed, const McOptions& opts = {});

/// Fraction of replications whose hack time exceeds each t. `t_grid` must be
/// ascending; every grid point is answered from the same trajectories.
std::vector<EstimateWithError> estimate_survival_curve(const BlockchainSpec& spec,
                                                       std::span<const double> t_grid,
                                                       std::size_t n_reps, std::uint64_t seed,
                                                       const McOptions& opts = {});

/// Fraction of independent single cycles that end in a hack.
EstimateWithError estimate_cycle_hack_prob(const BlockchainSpec& spec, std::size_t n_reps,
                                           std::uint64_t seed, const McOptions& opts = {});

/// Mean number of re-sets completed by each t (before the hack).
std::vector<EstimateWithError> estimate_renewal_count(const BlockchainSpec& spec,
                                                      std::span<const double> t_grid,
                                                      std::size_t n_reps, std::uint64_t seed,
                                                      const McOptions& opts = {});

/// Monte Carlo versions of the conditional cycle means, from independent
/// single cycles: E[Y | Y < Z_m] over detected cycles and E[Z_m | Z_m < Y]
/// over hacked cycles.
struct ConditionalMeans {
    EstimateWithError detect_given_detected;
    EstimateWithError hack_given_hacked;
};

ConditionalMeans estimate_conditional_means(const BlockchainSpec& spec, std::size_t n_cycles,
                                            std::uint64_t seed, const McOptions& opts = {});

/// State of the first cycle at time t: still functional (t < min(Y, Z_m))
/// or re-setting (Y <= t < Y + W with Y < Z_m).
struct FirstCycleState {
    EstimateWithError functional;
    EstimateWithError resetting;
};

std::vector<FirstCycleState> estimate_first_cycle_state(const BlockchainSpec& spec,
                                                        std::span<const double> t_grid,
                                                        std::size_t n_cycles, std::uint64_t seed,
                                                        const McOptions& opts = {});

/// Wald decomposition of the pre-hack reset time: the replication mean of
/// Σ(Y_i + W_i) against E[N_1]·(E[Y_1] + E[W]), with the two factors of the
/// right side estimated from independent streams.
struct WaldDecomposition {
    EstimateWithError cycle_time_total;  // mean of Σ(Y_i + W_i)
    EstimateWithError cycles;            // mean of N_1
    EstimateWithError detect_given_detected;
    EstimateWithError reset_mean;
    double predicted = 0.0;         // cycles.mean · (detect + reset)
    double combined_std_error = 0.0;
    double z_score = 0.0;
};

WaldDecomposition wald_decomposition(const BlockchainSpec& spec, std::size_t n_reps,
                                     std::uint64_t seed, const McOptions& opts = {});

}  // namespace chainrisk

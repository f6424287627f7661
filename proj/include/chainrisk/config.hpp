#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainrisk/analytic.hpp"
#include "chainrisk/dists.hpp"
#include "chainrisk/econ.hpp"
#include "chainrisk/model.hpp"
#include "chainrisk/montecarlo.hpp"

namespace chainrisk {

struct EngineConfig {
    std::size_t reps = 30000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::uint64_t cycle_cap = kDefaultCycleCap;
    bool common_random_numbers = true;
    QuadratureOptions quad;
    GridOptions grid;
};

struct SweepConfig {
    int m_lo = 1;
    int m_hi = 12;
    int k_lo = 1;
    int k_hi = 6;
    std::vector<double> t_grid;  // defaults to 0, 0.5, ..., 10
};

/// A validated experiment description. Exactly one of `n` / `m` is set.
struct RunConfig {
    std::optional<int> n;
    std::optional<int> m;
    AttackMode mode = AttackMode::Destructive;
    std::vector<Distribution> hackers;
    std::optional<Distribution> detect;
    std::optional<Distribution> reset;
    EngineConfig engine;
    std::optional<EconSpec> econ;
    SweepConfig sweep;

    std::string source_text;
    std::uint64_t source_hash = 0;  // FNV-1a 64 of source_text

    BlockchainSpec spec() const;
    McOptions mc_options() const;
};

/// Parses the sectioned key = value format:
///
///     # comment
///     [model]
///     n = 5                      # or: m = 3
///     mode = destructive         # or ransom
///     hacker = exponential rate=1   # repeat for each hacker
///     hackers = 5                # optional: replicate a single hacker line
///     detect = gamma shape=2 rate=1
///     reset = weibull scale=1 shape=2
///     [engine]
///     reps = 30000
///     seed = 0
///     threads = 1
///     tol = 1e-9
///     cells = 4096
///     step = 0                   # 0: horizon / cells
///     horizon = 0                # 0: automatic
///     cycle_cap = 10000000
///     crn = true
///     [econ]
///     revenue = 0.2, 1, 0        # a, b, c in a·m^b + c
///     reset_cost = 2, 0.2, 0
///     run_cost = 2, 0.3, 0
///     [sweep]
///     m = 1..12
///     k = 1..6
///     t = 0:10:0.5               # start:stop:step, or a comma list
///
/// Throws ParseError carrying the offending line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Reads "exponential rate=1", "gamma shape=2 rate=1", "weibull scale=1 shape=2"
/// (parentheses and commas are accepted as separators).
Distribution parse_distribution(std::string_view text);

std::string attack_mode_name(AttackMode mode);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace chainrisk

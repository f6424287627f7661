#include "chainrisk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chainrisk/error.hpp"
#include "parallel.hpp"

namespace chainrisk {
namespace {

void require_reps(std::size_t n) {
    if (n < 2) throw DomainError("at least two replications are required");
}

void require_ascending(std::span<const double> t_grid) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) {
            throw DomainError("time grid values must be finite and nonnegative");
        }
        if (i > 0 && t_grid[i] < t_grid[i - 1]) throw DomainError("time grid must be ascending");
    }
}

EstimateWithError summarize_indicator(std::size_t hits, std::size_t n, std::uint64_t seed) {
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    // sample variance of a 0/1 vector with the n-1 denominator
    const double var = n > 1 ? p * (1.0 - p) * nn / (nn - 1.0) : 0.0;
    return {p, std::sqrt(var / nn), n, seed};
}

}  // namespace

CycleDraw draw_cycle(const BlockchainSpec& spec, UniformSource& u) {
    CycleDraw draw;
    draw.z = std::numeric_limits<double>::infinity();
    for (const auto& hacker : spec.hackers()) {
        double total = 0.0;
        for (int i = 0; i < spec.m(); ++i) total += hacker.sample(u);
        draw.z = std::min(draw.z, total);
    }
    draw.y = spec.detect().sample(u);
    draw.w = spec.reset().sample(u);
    draw.hacked = draw.z < draw.y;
    return draw;
}

ReplicationOutcome simulate_functional_time(const BlockchainSpec& spec, UniformSource& u,
                                            std::uint64_t cycle_cap,
                                            std::vector<double>* reset_epochs) {
    ReplicationOutcome out;
    double clock = 0.0;
    for (;;) {
        const CycleDraw c = draw_cycle(spec, u);
        if (c.hacked) {
            out.final_hack_time = c.z;
            out.functional_time = clock + c.z;
            return out;
        }
        if (out.cycles >= cycle_cap) {
            std::ostringstream msg;
            msg << "no hack after " << cycle_cap << " cycles (m = " << spec.m()
                << ", k = " << spec.k() << "); p_mk is too small to simulate";
            throw RunawayError(msg.str());
        }
        ++out.cycles;
        out.detect_time_total += c.y;
        out.reset_time_total += c.w;
        clock += c.y + c.w;
        if (reset_epochs) reset_epochs->push_back(clock);
    }
}

EstimateWithError summarize(std::span<const double> values, std::uint64_t seed) {
    EstimateWithError e;
    e.n = values.size();
    e.seed = seed;
    if (values.empty()) return e;
    double sum = 0.0;
    for (double v : values) sum += v;
    e.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - e.mean) * (v - e.mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        e.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return e;
}

std::vector<ReplicationOutcome> simulate_replications(const BlockchainSpec& spec, std::size_t n_reps,
                                                      std::uint64_t seed, const McOptions& opts) {
    std::vector<ReplicationOutcome> out(n_reps);
    detail::parallel_for(n_reps, opts.threads, [&](std::size_t i) {
        EngineSource stream = make_substream(seed, StreamId::Replication, i);
        out[i] = simulate_functional_time(spec, stream, opts.cycle_cap);
    });
    return out;
}

EstimateWithError estimate_mean_functional_time(const BlockchainSpec& spec, std::size_t n_reps,
                                                std::uint64_t seed, const McOptions& opts) {
    require_reps(n_reps);
    const auto reps = simulate_replications(spec, n_reps, seed, opts);
    std::vector<double> times(n_reps);
    std::transform(reps.begin(), reps.end(), times.begin(),
                   [](const ReplicationOutcome& r) { return r.functional_time; });
    return summarize(times, seed);
}

std::vector<EstimateWithError> estimate_survival_curve(const BlockchainSpec& spec,
                                                       std::span<const double> t_grid,
                                                       std::size_t n_reps, std::uint64_t seed,
                                                       const McOptions& opts) {
    require_reps(n_reps);
    require_ascending(t_grid);
    const auto reps = simulate_replications(spec, n_reps, seed, opts);
    std::vector<double> hack_times(n_reps);
    std::transform(reps.begin(), reps.end(), hack_times.begin(),
                   [](const ReplicationOutcome& r) { return r.functional_time; });
    std::sort(hack_times.begin(), hack_times.end());
    std::vector<EstimateWithError> curve;
    curve.reserve(t_grid.size());
    for (double t : t_grid) {
        const auto first_above = std::upper_bound(hack_times.begin(), hack_times.end(), t);
        const auto surviving = static_cast<std::size_t>(hack_times.end() - first_above);
        curve.push_back(summarize_indicator(surviving, n_reps, seed));
    }
    return curve;
}

EstimateWithError estimate_cycle_hack_prob(const BlockchainSpec& spec, std::size_t n_reps,
                                           std::uint64_t seed, const McOptions& opts) {
    require_reps(n_reps);
    std::vector<unsigned char> hacked(n_reps);
    detail::parallel_for(n_reps, opts.threads, [&](std::size_t i) {
        EngineSource stream = make_substream(seed, StreamId::Cycle, i);
        hacked[i] = draw_cycle(spec, stream).hacked ? 1 : 0;
    });
    std::size_t hits = 0;
    for (auto h : hacked) hits += h;
    return summarize_indicator(hits, n_reps, seed);
}

std::vector<EstimateWithError> estimate_renewal_count(const BlockchainSpec& spec,
                                                      std::span<const double> t_grid,
                                                      std::size_t n_reps, std::uint64_t seed,
                                                      const McOptions& opts) {
    require_reps(n_reps);
    require_ascending(t_grid);
    // counts[i * grid + g] = completed re-sets of replication i by t_grid[g]
    const std::size_t grid = t_grid.size();
    std::vector<double> counts(n_reps * grid);
    detail::parallel_for(n_reps, opts.threads, [&](std::size_t i) {
        EngineSource stream = make_substream(seed, StreamId::Replication, i);
        std::vector<double> epochs;
        simulate_functional_time(spec, stream, opts.cycle_cap, &epochs);
        for (std::size_t g = 0; g < grid; ++g) {
            const auto done = std::upper_bound(epochs.begin(), epochs.end(), t_grid[g]) - epochs.begin();
            counts[i * grid + g] = static_cast<double>(done);
        }
    });
    std::vector<EstimateWithError> out;
    out.reserve(grid);
    std::vector<double> column(n_reps);
    for (std::size_t g = 0; g < grid; ++g) {
        for (std::size_t i = 0; i < n_reps; ++i) column[i] = counts[i * grid + g];
        out.push_back(summarize(column, seed));
    }
    return out;
}

ConditionalMeans estimate_conditional_means(const BlockchainSpec& spec, std::size_t n_cycles,
                                            std::uint64_t seed, const McOptions& opts) {
    require_reps(n_cycles);
    std::vector<CycleDraw> draws(n_cycles);
    detail::parallel_for(n_cycles, opts.threads, [&](std::size_t i) {
        EngineSource stream = make_substream(seed, StreamId::Auxiliary, i);
        draws[i] = draw_cycle(spec, stream);
    });
    std::vector<double> detected;
    std::vector<double> hacked;
    for (const auto& d : draws) {
        if (d.hacked) {
            hacked.push_back(d.z);
        } else {
            detected.push_back(d.y);
        }
    }
    return {summarize(detected, seed), summarize(hacked, seed)};
}

std::vector<FirstCycleState> estimate_first_cycle_state(const BlockchainSpec& spec,
                                                        std::span<const double> t_grid,
                                                        std::size_t n_cycles, std::uint64_t seed,
                                                        const McOptions& opts) {
    require_reps(n_cycles);
    require_ascending(t_grid);
    std::vector<CycleDraw> draws(n_cycles);
    detail::parallel_for(n_cycles, opts.threads, [&](std::size_t i) {
        EngineSource stream = make_substream(seed, StreamId::Auxiliary, i);
        draws[i] = draw_cycle(spec, stream);
    });
    std::vector<FirstCycleState> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        std::size_t functional = 0;
        std::size_t resetting = 0;
        for (const auto& d : draws) {
            if (t < std::min(d.y, d.z)) ++functional;
            if (!d.hacked && d.y <= t && t < d.y + d.w) ++resetting;
        }
        out.push_back({summarize_indicator(functional, n_cycles, seed),
                       summarize_indicator(resetting, n_cycles, seed)});
    }
    return out;
}

WaldDecomposition wald_decomposition(const BlockchainSpec& spec, std::size_t n_reps,
                                     std::uint64_t seed, const McOptions& opts) {
    require_reps(n_reps);
    const auto reps = simulate_replications(spec, n_reps, seed, opts);
    std::vector<double> totals(n_reps);
    std::vector<double> cycles(n_reps);
    for (std::size_t i = 0; i < n_reps; ++i) {
        totals[i] = reps[i].detect_time_total + reps[i].reset_time_total;
        cycles[i] = static_cast<double>(reps[i].cycles);
    }

    std::vector<CycleDraw> draws(n_reps);
    detail::parallel_for(n_reps, opts.threads, [&](std::size_t i) {
        EngineSource stream = make_substream(seed, StreamId::Auxiliary, i);
        draws[i] = draw_cycle(spec, stream);
    });
    std::vector<double> detect;
    std::vector<double> reset;
    for (const auto& d : draws) {
        if (!d.hacked) {
            detect.push_back(d.y);
            reset.push_back(d.w);
        }
    }

    WaldDecomposition out;
    out.cycle_time_total = summarize(totals, seed);
    out.cycles = summarize(cycles, seed);
    out.detect_given_detected = summarize(detect, seed);
    out.reset_mean = summarize(reset, seed);
    const double per_cycle = out.detect_given_detected.mean + out.reset_mean.mean;
    out.predicted = out.cycles.mean * per_cycle;
    // S_r - N_r·c has mean zero under Wald's identity; with c estimated from
    // an independent stream the two error sources add in quadrature.
    std::vector<double> residual(n_reps);
    for (std::size_t i = 0; i < n_reps; ++i) residual[i] = totals[i] - cycles[i] * per_cycle;
    const EstimateWithError resid = summarize(residual, seed);
    const double se_cycle2 = out.detect_given_detected.std_error * out.detect_given_detected.std_error +
                             out.reset_mean.std_error * out.reset_mean.std_error;
    out.combined_std_error =
        std::sqrt(resid.std_error * resid.std_error + out.cycles.mean * out.cycles.mean * se_cycle2);
    out.z_score = out.combined_std_error > 0.0
                      ? (out.cycle_time_total.mean - out.predicted) / out.combined_std_error
                      : 0.0;
    return out;
}

}  // namespace chainrisk

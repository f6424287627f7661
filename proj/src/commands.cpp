#include "chainrisk/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "chainrisk/analytic.hpp"
#include "chainrisk/error.hpp"
#include "chainrisk/montecarlo.hpp"

namespace chainrisk {
namespace {

bool wants_analytic(EngineChoice e) { return e != EngineChoice::MonteCarlo; }
bool wants_mc(EngineChoice e) { return e != EngineChoice::Analytic; }

// Runs `fn`, re-raising library errors as the same type with `label`
// prepended so that a failing sweep point is identifiable.
template <class Fn>
auto at_point(const std::string& label, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        throw NumericalError(label + ": " + e.what(), e.estimate());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(label + ": " + e.what(), e.terms_used());
    } catch (const ConditioningError& e) {
        throw ConditioningError(label + ": " + e.what());
    } catch (const RunawayError& e) {
        throw RunawayError(label + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(label + ": " + e.what());
    }
}

std::uint64_t point_seed(const RunConfig& cfg, std::uint64_t point) {
    return cfg.engine.common_random_numbers
               ? cfg.engine.seed
               : substream_key(cfg.engine.seed, StreamId::Auxiliary, point);
}

std::vector<std::string> header_for(std::string key, EngineChoice engine, const std::string& analytic,
                                    const std::string& mc) {
    std::vector<std::string> h{std::move(key)};
    if (wants_analytic(engine)) h.push_back(analytic);
    if (wants_mc(engine)) {
        h.push_back(mc);
        h.push_back("mc_stderr");
    }
    return h;
}

// One row per spec: key column, then the selected engines' E[T] or p.
enum class Quantity { HackProb, MeanTime };

std::vector<std::string> quantity_row(const RunConfig& cfg, const BlockchainSpec& spec,
                                      EngineChoice engine, Quantity q, std::uint64_t seed) {
    std::vector<std::string> row;
    if (wants_analytic(engine)) {
        row.push_back(format_number(q == Quantity::HackProb ? hack_detect_prob(spec, cfg.engine.quad)
                                                            : mean_functional_time(spec, cfg.engine.quad)));
    }
    if (wants_mc(engine)) {
        const auto est = q == Quantity::HackProb
                             ? estimate_cycle_hack_prob(spec, cfg.engine.reps, seed, cfg.mc_options())
                             : estimate_mean_functional_time(spec, cfg.engine.reps, seed, cfg.mc_options());
        row.push_back(format_number(est.mean));
        row.push_back(format_number(est.std_error));
    }
    return row;
}

CommandResult single_point(const RunConfig& cfg, EngineChoice engine, Quantity q) {
    const BlockchainSpec spec = cfg.spec();
    CommandResult r;
    const std::string a = q == Quantity::HackProb ? "analytic_p" : "analytic_ET";
    const std::string m = q == Quantity::HackProb ? "mc_p" : "mc_ET";
    r.table.header = header_for("m", engine, a, m);
    r.table.header.insert(r.table.header.begin() + 1, "k");
    std::vector<std::string> row{std::to_string(spec.m()), std::to_string(spec.k())};
    const auto values = at_point("m = " + std::to_string(spec.m()), [&] {
        return quantity_row(cfg, spec, engine, q, cfg.engine.seed);
    });
    row.insert(row.end(), values.begin(), values.end());
    r.table.rows.push_back(std::move(row));
    return r;
}

}  // namespace

std::optional<EngineChoice> parse_engine_choice(std::string_view text) {
    if (text == "mc") return EngineChoice::MonteCarlo;
    if (text == "analytic") return EngineChoice::Analytic;
    if (text == "both") return EngineChoice::Both;
    return std::nullopt;
}

std::string engine_choice_name(EngineChoice e) {
    switch (e) {
        case EngineChoice::MonteCarlo: return "mc";
        case EngineChoice::Analytic: return "analytic";
        case EngineChoice::Both: return "both";
    }
    return "both";
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.seed) cfg.engine.seed = *o.seed;
    if (o.reps) {
        if (*o.reps < 2) throw ParseError("--reps must be at least 2", 0);
        cfg.engine.reps = *o.reps;
    }
    if (o.threads) cfg.engine.threads = *o.threads;
    if (o.no_crn) cfg.engine.common_random_numbers = false;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"p-mk",    "mean-time", "prob-curve", "sweep-m",
                                                   "sweep-k", "optimize",  "validate"};
    return names;
}

CommandResult cmd_p_mk(const RunConfig& cfg, EngineChoice engine) {
    return single_point(cfg, engine, Quantity::HackProb);
}

CommandResult cmd_mean_time(const RunConfig& cfg, EngineChoice engine) {
    return single_point(cfg, engine, Quantity::MeanTime);
}

CommandResult cmd_prob_curve(const RunConfig& cfg, EngineChoice engine) {
    const BlockchainSpec spec = cfg.spec();
    const auto& t = cfg.sweep.t_grid;
    CommandResult r;
    r.table.header = header_for("t", engine, "analytic_P", "mc_P");
    std::vector<double> analytic;
    std::vector<EstimateWithError> mc;
    if (wants_analytic(engine)) {
        analytic = at_point("prob-curve", [&] {
            return instantaneous_prob(spec, t, cfg.engine.grid, cfg.engine.quad);
        });
    }
    if (wants_mc(engine)) {
        mc = at_point("prob-curve", [&] {
            return estimate_survival_curve(spec, t, cfg.engine.reps, cfg.engine.seed, cfg.mc_options());
        });
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<std::string> row{format_number(t[i])};
        if (wants_analytic(engine)) row.push_back(format_number(analytic[i]));
        if (wants_mc(engine)) {
            row.push_back(format_number(mc[i].mean));
            row.push_back(format_number(mc[i].std_error));
        }
        r.table.rows.push_back(std::move(row));
    }
    return r;
}

CommandResult cmd_sweep_m(const RunConfig& cfg, EngineChoice engine) {
    const BlockchainSpec base = cfg.spec();
    CommandResult r;
    r.table.header = header_for("m", engine, "analytic_ET", "mc_ET");
    for (int m = cfg.sweep.m_lo; m <= cfg.sweep.m_hi; ++m) {
        const auto values = at_point("m = " + std::to_string(m), [&] {
            return quantity_row(cfg, base.with_quorum(m), engine, Quantity::MeanTime,
                                point_seed(cfg, static_cast<std::uint64_t>(m)));
        });
        std::vector<std::string> row{std::to_string(m)};
        row.insert(row.end(), values.begin(), values.end());
        r.table.rows.push_back(std::move(row));
    }
    return r;
}

CommandResult cmd_sweep_k(const RunConfig& cfg, EngineChoice engine) {
    const BlockchainSpec base = cfg.spec();
    CommandResult r;
    r.table.header = header_for("k", engine, "analytic_ET", "mc_ET");
    for (int k = cfg.sweep.k_lo; k <= cfg.sweep.k_hi; ++k) {
        const auto values = at_point("k = " + std::to_string(k), [&] {
            return quantity_row(cfg, base.with_hacker_count(static_cast<std::size_t>(k)), engine,
                                Quantity::MeanTime, point_seed(cfg, static_cast<std::uint64_t>(k)));
        });
        std::vector<std::string> row{std::to_string(k)};
        row.insert(row.end(), values.begin(), values.end());
        r.table.rows.push_back(std::move(row));
    }
    return r;
}

CommandResult cmd_optimize(const RunConfig& cfg, EngineChoice engine) {
    if (!cfg.econ) throw ParseError("optimize needs an [econ] section", 0);
    const BlockchainSpec base = cfg.spec();
    const int lo = cfg.sweep.m_lo;
    const int hi = cfg.sweep.m_hi;

    MonteCarloEngine mc_engine;
    mc_engine.n_reps = cfg.engine.reps;
    mc_engine.seed = cfg.engine.seed;
    mc_engine.options = cfg.mc_options();
    mc_engine.common_random_numbers = cfg.engine.common_random_numbers;

    std::optional<OptimizationResult> analytic;
    std::optional<OptimizationResult> mc;
    if (wants_analytic(engine)) analytic = optimize_m(base, *cfg.econ, lo, hi, AnalyticEngine{cfg.engine.quad});
    if (wants_mc(engine)) mc = optimize_m(base, *cfg.econ, lo, hi, mc_engine);

    CommandResult r;
    if (engine == EngineChoice::Both) {
        r.table.header = {"m", "analytic_ENR", "mc_ENR", "mc_stderr", "flag"};
    } else if (engine == EngineChoice::Analytic) {
        r.table.header = {"m", "ENR", "flag"};
    } else {
        r.table.header = {"m", "ENR", "stderr", "flag"};
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(hi - lo + 1); ++i) {
        const int m = lo + static_cast<int>(i);
        std::vector<std::string> row{std::to_string(m)};
        std::vector<std::string> flags;
        if (analytic) {
            row.push_back(format_number(analytic->curve[i].value));
            if (m == analytic->best_m) flags.push_back(engine == EngineChoice::Both ? "analytic_best" : "best");
        }
        if (mc) {
            row.push_back(format_number(mc->curve[i].value));
            row.push_back(format_number(mc->curve[i].std_error));
            if (m == mc->best_m) {
                flags.push_back(engine == EngineChoice::Both ? "mc_best" : "best");
                if (mc->statistically_tied) flags.push_back("tied");
            }
        }
        std::string flag;
        for (const auto& f : flags) flag += (flag.empty() ? "" : ";") + f;
        row.push_back(flag);
        r.table.rows.push_back(std::move(row));
    }
    return r;
}

ValidationRow make_validation_row(std::string quantity, double analytic, double mc, double std_error,
                                  double se_floor) {
    ValidationRow row;
    row.quantity = std::move(quantity);
    row.analytic = analytic;
    row.mc = mc;
    row.std_error = std_error;
    const double se = std::max(std_error, se_floor);
    const double diff = mc - analytic;
    if (se > 0.0) {
        row.z_score = diff / se;
    } else {
        row.z_score = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    }
    row.pass = std::isfinite(analytic) && std::isfinite(mc) && std::abs(row.z_score) <= kValidateZLimit;
    return row;
}

CsvTable validation_table(const std::vector<ValidationRow>& rows) {
    CsvTable t;
    t.header = {"quantity", "analytic", "mc", "stderr", "z_score", "pass"};
    for (const auto& r : rows) {
        t.rows.push_back({r.quantity, format_number(r.analytic), format_number(r.mc),
                          format_number(r.std_error), format_number(r.z_score),
                          r.pass ? "true" : "false"});
    }
    return t;
}

CommandResult cmd_validate(const RunConfig& cfg, EngineChoice /*engine*/) {
    const BlockchainSpec spec = cfg.spec();
    const std::size_t n = cfg.engine.reps;
    const std::uint64_t seed = cfg.engine.seed;
    const McOptions opts = cfg.mc_options();
    const double proportion_floor = 1.0 / static_cast<double>(n);
    std::vector<ValidationRow> rows;

    const double p = at_point("p_mk", [&] { return hack_detect_prob(spec, cfg.engine.quad); });
    const auto p_mc = estimate_cycle_hack_prob(spec, n, seed, opts);
    rows.push_back(make_validation_row("p_mk", p, p_mc.mean, p_mc.std_error, proportion_floor));

    if (p > 0.0 && p < 1.0) {
        const auto cond = estimate_conditional_means(spec, n, seed, opts);
        rows.push_back(make_validation_row(
            "E[Y|Y<Z]", at_point("E[Y|Y<Z]", [&] { return conditional_detect_mean(spec, cfg.engine.quad); }),
            cond.detect_given_detected.mean, cond.detect_given_detected.std_error, 0.0));
        rows.push_back(make_validation_row(
            "E[Z|Z<Y]", at_point("E[Z|Z<Y]", [&] { return conditional_hack_mean(spec, cfg.engine.quad); }),
            cond.hack_given_hacked.mean, cond.hack_given_hacked.std_error, 0.0));
    }

    if (p > 0.0) {
        const auto reps = at_point("replications", [&] { return simulate_replications(spec, n, seed, opts); });
        std::vector<double> times(reps.size());
        std::vector<double> cycles(reps.size());
        for (std::size_t i = 0; i < reps.size(); ++i) {
            times[i] = reps[i].functional_time;
            cycles[i] = static_cast<double>(reps[i].cycles);
        }
        const auto n1 = summarize(cycles, seed);
        rows.push_back(make_validation_row("E[N1]", (1.0 - p) / p, n1.mean, n1.std_error, 0.0));
        const auto et = summarize(times, seed);
        rows.push_back(make_validation_row(
            "E[T]", at_point("E[T]", [&] { return mean_functional_time(spec, cfg.engine.quad); }), et.mean,
            et.std_error, 0.0));

        const auto& t = cfg.sweep.t_grid;
        const auto analytic = at_point("P(t)", [&] {
            return instantaneous_prob(spec, t, cfg.engine.grid, cfg.engine.quad);
        });
        const auto mc = estimate_survival_curve(spec, t, n, seed, opts);
        for (std::size_t i = 0; i < t.size(); ++i) {
            rows.push_back(make_validation_row("P(t=" + format_number(t[i]) + ")", analytic[i], mc[i].mean,
                                               mc[i].std_error, proportion_floor));
        }
    }

    CommandResult r;
    r.table = validation_table(rows);
    r.passed = std::all_of(rows.begin(), rows.end(), [](const ValidationRow& v) { return v.pass; });
    return r;
}

CommandResult run_command(std::string_view name, const RunConfig& cfg, EngineChoice engine) {
    if (name == "p-mk") return cmd_p_mk(cfg, engine);
    if (name == "mean-time") return cmd_mean_time(cfg, engine);
    if (name == "prob-curve") return cmd_prob_curve(cfg, engine);
    if (name == "sweep-m") return cmd_sweep_m(cfg, engine);
    if (name == "sweep-k") return cmd_sweep_k(cfg, engine);
    if (name == "optimize") return cmd_optimize(cfg, engine);
    if (name == "validate") return cmd_validate(cfg, engine);
    throw ParseError("unknown command '" + std::string(name) + "'", 0);
}

std::string metadata_json(std::string_view command, const RunConfig& cfg, EngineChoice engine,
                          std::string_view out_path) {
    using nlohmann::ordered_json;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.source_hash));

    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

    const BlockchainSpec spec = cfg.spec();
    ordered_json model;
    if (cfg.n) model["n"] = *cfg.n;
    model["m"] = spec.m();
    model["k"] = spec.k();
    model["mode"] = attack_mode_name(cfg.mode);
    ordered_json hackers = ordered_json::array();
    for (const auto& h : cfg.hackers) hackers.push_back(h.describe());
    model["hackers"] = hackers;
    model["detect"] = cfg.detect->describe();
    model["reset"] = cfg.reset->describe();

    ordered_json j;
    j["command"] = command;
    j["output"] = out_path;
    j["engine"] = engine_choice_name(engine);
    j["seed"] = cfg.engine.seed;
    j["n_reps"] = cfg.engine.reps;
    j["threads"] = cfg.engine.threads;
    j["common_random_numbers"] = cfg.engine.common_random_numbers;
    j["cycle_cap"] = cfg.engine.cycle_cap;
    j["tolerances"] = {{"quadrature_abs_tol", cfg.engine.quad.abs_tol},
                       {"quadrature_rel_tol", cfg.engine.quad.rel_tol},
                       {"quadrature_max_depth", cfg.engine.quad.max_depth},
                       {"grid_step", cfg.engine.grid.step},
                       {"grid_horizon", cfg.engine.grid.horizon},
                       {"grid_cells", cfg.engine.grid.cells},
                       {"validate_z_limit", kValidateZLimit}};
    j["config_hash_fnv1a64"] = hash;
    j["model"] = model;
    if (cfg.econ) {
        auto expr = [](const RateExpr& e) { return ordered_json{{"a", e.a}, {"b", e.b}, {"c", e.c}}; };
        j["econ"] = {{"revenue", expr(cfg.econ->revenue)},
                     {"reset_cost", expr(cfg.econ->reset_cost)},
                     {"run_cost", expr(cfg.econ->run_cost)}};
    }
    j["sweep"] = {{"m", {cfg.sweep.m_lo, cfg.sweep.m_hi}},
                  {"k", {cfg.sweep.k_lo, cfg.sweep.k_hi}},
                  {"t", cfg.sweep.t_grid}};
    j["timestamp_utc"] = stamp;
    return j.dump(2) + "\n";
}

void write_outputs(const std::string& path, const CsvTable& table, const std::string& metadata) {
    auto write = [](const std::string& p, const std::string& body) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + p + "' for writing");
        out << body;
        out.flush();
        if (!out) throw std::runtime_error("write to '" + p + "' failed");
    };
    write(path, table.str());
    write(path + ".meta.json", metadata);
}

}  // namespace chainrisk

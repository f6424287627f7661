#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainrisk/config.hpp"
#include "chainrisk/csv.hpp"

namespace chainrisk {

enum class EngineChoice { MonteCarlo, Analytic, Both };

std::optional<EngineChoice> parse_engine_choice(std::string_view text);
std::string engine_choice_name(EngineChoice e);

/// Command-line overrides applied on top of a parsed config.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<unsigned> threads;
    bool no_crn = false;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

/// Command names accepted by run_command, in help order.
const std::vector<std::string>& command_names();

/// A command's CSV body together with its validation verdict (always true
/// for commands other than validate).
struct CommandResult {
    CsvTable table;
    bool passed = true;
};

CommandResult cmd_p_mk(const RunConfig& cfg, EngineChoice engine);
CommandResult cmd_mean_time(const RunConfig& cfg, EngineChoice engine);
CommandResult cmd_prob_curve(const RunConfig& cfg, EngineChoice engine);
CommandResult cmd_sweep_m(const RunConfig& cfg, EngineChoice engine);
CommandResult cmd_sweep_k(const RunConfig& cfg, EngineChoice engine);
/// Analytic unless `engine` is MonteCarlo; Both reports both curves.
CommandResult cmd_optimize(const RunConfig& cfg, EngineChoice engine);
/// Always compares both engines; `engine` is ignored.
CommandResult cmd_validate(const RunConfig& cfg, EngineChoice engine);

CommandResult run_command(std::string_view name, const RunConfig& cfg, EngineChoice engine);

inline constexpr double kValidateZLimit = 4.0;

struct ValidationRow {
    std::string quantity;
    double analytic = 0.0;
    double mc = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    bool pass = false;
};

/// z = (mc - analytic) / max(std_error, se_floor); passes when |z| <= 4.
/// The floor keeps degenerate zero-variance estimates (e.g. a proportion
/// of exactly 0 or 1) from turning rounding noise into a failure.
ValidationRow make_validation_row(std::string quantity, double analytic, double mc,
                                  double std_error, double se_floor);

CsvTable validation_table(const std::vector<ValidationRow>& rows);

/// Metadata sidecar (JSON): command, engine, seed, reps, crn, tolerances,
/// config hash, resolved config and a UTC timestamp.
std::string metadata_json(std::string_view command, const RunConfig& cfg, EngineChoice engine,
                          std::string_view out_path);

/// Writes `table` to `path` and the sidecar to `path + ".meta.json"`.
/// Throws std::runtime_error on I/O failure.
void write_outputs(const std::string& path, const CsvTable& table, const std::string& metadata);

}  // namespace chainrisk

// Command-line front end: chainrisk <command> --config FILE --out FILE [options]

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chainrisk/commands.hpp"
#include "chainrisk/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

}  // namespace

int main(int argc, char** argv) {
    using namespace chainrisk;

    CLI::App app{"Blockchain functional-time analysis: analytic and Monte Carlo engines"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    unsigned threads = 1;
    bool no_crn = false;
    std::string engine_name = "both";

    app.add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "CSV output path (sidecar: <out>.meta.json)")->required();
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides [engine] seed)");
    auto* reps_opt = app.add_option("--reps", reps, "Monte Carlo replications (overrides [engine] reps)");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads, 0 = all cores; output is unaffected");
    app.add_flag("--no-crn", no_crn, "Independent random numbers per sweep point");
    app.add_option("--engine", engine_name, "Engine selection")
        ->check(CLI::IsMember({"mc", "analytic", "both"}));

    const std::pair<const char*, const char*> commands[] = {
        {"p-mk", "Per-cycle hack probability p_mk"},
        {"mean-time", "Mean functional time E[T]"},
        {"prob-curve", "Instantaneous functional probability P(t) over [sweep] t"},
        {"sweep-m", "E[T] over the [sweep] m range"},
        {"sweep-k", "E[T] over the [sweep] k range"},
        {"optimize", "Net revenue rate over the [sweep] m range and its maximizer"},
        {"validate", "Analytic versus Monte Carlo comparison with z-scores"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_config(config_path);
        Overrides o;
        if (*seed_opt) o.seed = seed;
        if (*reps_opt) o.reps = reps;
        if (*threads_opt) o.threads = threads;
        o.no_crn = no_crn;
        apply_overrides(cfg, o);
        const EngineChoice engine = *parse_engine_choice(engine_name);

        const CommandResult result = run_command(command, cfg, engine);
        write_outputs(out_path, result.table, metadata_json(command, cfg, engine, out_path));
        if (!result.passed) {
            std::cerr << "validation failed: at least one |z_score| exceeds " << kValidateZLimit << "\n";
            return kExitValidation;
        }
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "miuralab/config.hpp"
#include "miuralab/errors.hpp"
#include "miuralab/run.hpp"

using namespace miuralab;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::string name;
    std::string field;
    std::string branch;
    std::optional<double> lambda;
};

ExperimentConfig resolve(const std::string& command, const Flags& f) {
    ExperimentConfig cfg = f.config.empty() ? default_config(command) : load_config(f.config, command);
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.format.empty()) cfg.snapshot_format = f.format;
    if (f.seed) cfg.perturbation.seed = *f.seed;
    if (!f.name.empty()) cfg.name = f.name;
    if (!f.field.empty()) cfg.field_path = f.field;
    if (!f.branch.empty()) cfg.branch = f.branch;
    if (f.lambda) cfg.invert_lambda = f.lambda;
    validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for KdV solitons and mKdV kinks"};
    app.require_subcommand(1);
    Flags flags;
    const std::map<std::string, std::string> about = {
        {"simulate", "evolve one initial datum and record diagnostics"},
        {"invert", "invert a Miura map on a field"},
        {"quadform", "quadratic form constants and coercivity"},
        {"identity-check", "Miura identity residuals on random pairs"},
        {"kink-stability", "perturbed kink with modulation tracking"},
        {"soliton-pipeline", "perturbed soliton through the kink frame"},
        {"apriori", "H^-1 bound across an amplitude family"},
        {"decay", "kink run with windowed norms and weighted masses"}};
    for (const auto& name : known_commands()) {
        CLI::App* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", flags.config, "JSON configuration file");
        sub->add_option("--out", flags.out, "parent directory for the run directory");
        sub->add_option("--format", flags.format, "snapshot and field format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", flags.seed, "perturbation seed (overrides the config)");
        sub->add_option("--name", flags.name, "run directory name");
        sub->add_option("--field", flags.field, "input field file");
        if (name == "invert") {
            sub->add_option("--branch", flags.branch, "f-star or f-lambda");
            sub->add_option("--lambda", flags.lambda, "scale for the f-lambda branch");
        }
    }

    if (argc > 1 && argv[1][0] != '-' && !about.count(argv[1])) {
        std::cerr << "unknown command '" << argv[1] << "'\n\n" << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        ExperimentConfig cfg = resolve(command, flags);
        RunResult r = execute(cfg);
        std::cout << r.directory << '\n';
        if (!r.completed) {
            std::cerr << "run stopped early: " << r.report.value("message", std::string{}) << '\n';
            return 3;
        }
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

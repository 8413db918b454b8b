// eqtime: run the named equilibration experiments from the command line.

#include "eqt/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <thread>

namespace {

struct Flags {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> samples;
    std::optional<double> t_max;
    unsigned workers = 0;
};

int dispatch(const std::string& experiment, const Flags& flags) {
    eqt::RunConfig cfg;
    cfg.experiment = experiment;
    cfg.out_dir = flags.out;
    cfg.workers = flags.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : flags.workers;
    try {
        if (!flags.config.empty()) {
            cfg.params = eqt::read_json_file(flags.config);
            cfg.base_dir = std::filesystem::path(flags.config).parent_path();
        }
    } catch (const std::exception& e) {
        cfg.params = eqt::json::object();
        std::cerr << e.what() << '\n';
        std::filesystem::create_directories(cfg.out_dir);
        eqt::write_json_file(cfg.out_dir / "failure.json",
                             {{"experiment", experiment},
                              {"status", "config_error"},
                              {"errors", {{{"field", "--config"}, {"message", e.what()}}}}});
        return 2;
    }
    if (cfg.params.is_object()) {
        if (flags.seed) cfg.params["seed"] = *flags.seed;
        if (flags.samples) cfg.params["samples"] = *flags.samples;
        if (flags.t_max) cfg.params["T_max"] = *flags.t_max;
    }
    return eqt::run_and_report(cfg, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibration-time experiments"};
    app.require_subcommand(1);
    Flags flags;
    std::string chosen;

    for (const auto& name : eqt::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", flags.config, "JSON parameter file")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory")->capture_default_str();
        sub->add_option("--seed", flags.seed, "base RNG seed (overrides the config)");
        sub->add_option("--samples", flags.samples, "sample count (overrides the config)");
        sub->add_option("--T-max", flags.t_max, "largest time or averaging window (overrides the config)");
        sub->add_option("--workers", flags.workers, "worker threads, 0 for all cores; never changes results");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return dispatch(chosen, flags);
}

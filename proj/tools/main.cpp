#include <iostream>

#include <CLI11.hpp>

#include "gqed/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Scattering and coherence engine for a giant atom with delayed feedback"};
    app.require_subcommand(1, 1);
    gqed::CommandLine cl;
    std::string mode, out;
    for (const char* name : {"spectrum", "g2", "g3", "poles", "detuning-scan", "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", cl.config_path, "JSON run configuration");
        sub->add_option("--mode", mode, "exact, weak_correlation, quasi_markovian or markovian");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--workers", cl.workers, "worker threads (default: all cores)");
        sub->add_option("--set", cl.overrides, "override a config key, e.g. model.R=5");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cl.command = app.get_subcommands().front()->get_name();
    if (!mode.empty()) cl.mode = mode;
    if (!out.empty()) cl.out = out;
    return gqed::run_command(cl, std::cout, std::cerr);
}

#include <iostream>

#include "CLI11.hpp"
#include "biperiodic/cli.hpp"
#include "biperiodic/errors.hpp"

int main(int argc, char** argv)
{
    namespace bc = biperiodic::cli;
    CLI::App app{"Bi-periodic scattering, guided modes and limiting absorption", bc::tool_name};
    app.set_version_flag("--version", bc::tool_version);
    app.require_subcommand(1);

    std::string config;
    std::string out;
    bool strict = false;
    std::vector<std::string> overrides;
    for (const auto& name : bc::commands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "configuration file (JSON)")->required();
        sub->add_flag("--strict", strict, "exit 4 when a hypothesis warning is raised");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--override", overrides, "key.path=value, applied after the file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bc::config_error;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        bc::RunConfig cfg = bc::load_config(command, config, overrides);
        if (!out.empty()) cfg.out_dir = out;
        if (strict) cfg.strict = true;
        return bc::run(cfg, std::cerr);
    } catch (const biperiodic::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bc::config_error;
    }
}

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gqed/config.hpp"

namespace gqed {

struct CommandLine {
    std::string command;  // spectrum, g2, g3, poles, detuning-scan, validate
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::string> mode;
    std::optional<std::string> out;
    int workers = 0;  // 0: all cores
};

// Exit status: 0 ok, 2 config error, 3 solver error, 4 validation failure. Errors are
// written to `err` as one JSON object.
int run_command(const CommandLine& cl, std::ostream& out, std::ostream& err);

// Loads the config behind a command line (command-line flags override file keys).
RunConfig resolve_config(const CommandLine& cl);

}  // namespace gqed

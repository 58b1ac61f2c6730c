// commands.hpp — the dtclab subcommands as pure functions of a config.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "output.hpp"

namespace dtc::cli {

const std::vector<std::string>& command_names();

// Every setting of `command` with its default value. ValidationError for an
// unknown command.
json default_config(std::string_view command);

// Overlays `overrides` on `base`. Keys must already exist in `base` and keep
// their JSON kind (numbers stay numbers, lists stay lists).
json merge_config(const json& base, const json& overrides);

// Runs one subcommand; the artifacts depend only on the config, never on the
// worker count.
std::vector<Artifact> run_command(std::string_view command, const json& config, int workers);

int default_workers();

} // namespace dtc::cli

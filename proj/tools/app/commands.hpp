#pragma once

#include "run_config.hpp"

#include <string>

namespace sentlab::app {

enum class Command { preprocess, features, analyze, train, predict, evaluate, gridsearch, report };

Command parse_command(const std::string& name);
std::string to_string(Command command);

/// Executes one pipeline step. Library errors propagate; a missing input from
/// an earlier step raises MissingPrerequisiteError naming the file.
void run_command(Command command, const RunConfig& config);

} // namespace sentlab::app

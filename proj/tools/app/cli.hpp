#pragma once

namespace sentlab::app {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kInternal = 1, kMissingPrerequisite = 2, kValidation = 3 };

/// Parses `<command> --config <path> [overrides]`, runs it and maps errors
/// to exit statuses.
int run_cli(int argc, const char* const* argv);

} // namespace sentlab::app

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ddk/cli/config.hpp"

namespace ddk::cli {

inline const std::vector<std::string> kCommands{"clean", "bars",    "detect",  "fit",    "dk",
                                                "utest", "taildep", "nullsim", "run-all"};

// Runs one pipeline command and returns the files it wrote, relative to
// config.out, in sorted order. Throws InputError or AnalysisError.
std::vector<std::string> run_command(const std::string& command, const RunConfig& config, std::ostream& log);

// Parses arguments, runs, and maps failures to exit codes:
// 0 ok, 1 analysis error, 2 usage or I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ddk::cli

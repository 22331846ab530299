#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpt {

/*
 * Entry point of the command-line tool. `args` excludes the program name.
 * Subcommands: simulate, adiabatic, compare, design, scenarios, metrics.
 * Returns the process exit status; failures print one JSON error record
 * {"error": {"code": ..., "message": ...}} on `err`.
 */
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

} // namespace cpt

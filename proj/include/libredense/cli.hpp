#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace libredense {

  // Exit statuses of the command line tool.
  inline constexpr int exit_ok           = 0;
  inline constexpr int exit_not_verified = 1;
  inline constexpr int exit_usage        = 2;

  // Runs the command line tool; args excludes the program name. Results go
  // to `out` as JSON, diagnostics to `err`.
  int cli_run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace libredense

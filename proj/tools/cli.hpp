#ifndef TUBECALC_TOOLS_CLI_HPP
#define TUBECALC_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace tubecalc {

enum ExitCode { kExitOk = 0, kExitUsage = 2, kExitValidation = 3, kExitDecomposition = 4 };

/// Runs one tubecalc invocation; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tubecalc

#endif

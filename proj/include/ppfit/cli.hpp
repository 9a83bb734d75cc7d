#ifndef PPFIT_CLI_HPP
#define PPFIT_CLI_HPP

#include <string>
#include <vector>

namespace ppfit::cli {

/// Entry point behind the ppfit binary. Subcommands: gen-data, fit, sweep,
/// front, plot-data. Returns 0 on success, 1 on usage/input errors, 2 on
/// numeric failure (diverged training, non-finite results).
int run(const std::vector<std::string>& args);

}  // namespace ppfit::cli

#endif

#ifndef REVKG_CLI_H_
#define REVKG_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace revkg {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;     // bad flags or bad input
inline constexpr int kExitInternal = 3;  // broken invariant

// Runs the command line `args` (without the program name). Subcommands:
// ingest, train, extract, build, query, export, stats.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace revkg

#endif  // REVKG_CLI_H_

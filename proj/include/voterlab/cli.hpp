#ifndef VOTERLAB_CLI_HPP
#define VOTERLAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace voterlab {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitSizeLimit = 3,
  kExitNonConvergence = 4,
};

/// Environment variable naming the default output directory.
inline constexpr const char *kOutDirEnv = "VOTERLAB_OUT_DIR";

/// Entry point: args[0] is the program name, args[1] the subcommand
/// (simulate | discretize | structure | convergence | proximity | mc-random),
/// followed by --config <path> --out <dir> [--threads N].
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace voterlab

#endif  // VOTERLAB_CLI_HPP

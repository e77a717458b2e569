#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dba {

enum class Command { Analyze, Verify, Evolve, Examples };
enum class Format { Plain, Latex, Json };

struct RunConfig {
  Command command = Command::Examples;
  std::string input;  // path or builtin name
  Format format = Format::Plain;
  int grid_n = 256;
  double dt = 1e-4;
  double t_end = 1.0;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  int max_iterations = 10;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;  // parse errors, unsupported input, failed verification
inline constexpr int kExitNoClosure = 2;
inline constexpr int kExitInconsistent = 3;

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool color);

// Parses argv (program name first) and runs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dba

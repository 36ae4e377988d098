#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omega_cube/common.hpp"

namespace omega_cube {

enum ExitCode : int { kExitOk = 0, kExitChecksFailed = 1, kExitUsage = 2 };

/// Parsed command line. Unset optionals fall back to the input file's config.
struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::optional<int> max_dim;
  std::optional<int> dirs;
  std::optional<int> depth;
  std::optional<long> budget;
  std::uint64_t seed = 0;
  std::string out_path;
  bool json_output = false;
  int verbosity = 0;

  // Subcommand specific.
  std::string term1;
  std::string term2;
  std::string separator_path;
  std::string assign_path;

  /// Overrides the fields of base that were given on the command line.
  [[nodiscard]] TruncationConfig resolve(TruncationConfig base) const;
  [[nodiscard]] json to_json() const;
};

/// Entry point of the omega-cube tool. Returns 0 when every requested check
/// passes, 1 when some check fails and 2 on usage or I/O errors.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace omega_cube

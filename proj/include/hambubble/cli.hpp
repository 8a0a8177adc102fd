#pragma once

// Command-line front end. Every command prints one JSON document
// {command, inputs, results, diagnostics, version} except `landscape`, which prints CSV.
// Exit codes: 0 success, 1 usage, 2 domain error, 3 accuracy failure, 4 refusal.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hambubble::cli {

struct RunConfig {
  /// Empty disables the bubble cache.
  std::filesystem::path cache_dir;
  double ode_tol = 1e-10;
  double quad_rel_tol = 1e-12;
  /// Points within this distance of a surface are projected onto it.
  double geometry_tol = 1e-6;
  std::string format = "json";
  int verbosity = 0;
};

/// Flat key=value lines; '#' starts a comment. Unknown keys and out-of-range values throw.
RunConfig load_config(const std::filesystem::path& file, RunConfig base = {});
/// HAMBUBBLE_CACHE_DIR overrides cache_dir.
RunConfig apply_environment(RunConfig cfg);
void validate(const RunConfig& cfg);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace hambubble::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace memheat::cli {

namespace fs = std::filesystem;

enum ExitCode { Ok = 0, Failure = 1, BadInput = 2, NumericalFailure = 3 };

struct RunConfig {
  /// kernel-info, flux, work, spectrum, equiv or evolve.
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  /// Directory that relative paths in config are resolved against.
  fs::path base_dir;
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<double> tol;
};

/// Reads the JSON config at path into cfg.config and sets base_dir.
void load_config(RunConfig& cfg, const fs::path& path);

/// Runs one command. Artifacts go to out_dir; a short report goes to out and
/// a single-line diagnostic to err on failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace memheat::cli

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace tmc::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct InputDigest {
  std::string path;
  std::string fnv1a64;
};

/// Written as manifest.json next to every command's outputs. Everything but
/// `wall_clock` is a pure function of the command line and input bytes.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<InputDigest> inputs;
  std::string config;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  std::string wall_clock;
};

std::string manifest_to_json(const RunManifest& m);
/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_now();

/// Runs one subcommand. `args` excludes the program name. Returns the process
/// exit code: 0 success, 2 user or input error, 1 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tmc::cli

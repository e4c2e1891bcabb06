#include <chrono>
#include <ctime>

#include <json.hpp>

#include "tmc/cli.hpp"

namespace tmc::cli {

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "tmc";
  j["tool_version"] = kToolVersion;
  j["command"] = m.command;
  j["argv"] = m.argv;
  auto inputs = nlohmann::ordered_json::array();
  for (const auto& in : m.inputs) {
    inputs.push_back({{"path", in.path}, {"fnv1a64", in.fnv1a64}});
  }
  j["inputs"] = std::move(inputs);
  j["config"] = m.config;
  auto params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.parameters) {
    params[k] = v;
  }
  j["parameters"] = std::move(params);
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  j["outputs"] = m.outputs;
  j["warnings"] = m.warnings;
  j["notes"] = m.notes;
  j["wall_clock"] = m.wall_clock;
  return j.dump(2) + "\n";
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace tmc::cli

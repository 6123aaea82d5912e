#ifndef RAUZYLAB_CONFIG_HPP
#define RAUZYLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rauzylab {

// plain key=value experiment configuration ('#' comments); unknown keys are
// rejected so typos fail loudly
struct ExperimentConfig {
  std::string class_spec = "AB/BA";
  std::string gamma0_spec = "auto";  // "auto", "tree", or a path text
  std::vector<long long> q_list = {3};
  std::uint64_t seed = 1;
  int threads = 1;
  std::uint64_t closure_cap = 1000000;
  long long step_budget = 10000000;
  std::uint64_t group_cap = 100000;
  std::size_t grid = 32;
  double cutoff = 1000.0;
  std::size_t samples = 10000;
  std::string out;

  std::string serialize() const;  // canonical sorted key=value form
};

ExperimentConfig parse_config(const std::string& text);

std::uint64_t config_hash(const ExperimentConfig& config);
std::string config_hash_hex(const ExperimentConfig& config);

extern const char* kToolVersion;

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  double wall_ms = 0.0;
  std::vector<std::string> records;  // per-command summary lines

  std::string header_comment() const;  // "# rauzylab <ver> config=<hash> ..."
};

}  // namespace rauzylab

#endif

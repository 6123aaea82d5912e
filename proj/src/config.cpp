#include "rauzylab/config.hpp"

#include <algorithm>
#include <sstream>

#include "rauzylab/errors.hpp"

namespace rauzylab {

const char* kToolVersion = "0.1.0";

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<long long> parse_q_list(const std::string& value, int line) {
  std::vector<long long> qs;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      qs.push_back(std::stoll(trim(item)));
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError,
           "line " + std::to_string(line) + ": bad modulus '" + item + "'");
    }
  }
  if (qs.empty())
    fail(ErrorKind::ParseError,
         "line " + std::to_string(line) + ": empty modulus list");
  return qs;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    std::string s = trim(raw);
    auto hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::ParseError,
           "line " + std::to_string(line) + ": expected key=value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    try {
      if (key == "class")
        cfg.class_spec = value;
      else if (key == "gamma0")
        cfg.gamma0_spec = value;
      else if (key == "q")
        cfg.q_list = parse_q_list(value, line);
      else if (key == "seed")
        cfg.seed = std::stoull(value);
      else if (key == "threads")
        cfg.threads = std::stoi(value);
      else if (key == "closure_cap")
        cfg.closure_cap = std::stoull(value);
      else if (key == "step_budget")
        cfg.step_budget = std::stoll(value);
      else if (key == "group_cap")
        cfg.group_cap = std::stoull(value);
      else if (key == "grid")
        cfg.grid = std::stoul(value);
      else if (key == "cutoff")
        cfg.cutoff = std::stod(value);
      else if (key == "samples")
        cfg.samples = std::stoul(value);
      else if (key == "out")
        cfg.out = value;
      else
        fail(ErrorKind::ParseError,
             "line " + std::to_string(line) + ": unknown key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "line " + std::to_string(line) +
                                      ": bad value for '" + key + "'");
    }
  }

  for (long long q : cfg.q_list)
    if (q < 2)
      fail(ErrorKind::ValidationError, "moduli must be >= 2");
  if (cfg.threads < 1)
    fail(ErrorKind::ValidationError, "threads must be positive");
  if (cfg.closure_cap == 0 || cfg.group_cap == 0 || cfg.step_budget <= 0)
    fail(ErrorKind::ValidationError, "caps must be positive");
  if (cfg.grid < 1 || cfg.cutoff <= 0.0)
    fail(ErrorKind::ValidationError, "grid and cutoff must be positive");
  return cfg;
}

std::string ExperimentConfig::serialize() const {
  std::map<std::string, std::string> kv;
  kv["class"] = class_spec;
  kv["gamma0"] = gamma0_spec;
  {
    std::string qs;
    for (std::size_t i = 0; i < q_list.size(); ++i) {
      if (i) qs.push_back(',');
      qs += std::to_string(q_list[i]);
    }
    kv["q"] = qs;
  }
  kv["seed"] = std::to_string(seed);
  kv["threads"] = std::to_string(threads);
  kv["closure_cap"] = std::to_string(closure_cap);
  kv["step_budget"] = std::to_string(step_budget);
  kv["group_cap"] = std::to_string(group_cap);
  kv["grid"] = std::to_string(grid);
  kv["cutoff"] = std::to_string(cutoff);
  kv["samples"] = std::to_string(samples);
  if (!out.empty()) kv["out"] = out;
  std::string text;
  for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
  return text;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical serialization; key sorting makes the hash
  // independent of the original field order
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config.serialize()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const ExperimentConfig& config) {
  std::uint64_t h = config_hash(config);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string RunManifest::header_comment() const {
  std::ostringstream out;
  out << "# rauzylab v" << tool_version << " config=" << config_hash
      << " wall_ms=" << wall_ms;
  for (const auto& r : records) out << " " << r;
  return out.str();
}

}  // namespace rauzylab

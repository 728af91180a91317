// Flat key=value configuration files. Blank lines and '#' comments are
// ignored; list values are comma separated. Command-line flags are applied
// after the file and therefore win.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "blindest/core.hpp"
#include "blindest/sim/sweep.hpp"
#include "blindest/sim/vector_io.hpp"

namespace blindest::sim {

using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = io::detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw DataError("config line " + std::to_string(line) + ": expected key=value");
    const std::string key = io::detail::trim(s.substr(0, eq));
    if (key.empty()) throw DataError("config line " + std::to_string(line) + ": empty key");
    kv[key] = io::detail::trim(s.substr(eq + 1));
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config '" + path + "'");
  return parse_key_values(f);
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return kInfNorm;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ParameterError("config: '" + key + "' expects a number, got '" + v + "'");
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw ParameterError("config: '" + key + "' expects an integer, got '" + v + "'");
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long i = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return i;
  } catch (const std::exception&) {
  }
  throw ParameterError("config: '" + key + "' expects an unsigned integer, got '" + v + "'");
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = io::detail::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

}  // namespace detail

/// Applies one key to a sweep configuration; unknown keys are rejected.
inline void apply_sweep_key(SweepConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "seed") {
    cfg.master_seed = to_u64(key, value);
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(to_int(key, value));
  } else if (key == "dims" || key == "D") {
    cfg.dims.clear();
    for (const auto& s : split_list(value)) {
      const long long d = to_int(key, s);
      if (d < 1) throw ParameterError("config: D must be >= 1");
      cfg.dims.push_back(static_cast<std::size_t>(d));
    }
  } else if (key == "p" || key == "activity_rates") {
    cfg.activity_rates = to_doubles(key, value);
  } else if (key == "snr" || key == "snrs") {
    cfg.snrs = to_doubles(key, value);
  } else if (key == "snr_db") {
    cfg.snrs.clear();
    for (double db : to_doubles(key, value)) cfg.snrs.push_back(std::pow(10.0, db / 10.0));
  } else if (key == "noise_power" || key == "N0") {
    cfg.noise_power = to_double(key, value);
  } else if (key == "q") {
    cfg.q = to_double(key, value);
  } else if (key == "r") {
    cfg.r = to_double(key, value);
  } else if (key == "estimators") {
    cfg.em_baseline = cfg.em_accelerated = false;
    for (const auto& s : split_list(value)) {
      if (s == "blind") continue;
      if (s == "em-baseline" || s == "em") {
        cfg.em_baseline = true;
      } else if (s == "em-accelerated") {
        cfg.em_accelerated = true;
      } else {
        throw ParameterError("config: unknown estimator '" + s + "' (blind, em-baseline, em-accelerated)");
      }
    }
  } else if (key == "em_max_iterations") {
    cfg.em_max_iterations = static_cast<int>(to_int(key, value));
  } else if (key == "em_tolerance") {
    cfg.em_tolerance = to_double(key, value);
  } else if (key == "em_noise_fraction") {
    cfg.em_noise_fraction = to_double(key, value);
  } else if (key == "timing") {
    cfg.timing = to_bool(key, value);
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(to_int(key, value));
  } else {
    throw ParameterError("config: unknown key '" + key + "'");
  }
}

inline void apply_em_convergence_key(EmConvergenceConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "seed") {
    cfg.master_seed = to_u64(key, value);
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(to_int(key, value));
  } else if (key == "D" || key == "dims") {
    const long long d = to_int(key, value);
    if (d < 1) throw ParameterError("config: D must be >= 1");
    cfg.dimension = static_cast<std::size_t>(d);
  } else if (key == "p") {
    cfg.activity_rate = to_double(key, value);
  } else if (key == "snr") {
    cfg.snr = to_double(key, value);
  } else if (key == "noise_power" || key == "N0") {
    cfg.noise_power = to_double(key, value);
  } else if (key == "max_k") {
    cfg.max_k = static_cast<int>(to_int(key, value));
  } else if (key == "baseline_noise_fraction") {
    cfg.baseline_noise_fraction = to_double(key, value);
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(to_int(key, value));
  } else {
    throw ParameterError("config: unknown key '" + key + "'");
  }
}

template <class Config, class Apply>
void apply_all(Config& cfg, const KeyValues& kv, Apply&& apply) {
  for (const auto& [k, v] : kv) apply(cfg, k, v);
}

}  // namespace blindest::sim

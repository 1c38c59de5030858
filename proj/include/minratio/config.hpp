#pragma once

// Experiment configuration: a sectioned key = value file, overridden by
// MINRATIO_* environment variables, overridden by command-line flags.
//
//   [run]     command dim replicates seed workers input c0 level
//   [grid]    n s delta m eta window scale rule
//   [solver]  solver cap restarts stagnation
//   [output]  out trace

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minratio/estimate.hpp"
#include "minratio/io.hpp"

namespace minratio {

/// Invalid configuration; `what()` starts with the location (file:line, env
/// var, or flag) of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::map<std::string, std::string>& config_sections() {
  static const std::map<std::string, std::string> keys = {
      {"command", "run"}, {"dim", "run"},        {"replicates", "run"}, {"seed", "run"},
      {"workers", "run"}, {"input", "run"},      {"c0", "run"},         {"level", "run"},
      {"n", "grid"},      {"s", "grid"},         {"delta", "grid"},     {"m", "grid"},
      {"eta", "grid"},    {"window", "grid"},    {"scale", "grid"},     {"rule", "grid"},
      {"solver", "solver"}, {"cap", "solver"},   {"restarts", "solver"}, {"stagnation", "solver"},
      {"out", "output"},  {"trace", "output"},
  };
  return keys;
}

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {"sample",         "solve-cycle", "solve-path",   "solve-ratio",
                                                "bound",          "estimate-cdelta", "estimate-w", "estimate-t",
                                                "estimate-lnm",   "oriented",    "fit-alpha"};
  return cmds;
}

/// A raw setting and where it came from.
struct RawSetting {
  std::string value;
  std::string origin;
};

using RawConfig = std::map<std::string, RawSetting>;

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline void parse_config_text(const std::string& text, const std::string& name, RawConfig& into) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno);
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "grid" && section != "solver" && section != "output") {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = config_sections().find(key);
    if (it == config_sections().end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!section.empty() && it->second != section) {
      throw ConfigError(where + ": key '" + key + "' belongs in [" + it->second + "], not [" + section + "]");
    }
    into[key] = {value, where};
  }
}

/// MINRATIO_SEED=7 overrides `seed`, and so on.
inline void apply_environment(RawConfig& into, const char* const* envp = nullptr) {
  for (const auto& [key, section] : config_sections()) {
    (void)section;
    std::string var = "MINRATIO_";
    for (char ch : key) var += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const char* value = nullptr;
    if (envp) {
      for (auto p = envp; *p; ++p) {
        std::string entry = *p;
        if (entry.rfind(var + "=", 0) == 0) value = *p + var.size() + 1;
      }
    } else {
      value = std::getenv(var.c_str());
    }
    if (value) into[key] = {value, "environment " + var};
  }
}

struct ExperimentConfig {
  std::string command;
  int dim = 2;
  std::vector<double> n;
  std::vector<double> s;
  std::vector<double> delta;
  std::vector<double> m;
  std::optional<double> eta;
  std::optional<std::size_t> replicates;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  SolverPolicy solver = SolverPolicy::automatic;
  std::size_t cap = kDefaultExactCap;
  std::size_t restarts = 2;
  std::size_t stagnation = 30;
  std::string out = "out";
  bool trace = false;
  std::string input;
  double window = 3.0;
  double scale = 1.0;
  std::string rule = "sqrt";
  std::optional<double> c0;
  double level = 0.99;

  EstimateOptions estimate_options(std::size_t default_replicates) const {
    EstimateOptions o;
    o.replicates = replicates.value_or(default_replicates);
    o.seed = seed;
    o.solver = solver;
    o.workers = workers;
    o.exact_cap = cap;
    o.search.restarts = restarts;
    o.search.max_stagnation = stagnation;
    o.search.exact_cap = cap;
    return o;
  }
};

inline std::string solver_name(SolverPolicy p) {
  switch (p) {
    case SolverPolicy::exact: return "exact";
    case SolverPolicy::heuristic: return "heuristic";
    case SolverPolicy::automatic: return "auto";
  }
  return "auto";
}

/// Key/value view of a validated config, for manifests.
inline std::map<std::string, std::string> describe(const ExperimentConfig& c) {
  auto list = [](const std::vector<double>& xs) {
    std::vector<std::string> parts;
    for (double x : xs) parts.push_back(format_double(x));
    return join(parts);
  };
  std::map<std::string, std::string> d = {
      {"command", c.command},   {"dim", std::to_string(c.dim)},     {"n", list(c.n)},
      {"s", list(c.s)},         {"delta", list(c.delta)},           {"m", list(c.m)},
      {"seed", std::to_string(c.seed)}, {"workers", std::to_string(c.workers)},
      {"solver", solver_name(c.solver)}, {"cap", std::to_string(c.cap)},
      {"restarts", std::to_string(c.restarts)}, {"stagnation", std::to_string(c.stagnation)},
      {"out", c.out},           {"trace", c.trace ? "true" : "false"}, {"input", c.input},
      {"window", format_double(c.window)}, {"scale", format_double(c.scale)}, {"rule", c.rule},
      {"level", format_double(c.level)}};
  if (c.eta) d["eta"] = format_double(*c.eta);
  if (c.replicates) d["replicates"] = std::to_string(*c.replicates);
  if (c.c0) d["c0"] = format_double(*c.c0);
  return d;
}

inline ExperimentConfig validate_config(const RawConfig& raw) {
  ExperimentConfig c;
  auto fail = [&](const std::string& key, const std::string& msg) -> ConfigError {
    return ConfigError(raw.at(key).origin + ": " + key + ": " + msg);
  };
  auto number = [&](const std::string& key) {
    try {
      return parse_double(trim(raw.at(key).value));
    } catch (const InvalidArgument&) {
      throw fail(key, "not a number: '" + raw.at(key).value + "'");
    }
  };
  auto count = [&](const std::string& key, double min) {
    const double x = number(key);
    if (x < min || x != std::floor(x)) throw fail(key, "expected an integer >= " + format_double(min));
    return static_cast<std::size_t>(x);
  };
  auto list = [&](const std::string& key) {
    std::vector<double> out;
    for (const auto& part : split(raw.at(key).value)) {
      try {
        out.push_back(parse_double(trim(part)));
      } catch (const InvalidArgument&) {
        throw fail(key, "not a number list: '" + raw.at(key).value + "'");
      }
    }
    return out;
  };
  auto has = [&](const std::string& key) { return raw.count(key) > 0; };

  if (!has("command")) throw ConfigError("config: no command given");
  c.command = raw.at("command").value;
  bool known = false;
  for (const auto& k : known_commands()) known |= k == c.command;
  if (!known) throw fail("command", "unknown command '" + c.command + "'");
  if (has("dim")) {
    c.dim = static_cast<int>(count("dim", 2));
  }
  if (has("n")) {
    c.n = list("n");
    for (double x : c.n) {
      if (x < 0 || x != std::floor(x)) throw fail("n", "values must be non-negative integers");
    }
  }
  if (has("s")) {
    c.s = list("s");
    for (double x : c.s) {
      if (!(x > 0)) throw fail("s", "values must be positive");
    }
  }
  if (has("delta")) {
    c.delta = list("delta");
    for (double x : c.delta) {
      if (!(x > 0 && x <= 1)) throw fail("delta", "values must lie in (0, 1]");
    }
  }
  if (has("m")) {
    c.m = list("m");
    for (double x : c.m) {
      if (x < 1 || x != std::floor(x)) throw fail("m", "values must be positive integers");
    }
  }
  if (has("eta")) {
    c.eta = number("eta");
    if (*c.eta < 0) throw fail("eta", "must be non-negative");
  }
  if (has("replicates")) c.replicates = count("replicates", 1);
  if (has("seed")) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(raw.at("seed").value, &used);
      if (used != raw.at("seed").value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw fail("seed", "expected an unsigned 64-bit integer");
    }
  }
  if (has("workers")) c.workers = count("workers", 0);
  if (has("solver")) {
    const auto& v = raw.at("solver").value;
    if (v == "exact") c.solver = SolverPolicy::exact;
    else if (v == "heuristic") c.solver = SolverPolicy::heuristic;
    else if (v == "auto") c.solver = SolverPolicy::automatic;
    else throw fail("solver", "expected exact, heuristic or auto");
  }
  if (has("cap")) {
    c.cap = count("cap", 1);
    if (c.cap > 26) throw fail("cap", "exact solver cap above 26 is not supported");
  }
  if (has("restarts")) c.restarts = count("restarts", 1);
  if (has("stagnation")) c.stagnation = count("stagnation", 0);
  if (has("out")) c.out = raw.at("out").value;
  if (has("trace")) {
    const auto& v = raw.at("trace").value;
    if (v == "true" || v == "1" || v.empty()) c.trace = true;
    else if (v == "false" || v == "0") c.trace = false;
    else throw fail("trace", "expected true or false");
  }
  if (has("input")) c.input = raw.at("input").value;
  if (has("window")) {
    c.window = number("window");
    if (!(c.window > 0)) throw fail("window", "must be positive");
  }
  if (has("scale")) {
    c.scale = number("scale");
    if (!(c.scale > 0)) throw fail("scale", "must be positive");
  }
  if (has("rule")) {
    c.rule = raw.at("rule").value;
    try {
      MRule::parse(c.rule);
    } catch (const InvalidArgument& e) {
      throw fail("rule", e.what());
    }
  }
  if (has("c0")) c.c0 = number("c0");
  if (has("level")) {
    c.level = number("level");
    if (!(c.level > 0 && c.level < 1)) throw fail("level", "must lie in (0, 1)");
  }
  return c;
}

}  // namespace minratio

#pragma once

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdint>
#include <charconv>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chiral/lattice.hpp"
#include "chiral/trig_polynomial.hpp"

namespace chiral {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { single_particle, anomaly, fock, hs_check };
enum class SweepAxis { cutoff, amplitude, circumference };
/// Time dependence h(t) of chi(z, t) = chi(z) h(t) in single-particle runs.
enum class TimeProfile { constant, linear, sine };

struct SweepSpec {
  SweepAxis axis = SweepAxis::cutoff;
  std::vector<double> values;
  double spread_tol = 1e-10;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::anomaly;
  double L = kTwoPi;
  int N = 24;
  std::vector<Harmonic> f{{1.0, 1, 0.0}};
  std::vector<Harmonic> chi{{0.7, 1, -kPi / 2}};
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string out = ".";

  // single-particle
  double time = 1.0;
  int cases = 1;
  int state_modes = 5;
  TimeProfile chi_time = TimeProfile::constant;

  // fock: momenta r of the mode subset, both energy signs each
  std::vector<int> momenta{-1, 1};

  std::optional<SweepSpec> sweep;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::single_particle: return "single-particle";
    case ExperimentKind::anomaly: return "anomaly";
    case ExperimentKind::fock: return "fock";
    case ExperimentKind::hs_check: return "hs-check";
  }
  return "?";
}

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::cutoff: return "N";
    case SweepAxis::amplitude: return "amplitude";
    case SweepAxis::circumference: return "L";
  }
  return "?";
}

inline std::string to_string(TimeProfile p) {
  switch (p) {
    case TimeProfile::constant: return "constant";
    case TimeProfile::linear: return "linear";
    case TimeProfile::sine: return "sine";
  }
  return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
  if (s == "single-particle") return ExperimentKind::single_particle;
  if (s == "anomaly") return ExperimentKind::anomaly;
  if (s == "fock") return ExperimentKind::fock;
  if (s == "hs-check") return ExperimentKind::hs_check;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "N") return SweepAxis::cutoff;
  if (s == "amplitude") return SweepAxis::amplitude;
  if (s == "L") return SweepAxis::circumference;
  throw ConfigError("unknown sweep axis '" + s + "' (expected N, amplitude or L)");
}

inline TimeProfile parse_time_profile(const std::string& s) {
  if (s == "constant") return TimeProfile::constant;
  if (s == "linear") return TimeProfile::linear;
  if (s == "sine") return TimeProfile::sine;
  throw ConfigError("unknown chi_time '" + s + "'");
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Parses a real number; also accepts multiples of pi such as "2pi", "-pi/2", "0.5*pi".
inline double parse_real(const std::string& text) {
  static const std::regex pi_form(R"(^\s*([+-]?(?:\d+\.?\d*(?:[eE][+-]?\d+)?)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, pi_form)) {
    double factor = 1.0;
    const std::string pre = m[1].str();
    if (pre == "-") {
      factor = -1.0;
    } else if (!pre.empty() && pre != "+") {
      factor = std::stod(pre);
    }
    double v = factor * kPi;
    if (m[2].matched) v /= std::stod(m[2].str());
    return v;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (text.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("not a number: '" + text + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

/// "a k phase, a k phase, ..." -> harmonic list.
inline std::vector<Harmonic> parse_harmonics(const std::string& s) {
  std::vector<Harmonic> out;
  if (s.find_first_not_of(" \t") == std::string::npos) return out;
  for (const auto& term : split(s, ',')) {
    std::istringstream ts(term);
    std::string a;
    std::string k;
    std::string ph;
    if (!(ts >> a >> k)) throw ConfigError("harmonic term needs 'amplitude index [phase]': '" + term + "'");
    if (!(ts >> ph)) ph = "0";
    std::string extra;
    if (ts >> extra) throw ConfigError("trailing text in harmonic term: '" + term + "'");
    const double index = parse_real(k);
    if (index < 0 || index != std::floor(index)) throw ConfigError("harmonic index must be a nonnegative integer");
    out.push_back({parse_real(a), static_cast<int>(index), parse_real(ph)});
  }
  return out;
}

inline std::string format_harmonics(const std::vector<Harmonic>& hs) {
  std::string out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (i) out += ", ";
    out += format_real(hs[i].amplitude) + " " + std::to_string(hs[i].index) + " " + format_real(hs[i].phase);
  }
  return out;
}

inline void validate(const ExperimentConfig& c) {
  if (!(c.L > 0.0) || !std::isfinite(c.L)) throw ConfigError("L must be positive and finite");
  if (c.N < 1) throw ConfigError("N must be at least 1");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
  for (const auto* list : {&c.f, &c.chi}) {
    for (const auto& h : *list) {
      if (!std::isfinite(h.amplitude) || !std::isfinite(h.phase)) throw ConfigError("harmonic values must be finite");
      if (h.index < 0) throw ConfigError("harmonic index must be nonnegative");
      if (6 * h.index > c.N) {
        throw ConfigError("harmonic index " + std::to_string(h.index) + " exceeds N/6; minimum N is " +
                          std::to_string(6 * h.index));
      }
    }
  }
  if (c.cases < 1) throw ConfigError("cases must be at least 1");
  if (c.state_modes < 1) throw ConfigError("state_modes must be at least 1");
  if (!std::isfinite(c.time)) throw ConfigError("time must be finite");
  if (c.momenta.empty()) throw ConfigError("fock momenta list is empty");
  for (std::size_t i = 0; i < c.momenta.size(); ++i) {
    if (std::abs(c.momenta[i]) > c.N) throw ConfigError("fock momentum outside the lattice");
    for (std::size_t j = 0; j < i; ++j) {
      if (c.momenta[i] == c.momenta[j]) throw ConfigError("duplicate fock momentum");
    }
  }
  if (c.sweep) {
    if (c.sweep->values.empty()) throw ConfigError("sweep value list is empty");
    for (std::size_t i = 1; i < c.sweep->values.size(); ++i) {
      if (!(c.sweep->values[i - 1] < c.sweep->values[i])) throw ConfigError("sweep values must be sorted ascending");
    }
    if (c.sweep->axis == SweepAxis::cutoff) {
      for (double v : c.sweep->values) {
        if (v != std::floor(v) || v < 1) throw ConfigError("N sweep values must be positive integers");
      }
    }
    if (!(c.sweep->spread_tol > 0.0)) throw ConfigError("spread_tol must be positive");
  }
}

/// Reads the INI-style config text. Unknown keys are rejected.
inline ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }

  static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
      {"experiment", {"kind", "L", "N", "tol", "seed", "out"}},
      {"f", {"harmonics"}},
      {"chi", {"harmonics"}},
      {"single-particle", {"time", "cases", "state_modes", "chi_time"}},
      {"fock", {"momenta"}},
      {"sweep", {"axis", "values", "spread_tol"}},
  };
  for (const auto& [section, body] : tree) {
    auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == section; });
    if (it == known.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, v] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  ExperimentConfig c;
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '/'))) return *v;
    return std::nullopt;
  };
  auto get_int = [&](const std::string& path, long long fallback) {
    auto v = get(path);
    if (!v) return fallback;
    const double x = parse_real(*v);
    if (x != std::floor(x)) throw ConfigError(path + " must be an integer");
    return static_cast<long long>(x);
  };

  if (auto v = get("experiment/kind")) c.kind = parse_kind(*v);
  if (auto v = get("experiment/L")) c.L = parse_real(*v);
  c.N = static_cast<int>(get_int("experiment/N", c.N));
  if (auto v = get("experiment/tol")) c.tol = parse_real(*v);
  if (auto v = get("experiment/seed")) {
    try {
      c.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw ConfigError("seed must be an unsigned integer");
    }
  }
  if (auto v = get("experiment/out")) c.out = *v;
  if (auto v = get("f/harmonics")) c.f = parse_harmonics(*v);
  if (auto v = get("chi/harmonics")) c.chi = parse_harmonics(*v);
  if (auto v = get("single-particle/time")) c.time = parse_real(*v);
  c.cases = static_cast<int>(get_int("single-particle/cases", c.cases));
  c.state_modes = static_cast<int>(get_int("single-particle/state_modes", c.state_modes));
  if (auto v = get("single-particle/chi_time")) c.chi_time = parse_time_profile(*v);
  if (auto v = get("fock/momenta")) {
    c.momenta.clear();
    for (const auto& s : split(*v, ',')) {
      const double r = parse_real(s);
      if (r != std::floor(r)) throw ConfigError("fock momenta must be integers");
      c.momenta.push_back(static_cast<int>(r));
    }
  }
  if (tree.get_child_optional("sweep")) {
    SweepSpec s;
    if (auto v = get("sweep/axis")) s.axis = parse_axis(*v);
    if (auto v = get("sweep/values")) {
      for (const auto& x : split(*v, ',')) s.values.push_back(parse_real(x));
    }
    if (auto v = get("sweep/spread_tol")) s.spread_tol = parse_real(*v);
    c.sweep = s;
  }
  validate(c);
  return c;
}

/// Writes a config that parse_config reads back unchanged.
inline std::string emit_config(const ExperimentConfig& c) {
  std::string s;
  s += "[experiment]\n";
  s += "kind = " + to_string(c.kind) + "\n";
  s += "L = " + format_real(c.L) + "\n";
  s += "N = " + std::to_string(c.N) + "\n";
  s += "tol = " + format_real(c.tol) + "\n";
  s += "seed = " + std::to_string(c.seed) + "\n";
  s += "out = " + c.out + "\n\n";
  s += "[f]\nharmonics = " + format_harmonics(c.f) + "\n\n";
  s += "[chi]\nharmonics = " + format_harmonics(c.chi) + "\n\n";
  s += "[single-particle]\n";
  s += "time = " + format_real(c.time) + "\n";
  s += "cases = " + std::to_string(c.cases) + "\n";
  s += "state_modes = " + std::to_string(c.state_modes) + "\n";
  s += "chi_time = " + to_string(c.chi_time) + "\n\n";
  s += "[fock]\nmomenta = ";
  for (std::size_t i = 0; i < c.momenta.size(); ++i) s += (i ? ", " : "") + std::to_string(c.momenta[i]);
  s += "\n";
  if (c.sweep) {
    s += "\n[sweep]\naxis = " + to_string(c.sweep->axis) + "\nvalues = ";
    for (std::size_t i = 0; i < c.sweep->values.size(); ++i) s += (i ? ", " : "") + format_real(c.sweep->values[i]);
    s += "\nspread_tol = " + format_real(c.sweep->spread_tol) + "\n";
  }
  return s;
}

}  // namespace chiral

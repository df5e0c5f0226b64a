#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "chiral/anomaly.hpp"
#include "chiral/config.hpp"
#include "chiral/fock.hpp"
#include "chiral/single_particle.hpp"

namespace chiral {

/// One case of an experiment.
struct ReportRow {
  std::string id;
  /// Module-specific columns, already formatted.
  std::vector<std::string> values;
  double measured = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  double tol = 0.0;
  bool pass = false;
  double duration_ms = 0.0;
};

struct SpreadCheck {
  double spread = 0.0;
  double tol = 0.0;
  bool pass = true;
};

struct Report {
  ExperimentKind kind = ExperimentKind::anomaly;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  std::optional<SweepAxis> axis;
  std::optional<SpreadCheck> spread;

  [[nodiscard]] bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; }) &&
           (!spread || spread->pass);
  }
};

[[nodiscard]] inline std::vector<std::string> module_columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::anomaly:
      return {"L", "N", "d_f", "d_V", "T_plus", "T_minus", "delta", "closed_form", "abs_error"};
    case ExperimentKind::fock:
      return {"n_plus", "n_minus", "dim", "residual", "delta_finite", "delta_continuum_reference"};
    case ExperimentKind::single_particle:
      return {"L", "N", "time", "grid_points", "deviation"};
    case ExperimentKind::hs_check:
      return {"L", "N", "d_V", "hs_plus_minus", "hs_minus_plus", "reference", "abs_error"};
  }
  return {};
}

namespace detail {

inline std::string fmt(double x) { return format_real(x); }
inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(std::size_t x) { return std::to_string(x); }

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline ReportRow finish(ReportRow row, double tol) {
  row.tol = tol;
  row.pass = std::isfinite(row.abs_error) && row.abs_error <= tol;
  return row;
}

inline GaugeFunction time_dependent_chi(const TrigPolynomial& profile, TimeProfile p) {
  switch (p) {
    case TimeProfile::constant: return GaugeFunction::stationary(profile);
    case TimeProfile::linear:
      return GaugeFunction::separable(profile, [](double t) { return t; }, [](double) { return 1.0; });
    case TimeProfile::sine:
      return GaugeFunction::separable(
          profile, [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); });
  }
  return GaugeFunction::stationary(profile);
}

/// Random normalized state on `count` distinct lattice modes.
inline SpinorState random_state(const MomentumLattice& lat, int count, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, lat.size() - 1);
  std::normal_distribution<double> gauss;
  std::set<std::size_t> chosen;
  const auto want = std::min<std::size_t>(static_cast<std::size_t>(count), lat.size());
  while (chosen.size() < want) chosen.insert(pick(rng));
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(lat.size()));
  for (auto i : chosen) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    c(static_cast<Eigen::Index>(i)) = cplx(re, im);
  }
  c.normalize();
  return SpinorState::from_coefficients(lat, std::move(c));
}

inline std::vector<ReportRow> run_anomaly(const ExperimentConfig& c) {
  ReportRow row;
  row.id = "anomaly";
  row.duration_ms = timed([&] {
    const auto lat = make_lattice(c.L, c.N);
    const auto rep = anomaly_delta(TrigPolynomial::from_harmonics(c.L, c.f),
                                   TrigPolynomial::from_harmonics(c.L, c.chi), lat);
    row.values = {fmt(rep.L),       fmt(rep.N),     fmt(rep.d_f),         fmt(rep.d_V),        fmt(rep.T_plus),
                  fmt(rep.T_minus), fmt(rep.delta), fmt(rep.closed_form), fmt(rep.abs_error)};
    row.measured = rep.delta;
    row.reference = rep.closed_form;
    row.abs_error = rep.abs_error;
  });
  return {finish(std::move(row), c.tol)};
}

inline std::vector<ReportRow> run_hs_check(const ExperimentConfig& c) {
  ReportRow row;
  row.id = "hs-check";
  row.duration_ms = timed([&] {
    const auto lat = make_lattice(c.L, c.N);
    const auto V = gauge_unitary(TrigPolynomial::from_harmonics(c.L, c.chi), lat);
    const auto hs = hs_offdiagonal(V, build_projectors(lat));
    const double ref = hs_symbol_sum(V);
    row.measured = hs.plus_minus;
    row.reference = ref;
    row.abs_error = std::max(std::abs(hs.plus_minus - ref), std::abs(hs.minus_plus - ref));
    row.values = {fmt(c.L),           fmt(c.N), fmt(V.bandwidth), fmt(hs.plus_minus), fmt(hs.minus_plus),
                  fmt(ref), fmt(row.abs_error)};
  });
  return {finish(std::move(row), c.tol)};
}

inline std::vector<ReportRow> run_fock(const ExperimentConfig& c) {
  ReportRow row;
  row.id = "fock";
  row.duration_ms = timed([&] {
    const auto lat = make_lattice(c.L, c.N);
    const auto f = TrigPolynomial::from_harmonics(c.L, c.f);
    const auto chi = TrigPolynomial::from_harmonics(c.L, c.chi);
    const auto F = build_fock(lat, modes_with_momenta(lat, c.momenta));
    const auto V = gauge_unitary(chi, lat);
    const auto A = restrict_to(multiplication_operator(f, Weight::sigma3, lat), F.modes());
    const auto res = conjugation_identity_check(A, V, F);
    const double reference = anomaly_closed_form(f, chi);
    row.measured = res.residual;
    row.reference = 0.0;
    row.abs_error = res.residual;
    row.values = {fmt(res.n_plus),   fmt(res.n_minus), fmt(res.dim),
                  fmt(res.residual), fmt(res.delta),   fmt(reference)};
  });
  return {finish(std::move(row), c.tol)};
}

inline std::vector<ReportRow> run_single_particle(const ExperimentConfig& c) {
  std::vector<ReportRow> rows;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> when(0.0, 2.0 * std::abs(c.time));
  const auto lat = make_lattice(c.L, c.N);
  for (int k = 0; k < c.cases; ++k) {
    const auto psi0 = random_state(lat, c.state_modes, rng);
    std::vector<Harmonic> chi = c.chi;
    double t = c.time;
    if (k > 0) {
      for (auto& h : chi) h = {unit(rng), h.index, angle(rng)};
      t = when(rng);
    }
    ReportRow row;
    row.id = "single-particle-" + std::to_string(k);
    row.duration_ms = timed([&] {
      const auto gauge = time_dependent_chi(TrigPolynomial::from_harmonics(c.L, chi), c.chi_time);
      const double dev = gauge_invariance_report(psi0, gauge, t);
      row.measured = dev;
      row.reference = 0.0;
      row.abs_error = dev;
      row.values = {fmt(c.L), fmt(c.N), fmt(t), fmt(lat.default_grid_points()), fmt(dev)};
    });
    rows.push_back(finish(std::move(row), c.tol));
  }
  return rows;
}

}  // namespace detail

/// Runs one configured experiment; errors propagate as exceptions.
[[nodiscard]] inline Report run(const ExperimentConfig& c) {
  validate(c);
  Report rep;
  rep.kind = c.kind;
  rep.columns = module_columns(c.kind);
  switch (c.kind) {
    case ExperimentKind::anomaly: rep.rows = detail::run_anomaly(c); break;
    case ExperimentKind::hs_check: rep.rows = detail::run_hs_check(c); break;
    case ExperimentKind::fock: rep.rows = detail::run_fock(c); break;
    case ExperimentKind::single_particle: rep.rows = detail::run_single_particle(c); break;
  }
  return rep;
}

/// Sets the sweep axis of c to one value.
inline void apply_sweep_point(ExperimentConfig& c, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::cutoff: c.N = static_cast<int>(value); break;
    case SweepAxis::circumference: c.L = value; break;
    case SweepAxis::amplitude:
      for (auto& h : c.chi) h.amplitude *= value;
      break;
  }
}

/// One row per sweep value. N and L sweeps also check that the measured
/// values agree pairwise within spread_tol.
[[nodiscard]] inline Report sweep(const ExperimentConfig& c) {
  validate(c);
  if (!c.sweep) throw ConfigError("sweep requires a [sweep] section");
  if (c.kind == ExperimentKind::single_particle) throw ConfigError("single-particle runs cannot be swept");
  const SweepSpec s = *c.sweep;
  ExperimentConfig base = c;
  base.sweep = std::nullopt;
  Report rep;
  rep.kind = c.kind;
  rep.columns = module_columns(c.kind);
  rep.axis = s.axis;
  for (double v : s.values) {
    ExperimentConfig point = base;
    apply_sweep_point(point, s.axis, v);
    validate(point);
    for (auto& row : run(point).rows) {
      row.id = to_string(s.axis) + "=" + format_real(v);
      rep.rows.push_back(std::move(row));
    }
  }
  if (s.axis != SweepAxis::amplitude) {
    const auto [lo, hi] = std::minmax_element(rep.rows.begin(), rep.rows.end(),
                                              [](const auto& a, const auto& b) { return a.measured < b.measured; });
    SpreadCheck chk;
    chk.spread = hi->measured - lo->measured;
    chk.tol = s.spread_tol;
    chk.pass = chk.spread <= s.spread_tol;
    rep.spread = chk;
  }
  return rep;
}

/// CSV: id, module columns, tol, pass, duration_ms (duration always last).
[[nodiscard]] inline std::string to_csv(const Report& r) {
  std::string out = "id";
  for (const auto& c : r.columns) out += "," + c;
  out += ",tol,pass,duration_ms\n";
  for (const auto& row : r.rows) {
    out += row.id;
    for (const auto& v : row.values) out += "," + v;
    out += "," + format_real(row.tol) + "," + (row.pass ? "true" : "false") + "," + format_real(row.duration_ms) + "\n";
  }
  return out;
}

[[nodiscard]] inline nlohmann::json summary_json(const Report& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  std::size_t passed = 0;
  double worst = 0.0;
  std::string worst_id;
  for (const auto& row : r.rows) {
    passed += row.pass ? 1 : 0;
    if (!std::isfinite(row.abs_error) || row.abs_error >= worst) {
      worst = row.abs_error;
      worst_id = row.id;
    }
  }
  j["rows"] = r.rows.size();
  j["passed"] = passed;
  j["failed"] = r.rows.size() - passed;
  j["worst_abs_error"] = worst;
  j["worst_id"] = worst_id;
  if (r.axis) j["sweep_axis"] = to_string(*r.axis);
  if (r.spread) {
    j["spread"] = r.spread->spread;
    j["spread_tol"] = r.spread->tol;
    j["spread_pass"] = r.spread->pass;
  }
  j["all_pass"] = r.all_pass();
  return j;
}

/// Writes <stem>.csv and <stem>_summary.json into dir; returns the CSV path.
inline std::filesystem::path write_report(const Report& r, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / (stem + ".csv");
  std::ofstream(csv) << to_csv(r);
  std::ofstream(dir / (stem + "_summary.json")) << summary_json(r).dump(2) << "\n";
  return csv;
}

}  // namespace chiral

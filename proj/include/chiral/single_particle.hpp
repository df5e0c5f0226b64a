#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "chiral/fourier.hpp"
#include "chiral/spinor.hpp"
#include "chiral/trig_polynomial.hpp"

namespace chiral {

/// z-profile of a real field at time t, given as Fourier data.
using CoefficientSchedule = std::function<TrigPolynomial(double)>;

namespace detail {

inline TrigPolynomial checked(const CoefficientSchedule& s, double t, double L) {
  TrigPolynomial p = s(t);
  if (!p.is_real()) throw std::invalid_argument("schedule produced a complex-valued profile");
  if (p.period() != L) throw std::invalid_argument("schedule period does not match");
  return p;
}

}  // namespace detail

/// chi(z, t) together with its time derivative.
class GaugeFunction {
 public:
  GaugeFunction(double L, CoefficientSchedule value, CoefficientSchedule rate)
      : L_(L), value_(std::move(value)), rate_(std::move(rate)) {}

  [[nodiscard]] static GaugeFunction stationary(TrigPolynomial chi) {
    const double L = chi.period();
    return GaugeFunction(
        L, [chi](double) { return chi; }, [L](double) { return TrigPolynomial::zero(L); });
  }

  /// chi(z, t) = profile(z) h(t).
  [[nodiscard]] static GaugeFunction separable(TrigPolynomial profile, std::function<double(double)> h,
                                               std::function<double(double)> dh) {
    const double L = profile.period();
    return GaugeFunction(
        L, [profile, h](double t) { return profile.scaled(h(t)); },
        [profile, dh](double t) { return profile.scaled(dh(t)); });
  }

  [[nodiscard]] double period() const noexcept { return L_; }
  [[nodiscard]] TrigPolynomial at(double t) const { return detail::checked(value_, t, L_); }
  [[nodiscard]] TrigPolynomial rate(double t) const { return detail::checked(rate_, t, L_); }

 private:
  double L_;
  CoefficientSchedule value_;
  CoefficientSchedule rate_;
};

/// Scalar and vector potential (A0, A1).
class PotentialPair {
 public:
  PotentialPair(double L, CoefficientSchedule scalar, CoefficientSchedule vector)
      : L_(L), scalar_(std::move(scalar)), vector_(std::move(vector)) {}

  [[nodiscard]] static PotentialPair zero(double L) {
    auto z = [L](double) { return TrigPolynomial::zero(L); };
    return PotentialPair(L, z, z);
  }

  /// A0 = -d(chi)/dt, A1 = +d(chi)/dz.
  [[nodiscard]] static PotentialPair pure_gauge(const GaugeFunction& chi) {
    return PotentialPair(
        chi.period(), [chi](double t) { return chi.rate(t).scaled(-1.0); },
        [chi](double t) { return trig_derivative(chi.at(t)); });
  }

  [[nodiscard]] double period() const noexcept { return L_; }
  [[nodiscard]] TrigPolynomial scalar(double t) const { return detail::checked(scalar_, t, L_); }
  [[nodiscard]] TrigPolynomial vector(double t) const { return detail::checked(vector_, t, L_); }

 private:
  double L_;
  CoefficientSchedule scalar_;
  CoefficientSchedule vector_;
};

/// Real current samples J(z_k) on a uniform grid.
struct CurrentProfile {
  double L = 0.0;
  std::vector<double> values;

  [[nodiscard]] std::size_t points() const noexcept { return values.size(); }
  [[nodiscard]] double integral() const noexcept {
    double s = 0.0;
    for (double v : values) s += v;
    return s * L / static_cast<double>(values.size());
  }
  [[nodiscard]] double mean() const noexcept { return integral() / L; }
};

/// Multiplies each mode coefficient by exp(-i eps t).
[[nodiscard]] inline SpinorState evolve_free(const SpinorState& psi0, double t) {
  const auto& lat = psi0.lattice();
  Eigen::VectorXcd c = psi0.coefficients();
  const auto modes = lat.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    c(static_cast<Eigen::Index>(i)) *= std::polar(1.0, -modes[i].energy(lat.circumference()) * t);
  }
  auto out = SpinorState::from_coefficients(lat, std::move(c));
  return psi0.has_grid() ? out.with_grid(psi0.grid().points()) : out;
}

/// exp(i chi(z, t)) exp(-i H0 t) psi0, rendered on the grid.
[[nodiscard]] inline SpinorState apply_gauge_solution(const SpinorState& psi0, const GaugeFunction& chi,
                                                      double t, std::size_t grid_points = 0) {
  if (chi.period() != psi0.lattice().circumference()) {
    throw std::invalid_argument("gauge function period does not match lattice");
  }
  if (grid_points == 0) {
    grid_points = psi0.has_grid() ? psi0.grid().points() : psi0.lattice().default_grid_points();
  }
  SpinorGrid g = evolve_free(psi0, t).with_grid(grid_points).grid();
  const TrigPolynomial profile = chi.at(t);
  for (std::size_t k = 0; k < g.points(); ++k) {
    const cplx phase = std::polar(1.0, profile.value(g.position(k)));
    const auto i = static_cast<Eigen::Index>(k);
    g.upper(i) *= phase;
    g.lower(i) *= phase;
  }
  return SpinorState::from_grid(psi0.lattice(), std::move(g));
}

/// J = |upper|^2 - |lower|^2 at each grid point.
[[nodiscard]] inline CurrentProfile current_density(const SpinorState& psi) {
  const auto& g = psi.grid();
  CurrentProfile j{g.L, std::vector<double>(g.points())};
  for (std::size_t k = 0; k < g.points(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    j.values[k] = std::norm(g.upper(i)) - std::norm(g.lower(i));
  }
  return j;
}

/// max_z |J_chi(z, t) - J_0(z, t)|.
[[nodiscard]] inline double gauge_invariance_report(const SpinorState& psi0, const GaugeFunction& chi,
                                                    double t, std::size_t grid_points = 0) {
  if (grid_points == 0) grid_points = psi0.lattice().default_grid_points();
  const auto jchi = current_density(apply_gauge_solution(psi0, chi, t, grid_points));
  const auto j0 = current_density(evolve_free(psi0, t).with_grid(grid_points));
  double worst = 0.0;
  for (std::size_t k = 0; k < j0.points(); ++k) {
    worst = std::max(worst, std::abs(jchi.values[k] - j0.values[k]));
  }
  return worst;
}

/// Phases c1, c2 at time T on a uniform grid.
struct CharacteristicSolution {
  double L = 0.0;
  double T = 0.0;
  std::vector<double> c1;
  std::vector<double> c2;

  [[nodiscard]] std::size_t points() const noexcept { return c1.size(); }
  [[nodiscard]] double position(std::size_t k) const noexcept {
    return L * static_cast<double>(k) / static_cast<double>(c1.size());
  }
};

/// Integrates dc1/dt = A0 - A1 along z - t = const and dc2/dt = A0 + A1 along
/// z + t = const from zero data at t = 0, using classical RK4.
[[nodiscard]] inline CharacteristicSolution solve_characteristics(const PotentialPair& A, double T, int steps,
                                                                  std::size_t grid_points = 64) {
  if (steps < 2) throw std::invalid_argument("characteristic solver needs at least 2 steps");
  if (!(T >= 0.0)) throw std::invalid_argument("final time must be nonnegative");
  if (grid_points == 0) throw std::invalid_argument("grid must be nonempty");
  const double L = A.period();
  CharacteristicSolution sol{L, T, std::vector<double>(grid_points, 0.0), std::vector<double>(grid_points, 0.0)};
  const double h = T / steps;

  // Sources at time t for the characteristic ending at grid point k.
  auto sources = [&](double t, std::vector<double>& s1, std::vector<double>& s2) {
    const auto a0 = A.scalar(t);
    const auto a1 = A.vector(t);
    for (std::size_t k = 0; k < grid_points; ++k) {
      const double zk = sol.position(k);
      const double right = zk - T + t;
      const double left = zk + T - t;
      s1[k] = a0.value(right) - a1.value(right);
      s2[k] = a0.value(left) + a1.value(left);
    }
  };

  std::vector<double> k1a(grid_points), k1b(grid_points), kma(grid_points), kmb(grid_points),
      k2a(grid_points), k2b(grid_points);
  sources(0.0, k1a, k1b);
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    // The right-hand side does not depend on c, so the two midpoint stages coincide.
    sources(t + 0.5 * h, kma, kmb);
    sources(t + h, k2a, k2b);
    for (std::size_t k = 0; k < grid_points; ++k) {
      sol.c1[k] += h / 6.0 * (k1a[k] + 4.0 * kma[k] + k2a[k]);
      sol.c2[k] += h / 6.0 * (k1b[k] + 4.0 * kmb[k] + k2b[k]);
    }
    std::swap(k1a, k2a);
    std::swap(k1b, k2b);
  }
  return sol;
}

struct TimedState {
  double t = 0.0;
  SpinorState state;
};

/// Gauge-transformed free solution sampled at the given times.
[[nodiscard]] inline std::vector<TimedState> gauge_trajectory(const SpinorState& psi0, const GaugeFunction& chi,
                                                              const std::vector<double>& times,
                                                              std::size_t grid_points = 0) {
  std::vector<TimedState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({t, apply_gauge_solution(psi0, chi, t, grid_points)});
  return out;
}

/// max over interior samples of |i d/dt psi - (H0 - sigma3 A1 + A0) psi|, with
/// centered time differences and a spectral z-derivative.
[[nodiscard]] inline double dirac_residual(const std::vector<TimedState>& trajectory, const PotentialPair& A) {
  if (trajectory.size() < 3) throw std::invalid_argument("residual needs at least 3 time samples");
  const auto& first = trajectory.front().state.grid();
  const double L = first.L;
  const std::size_t M = first.points();
  for (const auto& s : trajectory) {
    if (s.state.grid().points() != M) throw std::invalid_argument("trajectory grids differ in size");
  }
  double worst = 0.0;
  for (std::size_t n = 1; n + 1 < trajectory.size(); ++n) {
    const auto& prev = trajectory[n - 1].state.grid();
    const auto& cur = trajectory[n].state.grid();
    const auto& next = trajectory[n + 1].state.grid();
    const double dt = trajectory[n + 1].t - trajectory[n - 1].t;
    const double t = trajectory[n].t;
    const auto a0 = A.scalar(t);
    const auto a1 = A.vector(t);
    const Eigen::VectorXcd du = fourier::spectral_derivative(cur.upper, L);
    const Eigen::VectorXcd dl = fourier::spectral_derivative(cur.lower, L);
    for (std::size_t k = 0; k < M; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double z = cur.position(k);
      const double v0 = a0.value(z);
      const double v1 = a1.value(z);
      const cplx lhs_u = cplx(0.0, 1.0) * (next.upper(i) - prev.upper(i)) / dt;
      const cplx lhs_l = cplx(0.0, 1.0) * (next.lower(i) - prev.lower(i)) / dt;
      const cplx h_u = cplx(0.0, -1.0) * du(i) + (v0 - v1) * cur.upper(i);
      const cplx h_l = cplx(0.0, 1.0) * dl(i) + (v0 + v1) * cur.lower(i);
      worst = std::max({worst, std::abs(lhs_u - h_u), std::abs(lhs_l - h_l)});
    }
  }
  return worst;
}

}  // namespace chiral

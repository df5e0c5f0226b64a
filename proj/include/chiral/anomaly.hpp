#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chiral/block_operator.hpp"
#include "chiral/fourier.hpp"
#include "chiral/lattice.hpp"
#include "chiral/spinor.hpp"
#include "chiral/trig_polynomial.hpp"

namespace chiral {

/// Raised when the cutoff is too small for the trace to be cutoff-independent.
class AdmissibilityError : public std::invalid_argument {
 public:
  AdmissibilityError(int given, int minimum)
      : std::invalid_argument("cutoff N = " + std::to_string(given) + " is inadmissible; minimum N is " +
                              std::to_string(minimum)),
        minimum_(minimum) {}
  [[nodiscard]] int minimum_cutoff() const noexcept { return minimum_; }

 private:
  int minimum_;
};

/// Raised when exp(i chi) cannot be resolved to the requested tail tolerance.
class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(double achieved, int resolution)
      : std::runtime_error("exp(i chi) coefficients did not fall below tolerance at resolution " +
                           std::to_string(resolution) + "; achieved tail bound " + std::to_string(achieved)),
        achieved_(achieved) {}
  [[nodiscard]] double achieved_tail() const noexcept { return achieved_; }

 private:
  double achieved_;
};

struct ProjectorPair {
  BlockOperator positive;
  BlockOperator negative;
};

/// Spectral projectors onto positive and negative free energies.
[[nodiscard]] inline ProjectorPair build_projectors(const MomentumLattice& lattice) {
  const auto n = static_cast<Eigen::Index>(lattice.size());
  Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd minus = Eigen::MatrixXcd::Zero(n, n);
  const auto modes = lattice.modes();
  for (Eigen::Index i = 0; i < n; ++i) {
    (modes[static_cast<std::size_t>(i)].positive_energy() ? plus : minus)(i, i) = 1.0;
  }
  return {BlockOperator(lattice, std::move(plus), true), BlockOperator(lattice, std::move(minus), true)};
}

/// Projector onto one chirality sector (+1 upper, -1 lower).
[[nodiscard]] inline BlockOperator chirality_projector(const MomentumLattice& lattice, int chirality) {
  const auto n = static_cast<Eigen::Index>(lattice.size());
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
  const auto modes = lattice.modes();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (modes[static_cast<std::size_t>(i)].chirality() == chirality) p(i, i) = 1.0;
  }
  return BlockOperator(lattice, std::move(p), true);
}

/// Multiplication by exp(i chi) on the lattice.
struct GaugeUnitary {
  TrigPolynomial chi;
  /// Fourier coefficients of exp(i chi), truncated at |m| <= bandwidth.
  TrigPolynomial symbol;
  BlockOperator V;
  int bandwidth = 0;
  /// Bound on every dropped coefficient and on the transform error of the kept ones.
  double tail_bound = 0.0;
  /// Transform length used to resolve the symbol.
  int resolution = 0;
};

namespace detail {

struct ResolvedSymbol {
  std::vector<cplx> coefficients;  // index m + bandwidth
  int bandwidth = 0;
  double tail_bound = 0.0;
  int resolution = 0;
};

/// Coefficients of exp(i chi) from a DFT whose length is at least 8x the
/// bandwidth at which they drop below tail_tol.
inline ResolvedSymbol resolve_exp_i(const TrigPolynomial& chi, double tail_tol, int max_resolution) {
  int M = std::max(64, 16 * (chi.degree() + 1));
  double achieved = std::numeric_limits<double>::infinity();
  while (M <= max_resolution) {
    std::vector<cplx> samples(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) {
      samples[static_cast<std::size_t>(k)] = std::polar(1.0, chi.value(chi.period() * k / M));
    }
    const auto spec = fourier::analyze(samples);
    auto coeff = [&](int m) { return spec[static_cast<std::size_t>(((m % M) + M) % M)]; };

    int d = 0;
    double l1 = 0.0;
    for (int m = -(M / 2) + 1; m < M / 2; ++m) {
      l1 += std::abs(coeff(m));
      if (std::abs(coeff(m)) >= tail_tol) d = std::max(d, std::abs(m));
    }
    double dropped = 0.0;
    for (int m = -(M / 2) + 1; m < M / 2; ++m) {
      if (std::abs(m) > d) dropped = std::max(dropped, std::abs(coeff(m)));
    }
    achieved = std::max(dropped, std::abs(coeff(M / 2)));
    if (M >= 8 * (d + 1)) {
      ResolvedSymbol out;
      out.bandwidth = d;
      out.resolution = M;
      out.tail_bound = std::max(dropped, std::numeric_limits<double>::epsilon() * l1);
      out.coefficients.resize(static_cast<std::size_t>(2 * d + 1));
      for (int m = -d; m <= d; ++m) out.coefficients[static_cast<std::size_t>(m + d)] = coeff(m);
      return out;
    }
    M *= 2;
  }
  throw ResolutionError(achieved, M / 2);
}

}  // namespace detail

/// Builds V = exp(i chi) on the lattice from numerically resolved coefficients.
[[nodiscard]] inline GaugeUnitary gauge_unitary(const TrigPolynomial& chi, const MomentumLattice& lattice,
                                                double tail_tol = 1e-15, int max_resolution = 1 << 20) {
  if (!chi.is_real()) throw std::invalid_argument("gauge function must be real");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail tolerance must be positive");
  if (chi.period() != lattice.circumference()) throw std::invalid_argument("gauge function period mismatch");
  auto r = detail::resolve_exp_i(chi, tail_tol, max_resolution);
  TrigPolynomial symbol(chi.period(), std::move(r.coefficients), false);
  BlockOperator V(lattice, symbol_matrix(symbol, Weight::identity, lattice));
  return GaugeUnitary{chi, std::move(symbol), std::move(V), r.bandwidth, r.tail_bound, r.resolution};
}

/// P_pm = V^dagger P_pm^0 V.
[[nodiscard]] inline ProjectorPair transformed_projectors(const GaugeUnitary& V, const ProjectorPair& P) {
  require_same_lattice(V.V.lattice(), P.positive.lattice());
  const auto& v = V.V.matrix();
  const auto& lat = P.positive.lattice();
  return {BlockOperator(lat, v.adjoint() * P.positive.matrix() * v),
          BlockOperator(lat, v.adjoint() * P.negative.matrix() * v)};
}

/// Indices of modes with |r| <= radius, in lattice order.
[[nodiscard]] inline std::vector<Eigen::Index> window_indices(const MomentumLattice& lattice, int radius) {
  std::vector<Eigen::Index> out;
  const auto modes = lattice.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (std::abs(modes[i].r) <= radius) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

/// Largest |entry| of m restricted to rows and columns in idx.
[[nodiscard]] inline double window_max_abs(const Eigen::MatrixXcd& m, const std::vector<Eigen::Index>& idx) {
  double worst = 0.0;
  for (auto i : idx) {
    for (auto j : idx) worst = std::max(worst, std::abs(m(i, j)));
  }
  return worst;
}

/// The two anomaly traces for a given operator A and transformed projectors.
struct TracePair {
  cplx plus;   // Tr(P+0 A P- P+0)
  cplx minus;  // Tr(P-0 A P+ P-0)
};

[[nodiscard]] inline TracePair anomaly_traces(const Eigen::MatrixXcd& A, const ProjectorPair& free,
                                              const ProjectorPair& moved) {
  const auto& pp0 = free.positive.matrix();
  const auto& pm0 = free.negative.matrix();
  const Eigen::MatrixXcd t_plus = pp0 * A * moved.negative.matrix() * pp0;
  const Eigen::MatrixXcd t_minus = pm0 * A * moved.positive.matrix() * pm0;
  return {t_plus.trace(), t_minus.trace()};
}

/// -(1/pi) int f chi' dz by exact coefficient arithmetic.
[[nodiscard]] inline double anomaly_closed_form(const TrigPolynomial& f, const TrigPolynomial& chi) {
  return -integrate_product(f, trig_derivative(chi)) / kPi;
}

struct AnomalyReport {
  double L = 0.0;
  int N = 0;
  int d_f = 0;
  int d_V = 0;
  double T_plus = 0.0;
  double T_minus = 0.0;
  double delta = 0.0;
  double closed_form = 0.0;
  double abs_error = 0.0;
  /// Largest imaginary part among the two traces.
  double imag_residue = 0.0;
};

/// Smallest cutoff at which every nonzero trace term lies inside the lattice.
[[nodiscard]] inline int minimum_admissible_cutoff(int d_f, int d_V) { return std::max(1, d_f + d_V); }

/// Delta_chi(sigma3 f) by explicit matrix traces on the lattice.
/// chirality = 0 uses both sectors; +1 or -1 restricts A to one sector.
[[nodiscard]] inline AnomalyReport anomaly_delta(const TrigPolynomial& f, const TrigPolynomial& chi,
                                                 const MomentumLattice& lattice, double tail_tol = 1e-15,
                                                 int chirality = 0) {
  if (!f.is_real() || !chi.is_real()) throw std::invalid_argument("anomaly inputs must be real");
  const auto V = gauge_unitary(chi, lattice, tail_tol);
  const int d_f = f.effective_degree();
  const int min_n = minimum_admissible_cutoff(d_f, V.bandwidth);
  if (lattice.cutoff() < min_n) throw AdmissibilityError(lattice.cutoff(), min_n);

  Eigen::MatrixXcd A = multiplication_operator(f, Weight::sigma3, lattice).matrix();
  if (chirality != 0) A = chirality_projector(lattice, chirality).matrix() * A;
  const auto free = build_projectors(lattice);
  const auto traces = anomaly_traces(A, free, transformed_projectors(V, free));

  AnomalyReport rep;
  rep.L = lattice.circumference();
  rep.N = lattice.cutoff();
  rep.d_f = d_f;
  rep.d_V = V.bandwidth;
  rep.T_plus = traces.plus.real();
  rep.T_minus = traces.minus.real();
  rep.delta = rep.T_plus - rep.T_minus;
  rep.closed_form = anomaly_closed_form(f, chi);
  if (chirality != 0) rep.closed_form *= 0.5;
  rep.abs_error = std::abs(rep.delta - rep.closed_form);
  rep.imag_residue = std::max(std::abs(traces.plus.imag()), std::abs(traces.minus.imag()));
  return rep;
}

enum class TraceTerm { plus, minus };

/// Position-space evaluation of one anomaly trace,
///   (1/L^2) int int dz dz' f(z) exp(-i chi(z)) exp(i chi(z')) B(z - z'),
/// with B the finite lattice sum of the two projector kernels and the double
/// integral done by the trapezoid rule on an M x M grid.
[[nodiscard]] inline double appendix_double_sum(const TrigPolynomial& f, const TrigPolynomial& chi,
                                                const MomentumLattice& lattice, int grid_points,
                                                TraceTerm term = TraceTerm::plus, double tail_tol = 1e-15) {
  if (!f.is_real() || !chi.is_real()) throw std::invalid_argument("oracle inputs must be real");
  const double L = lattice.circumference();
  if (f.period() != L || chi.period() != L) throw std::invalid_argument("period mismatch");
  const int d_V = detail::resolve_exp_i(chi, tail_tol, 1 << 20).bandwidth;
  const int min_m = 8 * (lattice.cutoff() + f.effective_degree() + d_V);
  if (grid_points < min_m) {
    throw std::invalid_argument("grid of " + std::to_string(grid_points) + " points is too small; need " +
                                std::to_string(min_m));
  }
  const int M = grid_points;

  // Kernel B at each grid offset x_j = j L / M.
  std::vector<cplx> B(static_cast<std::size_t>(M));
  const auto modes = lattice.modes();
  for (int j = 0; j < M; ++j) {
    cplx total{};
    for (int s : {+1, -1}) {
      cplx inner{};  // sum over the projector between the symbols
      cplx outer{};  // sum over the sandwiching projector
      for (const auto& m : modes) {
        if (m.chirality() != s) continue;
        const bool sandwich = term == TraceTerm::plus ? m.positive_energy() : !m.positive_energy();
        const cplx ph = detail::grid_phase(m.r, j, M);
        if (sandwich) {
          outer += std::conj(ph);
        } else {
          inner += ph;
        }
      }
      total += static_cast<double>(s) * inner * outer;
    }
    B[static_cast<std::size_t>(j)] = total;
  }

  std::vector<cplx> left(static_cast<std::size_t>(M));
  std::vector<cplx> right(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    const double z = L * k / M;
    const double c = chi.value(z);
    left[static_cast<std::size_t>(k)] = f.value(z) * std::polar(1.0, -c);
    right[static_cast<std::size_t>(k)] = std::polar(1.0, c);
  }
  cplx sum{};
  for (int k = 0; k < M; ++k) {
    cplx row{};
    for (int kp = 0; kp < M; ++kp) {
      row += right[static_cast<std::size_t>(kp)] * B[static_cast<std::size_t>(((k - kp) % M + M) % M)];
    }
    sum += left[static_cast<std::size_t>(k)] * row;
  }
  const double h = L / M;
  return (sum * h * h / (L * L)).real();
}

/// Squared Hilbert-Schmidt norms of P+0 V P-0 and P-0 V P+0.
struct HsNorms {
  double plus_minus = 0.0;
  double minus_plus = 0.0;
};

[[nodiscard]] inline HsNorms hs_offdiagonal(const GaugeUnitary& V, const ProjectorPair& P) {
  require_same_lattice(V.V.lattice(), P.positive.lattice());
  const auto& v = V.V.matrix();
  return {(P.positive.matrix() * v * P.negative.matrix()).squaredNorm(),
          (P.negative.matrix() * v * P.positive.matrix()).squaredNorm()};
}

/// Infinite-lattice value of ||P+0 V P-0||_HS^2 = sum_{m >= 1} m (|v_m|^2 + |v_{-m}|^2).
[[nodiscard]] inline double hs_symbol_sum(const GaugeUnitary& V) {
  double s = 0.0;
  for (int m = 1; m <= V.bandwidth; ++m) {
    s += m * (std::norm(V.symbol.coefficient(m)) + std::norm(V.symbol.coefficient(-m)));
  }
  return s;
}

}  // namespace chiral

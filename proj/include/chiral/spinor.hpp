#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "chiral/lattice.hpp"

namespace chiral {

/// Two spinor components sampled at z_k = k L / M, k = 0..M-1.
struct SpinorGrid {
  double L = 0.0;
  Eigen::VectorXcd upper;
  Eigen::VectorXcd lower;

  [[nodiscard]] std::size_t points() const noexcept { return static_cast<std::size_t>(upper.size()); }
  [[nodiscard]] double spacing() const noexcept { return L / static_cast<double>(points()); }
  [[nodiscard]] double position(std::size_t k) const noexcept { return spacing() * static_cast<double>(k); }

  /// Trapezoid-rule L2 norm squared; exact for band-limited densities.
  [[nodiscard]] double norm_squared() const noexcept {
    return spacing() * (upper.squaredNorm() + lower.squaredNorm());
  }
};

namespace detail {

/// exp(i 2 pi r k / M) with the phase reduced in integers first.
inline cplx grid_phase(long r, long k, long M) {
  long n = (r * k) % M;
  if (n < 0) n += M;
  return std::polar(1.0, kTwoPi * static_cast<double>(n) / static_cast<double>(M));
}

}  // namespace detail

/// One-particle state, as mode coefficients, grid samples, or both.
class SpinorState {
 public:
  [[nodiscard]] static SpinorState from_coefficients(MomentumLattice lattice, Eigen::VectorXcd c) {
    if (static_cast<std::size_t>(c.size()) != lattice.size()) {
      throw std::invalid_argument("coefficient vector does not match lattice size");
    }
    return SpinorState(std::move(lattice), std::move(c), std::nullopt);
  }

  [[nodiscard]] static SpinorState from_grid(MomentumLattice lattice, SpinorGrid grid) {
    if (grid.L != lattice.circumference() || grid.points() == 0 ||
        grid.lower.size() != grid.upper.size()) {
      throw std::invalid_argument("grid does not match lattice");
    }
    return SpinorState(std::move(lattice), std::nullopt, std::move(grid));
  }

  [[nodiscard]] const MomentumLattice& lattice() const noexcept { return lattice_; }
  [[nodiscard]] bool has_coefficients() const noexcept { return coeffs_.has_value(); }
  [[nodiscard]] bool has_grid() const noexcept { return grid_.has_value(); }

  [[nodiscard]] const Eigen::VectorXcd& coefficients() const {
    if (!coeffs_) throw std::logic_error("state has no coefficient form");
    return *coeffs_;
  }
  [[nodiscard]] const SpinorGrid& grid() const {
    if (!grid_) throw std::logic_error("state has no grid form");
    return *grid_;
  }

  [[nodiscard]] cplx coefficient(const ModeIndex& m) const {
    return coefficients()(static_cast<Eigen::Index>(lattice_.index_of(m)));
  }

  /// Adds (or replaces) the grid form rendered from the coefficients.
  /// points == 0 selects the lattice default.
  [[nodiscard]] SpinorState with_grid(std::size_t points = 0) const {
    if (points == 0) points = lattice_.default_grid_points();
    SpinorState out = *this;
    out.grid_ = render(points);
    return out;
  }

  [[nodiscard]] double norm() const {
    if (coeffs_) return coeffs_->norm();
    return std::sqrt(grid_->norm_squared());
  }

 private:
  SpinorState(MomentumLattice lattice, std::optional<Eigen::VectorXcd> c, std::optional<SpinorGrid> g)
      : lattice_(std::move(lattice)), coeffs_(std::move(c)), grid_(std::move(g)) {}

  [[nodiscard]] SpinorGrid render(std::size_t points) const {
    const auto& c = coefficients();
    const auto M = static_cast<long>(points);
    const double amp = 1.0 / std::sqrt(lattice_.circumference());
    SpinorGrid g{lattice_.circumference(), Eigen::VectorXcd::Zero(M), Eigen::VectorXcd::Zero(M)};
    const auto modes = lattice_.modes();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const cplx ci = c(static_cast<Eigen::Index>(i));
      if (ci == cplx{}) continue;
      auto& comp = modes[i].chirality() > 0 ? g.upper : g.lower;
      for (long k = 0; k < M; ++k) comp(k) += amp * ci * detail::grid_phase(modes[i].r, k, M);
    }
    return g;
  }

  MomentumLattice lattice_;
  std::optional<Eigen::VectorXcd> coeffs_;
  std::optional<SpinorGrid> grid_;
};

/// Free eigenmode (1/(2 sqrt L)) (1 + lambda sgn p, 1 - lambda sgn p)^T exp(i p z),
/// with sgn(0) = +1.
[[nodiscard]] inline SpinorState free_mode(int lambda, int r, const MomentumLattice& lattice,
                                           std::size_t grid_points = 0) {
  if (lambda != 1 && lambda != -1) throw std::invalid_argument("energy sign must be +1 or -1");
  const ModeIndex m{lambda, r};
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(lattice.size()));
  c(static_cast<Eigen::Index>(lattice.index_of(m))) = 1.0;
  return SpinorState::from_coefficients(lattice, std::move(c)).with_grid(grid_points);
}

/// Inner product <a, b> by trapezoid quadrature of the grid samples.
[[nodiscard]] inline cplx mode_overlap(const SpinorState& a, const SpinorState& b) {
  require_same_lattice(a.lattice(), b.lattice());
  const auto& ga = a.grid();
  const auto& gb = b.grid();
  if (ga.points() != gb.points()) throw std::invalid_argument("grid size mismatch");
  return ga.spacing() * (ga.upper.dot(gb.upper) + ga.lower.dot(gb.lower));
}

}  // namespace chiral

#pragma once

#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chiral {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One free Dirac mode: energy sign and integer momentum label.
///
/// The momentum sign uses sgn(0) = +1, so the two r = 0 modes land in
/// opposite chirality sectors: (+, 0) is upper, (-, 0) is lower.
struct ModeIndex {
  int lambda = +1;  // +1 positive energy, -1 negative energy
  int r = 0;

  [[nodiscard]] constexpr int momentum_sign() const noexcept { return r >= 0 ? +1 : -1; }
  /// +1 for the upper spinor component, -1 for the lower one.
  [[nodiscard]] constexpr int chirality() const noexcept { return lambda * momentum_sign(); }
  [[nodiscard]] constexpr bool positive_energy() const noexcept { return lambda > 0; }

  [[nodiscard]] double momentum(double L) const noexcept { return kTwoPi * r / L; }
  [[nodiscard]] double energy(double L) const noexcept { return lambda * std::abs(momentum(L)); }

  friend constexpr bool operator==(const ModeIndex&, const ModeIndex&) = default;
  friend constexpr auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

/// Inverse of ModeIndex::chirality for a fixed r.
[[nodiscard]] constexpr ModeIndex mode_from_chirality(int chirality, int r) noexcept {
  const int sign = r >= 0 ? +1 : -1;
  return ModeIndex{chirality * sign, r};
}

inline std::string to_string(const ModeIndex& m) {
  return std::string(m.lambda > 0 ? "+" : "-") + std::to_string(m.r);
}

/// Periodic momentum lattice p = 2 pi r / L with |r| <= N.
///
/// Modes are stored sorted by (|energy|, r, lambda). Each chirality sector
/// holds 2N + 1 modes and the full single-particle space has 2(2N + 1).
class MomentumLattice {
 public:
  MomentumLattice(double L, int N) : L_(L), N_(N) {
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw std::invalid_argument("lattice circumference must be positive and finite");
    }
    if (N < 1) {
      throw std::invalid_argument("lattice cutoff must be at least 1");
    }
    modes_.reserve(static_cast<std::size_t>(2 * (2 * N + 1)));
    modes_.push_back({-1, 0});
    modes_.push_back({+1, 0});
    for (int k = 1; k <= N; ++k) {
      for (int r : {-k, k}) {
        modes_.push_back({-1, r});
        modes_.push_back({+1, r});
      }
    }
  }

  [[nodiscard]] double circumference() const noexcept { return L_; }
  [[nodiscard]] int cutoff() const noexcept { return N_; }
  [[nodiscard]] std::size_t size() const noexcept { return modes_.size(); }
  [[nodiscard]] std::span<const ModeIndex> modes() const noexcept { return modes_; }
  [[nodiscard]] const ModeIndex& operator[](std::size_t i) const { return modes_.at(i); }

  [[nodiscard]] double momentum(int r) const noexcept { return kTwoPi * r / L_; }

  [[nodiscard]] bool contains(const ModeIndex& m) const noexcept {
    return (m.lambda == 1 || m.lambda == -1) && std::abs(m.r) <= N_;
  }

  /// Position of a mode in the sorted order.
  [[nodiscard]] std::size_t index_of(const ModeIndex& m) const {
    if (!contains(m)) {
      throw std::out_of_range("mode " + to_string(m) + " is not on the lattice");
    }
    const std::size_t lam = m.lambda > 0 ? 1 : 0;
    if (m.r == 0) return lam;
    const auto k = static_cast<std::size_t>(std::abs(m.r));
    return 2 + 4 * (k - 1) + (m.r > 0 ? 2 : 0) + lam;
  }

  /// Uniform grid size used for position-space rendering: 4x Nyquist.
  [[nodiscard]] std::size_t default_grid_points() const noexcept {
    return static_cast<std::size_t>(4 * (2 * N_ + 1));
  }

  friend bool operator==(const MomentumLattice& a, const MomentumLattice& b) noexcept {
    return a.L_ == b.L_ && a.N_ == b.N_;
  }

 private:
  double L_;
  int N_;
  std::vector<ModeIndex> modes_;
};

[[nodiscard]] inline MomentumLattice make_lattice(double L, int N) { return MomentumLattice(L, N); }

inline void require_same_lattice(const MomentumLattice& a, const MomentumLattice& b) {
  if (!(a == b)) throw std::invalid_argument("operands live on different lattices");
}

}  // namespace chiral

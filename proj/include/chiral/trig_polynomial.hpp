#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "chiral/lattice.hpp"

namespace chiral {

/// One term a * cos(2 pi k z / L + phase) of a real periodic function.
struct Harmonic {
  double amplitude = 0.0;
  int index = 0;
  double phase = 0.0;

  friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// Finite Fourier series g(z) = sum_{|m| <= d} c_m exp(i 2 pi m z / L).
///
/// Real-flagged polynomials carry Hermitian-symmetric coefficients,
/// c_{-m} = conj(c_m), which is enforced on construction.
class TrigPolynomial {
 public:
  TrigPolynomial(double L, std::vector<cplx> coefficients, bool real)
      : L_(L), coeffs_(std::move(coefficients)), real_(real) {
    if (!(L > 0.0)) throw std::invalid_argument("period must be positive");
    if (coeffs_.empty() || coeffs_.size() % 2 == 0) {
      throw std::invalid_argument("coefficient vector must have odd length 2d+1");
    }
    if (real_) {
      const int d = degree();
      for (int m = 0; m <= d; ++m) {
        const cplx a = coefficient(m);
        const cplx b = std::conj(coefficient(-m));
        if (std::abs(a - b) > 1e-14 * std::max(1.0, std::abs(a))) {
          throw std::invalid_argument("real-flagged polynomial has non-Hermitian coefficients");
        }
      }
      // Snap to exact symmetry so evaluations are real to rounding.
      for (int m = 1; m <= d; ++m) coeffs_[index(-m)] = std::conj(coeffs_[index(m)]);
      coeffs_[index(0)] = coeffs_[index(0)].real();
    }
  }

  [[nodiscard]] static TrigPolynomial constant(double L, double c) {
    return TrigPolynomial(L, {cplx(c, 0.0)}, true);
  }
  [[nodiscard]] static TrigPolynomial zero(double L) { return constant(L, 0.0); }

  /// a * cos(2 pi k z / L).
  [[nodiscard]] static TrigPolynomial cosine(double L, double a, int k) {
    return from_harmonics(L, {Harmonic{a, k, 0.0}});
  }

  /// a * sin(2 pi k z / L), with exactly imaginary coefficients.
  [[nodiscard]] static TrigPolynomial sine(double L, double a, int k) {
    if (k < 0) throw std::invalid_argument("harmonic index must be nonnegative");
    if (k == 0) return zero(L);
    std::vector<cplx> c(static_cast<std::size_t>(2 * k + 1));
    c[static_cast<std::size_t>(2 * k)] = cplx(0.0, -0.5 * a);
    c[0] = cplx(0.0, 0.5 * a);
    return TrigPolynomial(L, std::move(c), true);
  }

  /// Sum of a_j cos(2 pi k_j z / L + phi_j).
  [[nodiscard]] static TrigPolynomial from_harmonics(double L, const std::vector<Harmonic>& terms) {
    int d = 0;
    for (const auto& h : terms) {
      if (h.index < 0) throw std::invalid_argument("harmonic index must be nonnegative");
      if (!std::isfinite(h.amplitude) || !std::isfinite(h.phase)) {
        throw std::invalid_argument("harmonic amplitude and phase must be finite");
      }
      d = std::max(d, h.index);
    }
    std::vector<cplx> c(static_cast<std::size_t>(2 * d + 1));
    for (const auto& h : terms) {
      if (h.index == 0) {
        c[static_cast<std::size_t>(d)] += h.amplitude * std::cos(h.phase);
      } else {
        const cplx half = 0.5 * h.amplitude * std::polar(1.0, h.phase);
        c[static_cast<std::size_t>(d + h.index)] += half;
        c[static_cast<std::size_t>(d - h.index)] += std::conj(half);
      }
    }
    return TrigPolynomial(L, std::move(c), true);
  }

  [[nodiscard]] double period() const noexcept { return L_; }
  [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size() / 2); }
  [[nodiscard]] bool is_real() const noexcept { return real_; }

  /// Coefficient c_m; zero outside [-d, d].
  [[nodiscard]] cplx coefficient(int m) const noexcept {
    return std::abs(m) > degree() ? cplx{} : coeffs_[index(m)];
  }
  [[nodiscard]] const std::vector<cplx>& coefficients() const noexcept { return coeffs_; }

  [[nodiscard]] cplx evaluate(double z) const noexcept {
    const double u = z / L_ - std::floor(z / L_);
    cplx sum{};
    for (int m = -degree(); m <= degree(); ++m) {
      sum += coeffs_[index(m)] * std::polar(1.0, kTwoPi * m * u);
    }
    return sum;
  }

  /// Real part of evaluate(); for real-flagged polynomials only.
  [[nodiscard]] double value(double z) const {
    if (!real_) throw std::logic_error("value() requires a real-flagged polynomial");
    return evaluate(z).real();
  }

  /// Largest |m| with a nonzero coefficient.
  [[nodiscard]] int effective_degree() const noexcept {
    for (int m = degree(); m > 0; --m) {
      if (coefficient(m) != cplx{} || coefficient(-m) != cplx{}) return m;
    }
    return 0;
  }

  [[nodiscard]] TrigPolynomial scaled(double s) const {
    auto c = coeffs_;
    for (auto& x : c) x *= s;
    return TrigPolynomial(L_, std::move(c), real_);
  }

  friend TrigPolynomial operator+(const TrigPolynomial& a, const TrigPolynomial& b) {
    if (a.L_ != b.L_) throw std::invalid_argument("period mismatch");
    const int d = std::max(a.degree(), b.degree());
    std::vector<cplx> c(static_cast<std::size_t>(2 * d + 1));
    for (int m = -d; m <= d; ++m) c[static_cast<std::size_t>(m + d)] = a.coefficient(m) + b.coefficient(m);
    return TrigPolynomial(a.L_, std::move(c), a.real_ && b.real_);
  }

 private:
  [[nodiscard]] std::size_t index(int m) const noexcept {
    return static_cast<std::size_t>(m + degree());
  }

  double L_;
  std::vector<cplx> coeffs_;
  bool real_;
};

/// Coefficient-wise d/dz: c_m -> (i 2 pi m / L) c_m.
[[nodiscard]] inline TrigPolynomial trig_derivative(const TrigPolynomial& g) {
  const int d = g.degree();
  std::vector<cplx> c(static_cast<std::size_t>(2 * d + 1));
  for (int m = -d; m <= d; ++m) {
    c[static_cast<std::size_t>(m + d)] = cplx(0.0, kTwoPi * m / g.period()) * g.coefficient(m);
  }
  return TrigPolynomial(g.period(), std::move(c), g.is_real());
}

/// Exact integral of f * g over one period: L * sum_m f_m g_{-m}.
[[nodiscard]] inline double integrate_product(const TrigPolynomial& f, const TrigPolynomial& g) {
  if (!f.is_real() || !g.is_real()) {
    throw std::invalid_argument("integrate_product requires real-flagged polynomials");
  }
  if (f.period() != g.period()) throw std::invalid_argument("period mismatch");
  const int d = std::min(f.degree(), g.degree());
  cplx sum{};
  for (int m = -d; m <= d; ++m) sum += f.coefficient(m) * g.coefficient(-m);
  return f.period() * sum.real();
}

}  // namespace chiral

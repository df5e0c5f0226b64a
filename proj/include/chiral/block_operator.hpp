#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "chiral/lattice.hpp"
#include "chiral/trig_polynomial.hpp"

namespace chiral {

enum class Weight { identity, sigma3 };

/// Lattice positions of the modes with the given energy sign, in lattice order.
[[nodiscard]] inline std::vector<Eigen::Index> energy_indices(const MomentumLattice& lattice, int lambda) {
  std::vector<Eigen::Index> out;
  const auto modes = lattice.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].lambda == lambda) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

/// Dense single-particle operator in the free mode basis.
class BlockOperator {
 public:
  BlockOperator(MomentumLattice lattice, Eigen::MatrixXcd matrix, bool hermitian = false)
      : lattice_(std::move(lattice)), matrix_(std::move(matrix)), hermitian_(hermitian) {
    const auto n = static_cast<Eigen::Index>(lattice_.size());
    if (matrix_.rows() != n || matrix_.cols() != n) {
      throw std::invalid_argument("operator shape does not match lattice");
    }
    if (hermitian_ && (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-13) {
      throw std::invalid_argument("operator flagged Hermitian is not");
    }
  }

  [[nodiscard]] static BlockOperator identity(const MomentumLattice& lattice) {
    const auto n = static_cast<Eigen::Index>(lattice.size());
    return BlockOperator(lattice, Eigen::MatrixXcd::Identity(n, n), true);
  }

  [[nodiscard]] const MomentumLattice& lattice() const noexcept { return lattice_; }
  [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  [[nodiscard]] bool hermitian() const noexcept { return hermitian_; }

  [[nodiscard]] cplx operator()(const ModeIndex& a, const ModeIndex& b) const {
    return matrix_(static_cast<Eigen::Index>(lattice_.index_of(a)),
                   static_cast<Eigen::Index>(lattice_.index_of(b)));
  }

  /// A^{row,col}_{nm} = <phi_{row,n}, A phi_{col,m}>, rows and columns in lattice order.
  [[nodiscard]] Eigen::MatrixXcd block(int row_lambda, int col_lambda) const {
    const auto rows = energy_indices(lattice_, row_lambda);
    const auto cols = energy_indices(lattice_, col_lambda);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = matrix_(rows[i], cols[j]);
      }
    }
    return out;
  }

  [[nodiscard]] BlockOperator adjoint() const {
    return BlockOperator(lattice_, matrix_.adjoint(), hermitian_);
  }

  friend BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
    require_same_lattice(a.lattice_, b.lattice_);
    return BlockOperator(a.lattice_, a.matrix_ * b.matrix_);
  }

 private:
  MomentumLattice lattice_;
  Eigen::MatrixXcd matrix_;
  bool hermitian_;
};

/// Matrix of multiplication by a (possibly complex) periodic symbol:
/// entry (a, b) = delta_{s_a s_b} w(s_a) g_{r_a - r_b}.
[[nodiscard]] inline Eigen::MatrixXcd symbol_matrix(const TrigPolynomial& g, Weight weight,
                                                    const MomentumLattice& lattice) {
  if (g.period() != lattice.circumference()) {
    throw std::invalid_argument("function period does not match lattice circumference");
  }
  const auto modes = lattice.modes();
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = modes[static_cast<std::size_t>(i)];
    const double w = weight == Weight::sigma3 ? a.chirality() : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& b = modes[static_cast<std::size_t>(j)];
      if (a.chirality() != b.chirality()) continue;
      m(i, j) = w * g.coefficient(a.r - b.r);
    }
  }
  return m;
}

/// Multiplication by a real function g, optionally weighted by sigma_3.
[[nodiscard]] inline BlockOperator multiplication_operator(const TrigPolynomial& g, Weight weight,
                                                           const MomentumLattice& lattice) {
  if (!g.is_real()) throw std::invalid_argument("multiplication operator needs a real function");
  if (lattice.cutoff() < g.effective_degree()) {
    throw std::invalid_argument("lattice cutoff is below the function degree");
  }
  return BlockOperator(lattice, symbol_matrix(g, weight, lattice), true);
}

}  // namespace chiral

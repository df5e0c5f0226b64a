#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chiral/anomaly.hpp"
#include "chiral/block_operator.hpp"
#include "chiral/lattice.hpp"

namespace chiral {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr std::size_t kMaxFockModes = 12;

/// A single-particle matrix on an ordered list of modes.
struct SubsetOperator {
  std::vector<ModeIndex> modes;
  Eigen::MatrixXcd matrix;
};

/// Compression P_S A P_S of a lattice operator onto the listed modes.
[[nodiscard]] inline SubsetOperator restrict_to(const BlockOperator& A, const std::vector<ModeIndex>& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = A(modes[static_cast<std::size_t>(i)], modes[static_cast<std::size_t>(j)]);
    }
  }
  return {modes, std::move(m)};
}

/// All modes with the given r values, both energy signs, in lattice order.
[[nodiscard]] inline std::vector<ModeIndex> modes_with_momenta(const MomentumLattice& lattice,
                                                              const std::vector<int>& rs) {
  std::vector<ModeIndex> out;
  for (const auto& m : lattice.modes()) {
    if (std::find(rs.begin(), rs.end(), m.r) != rs.end()) out.push_back(m);
  }
  return out;
}

/// Fermionic Fock space over a finite list of modes.
///
/// Basis states are occupation bit strings, bit i for mode i of the list
/// (little-endian). A set bit means a particle (b) on a positive-energy mode
/// or an antiparticle (d) on a negative-energy mode, so index 0 is the
/// vacuum. Annihilators carry the Jordan-Wigner sign (-1)^(occupied modes
/// earlier in the list).
class FockSpace {
 public:
  FockSpace(MomentumLattice lattice, std::vector<ModeIndex> modes)
      : lattice_(std::move(lattice)), modes_(std::move(modes)) {
    if (modes_.empty() || modes_.size() > kMaxFockModes) {
      throw std::invalid_argument("Fock space needs between 1 and " + std::to_string(kMaxFockModes) +
                                  " modes, got " + std::to_string(modes_.size()));
    }
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (!lattice_.contains(modes_[i])) {
        throw std::invalid_argument("mode " + to_string(modes_[i]) + " is not on the lattice");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (modes_[i] == modes_[j]) throw std::invalid_argument("duplicate mode " + to_string(modes_[i]));
      }
    }
    const std::size_t n = modes_.size();
    dim_ = std::size_t{1} << n;
    annihilators_.reserve(n);
    fields_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Eigen::Triplet<cplx>> trips;
      trips.reserve(dim_ / 2);
      for (std::size_t s = 0; s < dim_; ++s) {
        if (!((s >> i) & 1U)) continue;
        const auto below = static_cast<unsigned>(std::popcount(s & ((std::size_t{1} << i) - 1)));
        trips.emplace_back(static_cast<int>(s ^ (std::size_t{1} << i)), static_cast<int>(s),
                           (below % 2 == 0) ? 1.0 : -1.0);
      }
      SparseMatrix c(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
      c.setFromTriplets(trips.begin(), trips.end());
      fields_.push_back(modes_[i].positive_energy() ? SparseMatrix(c) : SparseMatrix(c.adjoint()));
      annihilators_.push_back(std::move(c));
      (modes_[i].positive_energy() ? n_plus_ : n_minus_) += 1;
    }
  }

  [[nodiscard]] const MomentumLattice& lattice() const noexcept { return lattice_; }
  [[nodiscard]] const std::vector<ModeIndex>& modes() const noexcept { return modes_; }
  [[nodiscard]] std::size_t mode_count() const noexcept { return modes_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
  [[nodiscard]] int n_plus() const noexcept { return n_plus_; }
  [[nodiscard]] int n_minus() const noexcept { return n_minus_; }
  [[nodiscard]] bool is_particle_mode(std::size_t i) const { return modes_.at(i).positive_energy(); }

  /// b_i for positive-energy modes, d_i for negative-energy modes.
  [[nodiscard]] const SparseMatrix& annihilator(std::size_t i) const { return annihilators_.at(i); }
  [[nodiscard]] SparseMatrix creator(std::size_t i) const { return annihilators_.at(i).adjoint(); }
  /// Field component a_i: b_i on positive-energy modes, d_i^dagger on negative-energy modes.
  [[nodiscard]] const SparseMatrix& field_mode(std::size_t i) const { return fields_.at(i); }

  [[nodiscard]] SparseMatrix identity() const {
    SparseMatrix id(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    id.setIdentity();
    return id;
  }

  [[nodiscard]] Eigen::VectorXcd vacuum() const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_));
    v(0) = 1.0;
    return v;
  }

  /// Eigenvalue of sum_i a_i^dagger a_i on a basis state; conserved by every dGamma.
  [[nodiscard]] int field_number(std::size_t state) const noexcept {
    int count = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      const bool occupied = (state >> i) & 1U;
      count += modes_[i].positive_energy() ? occupied : !occupied;
    }
    return count;
  }

  void require_modes(const std::vector<ModeIndex>& modes) const {
    if (modes != modes_) throw std::invalid_argument("operator mode support does not match the Fock space");
  }

 private:
  MomentumLattice lattice_;
  std::vector<ModeIndex> modes_;
  std::size_t dim_ = 0;
  int n_plus_ = 0;
  int n_minus_ = 0;
  std::vector<SparseMatrix> annihilators_;
  std::vector<SparseMatrix> fields_;
};

[[nodiscard]] inline FockSpace build_fock(const MomentumLattice& lattice, std::vector<ModeIndex> modes) {
  return FockSpace(lattice, std::move(modes));
}

/// dGamma(M) = sum_ij a_i^dagger M_ij a_j, not normal-ordered.
[[nodiscard]] inline SparseMatrix second_quantize(const Eigen::MatrixXcd& M, const FockSpace& F) {
  const auto n = static_cast<Eigen::Index>(F.mode_count());
  if (M.rows() != n || M.cols() != n) throw std::invalid_argument("matrix does not match Fock modes");
  SparseMatrix out(static_cast<Eigen::Index>(F.dimension()), static_cast<Eigen::Index>(F.dimension()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const SparseMatrix ai_dag = F.field_mode(static_cast<std::size_t>(i)).adjoint();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (M(i, j) == cplx{}) continue;
      out += M(i, j) * (ai_dag * F.field_mode(static_cast<std::size_t>(j)));
    }
  }
  out.prune(cplx{});
  return out;
}

/// Sum of A_ii over negative-energy modes, i.e. Tr(A^{--}).
[[nodiscard]] inline cplx negative_block_trace(const Eigen::MatrixXcd& A, const std::vector<ModeIndex>& modes) {
  cplx t{};
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (!modes[i].positive_energy()) t += A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  }
  return t;
}

/// Normal-ordered charge Q(A) = dGamma(A) - Tr(A^{--}) 1, so <Omega0, Q Omega0> = 0.
[[nodiscard]] inline SparseMatrix charge_operator(const SubsetOperator& A, const FockSpace& F) {
  F.require_modes(A.modes);
  return second_quantize(A.matrix, F) - negative_block_trace(A.matrix, A.modes) * F.identity();
}

/// psi(f) = sum_i conj(f_i) a_i for f given in the Fock mode coordinates.
[[nodiscard]] inline SparseMatrix field_operator(const Eigen::VectorXcd& f, const FockSpace& F) {
  if (static_cast<std::size_t>(f.size()) != F.mode_count()) throw std::invalid_argument("field vector size");
  SparseMatrix out(static_cast<Eigen::Index>(F.dimension()), static_cast<Eigen::Index>(F.dimension()));
  for (std::size_t i = 0; i < F.mode_count(); ++i) {
    const cplx c = std::conj(f(static_cast<Eigen::Index>(i)));
    if (c != cplx{}) out += c * F.field_mode(i);
  }
  return out;
}

/// Closest unitary (polar factor) and max |1 - sigma_i| of the input.
struct PolarFactor {
  Eigen::MatrixXcd unitary;
  double defect = 0.0;
};

[[nodiscard]] inline PolarFactor polar_unitary(const Eigen::MatrixXcd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double defect = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) defect = std::max(defect, std::abs(1.0 - s(i)));
  return {svd.matrixU() * svd.matrixV().adjoint(), defect};
}

/// Hermitian K with exp(iK) = U, eigenphases in (-pi, pi].
[[nodiscard]] inline Eigen::MatrixXcd unitary_log(const Eigen::MatrixXcd& U) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(U);
  const auto& T = schur.matrixT();
  const auto& Z = schur.matrixU();
  Eigen::VectorXcd phases(T.rows());
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    double a = std::arg(T(i, i));
    if (a <= -kPi) a = kPi;
    phases(i) = a;
  }
  Eigen::MatrixXcd K = Z * phases.asDiagonal() * Z.adjoint();
  return 0.5 * (K + K.adjoint());
}

struct LiftedUnitary {
  std::vector<ModeIndex> modes;
  Eigen::MatrixXcd U;
  Eigen::MatrixXcd K;
  /// exp(i dGamma(K)); block diagonal in field number.
  SparseMatrix gamma;
  double polar_defect = 0.0;
};

inline constexpr double kMaxPolarDefect = 0.1;

/// Gamma(U) = exp(i dGamma(K)) with U = exp(iK), after replacing U by its polar factor.
[[nodiscard]] inline LiftedUnitary lift_unitary(const SubsetOperator& U0, const FockSpace& F) {
  F.require_modes(U0.modes);
  auto polar = polar_unitary(U0.matrix);
  if (polar.defect > kMaxPolarDefect) {
    throw std::invalid_argument("restricted unitary is too far from unitary (defect " +
                                std::to_string(polar.defect) + "); enlarge the mode subset");
  }
  LiftedUnitary out;
  out.modes = U0.modes;
  out.U = std::move(polar.unitary);
  out.K = unitary_log(out.U);
  out.polar_defect = polar.defect;

  const SparseMatrix H = second_quantize(out.K, F);
  std::map<int, std::vector<Eigen::Index>> sectors;
  std::vector<Eigen::Index> local(F.dimension());
  for (std::size_t s = 0; s < F.dimension(); ++s) {
    auto& idx = sectors[F.field_number(s)];
    local[s] = static_cast<Eigen::Index>(idx.size());
    idx.push_back(static_cast<Eigen::Index>(s));
  }
  std::map<int, Eigen::MatrixXcd> blocks;
  for (const auto& [number, idx] : sectors) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    blocks[number] = Eigen::MatrixXcd::Zero(k, k);
  }
  for (Eigen::Index c = 0; c < H.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(H, c); it; ++it) {
      const auto row = static_cast<std::size_t>(it.row());
      const auto col = static_cast<std::size_t>(it.col());
      const int number = F.field_number(row);
      if (number != F.field_number(col)) throw std::logic_error("dGamma(K) mixes field-number sectors");
      blocks[number](local[row], local[col]) = it.value();
    }
  }
  std::vector<Eigen::Triplet<cplx>> trips;
  for (const auto& [number, idx] : sectors) {
    const auto& block = blocks[number];
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (block + block.adjoint()));
    Eigen::VectorXcd ph(k);
    for (Eigen::Index a = 0; a < k; ++a) ph(a) = std::polar(1.0, es.eigenvalues()(a));
    const Eigen::MatrixXcd G = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) {
        if (G(a, b) != cplx{}) trips.emplace_back(static_cast<int>(idx[a]), static_cast<int>(idx[b]), G(a, b));
      }
    }
  }
  out.gamma = SparseMatrix(static_cast<Eigen::Index>(F.dimension()), static_cast<Eigen::Index>(F.dimension()));
  out.gamma.setFromTriplets(trips.begin(), trips.end());
  return out;
}

[[nodiscard]] inline LiftedUnitary lift_unitary(const GaugeUnitary& V, const FockSpace& F) {
  require_same_lattice(V.V.lattice(), F.lattice());
  return lift_unitary(restrict_to(V.V, F.modes()), F);
}

/// Delta(A) = Tr(P+0 A P- P+0) - Tr(P-0 A P+ P-0) with P_pm = U^dagger P_pm^0 U
/// on a finite mode list.
struct FiniteDelta {
  double value = 0.0;
  /// Tr(A (P- - P-0)), equal to value for unitary U.
  double simplified = 0.0;
};

[[nodiscard]] inline FiniteDelta finite_delta(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& U,
                                              const std::vector<ModeIndex>& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  if (A.rows() != n || U.rows() != n || A.cols() != n || U.cols() != n) {
    throw std::invalid_argument("finite_delta: matrix sizes do not match mode list");
  }
  Eigen::MatrixXcd pp0 = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (modes[static_cast<std::size_t>(i)].positive_energy()) pp0(i, i) = 1.0;
  }
  const Eigen::MatrixXcd pm0 = Eigen::MatrixXcd::Identity(n, n) - pp0;
  const Eigen::MatrixXcd pp = U.adjoint() * pp0 * U;
  const Eigen::MatrixXcd pm = U.adjoint() * pm0 * U;
  const cplx two_trace = (pp0 * A * pm * pp0).trace() - (pm0 * A * pp * pm0).trace();
  const cplx simple = (A * (pm - pm0)).trace();
  if (std::abs(two_trace - simple) > 1e-12) {
    throw std::logic_error("finite_delta: two-trace form and Tr(A(P- - P-0)) disagree by " +
                           std::to_string(std::abs(two_trace - simple)));
  }
  return {two_trace.real(), simple.real()};
}

[[nodiscard]] inline FiniteDelta finite_delta(const SubsetOperator& A, const LiftedUnitary& G) {
  if (A.modes != G.modes) throw std::invalid_argument("finite_delta: mode lists differ");
  return finite_delta(A.matrix, G.U, A.modes);
}

/// Residuals of Gamma Q(A) Gamma^dagger = Q(U A U^dagger) + Delta(A) 1.
struct IdentityResidual {
  int n_plus = 0;
  int n_minus = 0;
  std::size_t dim = 0;
  /// ||Gamma Q Gamma^dagger - Q(U A U^dagger) - Delta 1||.
  double residual = 0.0;
  /// Trace-average of Gamma Q Gamma^dagger - Q(U A U^dagger).
  double closing_scalar = 0.0;
  /// ||Gamma Q Gamma^dagger - Q(U A U^dagger) - closing_scalar 1||.
  double off_identity = 0.0;
  double delta = 0.0;
  double polar_defect = 0.0;
  /// True when norms are exact operator norms; false means Frobenius upper bounds.
  bool operator_norm = true;
};

inline constexpr std::size_t kDenseNormLimit = 1024;

/// Operator norm of a Hermitian matrix, or its Frobenius norm above kDenseNormLimit.
[[nodiscard]] inline double hermitian_norm(const SparseMatrix& R, bool& exact) {
  if (static_cast<std::size_t>(R.rows()) <= kDenseNormLimit) {
    const Eigen::MatrixXcd d(R);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    exact = true;
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  exact = false;
  return R.norm();
}

[[nodiscard]] inline IdentityResidual conjugation_identity_check(const SubsetOperator& A, const LiftedUnitary& G,
                                                                 const FockSpace& F) {
  F.require_modes(A.modes);
  F.require_modes(G.modes);
  const SparseMatrix lhs = G.gamma * charge_operator(A, F) * SparseMatrix(G.gamma.adjoint());
  const SubsetOperator moved{A.modes, G.U * A.matrix * G.U.adjoint()};
  const SparseMatrix diff = lhs - charge_operator(moved, F);

  IdentityResidual out;
  out.n_plus = F.n_plus();
  out.n_minus = F.n_minus();
  out.dim = F.dimension();
  out.polar_defect = G.polar_defect;
  out.delta = finite_delta(A, G).value;
  cplx tr{};
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) tr += diff.coeff(k, k);
  out.closing_scalar = tr.real() / static_cast<double>(F.dimension());
  bool exact_a = true;
  bool exact_b = true;
  out.residual = hermitian_norm(SparseMatrix(diff - out.delta * F.identity()), exact_a);
  out.off_identity = hermitian_norm(SparseMatrix(diff - out.closing_scalar * F.identity()), exact_b);
  out.operator_norm = exact_a && exact_b;
  return out;
}

[[nodiscard]] inline IdentityResidual conjugation_identity_check(const SubsetOperator& A, const GaugeUnitary& V,
                                                                 const FockSpace& F) {
  return conjugation_identity_check(A, lift_unitary(V, F), F);
}

}  // namespace chiral

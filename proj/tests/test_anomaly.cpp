#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chiral/anomaly.hpp"

using namespace chiral;

namespace {

double bessel_j(int n, double a) {
  const double j = std::cyl_bessel_j(std::abs(n), a);
  return (n < 0 && (n % 2)) ? -j : j;
}

// exp(i a sin(2 pi z / L)) on the lattice, from Bessel coefficients.
Eigen::MatrixXcd bessel_gauge_matrix(const MomentumLattice& lat, double a) {
  const auto n = static_cast<Eigen::Index>(lat.size());
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n, n);
  const auto modes = lat.modes();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& mi = modes[static_cast<std::size_t>(i)];
      const auto& mj = modes[static_cast<std::size_t>(j)];
      if (mi.chirality() == mj.chirality()) V(i, j) = bessel_j(mi.r - mj.r, a);
    }
  }
  return V;
}

// -(1/pi) int f chi' dz by trapezoid quadrature of point values.
double quadrature_closed_form(const TrigPolynomial& f, const TrigPolynomial& chi) {
  const double L = f.period();
  const int M = 512;
  const double h = L / M;
  double s = 0.0;
  for (int k = 0; k < M; ++k) {
    const double z = h * k;
    const double e = 1e-3;
    const double dchi =
        (8.0 * (chi.value(z + e) - chi.value(z - e)) - (chi.value(z + 2 * e) - chi.value(z - 2 * e))) / (12.0 * e);
    s += f.value(z) * dchi;
  }
  return -s * h / kPi;
}

TrigPolynomial random_poly(double L, int degree, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Harmonic> hs;
  for (int k = 0; k <= degree; ++k) hs.push_back({scale * u(rng), k, kPi * u(rng)});
  return TrigPolynomial::from_harmonics(L, hs);
}

}  // namespace

TEST(Projectors, CompleteAndOrthogonal) {
  const auto lat = make_lattice(kTwoPi, 3);
  const auto P = build_projectors(lat);
  EXPECT_NEAR(P.positive.matrix().trace().real(), 7.0, 0.0);
  EXPECT_NEAR(P.negative.matrix().trace().real(), 7.0, 0.0);
  EXPECT_TRUE((P.positive.matrix() + P.negative.matrix()).isIdentity(0.0));
  EXPECT_TRUE((P.positive.matrix() * P.negative.matrix()).isZero(0.0));
  EXPECT_TRUE((P.positive.matrix() * P.positive.matrix() - P.positive.matrix()).isZero(0.0));
}

TEST(Projectors, ChiralitySectors) {
  const auto lat = make_lattice(kTwoPi, 4);
  const auto up = chirality_projector(lat, +1).matrix();
  const auto down = chirality_projector(lat, -1).matrix();
  EXPECT_TRUE((up + down).isIdentity(0.0));
  EXPECT_NEAR(up.trace().real(), 9.0, 0.0);
}

TEST(GaugeUnitary, CoefficientsMatchBessel) {
  const auto lat = make_lattice(kTwoPi, 24);
  for (double a : {0.1, 0.7, 1.0, 2.5}) {
    const auto V = gauge_unitary(TrigPolynomial::sine(kTwoPi, a, 1), lat);
    for (int m = -V.bandwidth - 3; m <= V.bandwidth + 3; ++m) {
      EXPECT_NEAR(std::abs(V.symbol.coefficient(m) - bessel_j(m, a)), 0.0, 2e-15) << "a=" << a << " m=" << m;
    }
    EXPECT_LT(std::abs(bessel_j(V.bandwidth + 1, a)), 1e-15);
    EXPECT_GE(std::abs(bessel_j(V.bandwidth, a)), 1e-15);
    EXPECT_GE(V.resolution, 8 * (V.bandwidth + 1));
  }
  EXPECT_EQ(gauge_unitary(TrigPolynomial::sine(kTwoPi, 0.7, 1), lat).bandwidth, 12);
}

TEST(GaugeUnitary, UnitaryOnInnerWindow) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 4; ++trial) {
    const double L = 3.0 + trial;
    const auto lat = make_lattice(L, 40);
    const auto V = gauge_unitary(random_poly(L, 2, 0.5, rng), lat);
    const Eigen::MatrixXcd vv = V.V.matrix().adjoint() * V.V.matrix() -
                                Eigen::MatrixXcd::Identity(V.V.matrix().rows(), V.V.matrix().cols());
    const auto idx = window_indices(lat, lat.cutoff() - V.bandwidth);
    EXPECT_LE(window_max_abs(vv, idx), 10 * V.tail_bound);
  }
}

TEST(GaugeUnitary, Rejections) {
  const auto lat = make_lattice(kTwoPi, 8);
  EXPECT_THROW((void)gauge_unitary(TrigPolynomial::sine(1.0, 1.0, 1), lat), std::invalid_argument);
  EXPECT_THROW((void)gauge_unitary(TrigPolynomial::sine(kTwoPi, 1.0, 1), lat, 0.0), std::invalid_argument);
  EXPECT_THROW((void)gauge_unitary(TrigPolynomial::sine(kTwoPi, 200.0, 1), lat, 1e-15, 256), ResolutionError);
}

TEST(TransformedProjectors, IdempotentOnInnerWindow) {
  const auto lat = make_lattice(kTwoPi, 40);
  const auto V = gauge_unitary(TrigPolynomial::from_harmonics(kTwoPi, {{0.6, 1, 0.0}, {0.3, 2, 1.0}}), lat);
  const auto P0 = build_projectors(lat);
  const auto P = transformed_projectors(V, P0);
  const auto& pp = P.positive.matrix();
  const auto& pm = P.negative.matrix();
  const auto idx = window_indices(lat, lat.cutoff() - 2 * V.bandwidth);
  const auto n = pp.rows();
  EXPECT_LE(window_max_abs(pp * pp - pp, idx), 1e-13);
  EXPECT_LE(window_max_abs(pm * pm - pm, idx), 1e-13);
  EXPECT_LE(window_max_abs(pp + pm - Eigen::MatrixXcd::Identity(n, n), idx), 1e-13);
  EXPECT_LE(window_max_abs(pp * pm, idx), 1e-13);
  EXPECT_LE((pp - pp.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AnomalyDelta, MatchesBesselTraceOracle) {
  for (double a : {0.3, 1.0}) {
    const auto lat = make_lattice(kTwoPi, 24);
    const Eigen::MatrixXcd V = bessel_gauge_matrix(lat, a);
    const auto P0 = build_projectors(lat);
    const Eigen::MatrixXcd pm = V.adjoint() * P0.negative.matrix() * V;
    const Eigen::MatrixXcd pp = V.adjoint() * P0.positive.matrix() * V;
    const Eigen::MatrixXcd A =
        multiplication_operator(TrigPolynomial::cosine(kTwoPi, 1.0, 1), Weight::sigma3, lat).matrix();
    const cplx t_plus = (P0.positive.matrix() * A * pm * P0.positive.matrix()).trace();
    const cplx t_minus = (P0.negative.matrix() * A * pp * P0.negative.matrix()).trace();
    const auto rep = anomaly_delta(TrigPolynomial::cosine(kTwoPi, 1.0, 1), TrigPolynomial::sine(kTwoPi, a, 1), lat);
    EXPECT_NEAR(rep.T_plus, t_plus.real(), 1e-13);
    EXPECT_NEAR(rep.T_minus, t_minus.real(), 1e-13);
    EXPECT_NEAR((t_plus - t_minus).real(), -a, 1e-12);
  }
}

TEST(AnomalyDelta, HeadlineValues) {
  const auto f = TrigPolynomial::cosine(kTwoPi, 1.0, 1);
  for (double a : {0.1, 0.3, 0.7, 1.0}) {
    for (int N : {24, 32, 48}) {
      const auto rep = anomaly_delta(f, TrigPolynomial::sine(kTwoPi, a, 1), make_lattice(kTwoPi, N));
      EXPECT_NEAR(rep.delta, -a, 1e-9) << "a=" << a << " N=" << N;
      EXPECT_NEAR(rep.T_plus, -a / 2, 1e-9);
      EXPECT_NEAR(rep.T_minus, a / 2, 1e-9);
    }
  }
}

TEST(AnomalyDelta, ConstantProfilesGiveZero) {
  const auto lat = make_lattice(kTwoPi, 16);
  const auto rep = anomaly_delta(TrigPolynomial::constant(kTwoPi, 1.0), TrigPolynomial::sine(kTwoPi, 0.5, 1), lat);
  EXPECT_NEAR(rep.delta, 0.0, 1e-13);
  const auto flat = anomaly_delta(TrigPolynomial::cosine(kTwoPi, 1.0, 1), TrigPolynomial::constant(kTwoPi, 0.4), lat);
  EXPECT_NEAR(flat.delta, 0.0, 1e-13);
  EXPECT_EQ(flat.d_V, 0);
}

TEST(AnomalyDelta, InadmissibleCutoffReportsMinimum) {
  const auto f = TrigPolynomial::cosine(kTwoPi, 1.0, 1);
  const auto chi = TrigPolynomial::sine(kTwoPi, 1.0, 1);
  int d_V = 0;
  while (std::abs(bessel_j(d_V + 1, 1.0)) >= 1e-15) ++d_V;
  const int minimum = 1 + d_V;
  try {
    (void)anomaly_delta(f, chi, make_lattice(kTwoPi, 4));
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.minimum_cutoff(), minimum);
    EXPECT_NE(std::string(e.what()).find("minimum N is " + std::to_string(minimum)), std::string::npos);
  }
  EXPECT_THROW((void)anomaly_delta(f, chi, make_lattice(kTwoPi, minimum - 1)), AdmissibilityError);
  EXPECT_NO_THROW((void)anomaly_delta(f, chi, make_lattice(kTwoPi, minimum)));
}

TEST(AnomalyClosedForm, AgreesWithQuadrature) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const double L = 2.0 + trial;
    const auto f = random_poly(L, 3, 1.0, rng);
    const auto chi = random_poly(L, 3, 1.0, rng);
    EXPECT_NEAR(anomaly_closed_form(f, chi), quadrature_closed_form(f, chi), 1e-7);
  }
  EXPECT_NEAR(anomaly_closed_form(TrigPolynomial::cosine(kTwoPi, 1, 1), TrigPolynomial::sine(kTwoPi, 0.7, 1)), -0.7,
              1e-15);
}

TEST(AppendixOracle, PlusTermAgreesWithTrace) {
  const auto lat = make_lattice(kTwoPi, 24);
  const auto f = TrigPolynomial::cosine(kTwoPi, 1.0, 1);
  const auto chi = TrigPolynomial::sine(kTwoPi, 0.7, 1);
  const double oracle = appendix_double_sum(f, chi, lat, 320);
  const auto rep = anomaly_delta(f, chi, lat);
  EXPECT_NEAR(oracle, -0.35, 1e-8);
  EXPECT_NEAR(oracle, rep.T_plus, 1e-8);
  const double minus = appendix_double_sum(f, chi, lat, 320, TraceTerm::minus);
  EXPECT_NEAR(minus, 0.35, 1e-8);
  EXPECT_NEAR(minus, rep.T_minus, 1e-8);
}

TEST(AppendixOracle, GeneralProfiles) {
  const double L = 5.0;
  const auto lat = make_lattice(L, 20);
  const auto f = TrigPolynomial::from_harmonics(L, {{0.2, 0, 0}, {0.9, 1, 0.4}, {0.5, 2, -1.0}});
  const auto chi = TrigPolynomial::from_harmonics(L, {{0.3, 1, 0.1}, {0.2, 2, 2.0}});
  const auto rep = anomaly_delta(f, chi, lat);
  const double oracle = appendix_double_sum(f, chi, lat, 8 * (20 + 2 + rep.d_V));
  EXPECT_NEAR(oracle, rep.T_plus, 1e-10);
  EXPECT_NEAR(oracle, rep.closed_form / 2, 1e-10);
}

TEST(AppendixOracle, RejectsCoarseGrid) {
  const auto lat = make_lattice(kTwoPi, 24);
  EXPECT_THROW((void)appendix_double_sum(TrigPolynomial::cosine(kTwoPi, 1, 1), TrigPolynomial::sine(kTwoPi, 0.7, 1),
                                         lat, 100),
               std::invalid_argument);
}

TEST(HilbertSchmidt, MatchesBesselSumAndPlateaus) {
  for (double a : {0.2, 0.4, 0.8}) {
    double oracle = 0.0;
    for (int m = 1; m < 60; ++m) oracle += 2.0 * m * std::pow(std::cyl_bessel_j(m, a), 2);
    const auto chi = TrigPolynomial::sine(kTwoPi, a, 1);
    for (int N : {8, 16, 32}) {
      const auto lat = make_lattice(kTwoPi, N);
      const auto V = gauge_unitary(chi, lat);
      if (N < V.bandwidth) continue;
      const auto hs = hs_offdiagonal(V, build_projectors(lat));
      EXPECT_NEAR(hs.plus_minus, oracle, 1e-12) << "a=" << a << " N=" << N;
      EXPECT_NEAR(hs.minus_plus, hs.plus_minus, 1e-14);
      EXPECT_NEAR(hs_symbol_sum(V), oracle, 1e-13);
    }
  }
}

TEST(HilbertSchmidt, GrowsWithAmplitude) {
  const auto lat = make_lattice(kTwoPi, 40);
  const auto P = build_projectors(lat);
  double prev = 0.0;
  for (double a : {0.0, 0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double hs = hs_offdiagonal(gauge_unitary(TrigPolynomial::sine(kTwoPi, a, 1), lat), P).plus_minus;
    EXPECT_GE(hs, prev);
    prev = hs;
  }
  EXPECT_EQ(hs_offdiagonal(gauge_unitary(TrigPolynomial::zero(kTwoPi), lat), P).plus_minus, 0.0);
}

// Random (f, chi) of degree <= 4.
class AnomalyProperties : public ::testing::TestWithParam<int> {};

TEST_P(AnomalyProperties, Invariants) {
  std::mt19937_64 rng(1000 + GetParam());
  const double L = 2.0 + 0.5 * GetParam();
  const int df = 1 + GetParam() % 4;
  const int dchi = 1 + (GetParam() / 2) % 4;
  const auto f = random_poly(L, df, 1.0, rng);
  const auto g = random_poly(L, df, 1.0, rng);
  const auto chi = random_poly(L, dchi, 0.4, rng);
  const int d_V = gauge_unitary(chi, make_lattice(L, 1)).bandwidth;
  const int N = std::max(40, minimum_admissible_cutoff(df, d_V));
  const auto lat = make_lattice(L, N);
  const auto rep = anomaly_delta(f, chi, lat);

  EXPECT_NEAR(rep.delta, rep.closed_form, 1e-9);
  EXPECT_NEAR(rep.delta, quadrature_closed_form(f, chi), 1e-6);
  EXPECT_NEAR(rep.T_minus, -rep.T_plus, 1e-10);
  EXPECT_LE(rep.imag_residue, 1e-11);

  const auto up = anomaly_delta(f, chi, lat, 1e-15, +1);
  const auto down = anomaly_delta(f, chi, lat, 1e-15, -1);
  EXPECT_NEAR(up.delta, rep.closed_form / 2, 1e-10);
  EXPECT_NEAR(down.delta, rep.closed_form / 2, 1e-10);
  EXPECT_NEAR(up.delta + down.delta, rep.delta, 1e-10);

  const auto wider = anomaly_delta(f, chi, make_lattice(L, N + 8));
  EXPECT_NEAR(wider.delta, rep.delta, 1e-10);

  const auto sum = anomaly_delta(f + g.scaled(2.0), chi, lat);
  EXPECT_NEAR(sum.delta, rep.delta + 2.0 * anomaly_delta(g, chi, lat).delta, 1e-10);

  const auto reversed = anomaly_delta(f, chi.scaled(-1.0), lat);
  EXPECT_NEAR(reversed.delta, -rep.delta, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(DegreeMatrix, AnomalyProperties, ::testing::Range(0, 12));

TEST(AnomalyDelta, IndependentOfCircumferenceForMatchedHarmonics) {
  for (double a : {0.3, 0.8}) {
    const auto at = [a](double L) {
      return anomaly_delta(TrigPolynomial::cosine(L, 1.0, 1), TrigPolynomial::sine(L, a, 1), make_lattice(L, 32)).delta;
    };
    EXPECT_NEAR(at(kTwoPi), at(10.0), 1e-10);
    EXPECT_NEAR(at(10.0), -a, 1e-10);
  }
}

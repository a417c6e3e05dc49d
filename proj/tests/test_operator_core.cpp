#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ssflab/hermitian_operator.hpp"

using namespace ssflab;

namespace {

RealOperator diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v[i++] = x;
  return RealOperator::diagonal(v);
}

Eigen::MatrixXd rotation(double theta) {
  Eigen::MatrixXd u(2, 2);
  u << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return u;
}

}  // namespace

TEST(HermitianOperator, SymmetrizesAndRecordsDeviation) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 4.0, 3.0;
  const RealOperator a(m);
  EXPECT_DOUBLE_EQ(a(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(a(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(a.input_asymmetry(), 2.0);
}

TEST(HermitianOperator, ComplexInputIsMadeHermitian) {
  Eigen::MatrixXcd m(2, 2);
  m << Complex(1, 0.5), Complex(0, 1), Complex(0, 1), Complex(2, 0);
  const ComplexOperator a(m);
  EXPECT_EQ(a(0, 1), std::conj(a(1, 0)));
  EXPECT_DOUBLE_EQ(a(0, 0).imag(), 0.0);
  EXPECT_DOUBLE_EQ(a.trace(), 3.0);
}

TEST(HermitianOperator, RejectsBadShapes) {
  EXPECT_THROW(RealOperator(Eigen::MatrixXd(2, 3)), DomainError);
  EXPECT_THROW(RealOperator(Eigen::MatrixXd(0, 0)), DomainError);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(RealOperator{m}, DomainError);
  EXPECT_THROW(diag({1.0}) + diag({1.0, 2.0}), DomainError);
}

TEST(Eigendecompose, DiagonalSorted) {
  const auto s = spectrum(diag({3.0, 1.0, 2.0}));
  ASSERT_EQ(s.size(), 3);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 2.0);
  EXPECT_DOUBLE_EQ(s[2], 3.0);
}

TEST(Eigendecompose, TwoByTwoSwap) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const auto s = spectrum(RealOperator(m));
  EXPECT_NEAR(s[0], -1.0, 1e-14);
  EXPECT_NEAR(s[1], 1.0, 1e-14);
}

TEST(Eigendecompose, KnownDecomposition) {
  const auto u = rotation(0.3);
  Eigen::Vector2d d(-2.0, 5.0);
  const RealOperator a(u * d.asDiagonal() * u.transpose());
  const auto dec = eigendecompose(a);
  EXPECT_NEAR(dec.eigenvalues[0], -2.0, 1e-13);
  EXPECT_NEAR(dec.eigenvalues[1], 5.0, 1e-13);
  EXPECT_LE(reconstruction_residual(dec, a), 1e-10 * (1.0 + a.max_abs()));
}

TEST(Eigendecompose, ReconstructionOnRandomEnsembles) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = build_random_hermitian<double>(24, Ensemble::goe, seed, 1.0);
    const auto b = build_random_hermitian<Complex>(24, Ensemble::gue, seed, 2.0);
    EXPECT_LE(reconstruction_residual(eigendecompose(a), a), 1e-10 * (1.0 + a.max_abs()));
    EXPECT_LE(reconstruction_residual(eigendecompose(b), b), 1e-10 * (1.0 + b.max_abs()));
  }
}

TEST(ApplyFunction, Identity) {
  const auto a = build_random_hermitian<double>(10, Ensemble::goe, 3, 1.0);
  const auto b = apply_function(a, [](double x) { return x; });
  EXPECT_LE((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + a.max_abs()));
}

TEST(ApplyFunction, Square) {
  const auto b = apply_function(diag({0.0, 1.0}) + diag({1.0, 1.0}), [](double x) { return x * x; });
  EXPECT_NEAR(b(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(b(1, 1), 4.0, 1e-14);
  EXPECT_NEAR(b(0, 1), 0.0, 1e-14);
}

TEST(ApplyFunction, ScalarResolvent) {
  const auto b = apply_function(diag({0.0}), [](double x) { return 1.0 / (x + 1.0); });
  EXPECT_DOUBLE_EQ(b(0, 0), 1.0);
}

TEST(ApplyFunction, CompositionMatchesNestedApplication) {
  const auto a = build_random_hermitian<Complex>(12, Ensemble::gue, 9, 1.0);
  const auto g = [](double x) { return std::exp(-x); };
  const auto f = [](double x) { return x * x + 1.0; };
  const auto once = apply_function(a, [&](double x) { return f(g(x)); });
  const auto twice = apply_function(apply_function(a, g), f);
  EXPECT_LE((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + once.max_abs()));
}

TEST(ApplyFunction, NonFiniteValueNamesEigenvalue) {
  try {
    apply_function(diag({-1.0, 2.0}), [](double x) { return std::log(x); });
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos) << e.what();
  }
}

TEST(ResolventPower, Examples) {
  EXPECT_DOUBLE_EQ(resolvent_power(diag({0.0}), 1.0, 1.0)(0, 0), 1.0);
  EXPECT_NEAR(resolvent_power(diag({1.0}), 1.0, 2.0)(0, 0), 0.25, 1e-15);
  const auto r = resolvent_power(diag({0.0, 3.0}), 1.0, 1.0);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(r(1, 1), 0.25, 1e-15);
}

TEST(ResolventPower, ShiftTooSmall) {
  try {
    resolvent_power(diag({-2.0, 1.0}), 1.5, 1.0);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("shift too small"), std::string::npos) << e.what();
  }
  EXPECT_THROW(resolvent_power(diag({0.0}), 1.0, 0.5), DomainError);
}

TEST(ResolventPower, PositiveDefinite) {
  const auto a = build_random_hermitian<double>(16, Ensemble::goe, 11, 1.0);
  const double shift = 1.0 - spectrum(a).min();
  EXPECT_GT(psd_gap(resolvent_power(a, shift, 2.0)), 0.0);
}

TEST(TraceNormDiff, Examples) {
  const auto a = build_random_hermitian<double>(5, Ensemble::goe, 1, 1.0);
  EXPECT_DOUBLE_EQ(trace_norm_diff(a, a), 0.0);
  EXPECT_NEAR(trace_norm_diff(diag({1.0, -1.0}), RealOperator::zero(2)), 2.0, 1e-14);
  EXPECT_NEAR(trace_norm_diff(diag({2.0}), diag({-1.0})), 3.0, 1e-14);
  EXPECT_THROW(trace_norm_diff(diag({1.0}), diag({1.0, 1.0})), DomainError);
}

TEST(DiscreteSchrodinger, Examples) {
  const std::vector<double> zero2{0.0, 0.0};
  const auto a = build_discrete_schrodinger(2, zero2);
  EXPECT_DOUBLE_EQ(a(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(a(0, 1), -1.0);
  auto s = spectrum(a);
  EXPECT_NEAR(s[0], 1.0, 1e-14);
  EXPECT_NEAR(s[1], 3.0, 1e-14);

  const std::vector<double> zero3{0.0, 0.0, 0.0};
  EXPECT_NEAR(spectrum(build_discrete_schrodinger(3, zero3)).min(), 2.0 - std::numbers::sqrt2, 1e-14);

  const std::vector<double> five{5.0, 5.0};
  s = spectrum(build_discrete_schrodinger(2, five));
  EXPECT_NEAR(s[0], 6.0, 1e-14);
  EXPECT_NEAR(s[1], 8.0, 1e-14);

  const std::vector<double> one{0.0};
  EXPECT_THROW(build_discrete_schrodinger(1, one), DomainError);
}

TEST(DiscreteSchrodinger, ZeroPotentialIsPositiveSemidefinite) {
  const std::vector<double> zero(32, 0.0);
  const auto a = build_discrete_schrodinger(32, zero);
  EXPECT_GE(psd_gap(a), -psd_tolerance(a));
  const double expected = 2.0 - 2.0 * std::cos(std::numbers::pi / 33.0);
  EXPECT_NEAR(psd_gap(a), expected, 1e-13);
}

TEST(RandomHermitian, Deterministic) {
  const auto a = build_random_hermitian<Complex>(7, Ensemble::gue, 42, 1.0);
  const auto b = build_random_hermitian<Complex>(7, Ensemble::gue, 42, 1.0);
  EXPECT_TRUE(a == b);
  const auto c = build_random_hermitian<Complex>(7, Ensemble::gue, 43, 1.0);
  EXPECT_FALSE(a == c);
}

TEST(RandomHermitian, DiagonalEnsembleHasNoOffDiagonal) {
  const auto a = build_random_hermitian<double>(3, Ensemble::diagonal, 5, 1.0);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      if (i != j) EXPECT_EQ(a(i, j), 0.0);
}

TEST(RandomHermitian, GoeIsExactlySymmetric) {
  const auto a = build_random_hermitian<double>(64, Ensemble::goe, 8, 1.0);
  EXPECT_EQ((a.matrix() - a.matrix().transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RandomHermitian, OffDiagonalVarianceScalesWithDimension) {
  const Index n = 200;
  const auto a = build_random_hermitian<double>(n, Ensemble::goe, 17, 1.0);
  double sum = 0.0;
  int count = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      sum += a(i, j) * a(i, j);
      ++count;
    }
  EXPECT_NEAR(sum / count * n, 1.0, 0.05);
}

TEST(RandomHermitian, Errors) {
  EXPECT_THROW(parse_ensemble("poisson"), DomainError);
  EXPECT_THROW(build_random_hermitian<double>(4, Ensemble::gue, 1, 1.0), DomainError);
  EXPECT_THROW(build_random_hermitian<double>(0, Ensemble::goe, 1, 1.0), DomainError);
  EXPECT_THROW(build_random_hermitian<double>(4, Ensemble::goe, 1, 0.0), DomainError);
}

TEST(RandomHermitian, StreamSeedsDiffer) {
  EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
  EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
  EXPECT_EQ(stream_seed(5, 9), stream_seed(5, 9));
}

TEST(CompressByProjection, Examples) {
  const auto w = build_random_hermitian<double>(4, Ensemble::goe, 2, 1.0);
  EXPECT_TRUE(compress_by_projection(w, 4) == w);
  EXPECT_TRUE(compress_by_projection(w, 0) == RealOperator::zero(4));
  const auto c = compress_by_projection(diag({1.0, 2.0, 3.0}), 2);
  EXPECT_TRUE(c == diag({1.0, 2.0, 0.0}));
  EXPECT_THROW(compress_by_projection(w, 5), DomainError);
  EXPECT_THROW(compress_by_projection(w, -1), DomainError);
}

TEST(CompressByProjection, RankGrowsWithN) {
  const auto w = build_random_hermitian<double>(8, Ensemble::goe, 4, 1.0);
  Index prev = -1;
  for (Index n = 0; n <= 8; ++n) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(compress_by_projection(w, n).matrix());
    EXPECT_GT(lu.rank(), prev);
    prev = lu.rank();
  }
}

TEST(PsdGap, Examples) {
  EXPECT_DOUBLE_EQ(psd_gap(RealOperator::identity(3)), 1.0);
  EXPECT_NEAR(psd_gap(diag({0.75, 0.75}) - diag({2.0 / 3.0, 2.0 / 3.0})), 1.0 / 12.0, 1e-15);
  EXPECT_DOUBLE_EQ(psd_gap(diag({-1.0, 5.0})), -1.0);
}

TEST(PsdGap, MidpointInverseExample) {
  // X = diag(1,2), Y = diag(2,1), beta = 1/2.
  const auto x = diag({1.0, 2.0});
  const auto y = diag({2.0, 1.0});
  const auto lhs = 0.5 * resolvent_power(x, 0.0, 1.0) + 0.5 * resolvent_power(y, 0.0, 1.0);
  const auto rhs = resolvent_power(0.5 * x + 0.5 * y, 0.0, 1.0);
  EXPECT_NEAR(psd_gap(lhs - rhs), 1.0 / 12.0, 1e-15);
}

TEST(CouplingFamily, SegmentEndpoints) {
  const auto a0 = RealOperator::zero(2);
  const auto v1 = diag({1.0, 2.0});
  const auto v2 = diag({-3.0, 0.5});
  const auto fam = CouplingFamily<double>::segment(a0, v1, v2);
  EXPECT_TRUE(convex_combination(fam, 0.0) == v2);
  EXPECT_TRUE(convex_combination(fam, 1.0) == v1);
  EXPECT_NEAR(convex_combination(fam, 0.25)(0, 0), 0.25 - 2.25, 1e-15);
  EXPECT_THROW(convex_combination(fam, 1.5), DomainError);
  EXPECT_THROW(convex_combination(fam, -0.1), DomainError);
}

TEST(CouplingFamily, PathForm) {
  const auto fam = CouplingFamily<double>::path(RealOperator::zero(1), RealOperator::zero(1), diag({1.0}),
                                                diag({1.0}), -4.0, 4.0);
  EXPECT_DOUBLE_EQ(convex_combination(fam, 2.0)(0, 0), -2.0);
  EXPECT_THROW(CouplingFamily<double>::path(RealOperator::zero(1), RealOperator::zero(1), diag({1.0}),
                                            diag({-1.0}), 0.0, 1.0),
               DomainError);
}

TEST(CouplingFamily, PathIsOperatorConcave) {
  const auto w = build_random_hermitian<double>(6, Ensemble::goe, 21, 1.0);
  const auto fam = CouplingFamily<double>::path(
      RealOperator::zero(6), build_random_hermitian<double>(6, Ensemble::goe, 22, 1.0),
      build_random_hermitian<double>(6, Ensemble::goe, 23, 1.0), RealOperator(w.matrix() * w.matrix()), -1.0, 1.0);
  const double h = 0.3;
  for (double a : {-0.5, 0.0, 0.4}) {
    const auto second = fam.member(a + h) + fam.member(a - h) - 2.0 * fam.member(a);
    EXPECT_LE(spectrum(second).max(), 1e-12);
  }
}

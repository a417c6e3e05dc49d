#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ssflab/spectral_shift.hpp"

using namespace ssflab;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v[i++] = x;
  return v;
}

RealOperator diag(std::initializer_list<double> d) { return RealOperator::diagonal(vec(d)); }

// #{eig(A0) <= x} - #{eig(A) <= x} counted directly.
int brute_ssf(const Spectrum& a, const Spectrum& a0, double x) {
  int n = 0;
  for (double e : a0)
    if (e <= x) ++n;
  for (double e : a)
    if (e <= x) --n;
  return n;
}

// Riemann sum of the counting-function difference, used as an independent
// route to the integrated shift function.
double brute_zeta_minus(const Spectrum& a, const Spectrum& a0, double lambda) {
  double total = 0.0;
  for (double e : a0)
    if (e <= lambda) total += lambda - e;
  for (double e : a)
    if (e <= lambda) total -= lambda - e;
  return total;
}

}  // namespace

TEST(CountingFunction, Examples) {
  const Spectrum s(vec({-2.0, -1.0, 3.0}));
  EXPECT_EQ(counting_function(s, 0.0, Side::minus), 2);
  EXPECT_EQ(counting_function(s, 0.0, Side::plus), 1);
  EXPECT_EQ(counting_function(s, s.min() - 1.5, Side::minus), 0);
  EXPECT_EQ(counting_function(s, -1.0, Side::minus), 2);
  EXPECT_EQ(counting_function(s, -1.0, Side::plus), 2);
}

TEST(EigenvalueSum, Examples) {
  const Spectrum s(vec({-2.0, -1.0, 3.0}));
  EXPECT_DOUBLE_EQ(eigenvalue_sum(s, 0.0, Side::minus), -3.0);
  EXPECT_DOUBLE_EQ(eigenvalue_sum(s, 0.0, Side::plus), 3.0);
  EXPECT_DOUBLE_EQ(eigenvalue_sum(s, -5.0, Side::minus), 0.0);
}

TEST(EigenvalueSum, IsIntegralOfCountingFunction) {
  const auto a = build_random_hermitian<double>(9, Ensemble::goe, 4, 1.0);
  const auto s = spectrum(a);
  // S-(lambda) = -integral_{-inf}^{lambda} N-, S+(lambda) = integral_{lambda}^{inf} N+.
  const int n = 20000;
  for (double lambda : {-0.7, 0.1, 0.9}) {
    const double lo = s.min() - 1.0;
    const double hi = s.max() + 1.0;
    double minus = 0.0;
    double plus = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = lo + (lambda - lo) * (k + 0.5) / n;
      minus += counting_function(s, x, Side::minus) * (lambda - lo) / n;
      const double y = lambda + (hi - lambda) * (k + 0.5) / n;
      plus += counting_function(s, y, Side::plus) * (hi - lambda) / n;
    }
    EXPECT_NEAR(eigenvalue_sum(s, lambda, Side::minus), -minus, 1e-3);
    EXPECT_NEAR(eigenvalue_sum(s, lambda, Side::plus), plus, 1e-3);
  }
}

TEST(StepFunction, CanonicalForm) {
  const StepFunction f({0.0, 1.0, 2.0, 3.0}, {0.0, 2.0, 2.0});
  EXPECT_EQ(f.breakpoints(), (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(f.values(), (std::vector<double>{2.0}));
  EXPECT_DOUBLE_EQ(f(1.0), 2.0);
  EXPECT_DOUBLE_EQ(f(3.0), 0.0);
  EXPECT_DOUBLE_EQ(f(0.5), 0.0);
  EXPECT_DOUBLE_EQ(f.integral(), 4.0);
  EXPECT_DOUBLE_EQ(f.integral(2.0, inf), 2.0);
  EXPECT_TRUE(StepFunction({0.0, 1.0}, {0.0}).is_zero());
}

TEST(StepFunction, Arithmetic) {
  const auto a = StepFunction::indicator(0.0, 2.0);
  const auto b = StepFunction::indicator(1.0, 3.0, -1.0);
  const auto c = a + b;
  EXPECT_DOUBLE_EQ(c(0.5), 1.0);
  EXPECT_DOUBLE_EQ(c(1.5), 0.0);
  EXPECT_DOUBLE_EQ(c(2.5), -1.0);
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_DOUBLE_EQ((2.0 * a).integral(), 4.0);
  EXPECT_THROW(StepFunction({1.0, 0.0}, {1.0}), DomainError);
  EXPECT_THROW(StepFunction({0.0, 1.0}, {1.0, 2.0}), DomainError);
}

TEST(Ssf, TwoByTwo) {
  const auto xi = ssf(diag({-1.0, 1.0}), diag({0.0, 0.0}));
  EXPECT_EQ(xi.breakpoints(), (std::vector<double>{-1.0, 0.0, 1.0}));
  EXPECT_EQ(xi.values(), (std::vector<double>{-1.0, 1.0}));
}

TEST(Ssf, IdenticalPairIsZero) {
  const auto a = build_random_hermitian<Complex>(6, Ensemble::gue, 1, 1.0);
  EXPECT_TRUE(ssf(a, a).is_zero());
}

TEST(Ssf, ScalarPair) {
  for (double c : {0.25, 1.0, 7.5}) {
    const auto xi = ssf(diag({c}), diag({0.0}));
    EXPECT_EQ(xi.breakpoints(), (std::vector<double>{0.0, c}));
    EXPECT_EQ(xi.values(), (std::vector<double>{1.0}));
  }
}

TEST(Ssf, MatchesBruteForceCountOnGrid) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto a0 = build_random_hermitian<double>(12, Ensemble::goe, stream_seed(seed, 0), 1.0);
    const auto v = build_random_hermitian<double>(12, Ensemble::goe, stream_seed(seed, 1), 1.0);
    const auto xi = ssf(a0 + v, a0);
    const auto sa = spectrum(a0 + v);
    const auto s0 = spectrum(a0);
    const double lo = std::min(sa.min(), s0.min()) - 0.5;
    const double hi = std::max(sa.max(), s0.max()) + 0.5;
    for (int k = 0; k <= 2000; ++k) {
      const double x = lo + (hi - lo) * k / 2000.0;
      EXPECT_EQ(xi(x), brute_ssf(sa, s0, x)) << "x = " << x;
    }
    // Exactly at the eigenvalues, too.
    for (double e : sa) EXPECT_EQ(xi(e), brute_ssf(sa, s0, e));
    for (double e : s0) EXPECT_EQ(xi(e), brute_ssf(sa, s0, e));
  }
}

TEST(Ssf, TotalMassIsTraceOfPerturbation) {
  const auto a0 = build_random_hermitian<Complex>(20, Ensemble::gue, 7, 1.0);
  const auto v = build_random_hermitian<Complex>(20, Ensemble::gue, 8, 1.0);
  EXPECT_NEAR(ssf(a0 + v, a0).integral(), v.trace(), 1e-10 * (1.0 + std::abs(v.trace())));
}

TEST(IntegratedSsf, Examples) {
  const auto xi = ssf(diag({-1.0, 1.0}), diag({0.0, 0.0}));
  EXPECT_DOUBLE_EQ(integrated_ssf(xi, 0.0, Side::minus), -1.0);
  EXPECT_DOUBLE_EQ(integrated_ssf(xi, inf, Side::minus), 0.0);
  EXPECT_DOUBLE_EQ(integrated_ssf(xi, -inf, Side::plus), 0.0);
  EXPECT_DOUBLE_EQ(integrated_ssf(xi, 0.5, Side::plus), 0.5);
  const StepFunction zero;
  for (double x : {-inf, -1.0, 0.0, 3.0, inf}) {
    EXPECT_EQ(integrated_ssf(zero, x, Side::minus), 0.0);
    EXPECT_EQ(integrated_ssf(zero, x, Side::plus), 0.0);
  }
}

TEST(IntegratedSsf, MatchesEigenvalueRoute) {
  const auto a0 = build_random_hermitian<double>(10, Ensemble::goe, 31, 1.0);
  const auto v = build_random_hermitian<double>(10, Ensemble::goe, 32, 1.0);
  const auto xi = ssf(a0 + v, a0);
  const auto sa = spectrum(a0 + v);
  const auto s0 = spectrum(a0);
  for (double x : {-2.0, -0.3, 0.0, 0.4, 1.7, 3.0}) {
    EXPECT_NEAR(integrated_ssf(xi, x, Side::minus), brute_zeta_minus(sa, s0, x), 1e-12);
    EXPECT_NEAR(integrated_ssf(xi, x, Side::minus) + integrated_ssf(xi, x, Side::plus), xi.integral(), 1e-12);
  }
}

TEST(IntegrateStepAgainst, Examples) {
  const auto a0 = diag({0.0, 0.0});
  const auto a = diag({-1.0, 1.0});
  const auto xi = ssf(a, a0);
  EXPECT_NEAR(integrate_step_against(xi, Weight::constant(1.0)), (a - a0).trace(), 1e-14);
  EXPECT_NEAR(integrate_step_against(xi, Weight::threshold(0.0, Side::minus)), -1.0, 1e-14);
  EXPECT_EQ(integrate_step_against(StepFunction{}, Weight::exp_decay(1.0)), 0.0);
}

TEST(IntegrateStepAgainst, SmoothWeightAgainstClosedForm) {
  // xi = 1 on [0, 2): integral of e^{-x} is 1 - e^{-2}.
  const auto xi = StepFunction::indicator(0.0, 2.0);
  EXPECT_NEAR(integrate_step_against(xi, Weight::exp_decay(1.0)), 1.0 - std::exp(-2.0), 1e-13);
  const auto q = integrate_step_against(xi, [](double x) { return std::cos(x); }, {}, {});
  EXPECT_NEAR(q.value, std::sin(2.0), 1e-12);
}

TEST(SsfViaInvariance, ScalarExample) {
  const auto xi = ssf_via_invariance(diag({1.0}), diag({0.0}), 1.0, 1.0);
  EXPECT_NEAR(l1_distance(xi, StepFunction::indicator(0.0, 1.0)), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(xi(0.5), 1.0);
}

TEST(SsfViaInvariance, IdenticalPair) {
  const auto a = build_random_hermitian<double>(5, Ensemble::goe, 2, 1.0);
  EXPECT_TRUE(ssf_via_invariance(a, a, 1.0 - spectrum(a).min(), 2.0).is_zero());
}

TEST(SsfViaInvariance, AgreesWithDirectCount) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a0 = build_random_hermitian<double>(8, Ensemble::goe, stream_seed(seed, 10), 1.0);
    const auto v = build_random_hermitian<double>(8, Ensemble::goe, stream_seed(seed, 11), 1.0);
    const auto a = a0 + v;
    const double a_shift = 1.0 + std::abs(std::min(spectrum(a).min(), spectrum(a0).min()));
    for (double p : {1.0, 2.0, 3.0}) {
      EXPECT_LE(l1_distance(ssf_via_invariance(a, a0, a_shift, p), ssf(a, a0)), 1e-8);
    }
  }
}

TEST(SsfViaInvariance, ShiftTooSmall) {
  EXPECT_THROW(ssf_via_invariance(diag({-3.0}), diag({0.0}), 2.0, 1.0), DomainError);
}

TEST(L1Distance, Examples) {
  const auto one = StepFunction::indicator(0.0, 1.0);
  EXPECT_EQ(l1_distance(one, one), 0.0);
  EXPECT_DOUBLE_EQ(l1_distance(one, StepFunction{}), 1.0);
  EXPECT_NEAR(l1_distance(one, StepFunction{}, 2), 1.0 / 3.0, 1e-15);
  // |lambda| weighting across zero.
  EXPECT_NEAR(l1_distance(StepFunction::indicator(-1.0, 1.0), StepFunction{}, 1), 1.0, 1e-15);
}

TEST(PullBack, SignAndSupport) {
  // eta = -1 on [1/2, 1): t = (lambda + 1)^{-1} maps it to [0, 1).
  const auto eta = StepFunction::indicator(0.5, 1.0, -1.0);
  const auto xi = pull_back_resolvent_ssf(eta, 1.0, 1.0);
  EXPECT_NEAR(l1_distance(xi, StepFunction::indicator(0.0, 1.0)), 0.0, 1e-14);
}

#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "ssflab/hermitian_operator.hpp"
#include "ssflab/quadrature.hpp"
#include "ssflab/step_function.hpp"
#include "ssflab/weight.hpp"

namespace ssflab {

/// minus: #{j : lambda_j <= lambda}; plus: #{j : lambda_j >= lambda}.
Index counting_function(const Spectrum& spec, double lambda, Side side);

/// minus: sum over lambda_j <= lambda of (lambda_j - lambda), a value <= 0;
/// plus: sum over lambda_j >= lambda of (lambda_j - lambda), a value >= 0.
double eigenvalue_sum(const Spectrum& spec, double lambda, Side side);

struct EigenvalueSumPoint {
  double threshold;
  double value;
};

std::vector<EigenvalueSumPoint> eigenvalue_sum_curve(const Spectrum& spec, std::span<const double> thresholds,
                                                     Side side);

/// xi(lambda) = #{eig(A0) <= lambda} - #{eig(A) <= lambda}, built from the
/// two spectra. Eigenvalues within StepFunction::merge_tolerance of each
/// other share a breakpoint, so numerically coincident eigenvalues cancel.
StepFunction ssf_from_spectra(const Spectrum& a, const Spectrum& a0);

/// Spectral shift function xi(.; A, A0) of a pair of Hermitian matrices.
template <typename Scalar>
StepFunction ssf(const HermitianOperator<Scalar>& a, const HermitianOperator<Scalar>& a0) {
  HermitianOperator<Scalar>::check_same_dim(a, a0, "ssf");
  return ssf_from_spectra(spectrum(a), spectrum(a0));
}

/// minus: integral of xi over (-inf, lambda]; plus: over [lambda, inf).
/// lambda may be infinite.
double integrated_ssf(const StepFunction& xi, double lambda, Side side);

/// sum_k xi_k * integral of w over [b_k, b_{k+1}).
double integrate_step_against(const StepFunction& xi, const Weight& w, const AdaptiveOptions& opts = {});

/// sum_k xi_k * integral of f over [b_k, b_{k+1}) by adaptive Gauss-Legendre,
/// splitting additionally at `splits`.
QuadratureResult integrate_step_against(const StepFunction& xi, const std::function<double(double)>& f,
                                        std::span<const double> splits, const AdaptiveOptions& opts = {});

/// integral of |xi1 - xi2| |lambda|^weight_exponent, exact per piece.
double l1_distance(const StepFunction& xi1, const StepFunction& xi2, int weight_exponent = 0);

/// Pull back the spectral shift function eta of a resolvent-power pair
/// through t = (lambda + a)^{-p}: xi(lambda) = -eta((lambda + a)^{-p}).
StepFunction pull_back_resolvent_ssf(const StepFunction& eta, double a, double p);

/// The spectral shift function of (A, A0) obtained from the pair
/// ((A + a)^{-p}, (A0 + a)^{-p}); agrees with ssf(A, A0) up to a null set.
template <typename Scalar>
StepFunction ssf_via_invariance(const HermitianOperator<Scalar>& a, const HermitianOperator<Scalar>& a0,
                                double shift, double p) {
  HermitianOperator<Scalar>::check_same_dim(a, a0, "ssf_via_invariance");
  const double floor = -std::min(spectrum(a).min(), spectrum(a0).min());
  if (!(shift > floor)) {
    std::ostringstream os;
    os << "ssf_via_invariance: shift too small, need a > " << floor << ", got " << shift;
    throw DomainError(os.str());
  }
  const auto eta = ssf(resolvent_power(a, shift, p), resolvent_power(a0, shift, p));
  return pull_back_resolvent_ssf(eta, shift, p);
}

}  // namespace ssflab

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssflab/functionals.hpp"
#include "ssflab/hermitian_operator.hpp"
#include "ssflab/weight.hpp"

namespace ssflab {

/// One-sided checks pass when worst_gap >= -tolerance; identities when
/// |worst_gap| <= tolerance.
enum class CheckKind { one_sided, identity };

struct PropertyReport {
  std::string property;
  int trials = 0;
  double worst_gap = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::one_sided;
  nlohmann::json witness;
  bool pass = true;
};

/// Violation measured in units of the tolerance: -gap/tol or |gap|/tol.
double violation_ratio(CheckKind kind, double gap, double tolerance);

/// Tracks the observation with the largest violation ratio. Ties keep the
/// earliest observation, so the result does not depend on anything but the
/// order of observe() calls.
class GapTracker {
 public:
  GapTracker(std::string property, CheckKind kind) : property_(std::move(property)), kind_(kind) {}

  template <typename WitnessFn>
  void observe(double gap, double tolerance, WitnessFn&& witness) {
    const double r = violation_ratio(kind_, gap, tolerance);
    if (!seen_ || r > worst_ratio_) {
      seen_ = true;
      worst_ratio_ = r;
      gap_ = gap;
      tol_ = tolerance;
      witness_ = witness();
    }
  }

  PropertyReport report(int trials = 1) const;

 private:
  std::string property_;
  CheckKind kind_;
  bool seen_ = false;
  double worst_ratio_ = 0.0;
  double gap_ = 0.0;
  double tol_ = 0.0;
  nlohmann::json witness_;
};

/// Combine per-trial reports of one property; the worst one (earliest on
/// ties) provides gap, tolerance and witness, trials are summed.
PropertyReport merge_reports(std::span<const PropertyReport> reports);

/// 11 uniform points on [0, 1] plus `random_points` seeded points in (0, 1), sorted.
std::vector<double> default_alpha_grid(std::uint64_t seed, int uniform_points = 11, int random_points = 5);

struct PropertyInfo {
  std::string tag;
  std::string statement;
};

/// The property checks, in a fixed order.
const std::vector<PropertyInfo>& property_catalog();
/// Identity and diagnostic checks that report one row per trial.
const std::vector<PropertyInfo>& computation_catalog();

template <typename Scalar>
using Op = HermitianOperator<Scalar>;

// Checks of the concavity theorems --------------------------------------------

/// g(alpha V1 + (1-alpha) V2) - alpha g(V1) - (1-alpha) g(V2) >= 0 for a
/// nonincreasing f.
template <typename Scalar>
PropertyReport check_concavity_th1(const Op<Scalar>& a0, const Op<Scalar>& v1, const Op<Scalar>& v2,
                                   const Weight& f, std::span<const double> alphas);

/// Mirrored inequality for a nondecreasing f.
template <typename Scalar>
PropertyReport check_convexity_cor1(const Op<Scalar>& a0, const Op<Scalar>& v1, const Op<Scalar>& v2,
                                    const Weight& f, std::span<const double> alphas);

/// Three-point concavity of alpha -> g(V(alpha)) along an operator-concave
/// family (segment or path form); f nonincreasing and nonnegative. Grid
/// points are fractions of the family's parameter interval; each interior
/// point is tested with h equal to half its smaller neighbour spacing.
template <typename Scalar>
PropertyReport check_operator_family_cor2(const CouplingFamily<Scalar>& family, const Weight& f,
                                          std::span<const double> alphas);

template <typename Scalar>
PropertyReport check_bs_identity(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v,
                                 std::span<const double> alphas, CouplingCurve* curve = nullptr);

template <typename Scalar>
PropertyReport check_bs_monotone(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v,
                                 std::span<const double> s_grid, CouplingCurve* curve = nullptr);

/// L1 distance between ssf and ssf_via_invariance for each p. A shift
/// a <= 0 selects 1 + max(0, -min spec).
template <typename Scalar>
PropertyReport check_invariance(const Op<Scalar>& a0, const Op<Scalar>& v, double a, std::span<const double> ps);

/// Three-point concavity of alpha -> g_a(alpha) for each shift.
template <typename Scalar>
PropertyReport check_weighted_concavity(const CouplingFamily<Scalar>& family, const Weight& f,
                                        std::span<const double> shifts, int q, std::span<const double> alphas);

/// |a^{q+1} g_a(alpha) - g(alpha)| along an increasing ladder of shifts,
/// at most 1e-3 (1 + |g|) at the top. The deviation need not shrink at every
/// step since xi changes sign; the whole ladder goes into the witness.
template <typename Scalar>
PropertyReport check_weight_limit(const CouplingFamily<Scalar>& family, const Weight& f, int q,
                                  std::span<const double> ladder, std::span<const double> alphas);

/// Weighted L1 convergence of the compressed resolvent-pair shift functions.
template <typename Scalar>
PropertyReport check_projection_convergence(const Op<Scalar>& a0, const Op<Scalar>& v, double a, double p,
                                            std::span<const Index> n_grid);

struct CouplingPair {
  double alpha1;
  double alpha2;
};

/// g((a1+a2)V) <= g(a1 V) + g(a2 V) and g((a1-a2)V) >= g(a1 V) + g(-a2 V).
template <typename Scalar>
PropertyReport check_subadditivity(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v,
                                   std::span<const CouplingPair> pairs);

template <typename Scalar>
PropertyReport check_ssf_monotone(const Op<Scalar>& a0, const Op<Scalar>& v2, const Op<Scalar>& delta);

template <typename Scalar>
PropertyReport check_chain_rule(const Op<Scalar>& a0, const Op<Scalar>& a1, const Op<Scalar>& w);

template <typename Scalar>
PropertyReport check_trace_norm_bound(const Op<Scalar>& a0, const Op<Scalar>& v, std::span<const double> shifts);

// Identity and diagnostic checks -----------------------------------------------

/// integral of xi(.; A0 + V, A0) equals tr V.
template <typename Scalar>
PropertyReport check_trace_identity(const Op<Scalar>& a0, const Op<Scalar>& v);

template <typename Scalar>
PropertyReport check_trace_formula(const Op<Scalar>& a0, const Op<Scalar>& v,
                                   std::span<const TraceTestFunction> functions);

/// zeta-(lambda; l+ I + V, l+ I) = S-_{lambda - l+}(V) for lambda < l+, and
/// the mirror with l- I and plus.
template <typename Scalar>
PropertyReport check_sum_reduction(const Op<Scalar>& v);

template <typename Scalar>
PropertyReport check_inverse_convexity(const Op<Scalar>& x, const Op<Scalar>& y, std::span<const double> betas);

/// g(alpha V)/alpha nonincreasing on alpha_max 2^{-k} and the last two
/// ratios within 1e-3 (1 + scale); V must be positive semidefinite.
template <typename Scalar>
PropertyReport check_strong_coupling(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v, double alpha_max,
                                     int points, StrongCouplingResult* curve = nullptr);

}  // namespace ssflab

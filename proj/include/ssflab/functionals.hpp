#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ssflab/hermitian_operator.hpp"
#include "ssflab/quadrature.hpp"
#include "ssflab/spectral_shift.hpp"
#include "ssflab/weight.hpp"

namespace ssflab {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
  int coupling_nodes = 257;
};

/// Base operator A0, weight f and quadrature settings shared by the
/// functionals g(V) = integral of f(lambda) xi(lambda; A0 + V, A0).
template <typename Scalar>
class FunctionalContext {
 public:
  using Op = HermitianOperator<Scalar>;

  FunctionalContext(Op a0, Weight f, QuadratureOptions quadrature = {})
      : a0_(std::move(a0)), f_(std::move(f)), quadrature_(quadrature) {
    if (!(quadrature_.abs_tol > 0.0) || quadrature_.max_depth < 1 || quadrature_.coupling_nodes < 2) {
      throw DomainError("FunctionalContext: quadrature parameters must be positive (coupling_nodes >= 2)");
    }
  }

  const Op& a0() const { return a0_; }
  const Weight& f() const { return f_; }
  const QuadratureOptions& quadrature() const { return quadrature_; }
  AdaptiveOptions adaptive() const {
    AdaptiveOptions o;
    o.abs_tol = quadrature_.abs_tol;
    o.max_depth = quadrature_.max_depth;
    return o;
  }

 private:
  Op a0_;
  Weight f_;
  QuadratureOptions quadrature_;
};

/// Samples of a scalar function of the coupling constant.
struct CouplingCurve {
  std::vector<double> alphas;
  std::vector<double> values;

  CouplingCurve() = default;
  CouplingCurve(std::vector<double> a, std::vector<double> v) : alphas(std::move(a)), values(std::move(v)) {
    if (alphas.size() != values.size()) throw DomainError("CouplingCurve: length mismatch");
    if (!std::is_sorted(alphas.begin(), alphas.end())) throw DomainError("CouplingCurve: alphas not ascending");
  }
};

template <typename Scalar>
double g_functional(const FunctionalContext<Scalar>& ctx, const HermitianOperator<Scalar>& v) {
  return integrate_step_against(ssf(ctx.a0() + v, ctx.a0()), ctx.f(), ctx.adaptive());
}

struct TraceFormulaSides {
  double lhs = 0.0;  // tr(F(A0 + V) - F(A0))
  double rhs = 0.0;  // integral of F' xi
  double residual = 0.0;
  double quadrature_error = 0.0;
};

/// Both sides of the trace formula. The left side goes through the
/// functional calculus, the right side integrates F' against xi by
/// quadrature, so the two routes share only the eigenvalues.
template <typename Scalar>
TraceFormulaSides trace_formula_residual(const HermitianOperator<Scalar>& a0, const TraceTestFunction& F,
                                         const HermitianOperator<Scalar>& v, const AdaptiveOptions& opts = {}) {
  const auto a = a0 + v;
  const auto fval = [&F](double x) { return F.value(x); };
  TraceFormulaSides out;
  out.lhs = apply_function(a, fval).trace() - apply_function(a0, fval).trace();
  const auto q = integrate_step_against(
      ssf(a, a0), [&F](double x) { return F.derivative(x); }, {}, opts);
  out.rhs = q.value;
  out.quadrature_error = q.error;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

namespace detail {

template <typename Scalar>
double real_trace_of_product(const Matrix<Scalar>& x, const Matrix<Scalar>& y, std::string_view where) {
  const Scalar tr = x.cwiseProduct(y.transpose()).sum();
  if constexpr (is_complex_v<Scalar>) {
    const double scale = 1.0 + x.norm() * y.norm();
    if (std::abs(tr.imag()) > 1e-12 * scale) {
      std::ostringstream os;
      os << where << ": trace has imaginary part " << tr.imag() << " (scale " << scale << ")";
      throw NumericalError(os.str());
    }
    return tr.real();
  } else {
    (void)where;
    return tr;
  }
}

}  // namespace detail

/// tr[f(A0 + s V) V].
template <typename Scalar>
double coupling_trace(const FunctionalContext<Scalar>& ctx, const HermitianOperator<Scalar>& v, double s) {
  const auto fa = apply_function(ctx.a0() + s * v, [&ctx](double x) { return ctx.f()(x); });
  return detail::real_trace_of_product(fa.matrix(), v.matrix(), "coupling_trace");
}

namespace detail {

// Number of eigenvalues of A0 + s V at or below each kink of f. A change
// between the ends of a panel means the integrand jumps inside it.
template <typename Scalar>
std::vector<Index> kink_counts(const FunctionalContext<Scalar>& ctx, const HermitianOperator<Scalar>& v, double s) {
  const auto kinks = ctx.f().kinks();
  std::vector<Index> out;
  if (kinks.empty()) return out;
  const auto spec = spectrum(ctx.a0() + s * v);
  for (double k : kinks) out.push_back(counting_function(spec, k, Side::minus));
  return out;
}

}  // namespace detail

/// integral over [0, alpha] of tr[f(A0 + s V) V] ds.
///
/// Composite Gauss-Legendre: the interval is cut into coupling_nodes - 1
/// panels, each integrated with a 4-point rule and compared with the same
/// rule on its two halves. Panels whose two estimates differ by more than
/// their share of 1e-8 * (1 + |estimate|) are bisected again, down to
/// max_depth levels. Eigenvalue crossings of f's kinks make the integrand
/// jump; a panel whose ends see different eigenvalue counts below the kinks
/// is bisected regardless of the estimates until it is jump_depth levels
/// deep, since a jump beyond the outermost nodes is invisible to both rules.
/// The returned error is the sum of the coarse/fine differences of the
/// accepted panels.
template <typename Scalar>
QuadratureResult birman_solomyak_rhs(const FunctionalContext<Scalar>& ctx, const HermitianOperator<Scalar>& v,
                                     double alpha) {
  if (alpha == 0.0) return {};
  if (alpha < 0.0) {
    auto r = birman_solomyak_rhs(ctx, -1.0 * v, -alpha);
    return {r.value, r.error};
  }
  constexpr int jump_depth = 30;
  const auto& rule = gauss_legendre(4);
  const auto integrand = [&](double s) { return coupling_trace(ctx, v, s); };
  const auto counts = [&](double s) { return detail::kink_counts(ctx, v, s); };
  const int panels = ctx.quadrature().coupling_nodes - 1;
  const double width = alpha / panels;

  struct Panel {
    double lo;
    double hi;
    double coarse;
    int depth;
    std::vector<Index> counts_lo;
    std::vector<Index> counts_hi;
  };
  std::vector<Panel> work;
  work.reserve(static_cast<std::size_t>(panels));
  double coarse_total = 0.0;
  auto counts_hi = counts(alpha);
  for (int i = panels; i-- > 0;) {
    const double lo = i * width;
    const double hi = i + 1 == panels ? alpha : (i + 1) * width;
    const double c = integrate_fixed(integrand, lo, hi, rule);
    coarse_total += c;
    auto counts_lo = counts(lo);
    work.push_back({lo, hi, c, 0, counts_lo, std::move(counts_hi)});
    counts_hi = std::move(counts_lo);
  }
  const double tol = 1e-8 * (1.0 + std::abs(coarse_total));
  // Jump panels never meet a width-proportional share; give them a floor.
  const double floor_tol = tol / 1024.0;

  QuadratureResult out;
  while (!work.empty()) {
    Panel p = std::move(work.back());
    work.pop_back();
    const double mid = 0.5 * (p.lo + p.hi);
    const double left = integrate_fixed(integrand, p.lo, mid, rule);
    const double right = integrate_fixed(integrand, mid, p.hi, rule);
    const double fine = left + right;
    const double diff = std::abs(fine - p.coarse);
    const bool jump = p.counts_lo != p.counts_hi && p.depth < std::min(jump_depth, ctx.quadrature().max_depth);
    if (!jump && diff <= std::max(tol * (p.hi - p.lo) / alpha, floor_tol)) {
      out.value += fine;
      out.error += diff;
      continue;
    }
    if (p.depth + 1 > ctx.quadrature().max_depth) {
      std::ostringstream os;
      os.precision(17);
      os << "birman_solomyak_rhs: no convergence on [" << p.lo << ", " << p.hi << "] (estimates " << p.coarse
         << ", " << fine << "; running total " << out.value << ")";
      throw NumericalError(os.str());
    }
    auto counts_mid = counts(mid);
    work.push_back({mid, p.hi, right, p.depth + 1, counts_mid, std::move(p.counts_hi)});
    work.push_back({p.lo, mid, left, p.depth + 1, std::move(p.counts_lo), std::move(counts_mid)});
  }
  return out;
}

/// 1 + max(0, -min spec(A0 + V)) over the family's two ends and midpoint.
template <typename Scalar>
double family_shift_floor(const CouplingFamily<Scalar>& family) {
  const double lo = family.lower();
  const double hi = family.upper();
  double m = 0.0;
  for (double t : {lo, 0.5 * (lo + hi), hi}) m = std::min(m, spectrum(family.base() + family.member(t)).min());
  return 1.0 + std::max(0.0, -m);
}

/// g_a(alpha) = integral of f(lambda) (lambda + a)^{-(q+1)} xi(lambda; A0 + V(alpha), A0).
template <typename Scalar>
double g_a_weighted(const FunctionalContext<Scalar>& ctx, const CouplingFamily<Scalar>& family, double alpha,
                    double a, int q) {
  const double a0 = family_shift_floor(family);
  if (!(a >= a0)) {
    std::ostringstream os;
    os << "g_a_weighted: shift too small, need a >= " << a0 << ", got " << a;
    throw DomainError(os.str());
  }
  if (q < 1) throw DomainError("g_a_weighted: q must be >= 1");
  const auto w = resolvent_weight(ctx.f(), a, q + 1);
  auto opts = ctx.adaptive();
  opts.abs_tol *= std::pow(a, -(q + 1));
  return integrate_step_against(ssf(family.base() + family.member(alpha), family.base()), w, opts);
}

/// g_a(alpha) through the substitution t = (lambda + a)^{-1}:
/// -integral over t > 0 of f((1 - a t)/t) t^{q-1} eta(t), with eta the
/// spectral shift function of the resolvent pair.
template <typename Scalar>
double g_a_resolvent_route(const FunctionalContext<Scalar>& ctx, const CouplingFamily<Scalar>& family,
                           double alpha, double a, int q) {
  const double a0 = family_shift_floor(family);
  if (!(a >= a0)) {
    std::ostringstream os;
    os << "g_a_resolvent_route: shift too small, need a >= " << a0 << ", got " << a;
    throw DomainError(os.str());
  }
  const auto& a_base = family.base();
  const auto eta = ssf(resolvent_power(a_base + family.member(alpha), a, 1.0), resolvent_power(a_base, a, 1.0));
  std::vector<double> splits;
  for (double k : ctx.f().kinks())
    if (k > -a) splits.push_back(1.0 / (k + a));
  const auto& f = ctx.f();
  auto opts = ctx.adaptive();
  opts.abs_tol *= std::pow(a, -(q + 1));
  const auto r = integrate_step_against(
      eta, [&f, a, q](double t) { return f(1.0 / t - a) * std::pow(t, q - 1); }, splits, opts);
  return -r.value;
}

struct StrongCouplingResult {
  CouplingCurve ratios;  // g(alpha V) / alpha
  double gamma = 0.0;    // last ratio
  double scale = 0.0;    // 1 + max |g(alpha V)|
  double worst_increase = 0.0;
  bool monotone = true;
};

/// g(alpha V)/alpha on the geometric grid alpha_max * 2^{-k}, k = points-1 .. 0.
template <typename Scalar>
StrongCouplingResult strong_coupling_gamma(const FunctionalContext<Scalar>& ctx, const HermitianOperator<Scalar>& v,
                                           double alpha_max, int points) {
  if (points < 1) throw DomainError("strong_coupling_gamma: need at least one grid point");
  if (!(alpha_max > 0.0)) throw DomainError("strong_coupling_gamma: alpha_max must be > 0");
  std::vector<double> alphas(static_cast<std::size_t>(points));
  std::vector<double> ratios(alphas.size());
  double gmax = 0.0;
  for (int k = 0; k < points; ++k) {
    const double alpha = std::ldexp(alpha_max, k - (points - 1));
    const double g = g_functional(ctx, alpha * v);
    alphas[static_cast<std::size_t>(k)] = alpha;
    ratios[static_cast<std::size_t>(k)] = g / alpha;
    gmax = std::max(gmax, std::abs(g));
  }
  StrongCouplingResult out;
  out.scale = 1.0 + gmax;
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    const double inc = ratios[k] - ratios[k - 1];
    out.worst_increase = std::max(out.worst_increase, inc);
  }
  out.monotone = out.worst_increase <= 1e-9 * out.scale;
  out.gamma = ratios.back();
  out.ratios = CouplingCurve(std::move(alphas), std::move(ratios));
  return out;
}

}  // namespace ssflab

#include "ssflab/property_suite.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ssflab/io.hpp"
#include "ssflab/spectral_shift.hpp"

namespace ssflab {

double violation_ratio(CheckKind kind, double gap, double tolerance) {
  const double t = tolerance > 0.0 ? tolerance : std::numeric_limits<double>::min();
  if (std::isnan(gap)) return std::numeric_limits<double>::infinity();
  return kind == CheckKind::one_sided ? -gap / t : std::abs(gap) / t;
}

namespace {

bool passes(CheckKind kind, double gap, double tolerance) {
  if (std::isnan(gap)) return false;
  return kind == CheckKind::one_sided ? gap >= -tolerance : std::abs(gap) <= tolerance;
}

json weight_witness(const Weight& f) {
  try {
    return weight_to_json(f);
  } catch (const DomainError&) {
    return json{{"kind", std::string(f.kind())}, {"label", f.label()}};
  }
}

void require_nonincreasing(const Weight& f, const char* where) {
  if (!f.is_monotone(Monotonicity::nonincreasing)) {
    throw DomainError(std::string(where) + ": weight '" + f.label() + "' is not nonincreasing");
  }
}

template <typename Scalar>
void require_psd(const Op<Scalar>& a, const char* where, const char* what) {
  const double gap = psd_gap(a);
  if (gap < -psd_tolerance(a)) {
    std::ostringstream os;
    os << where << ": " << what << " is not positive semidefinite (min eigenvalue " << gap << ")";
    throw DomainError(os.str());
  }
}

template <typename Scalar>
json family_witness(const CouplingFamily<Scalar>& family) {
  json terms = json::array();
  for (const auto& t : family.terms()) terms.push_back(operator_to_json(t));
  return json{{"form", family.is_path() ? "path" : "segment"},
              {"lower", family.lower()},
              {"upper", family.upper()},
              {"a0", operator_to_json(family.base())},
              {"terms", terms}};
}

struct ThreePoint {
  double alpha;
  double h;
};

// Interior grid points, mapped onto [lo, hi], with h half the smaller
// neighbour spacing.
std::vector<ThreePoint> three_point_stencils(std::span<const double> fractions, double lo, double hi) {
  std::vector<double> a(fractions.begin(), fractions.end());
  std::sort(a.begin(), a.end());
  for (double& x : a) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("three-point grid: points must lie in [0, 1]");
    x = lo + x * (hi - lo);
  }
  std::vector<ThreePoint> out;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    const double h = 0.5 * std::min(a[i] - a[i - 1], a[i + 1] - a[i]);
    if (h > 0.0) out.push_back({a[i], h});
  }
  return out;
}

}  // namespace

PropertyReport GapTracker::report(int trials) const {
  PropertyReport r;
  r.property = property_;
  r.trials = trials;
  r.kind = kind_;
  r.worst_gap = gap_;
  r.tolerance = tol_;
  r.witness = witness_;
  r.pass = !seen_ || passes(kind_, gap_, tol_);
  return r;
}

PropertyReport merge_reports(std::span<const PropertyReport> reports) {
  if (reports.empty()) throw DomainError("merge_reports: nothing to merge");
  PropertyReport out = reports.front();
  double worst = violation_ratio(out.kind, out.worst_gap, out.tolerance);
  int trials = out.trials;
  bool pass = out.pass;
  for (std::size_t k = 1; k < reports.size(); ++k) {
    const auto& r = reports[k];
    trials += r.trials;
    pass = pass && r.pass;
    const double v = violation_ratio(r.kind, r.worst_gap, r.tolerance);
    if (v > worst) {
      worst = v;
      out = r;
    }
  }
  out.trials = trials;
  out.pass = pass;
  return out;
}

std::vector<double> default_alpha_grid(std::uint64_t seed, int uniform_points, int random_points) {
  if (uniform_points < 2 || random_points < 0) throw DomainError("default_alpha_grid: need >= 2 uniform points");
  std::vector<double> grid;
  for (int i = 0; i < uniform_points; ++i) grid.push_back(static_cast<double>(i) / (uniform_points - 1));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < random_points; ++i) {
    // 53 random bits mapped into (0, 1).
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    grid.push_back(u);
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

const std::vector<PropertyInfo>& property_catalog() {
  static const std::vector<PropertyInfo> catalog = {
      {"th1_concavity", "g(aV1 + (1-a)V2) >= a g(V1) + (1-a) g(V2) for nonincreasing f"},
      {"cor1_convexity", "g(aV1 + (1-a)V2) <= a g(V1) + (1-a) g(V2) for nondecreasing f"},
      {"cor2_operator_family", "a -> g(B0 + a B1 - a^2 B2) is concave for B2 >= 0, f >= 0 nonincreasing"},
      {"bs_identity", "g(aV) = integral over [0, a] of tr[f(A0 + sV) V] ds"},
      {"bs_monotone", "s -> tr[f(A0 + sV) V] is nonincreasing"},
      {"invariance", "xi(l; A, A0) = -eta((l + a)^-p), eta the shift function of the resolvent powers"},
      {"weighted_concavity", "a -> integral of f(l) (l + a)^-(q+1) xi is concave along the family"},
      {"weight_limit", "a^(q+1) g_a -> g as a grows"},
      {"projection_convergence", "compressions P_n W P_n of the resolvent difference give xi_n -> xi in weighted L1"},
      {"subadditivity", "g((a1 + a2)V) <= g(a1 V) + g(a2 V) and g((a1 - a2)V) >= g(a1 V) + g(-a2 V)"},
      {"ssf_monotone", "xi(.; A0 + V + D, A0) >= xi(.; A0 + V, A0) for D >= 0"},
      {"chain_rule", "xi(.; A1 + W, A1) = xi(.; A1 + W, A0) + xi(.; A0, A1)"},
      {"trace_norm_bound", "integral of |xi| (l + a)^-2 <= ||(A + a)^-1 - (A0 + a)^-1||_1"},
  };
  return catalog;
}

const std::vector<PropertyInfo>& computation_catalog() {
  static const std::vector<PropertyInfo> catalog = {
      {"trace_identity", "integral of xi equals tr V"},
      {"krein_formula", "tr(F(A0 + V) - F(A0)) = integral of F' xi"},
      {"sum_reduction", "integrated shift functions of (l+ I + V, l+ I) are eigenvalue sums of V"},
      {"inverse_convexity", "(bX + (1-b)Y)^-1 <= bX^-1 + (1-b)Y^-1 for X, Y > 0"},
      {"strong_coupling", "g(aV)/a is nonincreasing and settles for V >= 0"},
  };
  return catalog;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Scalar>
PropertyReport segment_check(const Op<Scalar>& a0, const Op<Scalar>& v1, const Op<Scalar>& v2, const Weight& f,
                             std::span<const double> alphas, bool concave, const char* name) {
  FunctionalContext<Scalar> ctx(a0, f);
  const auto family = CouplingFamily<Scalar>::segment(a0, v1, v2);
  const double g1 = g_functional(ctx, v1);
  const double g2 = g_functional(ctx, v2);
  const double tol = 1e-8 * (1.0 + std::abs(g1) + std::abs(g2));
  GapTracker t(name, CheckKind::one_sided);
  for (double alpha : alphas) {
    const double gm = g_functional(ctx, family.member(alpha));
    const double chord = alpha * g1 + (1.0 - alpha) * g2;
    const double gap = concave ? gm - chord : chord - gm;
    t.observe(gap, tol, [&] {
      return json{{"alpha", alpha}, {"g_mix", gm}, {"g_v1", g1}, {"g_v2", g2}, {"weight", weight_witness(f)},
                  {"a0", operator_to_json(a0)}, {"v1", operator_to_json(v1)}, {"v2", operator_to_json(v2)}};
    });
  }
  return t.report();
}

}  // namespace

template <typename Scalar>
PropertyReport check_concavity_th1(const Op<Scalar>& a0, const Op<Scalar>& v1, const Op<Scalar>& v2,
                                   const Weight& f, std::span<const double> alphas) {
  require_nonincreasing(f, "check_concavity_th1");
  return segment_check(a0, v1, v2, f, alphas, true, "th1_concavity");
}

template <typename Scalar>
PropertyReport check_convexity_cor1(const Op<Scalar>& a0, const Op<Scalar>& v1, const Op<Scalar>& v2,
                                    const Weight& f, std::span<const double> alphas) {
  if (!f.is_monotone(Monotonicity::nondecreasing)) {
    throw DomainError("check_convexity_cor1: weight '" + f.label() + "' is not nondecreasing");
  }
  return segment_check(a0, v1, v2, f, alphas, false, "cor1_convexity");
}

template <typename Scalar>
PropertyReport check_operator_family_cor2(const CouplingFamily<Scalar>& family, const Weight& f,
                                          std::span<const double> alphas) {
  require_nonincreasing(f, "check_operator_family_cor2");
  if (!f.nonnegative()) throw DomainError("check_operator_family_cor2: weight must be nonnegative");
  FunctionalContext<Scalar> ctx(family.base(), f);
  GapTracker t("cor2_operator_family", CheckKind::one_sided);
  for (const auto& st : three_point_stencils(alphas, family.lower(), family.upper())) {
    const double gc = g_functional(ctx, family.member(st.alpha));
    const double gl = g_functional(ctx, family.member(st.alpha - st.h));
    const double gr = g_functional(ctx, family.member(st.alpha + st.h));
    const double tol = 1e-8 * (1.0 + std::abs(gc) + std::abs(gl) + std::abs(gr));
    t.observe(2.0 * gc - gl - gr, tol, [&] {
      return json{{"alpha", st.alpha}, {"h", st.h}, {"g", {gl, gc, gr}}, {"weight", weight_witness(f)},
                  {"family", family_witness(family)}};
    });
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_bs_identity(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v,
                                 std::span<const double> alphas, CouplingCurve* curve) {
  GapTracker t("bs_identity", CheckKind::identity);
  std::vector<double> as(alphas.begin(), alphas.end());
  std::sort(as.begin(), as.end());
  std::vector<double> rhs_values;
  for (double alpha : as) {
    const double lhs = g_functional(ctx, alpha * v);
    const auto rhs = birman_solomyak_rhs(ctx, v, alpha);
    rhs_values.push_back(rhs.value);
    t.observe(lhs - rhs.value, std::max(1e-6, rhs.error), [&] {
      return json{{"alpha", alpha}, {"lhs", lhs}, {"rhs", rhs.value}, {"quadrature_error", rhs.error},
                  {"weight", weight_witness(ctx.f())}, {"a0", operator_to_json(ctx.a0())},
                  {"v", operator_to_json(v)}};
    });
  }
  if (curve) *curve = CouplingCurve(as, rhs_values);
  return t.report();
}

template <typename Scalar>
PropertyReport check_bs_monotone(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v,
                                 std::span<const double> s_grid, CouplingCurve* curve) {
  require_nonincreasing(ctx.f(), "check_bs_monotone");
  std::vector<double> s(s_grid.begin(), s_grid.end());
  std::sort(s.begin(), s.end());
  std::vector<double> ct;
  ct.reserve(s.size());
  double m = 0.0;
  for (double x : s) {
    ct.push_back(coupling_trace(ctx, v, x));
    m = std::max(m, std::abs(ct.back()));
  }
  const double scale = 1.0 + std::max(m, spectrum(v).values().cwiseAbs().sum());
  GapTracker t("bs_monotone", CheckKind::one_sided);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    t.observe(ct[k] - ct[k + 1], 1e-10 * scale, [&] {
      return json{{"s", {s[k], s[k + 1]}}, {"coupling_trace", {ct[k], ct[k + 1]}},
                  {"weight", weight_witness(ctx.f())}, {"a0", operator_to_json(ctx.a0())},
                  {"v", operator_to_json(v)}};
    });
  }
  if (curve) *curve = CouplingCurve(s, ct);
  return t.report(1);
}

template <typename Scalar>
PropertyReport check_invariance(const Op<Scalar>& a0, const Op<Scalar>& v, double a, std::span<const double> ps) {
  const auto a1 = a0 + v;
  if (a <= 0.0) a = 1.0 + std::max(0.0, -std::min(spectrum(a0).min(), spectrum(a1).min()));
  const auto xi = ssf(a1, a0);
  const double tol = 1e-8 * (1.0 + static_cast<double>(a0.dim()));
  GapTracker t("invariance", CheckKind::identity);
  for (double p : ps) {
    const double d = l1_distance(xi, ssf_via_invariance(a1, a0, a, p));
    t.observe(d, tol, [&] {
      return json{{"p", p}, {"a", a}, {"l1_distance", d}, {"a0", operator_to_json(a0)}, {"v", operator_to_json(v)}};
    });
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_weighted_concavity(const CouplingFamily<Scalar>& family, const Weight& f,
                                        std::span<const double> shifts, int q, std::span<const double> alphas) {
  FunctionalContext<Scalar> ctx(family.base(), f);
  const auto stencils = three_point_stencils(alphas, family.lower(), family.upper());
  GapTracker t("weighted_concavity", CheckKind::one_sided);
  for (double a : shifts) {
    for (const auto& st : stencils) {
      const double gc = g_a_weighted(ctx, family, st.alpha, a, q);
      const double gl = g_a_weighted(ctx, family, st.alpha - st.h, a, q);
      const double gr = g_a_weighted(ctx, family, st.alpha + st.h, a, q);
      const double tol = 1e-8 * (1.0 + std::abs(gc) + std::abs(gl) + std::abs(gr));
      t.observe(2.0 * gc - gl - gr, tol, [&] {
        return json{{"a", a}, {"q", q}, {"alpha", st.alpha}, {"h", st.h}, {"g_a", {gl, gc, gr}},
                    {"weight", weight_witness(f)}, {"family", family_witness(family)}};
      });
    }
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_weight_limit(const CouplingFamily<Scalar>& family, const Weight& f, int q,
                                  std::span<const double> ladder, std::span<const double> alphas) {
  if (ladder.empty()) throw DomainError("check_weight_limit: empty shift ladder");
  if (!std::is_sorted(ladder.begin(), ladder.end())) throw DomainError("check_weight_limit: ladder not ascending");
  FunctionalContext<Scalar> ctx(family.base(), f);
  GapTracker t("weight_limit", CheckKind::one_sided);
  for (double frac : alphas) {
    if (!(frac >= 0.0 && frac <= 1.0)) throw DomainError("check_weight_limit: grid points must lie in [0, 1]");
    const double alpha = family.lower() + frac * (family.upper() - family.lower());
    const double g = g_functional(ctx, family.member(alpha));
    std::vector<double> dev;
    for (double a : ladder) dev.push_back(std::abs(std::pow(a, q + 1) * g_a_weighted(ctx, family, alpha, a, q) - g));
    const auto witness = [&] {
      return json{{"alpha", alpha}, {"q", q}, {"g", g}, {"ladder", std::vector<double>(ladder.begin(), ladder.end())},
                  {"deviations", dev}, {"weight", weight_witness(f)}, {"family", family_witness(family)}};
    };
    t.observe(-dev.back(), 1e-3 * (1.0 + std::abs(g)), witness);
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_projection_convergence(const Op<Scalar>& a0, const Op<Scalar>& v, double a, double p,
                                            std::span<const Index> n_grid) {
  const auto a1 = a0 + v;
  if (a <= 0.0) a = 1.0 + std::max(0.0, -std::min(spectrum(a0).min(), spectrum(a1).min()));
  const int q = q_of(p);
  const auto b0 = resolvent_power(a0, a, p);
  const auto w = resolvent_power(a1, a, p) - b0;
  const auto xi = ssf(b0 + w, b0);
  std::vector<Index> ns(n_grid.begin(), n_grid.end());
  std::sort(ns.begin(), ns.end());
  std::vector<double> dist;
  for (Index n : ns) dist.push_back(l1_distance(ssf(b0 + compress_by_projection(w, n), b0), xi, q - 1));
  GapTracker t("projection_convergence", CheckKind::one_sided);
  const auto witness = [&] {
    return json{{"a", a}, {"p", p}, {"n", ns}, {"distances", dist}, {"a0", operator_to_json(a0)},
                {"v", operator_to_json(v)}};
  };
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] == a0.dim()) t.observe(-dist[k], 1e-9, witness);
    if (k + 1 < ns.size()) t.observe(dist[k] - dist[k + 1], 1e-10, witness);
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_subadditivity(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v,
                                   std::span<const CouplingPair> pairs) {
  require_nonincreasing(ctx.f(), "check_subadditivity");
  GapTracker t("subadditivity", CheckKind::one_sided);
  for (const auto& pr : pairs) {
    if (!(pr.alpha1 >= 0.0 && pr.alpha2 >= 0.0)) throw DomainError("check_subadditivity: coupling constants must be >= 0");
    const double g1 = g_functional(ctx, pr.alpha1 * v);
    const double g2 = g_functional(ctx, pr.alpha2 * v);
    const double gsum = g_functional(ctx, (pr.alpha1 + pr.alpha2) * v);
    const double gdiff = g_functional(ctx, (pr.alpha1 - pr.alpha2) * v);
    const double gneg = g_functional(ctx, -pr.alpha2 * v);
    const auto witness = [&] {
      return json{{"alpha1", pr.alpha1}, {"alpha2", pr.alpha2},
                  {"g", {{"a1", g1}, {"a2", g2}, {"a1_plus_a2", gsum}, {"a1_minus_a2", gdiff}, {"minus_a2", gneg}}},
                  {"weight", weight_witness(ctx.f())}, {"a0", operator_to_json(ctx.a0())},
                  {"v", operator_to_json(v)}};
    };
    t.observe(g1 + g2 - gsum, 1e-8 * (1.0 + std::abs(g1) + std::abs(g2) + std::abs(gsum)), witness);
    t.observe(gdiff - g1 - gneg, 1e-8 * (1.0 + std::abs(g1) + std::abs(gneg) + std::abs(gdiff)), witness);
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_ssf_monotone(const Op<Scalar>& a0, const Op<Scalar>& v2, const Op<Scalar>& delta) {
  require_psd(delta, "check_ssf_monotone", "delta");
  const auto a2 = a0 + v2;
  // Subtraction fuses breakpoints closer than the merge tolerance, so
  // eigenvalues that delta leaves in place cancel.
  const auto d = ssf(a2 + delta, a0) - ssf(a2, a0);
  double gap = 0.0;
  for (double x : d.values()) gap = std::min(gap, x);
  GapTracker t("ssf_monotone", CheckKind::one_sided);
  t.observe(gap, 1e-10, [&] {
    return json{{"min_difference", gap}, {"difference", step_function_to_json(d)}, {"a0", operator_to_json(a0)},
                {"v2", operator_to_json(v2)}, {"delta", operator_to_json(delta)}};
  });
  return t.report();
}

template <typename Scalar>
PropertyReport check_chain_rule(const Op<Scalar>& a0, const Op<Scalar>& a1, const Op<Scalar>& w) {
  const auto top = a1 + w;
  const double d = l1_distance(ssf(top, a1), ssf(top, a0) + ssf(a0, a1));
  GapTracker t("chain_rule", CheckKind::identity);
  t.observe(d, 1e-10 * static_cast<double>(a0.dim()), [&] {
    return json{{"l1_distance", d}, {"a0", operator_to_json(a0)}, {"a1", operator_to_json(a1)},
                {"w", operator_to_json(w)}};
  });
  return t.report();
}

template <typename Scalar>
PropertyReport check_trace_norm_bound(const Op<Scalar>& a0, const Op<Scalar>& v, std::span<const double> shifts) {
  const auto a1 = a0 + v;
  const double floor = -std::min(spectrum(a0).min(), spectrum(a1).min());
  const auto xi = ssf(a1, a0);
  std::vector<double> abs_values = xi.values();
  for (double& x : abs_values) x = std::abs(x);
  const StepFunction abs_xi(xi.breakpoints(), abs_values);
  GapTracker t("trace_norm_bound", CheckKind::one_sided);
  for (double a : shifts) {
    if (!(a > floor)) {
      std::ostringstream os;
      os << "check_trace_norm_bound: shift too small, need a > " << floor << ", got " << a;
      throw DomainError(os.str());
    }
    const double lhs = integrate_step_against(abs_xi, resolvent_weight(Weight::constant(1.0), a, 2));
    const double rhs = trace_norm_diff(resolvent_power(a1, a, 1.0), resolvent_power(a0, a, 1.0));
    t.observe(rhs - lhs, 1e-10 * (1.0 + rhs), [&] {
      return json{{"a", a}, {"lhs", lhs}, {"rhs", rhs}, {"a0", operator_to_json(a0)}, {"v", operator_to_json(v)}};
    });
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_trace_identity(const Op<Scalar>& a0, const Op<Scalar>& v) {
  const double integral = ssf(a0 + v, a0).integral();
  const double tr = v.trace();
  GapTracker t("trace_identity", CheckKind::identity);
  t.observe(integral - tr, 1e-10 * (1.0 + std::abs(tr)), [&] {
    return json{{"integral", integral}, {"trace", tr}, {"a0", operator_to_json(a0)}, {"v", operator_to_json(v)}};
  });
  return t.report();
}

template <typename Scalar>
PropertyReport check_trace_formula(const Op<Scalar>& a0, const Op<Scalar>& v,
                                   std::span<const TraceTestFunction> functions) {
  GapTracker t("krein_formula", CheckKind::identity);
  for (const auto& F : functions) {
    const auto sides = trace_formula_residual(a0, F, v);
    t.observe(sides.lhs - sides.rhs, 1e-8 * (1.0 + std::abs(sides.lhs)), [&] {
      json fj;
      try {
        fj = trace_function_to_json(F);
      } catch (const DomainError&) {
        fj = json{{"label", F.label()}};
      }
      return json{{"function", fj}, {"lhs", sides.lhs}, {"rhs", sides.rhs},
                  {"quadrature_error", sides.quadrature_error}, {"a0", operator_to_json(a0)},
                  {"v", operator_to_json(v)}};
    });
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_sum_reduction(const Op<Scalar>& v) {
  const auto spec = spectrum(v);
  const Index n = v.dim();
  const auto id = Op<Scalar>::identity(n);
  double abs_sum = 0.0;
  for (double x : spec) abs_sum += std::abs(x);

  GapTracker t("sum_reduction", CheckKind::identity);
  const auto run = [&](Side side) {
    // minus: l+ above the spectrum, test points mu < 0; plus: l- below, mu > 0.
    const double shift = side == Side::minus ? spec.max() + 1.0 : spec.min() - 1.0;
    const auto xi = ssf(shift * id + v, shift * id);
    std::vector<double> mus;
    const double far = side == Side::minus ? spec.min() - 1.0 : spec.max() + 1.0;
    for (int k = 0; k < 33; ++k) mus.push_back(far * (1.0 - k / 33.0));
    for (double x : spec)
      if (side == Side::minus ? x < 0.0 : x > 0.0) mus.push_back(x);
    for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(n); ++k) {
      const double mid = 0.5 * (spec[static_cast<Index>(k)] + spec[static_cast<Index>(k) + 1]);
      if (side == Side::minus ? mid < 0.0 : mid > 0.0) mus.push_back(mid);
    }
    for (double mu : mus) {
      const double lhs = integrated_ssf(xi, shift + mu, side);
      const double rhs = eigenvalue_sum(spec, mu, side);
      const double tol = 1e-10 * (1.0 + abs_sum + static_cast<double>(n) * (std::abs(shift) + std::abs(mu)));
      t.observe(lhs - rhs, tol, [&] {
        return json{{"side", std::string(to_string(side))}, {"shift", shift}, {"mu", mu}, {"zeta", lhs},
                    {"eigenvalue_sum", rhs}, {"v", operator_to_json(v)}};
      });
    }
  };
  run(Side::minus);
  run(Side::plus);
  return t.report();
}

template <typename Scalar>
PropertyReport check_inverse_convexity(const Op<Scalar>& x, const Op<Scalar>& y, std::span<const double> betas) {
  Op<Scalar>::check_same_dim(x, y, "check_inverse_convexity");
  for (const auto* m : {&x, &y}) {
    if (!(psd_gap(*m) > 0.0)) throw DomainError("check_inverse_convexity: operands must be positive definite");
  }
  const auto xi = resolvent_power(x, 0.0, 1.0);
  const auto yi = resolvent_power(y, 0.0, 1.0);
  const double scale = 1.0 + std::max(xi.max_abs(), yi.max_abs());
  GapTracker t("inverse_convexity", CheckKind::one_sided);
  for (double beta : betas) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("check_inverse_convexity: beta outside [0, 1]");
    const auto mix = beta * x + (1.0 - beta) * y;
    const double gap = psd_gap(beta * xi + (1.0 - beta) * yi - resolvent_power(mix, 0.0, 1.0));
    t.observe(gap, 1e-10 * scale, [&] {
      return json{{"beta", beta}, {"min_eigenvalue", gap}, {"x", operator_to_json(x)}, {"y", operator_to_json(y)}};
    });
  }
  return t.report();
}

template <typename Scalar>
PropertyReport check_strong_coupling(const FunctionalContext<Scalar>& ctx, const Op<Scalar>& v, double alpha_max,
                                     int points, StrongCouplingResult* curve) {
  require_nonincreasing(ctx.f(), "check_strong_coupling");
  require_psd(v, "check_strong_coupling", "V");
  const auto res = strong_coupling_gamma(ctx, v, alpha_max, points);
  const auto& r = res.ratios.values;
  GapTracker t("strong_coupling", CheckKind::one_sided);
  const auto witness = [&] {
    return json{{"alphas", res.ratios.alphas}, {"ratios", r}, {"scale", res.scale},
                {"weight", weight_witness(ctx.f())}, {"a0", operator_to_json(ctx.a0())}, {"v", operator_to_json(v)}};
  };
  for (std::size_t k = 1; k < r.size(); ++k) t.observe(r[k - 1] - r[k], 1e-9 * res.scale, witness);
  if (r.size() >= 2) t.observe(-std::abs(r.back() - r[r.size() - 2]), 1e-3 * (1.0 + res.scale), witness);
  if (curve) *curve = res;
  return t.report();
}

#define SSFLAB_INSTANTIATE(S)                                                                                    \
  template PropertyReport check_concavity_th1<S>(const Op<S>&, const Op<S>&, const Op<S>&, const Weight&,        \
                                                 std::span<const double>);                                       \
  template PropertyReport check_convexity_cor1<S>(const Op<S>&, const Op<S>&, const Op<S>&, const Weight&,       \
                                                  std::span<const double>);                                      \
  template PropertyReport check_operator_family_cor2<S>(const CouplingFamily<S>&, const Weight&,                 \
                                                        std::span<const double>);                                \
  template PropertyReport check_bs_identity<S>(const FunctionalContext<S>&, const Op<S>&,                        \
                                               std::span<const double>, CouplingCurve*);                         \
  template PropertyReport check_bs_monotone<S>(const FunctionalContext<S>&, const Op<S>&,                        \
                                               std::span<const double>, CouplingCurve*);                         \
  template PropertyReport check_invariance<S>(const Op<S>&, const Op<S>&, double, std::span<const double>);      \
  template PropertyReport check_weighted_concavity<S>(const CouplingFamily<S>&, const Weight&,                   \
                                                      std::span<const double>, int, std::span<const double>);    \
  template PropertyReport check_weight_limit<S>(const CouplingFamily<S>&, const Weight&, int,                    \
                                                std::span<const double>, std::span<const double>);               \
  template PropertyReport check_projection_convergence<S>(const Op<S>&, const Op<S>&, double, double,           \
                                                          std::span<const Index>);                               \
  template PropertyReport check_subadditivity<S>(const FunctionalContext<S>&, const Op<S>&,                      \
                                                 std::span<const CouplingPair>);                                 \
  template PropertyReport check_ssf_monotone<S>(const Op<S>&, const Op<S>&, const Op<S>&);                       \
  template PropertyReport check_chain_rule<S>(const Op<S>&, const Op<S>&, const Op<S>&);                         \
  template PropertyReport check_trace_norm_bound<S>(const Op<S>&, const Op<S>&, std::span<const double>);        \
  template PropertyReport check_trace_identity<S>(const Op<S>&, const Op<S>&);                                   \
  template PropertyReport check_trace_formula<S>(const Op<S>&, const Op<S>&, std::span<const TraceTestFunction>); \
  template PropertyReport check_sum_reduction<S>(const Op<S>&);                                                  \
  template PropertyReport check_inverse_convexity<S>(const Op<S>&, const Op<S>&, std::span<const double>);       \
  template PropertyReport check_strong_coupling<S>(const FunctionalContext<S>&, const Op<S>&, double, int,       \
                                                   StrongCouplingResult*);

SSFLAB_INSTANTIATE(double)
SSFLAB_INSTANTIATE(Complex)

#undef SSFLAB_INSTANTIATE

}  // namespace ssflab

#include "ssflab/spectral_shift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ssflab/errors.hpp"

namespace ssflab {

Index counting_function(const Spectrum& spec, double lambda, Side side) {
  if (side == Side::minus) return std::upper_bound(spec.begin(), spec.end(), lambda) - spec.begin();
  return spec.end() - std::lower_bound(spec.begin(), spec.end(), lambda);
}

double eigenvalue_sum(const Spectrum& spec, double lambda, Side side) {
  double s = 0.0;
  for (double mu : spec) {
    if (side == Side::minus ? mu <= lambda : mu >= lambda) s += mu - lambda;
  }
  return s;
}

std::vector<EigenvalueSumPoint> eigenvalue_sum_curve(const Spectrum& spec, std::span<const double> thresholds,
                                                     Side side) {
  std::vector<EigenvalueSumPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) out.push_back({t, eigenvalue_sum(spec, t, side)});
  return out;
}

StepFunction ssf_from_spectra(const Spectrum& a, const Spectrum& a0) {
  if (a.size() != a0.size()) throw DomainError("ssf: spectra have different sizes");
  // +1 when an eigenvalue of A0 is passed, -1 for one of A.
  std::vector<std::pair<double, int>> events;
  events.reserve(static_cast<std::size_t>(a.size() + a0.size()));
  for (double x : a0) events.emplace_back(x, +1);
  for (double x : a) events.emplace_back(x, -1);
  std::sort(events.begin(), events.end());
  std::vector<double> points;
  points.reserve(events.size());
  for (const auto& e : events) points.push_back(e.first);
  const double tol = StepFunction::merge_tolerance(points);

  std::vector<double> breakpoints;
  std::vector<double> values;
  int level = 0;
  for (std::size_t i = 0; i < events.size();) {
    const double start = events[i].first;
    double last = start;
    while (i < events.size() && events[i].first - last <= tol) {
      level += events[i].second;
      last = events[i].first;
      ++i;
    }
    breakpoints.push_back(start);
    values.push_back(static_cast<double>(level));
  }
  if (breakpoints.empty()) return {};
  values.pop_back();  // level after the last cluster is zero
  return StepFunction(std::move(breakpoints), std::move(values));
}

double integrated_ssf(const StepFunction& xi, double lambda, Side side) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return side == Side::minus ? xi.integral(-inf, lambda) : xi.integral(lambda, inf);
}

double integrate_step_against(const StepFunction& xi, const Weight& w, const AdaptiveOptions& opts) {
  const auto& b = xi.breakpoints();
  double s = 0.0;
  for (std::size_t k = 0; k < xi.pieces(); ++k) s += xi.values()[k] * w.integral(b[k], b[k + 1], opts);
  return s;
}

QuadratureResult integrate_step_against(const StepFunction& xi, const std::function<double(double)>& f,
                                        std::span<const double> splits, const AdaptiveOptions& opts) {
  const auto& b = xi.breakpoints();
  QuadratureResult out;
  for (std::size_t k = 0; k < xi.pieces(); ++k) {
    const auto r = integrate_piecewise(f, b[k], b[k + 1], splits, opts);
    out.value += xi.values()[k] * r.value;
    out.error += std::abs(xi.values()[k]) * r.error;
  }
  return out;
}

double l1_distance(const StepFunction& xi1, const StepFunction& xi2, int weight_exponent) {
  if (weight_exponent < 0) throw DomainError("l1_distance: weight exponent must be >= 0");
  const double k1 = weight_exponent + 1.0;
  // sign(x) |x|^{k+1} / (k+1) is an antiderivative of |x|^k.
  const auto prim = [k1](double x) { return std::copysign(std::pow(std::abs(x), k1), x) / k1; };
  const auto pts = merged_breakpoints(xi1, xi2);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double d = std::abs(xi1(pts[k]) - xi2(pts[k]));
    if (d != 0.0) s += d * (weight_exponent == 0 ? pts[k + 1] - pts[k] : prim(pts[k + 1]) - prim(pts[k]));
  }
  return s;
}

StepFunction pull_back_resolvent_ssf(const StepFunction& eta, double a, double p) {
  if (eta.is_zero()) return {};
  const auto& t = eta.breakpoints();
  if (!(t.front() > 0.0)) {
    throw DomainError("pull_back_resolvent_ssf: breakpoints must be positive (resolvent powers are positive)");
  }
  // t -> lambda = t^{-1/p} - a is decreasing, so the order reverses and the
  // piece [t_k, t_{k+1}) maps onto (lambda_{k+1}, lambda_k].
  const std::size_t m = t.size();
  std::vector<double> b(m);
  std::vector<double> v(m - 1);
  for (std::size_t i = 0; i < m; ++i) b[i] = std::pow(t[m - 1 - i], -1.0 / p) - a;
  for (std::size_t i = 0; i + 1 < m; ++i) v[i] = -eta.values()[m - 2 - i];
  return StepFunction(std::move(b), std::move(v));
}

}  // namespace ssflab

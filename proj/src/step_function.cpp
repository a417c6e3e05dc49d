#include "ssflab/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssflab/errors.hpp"

namespace ssflab {

Side parse_side(std::string_view tag) {
  if (tag == "minus") return Side::minus;
  if (tag == "plus") return Side::plus;
  throw DomainError("unknown side '" + std::string(tag) + "' (expected minus or plus)");
}

std::string_view to_string(Side side) { return side == Side::minus ? "minus" : "plus"; }

double StepFunction::merge_tolerance(const std::vector<double>& points) {
  double m = 0.0;
  for (double b : points) m = std::max(m, std::abs(b));
  return 1e-12 * (1.0 + m);
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.empty() && values.empty()) return;
  if (values.size() + 1 != breakpoints.size()) {
    throw DomainError("StepFunction: " + std::to_string(breakpoints.size()) + " breakpoints need " +
                      std::to_string(breakpoints.size() ? breakpoints.size() - 1 : 0) + " values, got " +
                      std::to_string(values.size()));
  }
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (!std::isfinite(breakpoints[k])) throw DomainError("StepFunction: non-finite breakpoint");
    if (k > 0 && breakpoints[k] < breakpoints[k - 1]) {
      throw DomainError("StepFunction: breakpoints must be increasing");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("StepFunction: non-finite value");
  }

  // Fuse breakpoints closer than the tolerance. `pending` is the value of the
  // piece that starts at the last kept breakpoint.
  const double tol = merge_tolerance(breakpoints);
  const std::size_t m = breakpoints.size();
  std::vector<double> b{breakpoints.front()};
  std::vector<double> v;
  double pending = m > 1 ? values[0] : 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double next = k + 1 < m ? values[k] : 0.0;
    if (breakpoints[k] - b.back() > tol) {
      v.push_back(pending);
      b.push_back(breakpoints[k]);
    }
    pending = next;
  }

  // Merge equal neighbours, then trim zero pieces at both ends.
  std::vector<double> cb;
  std::vector<double> cv;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!cv.empty() && v[j] == cv.back()) continue;
    cb.push_back(b[j]);
    cv.push_back(v[j]);
  }
  cb.push_back(b.back());
  if (!cv.empty() && cv.front() == 0.0) {
    cv.erase(cv.begin());
    cb.erase(cb.begin());
  }
  if (!cv.empty() && cv.back() == 0.0) {
    cv.pop_back();
    cb.pop_back();
  }
  if (cv.empty()) return;
  breakpoints_ = std::move(cb);
  values_ = std::move(cv);
}

StepFunction StepFunction::indicator(double lo, double hi, double value) {
  if (!(lo <= hi)) throw DomainError("StepFunction::indicator: need lo <= hi");
  return StepFunction({lo, hi}, {value});
}

double StepFunction::operator()(double x) const {
  if (values_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepFunction::integral() const {
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
  return s;
}

double StepFunction::integral(double lo, double hi) const {
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("StepFunction::integral: NaN bound");
  if (hi < lo) return -integral(hi, lo);
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double a = std::max(lo, breakpoints_[k]);
    const double b = std::min(hi, breakpoints_[k + 1]);
    if (b > a) s += values_[k] * (b - a);
  }
  return s;
}

double StepFunction::sup_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> merged_breakpoints(const StepFunction& a, const StepFunction& b) {
  std::vector<double> out;
  out.reserve(a.breakpoints().size() + b.breakpoints().size());
  std::merge(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(), b.breakpoints().end(),
             std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

template <typename Op>
StepFunction combine(const StepFunction& a, const StepFunction& b, Op op) {
  const auto pts = merged_breakpoints(a, b);
  if (pts.size() < 2) return {};
  std::vector<double> vals(pts.size() - 1);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) vals[k] = op(a(pts[k]), b(pts[k]));
  return StepFunction(pts, std::move(vals));
}

}  // namespace

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

StepFunction operator-(const StepFunction& a, const StepFunction& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}

StepFunction operator-(const StepFunction& a) { return -1.0 * a; }

StepFunction operator*(double s, const StepFunction& a) {
  if (a.is_zero()) return {};
  std::vector<double> v = a.values();
  for (double& x : v) x *= s;
  return StepFunction(a.breakpoints(), std::move(v));
}

}  // namespace ssflab

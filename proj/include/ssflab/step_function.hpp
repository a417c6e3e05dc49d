#pragma once

#include <string_view>
#include <vector>

namespace ssflab {

/// Which half-line a counting function, eigenvalue sum or integrated
/// spectral shift refers to: minus is (-inf, lambda], plus is [lambda, inf).
enum class Side { minus, plus };

Side parse_side(std::string_view tag);
std::string_view to_string(Side side);

/// Right-continuous piecewise-constant function with compact support.
///
/// Breakpoints b_1 < ... < b_m and values v_1 .. v_{m-1}: the function equals
/// v_k on [b_k, b_{k+1}) and vanishes outside [b_1, b_m). Construction puts
/// the data in canonical form: breakpoints closer than
/// merge_tolerance() are fused (the sliver between them is dropped), equal
/// neighbouring values are merged and zero pieces at either end are
/// trimmed. The zero function has no breakpoints.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  /// value on [lo, hi), zero elsewhere.
  static StepFunction indicator(double lo, double hi, double value = 1.0);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }
  bool is_zero() const { return values_.empty(); }

  double operator()(double x) const;

  /// Integral over the whole line.
  double integral() const;
  /// Integral over [lo, hi]; either end may be infinite.
  double integral(double lo, double hi) const;
  double sup_abs() const;

  /// 1e-12 * (1 + max |b|) for the given points.
  static double merge_tolerance(const std::vector<double>& points);

  friend StepFunction operator+(const StepFunction& a, const StepFunction& b);
  friend StepFunction operator-(const StepFunction& a, const StepFunction& b);
  friend StepFunction operator-(const StepFunction& a);
  friend StepFunction operator*(double s, const StepFunction& a);
  friend bool operator==(const StepFunction& a, const StepFunction& b) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Sorted union of the breakpoints of a and b.
std::vector<double> merged_breakpoints(const StepFunction& a, const StepFunction& b);

}  // namespace ssflab

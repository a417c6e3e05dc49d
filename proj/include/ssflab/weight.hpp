#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssflab/quadrature.hpp"
#include "ssflab/step_function.hpp"

namespace ssflab {

enum class Monotonicity { nonincreasing, nondecreasing };

std::string_view to_string(Monotonicity m);

/// |f(x)| <= constant * (1 + |x|)^(-exponent)
struct DecayBound {
  double constant;
  double exponent;
};

/// Monotone test function integrated against a spectral shift function.
///
/// Built-in kinds: step (including threshold indicators), constant,
/// exp_decay e^{-t x}, power_decay (1 + max(x, 0))^{-r}, affine
/// combinations offset + scale * base, the resolvent product
/// base(x) (x + a)^{-k}, and custom callables. Custom callables have their
/// monotonicity sampled on a 1001-point grid at construction.
class Weight {
 public:
  /// chi_{(-inf, lambda0]} for minus, chi_{[lambda0, inf)} for plus.
  static Weight threshold(double lambda0, Side side);
  /// levels[i] between thresholds[i-1] and thresholds[i]; levels has one more
  /// entry than thresholds. left_continuous picks the value at a threshold.
  static Weight step(std::vector<double> thresholds, std::vector<double> levels, bool left_continuous = true);
  static Weight constant(double c);
  static Weight exp_decay(double t);
  static Weight power_decay(double r);
  static Weight affine(double offset, double scale, const Weight& base);
  static Weight custom(std::string label, std::function<double(double)> f, Monotonicity direction,
                       double check_lo, double check_hi, std::function<double(double)> antiderivative = {},
                       std::optional<DecayBound> decay = std::nullopt);

  std::string_view kind() const;
  double operator()(double x) const;
  /// Exact for step, constant, exp_decay, power_decay, custom weights with an
  /// antiderivative and resolvent products of piecewise-constant bases;
  /// adaptive Gauss-Legendre otherwise.
  double integral(double lo, double hi, const AdaptiveOptions& opts = {}) const;

  Monotonicity direction() const;
  bool is_monotone(Monotonicity m) const;
  bool nonnegative() const;
  /// Arguments must exceed this value (-inf when defined everywhere).
  double domain_floor() const;
  /// Points where the weight is not smooth.
  std::vector<double> kinks() const;
  std::optional<DecayBound> decay() const;
  /// True when the weight is piecewise constant.
  bool piecewise_constant() const;

  // Parameters, by kind.
  const std::vector<double>& thresholds() const;
  const std::vector<double>& levels() const;
  bool left_continuous() const;
  double parameter() const;  // c, t or r
  const std::string& label() const;
  const Weight& base() const;  // affine and resolvent
  double offset() const;
  double scale() const;
  double shift() const;  // resolvent a
  int exponent() const;  // resolvent k

  struct Impl;

 private:
  explicit Weight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend Weight resolvent_weight(const Weight& f, double a, int exponent);
};

/// f(x) (x + a)^{-exponent} on x > -a; f must be nonincreasing and nonnegative.
Weight resolvent_weight(const Weight& f, double a, int exponent);

/// c - f for a nondecreasing f: the nonincreasing partner used to express
/// convex functionals through concave ones.
Weight complement_weight(double c, const Weight& f);

/// 1 for p = 1, otherwise the smallest odd integer strictly larger than p.
int q_of(double p);

/// max over an equispaced grid of (1 + |x|)^{q+1} |f(x)|; grid points
/// outside f's domain are skipped.
double decay_check(const Weight& f, int q, double lo, double hi, int count = 1001);

/// Trace test function F with its derivative F'. Construction checks F'
/// against central differences.
class TraceTestFunction {
 public:
  /// sum_k coeffs[k] x^k, degree <= 6.
  static TraceTestFunction polynomial(std::vector<double> coeffs);
  /// e^{-t x}
  static TraceTestFunction exp_decay(double t);
  static TraceTestFunction tanh();
  /// (x + a)^{-p} on x > -a
  static TraceTestFunction resolvent_power(double a, double p);
  static TraceTestFunction custom(std::string label, std::function<double(double)> f,
                                  std::function<double(double)> df, double check_lo, double check_hi);

  double value(double x) const { return f_(x); }
  double derivative(double x) const { return df_(x); }
  const std::string& kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& parameters() const { return params_; }
  double domain_floor() const { return floor_; }

 private:
  TraceTestFunction(std::string kind, std::string label, std::vector<double> params,
                    std::function<double(double)> f, std::function<double(double)> df, double floor,
                    double check_lo, double check_hi);

  std::string kind_;
  std::string label_;
  std::vector<double> params_;
  std::function<double(double)> f_;
  std::function<double(double)> df_;
  double floor_;
};

}  // namespace ssflab

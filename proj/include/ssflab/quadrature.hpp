#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ssflab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule from the Golub-Welsch eigenproblem. Rules for n <= 32 are
/// cached.
const GaussLegendreRule& gauss_legendre(int n);

double integrate_fixed(const std::function<double(double)>& f, double lo, double hi,
                       const GaussLegendreRule& rule);

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-13;
  int max_depth = 40;
  int order = 8;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive bisection with an `order`-point Gauss-Legendre rule. A panel is
/// accepted once the rule and its two-halves refinement agree within
/// max(abs_tol, rel_tol * |refined|). Throws NumericalError past max_depth.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const AdaptiveOptions& opts = {});

/// As integrate_adaptive, but split first at the given interior points
/// (kinks or jumps of f).
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                                     std::span<const double> splits, const AdaptiveOptions& opts = {});

}  // namespace ssflab

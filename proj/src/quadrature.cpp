#include "ssflab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <sstream>

#include "ssflab/errors.hpp"

namespace ssflab {

namespace {

GaussLegendreRule golub_welsch(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = 2.0 * v0 * v0;
  }
  return rule;
}

struct Refinement {
  double lo;
  double hi;
  double coarse;
  int depth;
};

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1 || n > 32) throw DomainError("gauss_legendre: order must be in [1, 32]");
  static std::array<GaussLegendreRule, 33> cache;
  static std::array<std::once_flag, 33> once;
  std::call_once(once[static_cast<std::size_t>(n)],
                 [n] { cache[static_cast<std::size_t>(n)] = golub_welsch(n); });
  return cache[static_cast<std::size_t>(n)];
}

double integrate_fixed(const std::function<double(double)>& f, double lo, double hi,
                       const GaussLegendreRule& rule) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * s;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const AdaptiveOptions& opts) {
  if (lo == hi) return {};
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("integrate_adaptive: infinite bound");
  if (hi < lo) {
    auto r = integrate_adaptive(f, hi, lo, opts);
    return {-r.value, r.error};
  }
  const auto& rule = gauss_legendre(opts.order);
  QuadratureResult out;
  std::vector<Refinement> stack{{lo, hi, integrate_fixed(f, lo, hi, rule), 0}};
  while (!stack.empty()) {
    const Refinement p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.lo + p.hi);
    const double left = integrate_fixed(f, p.lo, mid, rule);
    const double right = integrate_fixed(f, mid, p.hi, rule);
    const double fine = left + right;
    const double diff = std::abs(fine - p.coarse);
    if (!std::isfinite(fine)) {
      std::ostringstream os;
      os << "integrate_adaptive: non-finite integrand on [" << p.lo << ", " << p.hi << "]";
      throw NumericalError(os.str());
    }
    if (diff <= std::max(opts.abs_tol, opts.rel_tol * std::abs(fine))) {
      out.value += fine;
      out.error += diff;
      continue;
    }
    if (p.depth + 1 > opts.max_depth) {
      std::ostringstream os;
      os.precision(17);
      os << "integrate_adaptive: no convergence on [" << p.lo << ", " << p.hi << "] after " << opts.max_depth
         << " bisections (estimates " << p.coarse << ", " << fine << ")";
      throw NumericalError(os.str());
    }
    stack.push_back({mid, p.hi, right, p.depth + 1});
    stack.push_back({p.lo, mid, left, p.depth + 1});
  }
  return out;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                                     std::span<const double> splits, const AdaptiveOptions& opts) {
  if (hi < lo) {
    auto r = integrate_piecewise(f, hi, lo, splits, opts);
    return {-r.value, r.error};
  }
  std::vector<double> cuts{lo};
  std::vector<double> inner(splits.begin(), splits.end());
  std::sort(inner.begin(), inner.end());
  for (double s : inner)
    if (s > cuts.back() && s < hi) cuts.push_back(s);
  cuts.push_back(hi);
  QuadratureResult out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    auto r = integrate_adaptive(f, cuts[k], cuts[k + 1], opts);
    out.value += r.value;
    out.error += r.error;
  }
  return out;
}

}  // namespace ssflab

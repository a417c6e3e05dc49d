#include "ssflab/weight.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssflab/errors.hpp"

namespace ssflab {

enum class WeightKind { step, constant, exp_decay, power_decay, affine, resolvent, custom };

namespace {

constexpr double kNoFloor = -std::numeric_limits<double>::infinity();
constexpr int kSampleCount = 1001;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string_view to_string(Monotonicity m) {
  return m == Monotonicity::nonincreasing ? "nonincreasing" : "nondecreasing";
}

struct Weight::Impl {
  WeightKind kind;
  // step
  std::vector<double> thresholds;
  std::vector<double> levels;
  bool left_continuous = true;
  // constant / exp_decay / power_decay
  double param = 0.0;
  // affine / resolvent
  std::optional<Weight> base;
  double offset = 0.0;
  double scale = 1.0;
  double shift = 0.0;
  int exponent = 0;
  // custom
  std::string label;
  std::function<double(double)> f;
  std::function<double(double)> antiderivative;

  Monotonicity direction = Monotonicity::nonincreasing;
  bool nonnegative = true;
  std::optional<DecayBound> decay;

  const Impl& b() const { return *base->impl_; }

  double floor() const {
    if (kind == WeightKind::resolvent) return std::max(-shift, b().floor());
    if (kind == WeightKind::affine) return b().floor();
    return kNoFloor;
  }

  double eval(double x) const {
    switch (kind) {
      case WeightKind::step: {
        const auto it = left_continuous ? std::lower_bound(thresholds.begin(), thresholds.end(), x)
                                        : std::upper_bound(thresholds.begin(), thresholds.end(), x);
        return levels[static_cast<std::size_t>(it - thresholds.begin())];
      }
      case WeightKind::constant: return param;
      case WeightKind::exp_decay: return std::exp(-param * x);
      case WeightKind::power_decay: return std::pow(1.0 + std::max(x, 0.0), -param);
      case WeightKind::affine: return offset + scale * b().eval(x);
      case WeightKind::resolvent:
        if (!(x > -shift)) {
          throw DomainError("resolvent weight: undefined at x = " + fmt(x) + " (need x > " + fmt(-shift) + ")");
        }
        return b().eval(x) * std::pow(x + shift, -exponent);
      case WeightKind::custom: return f(x);
    }
    return 0.0;
  }

  bool piecewise_constant() const {
    return kind == WeightKind::step || kind == WeightKind::constant ||
           (kind == WeightKind::affine && b().piecewise_constant());
  }

  std::vector<double> kinks() const {
    switch (kind) {
      case WeightKind::step: return thresholds;
      case WeightKind::power_decay: return {0.0};
      case WeightKind::affine:
      case WeightKind::resolvent: return b().kinks();
      default: return {};
    }
  }

  // Antiderivative when one is available in closed form.
  std::optional<double> primitive(double x) const {
    switch (kind) {
      case WeightKind::constant: return param * x;
      case WeightKind::exp_decay: return -std::exp(-param * x) / param;
      case WeightKind::power_decay:
        if (x <= 0.0) return x;
        if (param == 1.0) return std::log1p(x);
        return (std::pow(1.0 + x, 1.0 - param) - 1.0) / (1.0 - param);
      case WeightKind::custom:
        if (antiderivative) return antiderivative(x);
        return std::nullopt;
      case WeightKind::affine: {
        auto pb = b().primitive(x);
        if (!pb) return std::nullopt;
        return offset * x + scale * *pb;
      }
      default: return std::nullopt;
    }
  }

  double integrate(double lo, double hi, const AdaptiveOptions& opts) const {
    if (lo == hi) return 0.0;
    if (hi < lo) return -integrate(hi, lo, opts);
    if (!(lo > floor())) {
      throw DomainError(std::string("weight undefined on [") + fmt(lo) + ", " + fmt(hi) + "]: needs x > " +
                        fmt(floor()));
    }
    if (kind == WeightKind::step) {
      double s = 0.0;
      double a = lo;
      for (std::size_t i = 0; i <= thresholds.size(); ++i) {
        const double b = i < thresholds.size() ? std::min(thresholds[i], hi) : hi;
        if (b > a) {
          s += levels[i] * (b - a);
          a = b;
        }
        if (a >= hi) break;
      }
      return s;
    }
    if (kind == WeightKind::resolvent && b().piecewise_constant()) {
      // Pieces of base * (x + a)^{-k} with antiderivative (x + a)^{1-k} / (1 - k).
      const auto prim = [this](double x) {
        return exponent == 1 ? std::log(x + shift) : std::pow(x + shift, 1.0 - exponent) / (1.0 - exponent);
      };
      std::vector<double> cuts{lo};
      for (double t : b().kinks())
        if (t > lo && t < hi) cuts.push_back(t);
      cuts.push_back(hi);
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double level = b().eval(0.5 * (cuts[i] + cuts[i + 1]));
        if (level != 0.0) s += level * (prim(cuts[i + 1]) - prim(cuts[i]));
      }
      return s;
    }
    if (auto phi = primitive(hi)) return *phi - *primitive(lo);
    const auto k = kinks();
    return integrate_piecewise([this](double x) { return eval(x); }, lo, hi, k, opts).value;
  }
};

namespace {

std::shared_ptr<Weight::Impl> make(WeightKind kind) {
  auto impl = std::make_shared<Weight::Impl>();
  impl->kind = kind;
  return impl;
}

void sample_monotone(const std::function<double(double)>& f, Monotonicity dir, double lo, double hi,
                     const std::string& what, bool* nonnegative) {
  if (!(lo < hi)) throw DomainError(what + ": check interval must satisfy lo < hi");
  double prev = f(lo);
  *nonnegative = prev >= 0.0;
  for (int i = 1; i < kSampleCount; ++i) {
    const double x = lo + (hi - lo) * i / (kSampleCount - 1);
    const double v = f(x);
    if (!std::isfinite(v)) throw DomainError(what + ": not finite at x = " + fmt(x));
    const bool bad = dir == Monotonicity::nonincreasing ? v > prev : v < prev;
    if (bad) {
      throw DomainError(what + ": not " + std::string(to_string(dir)) + " near x = " + fmt(x));
    }
    *nonnegative = *nonnegative && v >= 0.0;
    prev = v;
  }
}

}  // namespace

Weight Weight::threshold(double lambda0, Side side) {
  if (!std::isfinite(lambda0)) throw DomainError("Weight::threshold: lambda0 must be finite");
  return side == Side::minus ? step({lambda0}, {1.0, 0.0}, true) : step({lambda0}, {0.0, 1.0}, false);
}

Weight Weight::step(std::vector<double> thresholds, std::vector<double> levels, bool left_continuous) {
  if (levels.size() != thresholds.size() + 1) {
    throw DomainError("Weight::step: need one more level than thresholds");
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!std::isfinite(thresholds[i])) throw DomainError("Weight::step: non-finite threshold");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw DomainError("Weight::step: thresholds must be strictly increasing");
    }
  }
  bool nonincreasing = true;
  bool nondecreasing = true;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) throw DomainError("Weight::step: non-finite level");
    if (i > 0) {
      nonincreasing = nonincreasing && levels[i] <= levels[i - 1];
      nondecreasing = nondecreasing && levels[i] >= levels[i - 1];
    }
  }
  if (!nonincreasing && !nondecreasing) throw DomainError("Weight::step: levels are not monotone");
  auto impl = make(WeightKind::step);
  impl->direction = nonincreasing ? Monotonicity::nonincreasing : Monotonicity::nondecreasing;
  impl->nonnegative = std::all_of(levels.begin(), levels.end(), [](double l) { return l >= 0.0; });
  impl->thresholds = std::move(thresholds);
  impl->levels = std::move(levels);
  impl->left_continuous = left_continuous;
  return Weight(impl);
}

Weight Weight::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("Weight::constant: value must be finite");
  auto impl = make(WeightKind::constant);
  impl->param = c;
  impl->nonnegative = c >= 0.0;
  return Weight(impl);
}

Weight Weight::exp_decay(double t) {
  if (!std::isfinite(t) || t == 0.0) throw DomainError("Weight::exp_decay: rate t must be finite and nonzero");
  auto impl = make(WeightKind::exp_decay);
  impl->param = t;
  impl->direction = t > 0.0 ? Monotonicity::nonincreasing : Monotonicity::nondecreasing;
  return Weight(impl);
}

Weight Weight::power_decay(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("Weight::power_decay: exponent r must be > 0");
  auto impl = make(WeightKind::power_decay);
  impl->param = r;
  return Weight(impl);
}

Weight Weight::affine(double offset, double scale, const Weight& base) {
  if (!std::isfinite(offset) || !std::isfinite(scale)) throw DomainError("Weight::affine: non-finite coefficient");
  if (base.impl_->kind == WeightKind::step) {
    std::vector<double> levels = base.levels();
    for (double& l : levels) l = offset + scale * l;
    return step(base.thresholds(), std::move(levels), base.left_continuous());
  }
  if (base.impl_->kind == WeightKind::constant) return constant(offset + scale * base.parameter());
  auto impl = make(WeightKind::affine);
  impl->base = base;
  impl->offset = offset;
  impl->scale = scale;
  impl->direction = scale >= 0.0 ? base.direction()
                                 : (base.direction() == Monotonicity::nonincreasing ? Monotonicity::nondecreasing
                                                                                     : Monotonicity::nonincreasing);
  impl->nonnegative = offset >= 0.0 && scale >= 0.0 && base.nonnegative();
  return Weight(impl);
}

Weight Weight::custom(std::string label, std::function<double(double)> f, Monotonicity direction,
                      double check_lo, double check_hi, std::function<double(double)> antiderivative,
                      std::optional<DecayBound> decay) {
  if (!f) throw DomainError("Weight::custom: empty evaluator");
  auto impl = make(WeightKind::custom);
  sample_monotone(f, direction, check_lo, check_hi, "Weight '" + label + "'", &impl->nonnegative);
  if (decay) {
    for (int i = 0; i < kSampleCount; ++i) {
      const double x = check_lo + (check_hi - check_lo) * i / (kSampleCount - 1);
      const double bound = decay->constant * std::pow(1.0 + std::abs(x), -decay->exponent);
      if (std::abs(f(x)) > bound * (1.0 + 1e-12)) {
        throw DomainError("Weight '" + label + "': declared decay bound violated at x = " + fmt(x));
      }
    }
  }
  impl->label = std::move(label);
  impl->f = std::move(f);
  impl->antiderivative = std::move(antiderivative);
  impl->direction = direction;
  impl->decay = decay;
  return Weight(impl);
}

std::string_view Weight::kind() const {
  switch (impl_->kind) {
    case WeightKind::step: return "step";
    case WeightKind::constant: return "constant";
    case WeightKind::exp_decay: return "exp_decay";
    case WeightKind::power_decay: return "power_decay";
    case WeightKind::affine: return "affine";
    case WeightKind::resolvent: return "resolvent";
    case WeightKind::custom: return "custom";
  }
  return "?";
}

double Weight::operator()(double x) const { return impl_->eval(x); }

double Weight::integral(double lo, double hi, const AdaptiveOptions& opts) const {
  return impl_->integrate(lo, hi, opts);
}

Monotonicity Weight::direction() const { return impl_->direction; }

bool Weight::is_monotone(Monotonicity m) const {
  if (impl_->direction == m) return true;
  // A constant step/level sequence is monotone both ways.
  if (impl_->kind == WeightKind::constant) return true;
  if (impl_->kind == WeightKind::step) {
    return std::adjacent_find(impl_->levels.begin(), impl_->levels.end(), std::not_equal_to<>()) ==
           impl_->levels.end();
  }
  return false;
}

bool Weight::nonnegative() const { return impl_->nonnegative; }
double Weight::domain_floor() const { return impl_->floor(); }
std::vector<double> Weight::kinks() const { return impl_->kinks(); }
std::optional<DecayBound> Weight::decay() const { return impl_->decay; }
bool Weight::piecewise_constant() const { return impl_->piecewise_constant(); }
const std::vector<double>& Weight::thresholds() const { return impl_->thresholds; }
const std::vector<double>& Weight::levels() const { return impl_->levels; }
bool Weight::left_continuous() const { return impl_->left_continuous; }
double Weight::parameter() const { return impl_->param; }
const std::string& Weight::label() const { return impl_->label; }
double Weight::offset() const { return impl_->offset; }
double Weight::scale() const { return impl_->scale; }
double Weight::shift() const { return impl_->shift; }
int Weight::exponent() const { return impl_->exponent; }

const Weight& Weight::base() const {
  if (!impl_->base) throw DomainError("Weight::base: weight of kind '" + std::string(kind()) + "' has no base");
  return *impl_->base;
}

Weight resolvent_weight(const Weight& f, double a, int exponent) {
  if (exponent < 1) throw DomainError("resolvent_weight: exponent must be >= 1");
  if (!std::isfinite(a)) throw DomainError("resolvent_weight: shift must be finite");
  if (!f.is_monotone(Monotonicity::nonincreasing) || !f.nonnegative()) {
    throw DomainError("resolvent_weight: base weight must be nonincreasing and nonnegative");
  }
  auto impl = make(WeightKind::resolvent);
  impl->base = f;
  impl->shift = a;
  impl->exponent = exponent;
  impl->direction = Monotonicity::nonincreasing;
  impl->nonnegative = true;
  // Product of two nonincreasing nonnegative factors; confirm on a grid.
  const double lo = -a + 1e-3 * (1.0 + std::abs(a));
  const double hi = -a + 64.0 * (1.0 + std::abs(a));
  bool nonneg = true;
  sample_monotone([&impl](double x) { return impl->eval(x); }, Monotonicity::nonincreasing, lo, hi,
                  "resolvent weight", &nonneg);
  return Weight(impl);
}

Weight complement_weight(double c, const Weight& f) {
  if (!f.is_monotone(Monotonicity::nondecreasing)) {
    throw DomainError("complement_weight: weight must be nondecreasing");
  }
  return Weight::affine(c, -1.0, f);
}

int q_of(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("q_of: need p >= 1, got " + fmt(p));
  if (p == 1.0) return 1;
  int q = static_cast<int>(std::floor(p)) + 1;
  if (q % 2 == 0) ++q;
  return q;
}

double decay_check(const Weight& f, int q, double lo, double hi, int count) {
  if (count < 2) throw DomainError("decay_check: need at least 2 grid points");
  double best = 0.0;
  const double floor = f.domain_floor();
  for (int i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * i / (count - 1);
    if (!(x > floor)) continue;
    best = std::max(best, std::pow(1.0 + std::abs(x), q + 1) * std::abs(f(x)));
  }
  return best;
}

// ---------------------------------------------------------------------------

TraceTestFunction::TraceTestFunction(std::string kind, std::string label, std::vector<double> params,
                                     std::function<double(double)> f, std::function<double(double)> df,
                                     double floor, double check_lo, double check_hi)
    : kind_(std::move(kind)),
      label_(std::move(label)),
      params_(std::move(params)),
      f_(std::move(f)),
      df_(std::move(df)),
      floor_(floor) {
  if (!f_ || !df_) throw DomainError("TraceTestFunction: empty evaluator");
  constexpr int samples = 21;
  for (int i = 0; i < samples; ++i) {
    const double x = check_lo + (check_hi - check_lo) * i / (samples - 1);
    const double h = 1e-5 * (1.0 + std::abs(x));
    if (!(x - h > floor_)) continue;
    const double fd = (f_(x + h) - f_(x - h)) / (2.0 * h);
    const double d = df_(x);
    if (!(std::abs(fd - d) <= 1e-6 * (1.0 + std::abs(d)))) {
      throw DomainError("TraceTestFunction '" + label_ + "': derivative disagrees with finite differences at x = " +
                        fmt(x) + " (" + fmt(d) + " vs " + fmt(fd) + ")");
    }
  }
}

TraceTestFunction TraceTestFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty() || coeffs.size() > 7) throw DomainError("TraceTestFunction::polynomial: degree must be 0..6");
  std::ostringstream label;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    if (label.tellp() > 0) label << " + ";
    label << coeffs[k];
    if (k > 0) label << "x^" << k;
  }
  auto f = [coeffs](double x) {
    double s = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * x + coeffs[k];
    return s;
  };
  auto df = [coeffs](double x) {
    double s = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) s = s * x + static_cast<double>(k) * coeffs[k];
    return s;
  };
  return TraceTestFunction("polynomial", label.str().empty() ? "0" : label.str(), coeffs, f, df, kNoFloor, -4.0,
                           4.0);
}

TraceTestFunction TraceTestFunction::exp_decay(double t) {
  if (!std::isfinite(t)) throw DomainError("TraceTestFunction::exp_decay: t must be finite");
  return TraceTestFunction(
      "exp_decay", "exp(-" + fmt(t) + "x)", {t}, [t](double x) { return std::exp(-t * x); },
      [t](double x) { return -t * std::exp(-t * x); }, kNoFloor, -4.0, 4.0);
}

TraceTestFunction TraceTestFunction::tanh() {
  return TraceTestFunction(
      "tanh", "tanh(x)", {}, [](double x) { return std::tanh(x); },
      [](double x) {
        const double c = std::cosh(x);
        return 1.0 / (c * c);
      },
      kNoFloor, -4.0, 4.0);
}

TraceTestFunction TraceTestFunction::resolvent_power(double a, double p) {
  if (!(p > 0.0) || !std::isfinite(a)) throw DomainError("TraceTestFunction::resolvent_power: need p > 0");
  return TraceTestFunction(
      "resolvent_power", "(x+" + fmt(a) + ")^-" + fmt(p), {a, p},
      [a, p](double x) { return std::pow(x + a, -p); }, [a, p](double x) { return -p * std::pow(x + a, -p - 1.0); },
      -a, -a + 0.5, -a + 8.5);
}

TraceTestFunction TraceTestFunction::custom(std::string label, std::function<double(double)> f,
                                            std::function<double(double)> df, double check_lo, double check_hi) {
  return TraceTestFunction("custom", label, {}, std::move(f), std::move(df), kNoFloor, check_lo, check_hi);
}

}  // namespace ssflab

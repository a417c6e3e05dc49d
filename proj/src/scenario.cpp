#include "ssflab/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "ssflab/io.hpp"
#include "ssflab/spectral_shift.hpp"

namespace ssflab {

namespace {

const std::vector<std::string>& property_tags() {
  static const std::vector<std::string> tags = [] {
    std::vector<std::string> t;
    for (const auto& p : property_catalog()) t.push_back(p.tag);
    return t;
  }();
  return tags;
}

const std::vector<std::string>& computation_tags() {
  static const std::vector<std::string> tags = [] {
    std::vector<std::string> t;
    for (const auto& p : computation_catalog()) t.push_back(p.tag);
    return t;
  }();
  return tags;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double unit_uniform(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

// -- config parsing -----------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(path + "." + key, "unknown field");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path + "." + key, "expected a finite number");
  return x;
}

std::int64_t get_integer(const json& obj, const std::string& path, const char* key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& path, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& obj, const std::string& path, const char* key,
                                std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(path + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

GeneratorSpec parse_generator(const json& j, const std::string& path) {
  GeneratorSpec g;
  g.kind = get_string(j, path, "kind", "ensemble");
  if (g.kind == "ensemble") {
    check_keys(j, path, {"kind", "ensemble", "dims", "scale"});
    g.ensemble = get_string(j, path, "ensemble", "goe");
    require(g.ensemble == "goe" || g.ensemble == "gue" || g.ensemble == "diagonal" || g.ensemble == "mixed",
            path + ".ensemble", "expected goe, gue, diagonal or mixed");
    if (j.contains("dims")) {
      const auto& d = j.at("dims");
      const std::string dp = path + ".dims";
      if (d.is_object()) {
        check_keys(d, dp, {"min", "max"});
        const auto lo = get_integer(d, dp, "min", 1);
        const auto hi = get_integer(d, dp, "max", lo);
        require(lo >= 1, dp + ".min", "dims must be >= 1");
        require(hi >= lo, dp + ".max", "max must be >= min");
        g.dim_range = std::make_pair(static_cast<Index>(lo), static_cast<Index>(hi));
      } else if (d.is_array()) {
        require(!d.empty(), dp, "expected at least one dimension");
        g.dims.clear();
        for (std::size_t i = 0; i < d.size(); ++i) {
          const std::string ip = dp + "[" + std::to_string(i) + "]";
          require(d[i].is_number_integer(), ip, "expected an integer");
          require(d[i].get<std::int64_t>() >= 1, ip, "dims must be >= 1");
          g.dims.push_back(d[i].get<Index>());
        }
      } else if (d.is_number_integer()) {
        require(d.get<std::int64_t>() >= 1, dp, "dims must be >= 1");
        g.dims = {d.get<Index>()};
      } else {
        fail(dp, "expected an integer, an array of integers or {min, max}");
      }
    }
    g.scale = get_number(j, path, "scale", 1.0);
    require(g.scale > 0.0, path + ".scale", "must be > 0");
  } else if (g.kind == "schrodinger") {
    check_keys(j, path, {"kind", "n", "potential_scale"});
    g.n = get_integer(j, path, "n", 32);
    require(g.n >= 2, path + ".n", "must be >= 2");
    g.potential_scale = get_number(j, path, "potential_scale", 1.0);
    require(g.potential_scale > 0.0, path + ".potential_scale", "must be > 0");
  } else if (g.kind == "fixed") {
    check_keys(j, path, {"kind", "a0", "v", "v2", "w"});
    require(j.contains("a0") && j.contains("v"), path, "fixed generator needs a0 and v");
    g.fixed = j;
    // Shapes are checked here so that bad matrices are configuration errors.
    Index dim = -1;
    for (const char* key : {"a0", "v", "v2", "w"}) {
      if (!j.contains(key)) continue;
      try {
        const auto op = operator_from_json<Complex>(j.at(key));
        if (dim >= 0 && op.dim() != dim) fail(path + "." + key, "dimension differs from a0");
        dim = op.dim();
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        fail(path + "." + key, e.what());
      }
    }
  } else {
    fail(path + ".kind", "expected ensemble, schrodinger or fixed");
  }
  return g;
}

ScenarioParams parse_params(const json& j, const std::string& path) {
  check_keys(j, path,
             {"alphas", "alpha_points", "alpha_random", "couplings", "s_points", "s_max", "a_multipliers", "shift",
              "q", "p", "ps", "ladder_max", "alpha_max", "points", "n_step", "betas", "lambda0_count",
              "lambda0_range", "pairs", "pair_alpha_max", "family", "path_lower", "path_upper", "abs_tol",
              "max_depth", "coupling_nodes"});
  ScenarioParams p;
  p.alphas = get_numbers(j, path, "alphas", {});
  p.alpha_points = static_cast<int>(get_integer(j, path, "alpha_points", p.alpha_points));
  p.alpha_random = static_cast<int>(get_integer(j, path, "alpha_random", p.alpha_random));
  p.couplings = get_numbers(j, path, "couplings", p.couplings);
  p.s_points = static_cast<int>(get_integer(j, path, "s_points", p.s_points));
  p.s_max = get_number(j, path, "s_max", p.s_max);
  p.a_multipliers = get_numbers(j, path, "a_multipliers", {});
  p.shift = get_number(j, path, "shift", p.shift);
  p.q = static_cast<int>(get_integer(j, path, "q", p.q));
  p.p = get_number(j, path, "p", p.p);
  p.ps = get_numbers(j, path, "ps", p.ps);
  p.ladder_max = static_cast<int>(get_integer(j, path, "ladder_max", p.ladder_max));
  p.alpha_max = get_number(j, path, "alpha_max", p.alpha_max);
  p.points = static_cast<int>(get_integer(j, path, "points", p.points));
  p.n_step = get_integer(j, path, "n_step", p.n_step);
  p.betas = get_numbers(j, path, "betas", p.betas);
  p.lambda0_count = static_cast<int>(get_integer(j, path, "lambda0_count", p.lambda0_count));
  p.lambda0_range = get_number(j, path, "lambda0_range", p.lambda0_range);
  p.pairs = static_cast<int>(get_integer(j, path, "pairs", p.pairs));
  p.pair_alpha_max = get_number(j, path, "pair_alpha_max", p.pair_alpha_max);
  p.family = get_string(j, path, "family", p.family);
  p.path_lower = get_number(j, path, "path_lower", p.path_lower);
  p.path_upper = get_number(j, path, "path_upper", p.path_upper);
  p.abs_tol = get_number(j, path, "abs_tol", p.abs_tol);
  p.max_depth = static_cast<int>(get_integer(j, path, "max_depth", p.max_depth));
  p.coupling_nodes = static_cast<int>(get_integer(j, path, "coupling_nodes", p.coupling_nodes));

  for (std::size_t i = 0; i < p.alphas.size(); ++i) {
    require(p.alphas[i] >= 0.0 && p.alphas[i] <= 1.0, path + ".alphas[" + std::to_string(i) + "]",
            "must lie in [0, 1]");
  }
  require(p.alpha_points >= 2, path + ".alpha_points", "must be >= 2");
  require(p.alpha_random >= 0, path + ".alpha_random", "must be >= 0");
  require(p.s_points >= 2, path + ".s_points", "must be >= 2");
  require(p.s_max > 0.0, path + ".s_max", "must be > 0");
  for (double m : p.a_multipliers) require(m >= 1.0, path + ".a_multipliers", "entries must be >= 1");
  require(p.q >= 1, path + ".q", "must be >= 1");
  require(p.p >= 1.0, path + ".p", "must be >= 1");
  for (double x : p.ps) require(x >= 1.0, path + ".ps", "entries must be >= 1");
  require(p.ladder_max >= 0 && p.ladder_max <= 40, path + ".ladder_max", "must lie in [0, 40]");
  require(p.alpha_max > 0.0, path + ".alpha_max", "must be > 0");
  require(p.points >= 2, path + ".points", "must be >= 2");
  require(p.n_step >= 1, path + ".n_step", "must be >= 1");
  for (double b : p.betas) require(b >= 0.0 && b <= 1.0, path + ".betas", "entries must lie in [0, 1]");
  require(p.lambda0_count >= 1, path + ".lambda0_count", "must be >= 1");
  require(p.lambda0_range > 0.0, path + ".lambda0_range", "must be > 0");
  require(p.pairs >= 1, path + ".pairs", "must be >= 1");
  require(p.pair_alpha_max > 0.0, path + ".pair_alpha_max", "must be > 0");
  require(p.family == "path" || p.family == "segment", path + ".family", "expected path or segment");
  require(p.path_lower < p.path_upper, path + ".path_upper", "must exceed path_lower");
  require(p.abs_tol > 0.0, path + ".abs_tol", "must be > 0");
  require(p.max_depth >= 1, path + ".max_depth", "must be >= 1");
  require(p.coupling_nodes >= 2, path + ".coupling_nodes", "must be >= 2");
  return p;
}

ScenarioSpec parse_scenario(const json& j, const std::string& path) {
  check_keys(j, path, {"name", "property", "trials", "generator", "weight", "functions", "params", "tolerance_scale"});
  ScenarioSpec s;
  require(j.contains("name"), path, "missing field 'name'");
  s.name = get_string(j, path, "name", "");
  require(!s.name.empty(), path + ".name", "must not be empty");
  for (char c : s.name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    require(ok, path + ".name", "may contain only letters, digits, '_', '-' and '.'");
  }
  require(j.contains("property"), path, "missing field 'property'");
  s.property = get_string(j, path, "property", "");
  require(is_property_tag(s.property) || is_computation_tag(s.property), path + ".property",
          "unknown tag '" + s.property + "'");
  s.trials = static_cast<int>(get_integer(j, path, "trials", 1));
  require(s.trials >= 1, path + ".trials", "must be >= 1");
  if (j.contains("generator")) s.generator = parse_generator(j.at("generator"), path + ".generator");
  if (j.contains("weight")) {
    try {
      (void)weight_from_json(j.at("weight"));
    } catch (const std::exception& e) {
      fail(path + ".weight", e.what());
    }
    s.weight = j.at("weight");
  }
  if (j.contains("functions")) {
    const auto& fs = j.at("functions");
    require(fs.is_array(), path + ".functions", "expected an array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      try {
        (void)trace_function_from_json(fs[i]);
      } catch (const std::exception& e) {
        fail(path + ".functions[" + std::to_string(i) + "]", e.what());
      }
      s.functions.push_back(fs[i]);
    }
  }
  if (j.contains("params")) s.params = parse_params(j.at("params"), path + ".params");
  s.tolerance_scale = get_number(j, path, "tolerance_scale", 1.0);
  require(s.tolerance_scale > 0.0, path + ".tolerance_scale", "must be > 0");
  return s;
}

// -- instances ----------------------------------------------------------------

template <typename Scalar>
struct Instance {
  Op<Scalar> a0;
  Op<Scalar> v1;
  Op<Scalar> v2;
  Op<Scalar> w;
  bool fixed = false;
};

template <typename Scalar>
Op<Scalar> square(const Op<Scalar>& x) {
  return Op<Scalar>(x.matrix() * x.matrix());
}

Index trial_dim(const GeneratorSpec& g, int trial, std::mt19937_64& rng) {
  if (g.dim_range) {
    const auto [lo, hi] = *g.dim_range;
    return lo + static_cast<Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  return g.dims[static_cast<std::size_t>(trial) % g.dims.size()];
}

Ensemble trial_ensemble(const GeneratorSpec& g, int trial) {
  if (g.ensemble == "mixed") {
    static constexpr Ensemble cycle[] = {Ensemble::goe, Ensemble::gue, Ensemble::diagonal};
    return cycle[trial % 3];
  }
  return parse_ensemble(g.ensemble);
}

bool trial_is_complex(const GeneratorSpec& g, int trial) {
  if (g.kind == "ensemble") return trial_ensemble(g, trial) == Ensemble::gue;
  if (g.kind == "fixed") {
    for (const char* key : {"a0", "v", "v2", "w"})
      if (g.fixed.contains(key) && json_matrix_is_complex(g.fixed.at(key))) return true;
  }
  return false;
}

template <typename Scalar>
Instance<Scalar> make_instance(const GeneratorSpec& g, int trial, std::uint64_t trial_seed, std::mt19937_64& rng) {
  if (g.kind == "fixed") {
    const auto a0 = operator_from_json<Scalar>(g.fixed.at("a0"));
    const auto v = operator_from_json<Scalar>(g.fixed.at("v"));
    const auto v2 = g.fixed.contains("v2") ? operator_from_json<Scalar>(g.fixed.at("v2")) : v;
    const auto w = g.fixed.contains("w") ? operator_from_json<Scalar>(g.fixed.at("w")) : Op<Scalar>::zero(a0.dim());
    return {a0, v, v2, w, true};
  }
  if (g.kind == "schrodinger") {
    const std::vector<double> zero(static_cast<std::size_t>(g.n), 0.0);
    auto a0 = build_discrete_schrodinger<Scalar>(g.n, zero);
    const auto pot = [&](std::uint64_t k) {
      return build_random_hermitian<Scalar>(g.n, Ensemble::diagonal, stream_seed(trial_seed, k), g.potential_scale);
    };
    return {std::move(a0), pot(1), pot(2), pot(3), false};
  }
  const Index dim = trial_dim(g, trial, rng);
  const Ensemble e = trial_ensemble(g, trial);
  const auto draw = [&](std::uint64_t k) { return build_random_hermitian<Scalar>(dim, e, stream_seed(trial_seed, k), g.scale); };
  return {draw(0), draw(1), draw(2), draw(3), false};
}

// -- trials -------------------------------------------------------------------

struct TrialOutput {
  PropertyReport report;
  std::vector<Curve> curves;
};

double spectral_floor(std::initializer_list<Spectrum> specs) {
  double m = 0.0;
  for (const auto& s : specs) m = std::min(m, s.min());
  return 1.0 + std::max(0.0, -m);
}

std::vector<double> with_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

template <typename Scalar>
TrialOutput run_trial(const ScenarioSpec& sc, const Instance<Scalar>& in, std::uint64_t trial_seed,
                      std::mt19937_64& rng, bool want_curves) {
  const auto& p = sc.params;
  const auto& tag = sc.property;
  const std::string stem = "curves/" + sc.name + "__";
  const auto weight_or = [&](Weight fallback) { return sc.weight ? weight_from_json(*sc.weight) : fallback; };
  const auto alpha_grid = [&] {
    return p.alphas.empty() ? default_alpha_grid(stream_seed(trial_seed, 100), p.alpha_points, p.alpha_random)
                            : p.alphas;
  };
  QuadratureOptions quad;
  quad.abs_tol = p.abs_tol;
  quad.max_depth = p.max_depth;
  quad.coupling_nodes = p.coupling_nodes;
  const auto context = [&](const Weight& f) { return FunctionalContext<Scalar>(in.a0, f, quad); };
  TrialOutput out;

  if (tag == "th1_concavity" || tag == "cor1_convexity") {
    const bool th1 = tag == "th1_concavity";
    const auto grid = alpha_grid();
    std::vector<PropertyReport> parts;
    if (sc.weight) {
      const auto f = weight_from_json(*sc.weight);
      parts.push_back(th1 ? check_concavity_th1(in.a0, in.v1, in.v2, f, grid)
                          : check_convexity_cor1(in.a0, in.v1, in.v2, f, grid));
    } else {
      for (int k = 0; k < p.lambda0_count; ++k) {
        const double lambda0 = p.lambda0_range * (2.0 * unit_uniform(rng) - 1.0);
        const auto f = Weight::threshold(lambda0, th1 ? Side::minus : Side::plus);
        parts.push_back(th1 ? check_concavity_th1(in.a0, in.v1, in.v2, f, grid)
                            : check_convexity_cor1(in.a0, in.v1, in.v2, f, grid));
      }
    }
    out.report = merge_reports(parts);
    out.report.trials = 1;
  } else if (tag == "cor2_operator_family") {
    const auto f = weight_or(Weight::threshold(0.0, Side::minus));
    const auto family = p.family == "segment"
                            ? CouplingFamily<Scalar>::segment(in.a0, in.v1, in.v2)
                            : CouplingFamily<Scalar>::path(in.a0, in.v1, in.v2, in.fixed ? in.w : square(in.w),
                                                           p.path_lower, p.path_upper);
    out.report = check_operator_family_cor2(family, f, alpha_grid());
  } else if (tag == "bs_identity") {
    CouplingCurve curve;
    out.report = check_bs_identity(context(weight_or(Weight::threshold(0.0, Side::minus))), in.v1, p.couplings, &curve);
    if (want_curves) out.curves.push_back({stem + "bs_rhs.csv", coupling_curve_csv(curve)});
  } else if (tag == "bs_monotone") {
    std::vector<double> s;
    for (int i = 0; i < p.s_points; ++i) s.push_back(p.s_max * i / (p.s_points - 1));
    CouplingCurve curve;
    out.report = check_bs_monotone(context(weight_or(Weight::threshold(0.0, Side::minus))), in.v1, s, &curve);
    if (want_curves) out.curves.push_back({stem + "coupling_trace.csv", coupling_curve_csv(curve)});
  } else if (tag == "invariance") {
    out.report = check_invariance(in.a0, in.v1, p.shift, p.ps);
  } else if (tag == "weighted_concavity" || tag == "weight_limit") {
    const auto f = weight_or(Weight::threshold(1.0, Side::minus));
    const auto family = CouplingFamily<Scalar>::segment(in.a0, in.v1, in.v2);
    const double a0 = family_shift_floor(family);
    if (tag == "weighted_concavity") {
      std::vector<double> shifts;
      for (double m : with_default(p.a_multipliers, {1.0, 2.0, 4.0})) shifts.push_back(m * a0);
      out.report = check_weighted_concavity(family, f, shifts, p.q, alpha_grid());
    } else {
      std::vector<double> ladder;
      for (int k = 0; k <= p.ladder_max; ++k) ladder.push_back(std::ldexp(a0, k));
      out.report = check_weight_limit(family, f, p.q, ladder, alpha_grid());
    }
  } else if (tag == "projection_convergence") {
    const Index dim = in.a0.dim();
    std::vector<Index> ns;
    for (Index n = std::min(p.n_step, dim); n < dim; n += p.n_step) ns.push_back(n);
    ns.push_back(dim);
    out.report = check_projection_convergence(in.a0, in.v1, p.shift, p.p, ns);
  } else if (tag == "subadditivity") {
    std::vector<CouplingPair> pairs;
    for (int k = 0; k < p.pairs; ++k) {
      const double a1 = p.pair_alpha_max * unit_uniform(rng);
      const double a2 = p.pair_alpha_max * unit_uniform(rng);
      pairs.push_back({a1, a2});
    }
    out.report = check_subadditivity(context(weight_or(Weight::threshold(0.0, Side::minus))), in.v1, pairs);
  } else if (tag == "ssf_monotone") {
    out.report = check_ssf_monotone(in.a0, in.v1, in.fixed ? in.w : square(in.w));
  } else if (tag == "chain_rule") {
    out.report = check_chain_rule(in.a0, in.a0 + in.v1, in.v2);
  } else if (tag == "trace_norm_bound") {
    const double floor = spectral_floor({spectrum(in.a0), spectrum(in.a0 + in.v1)});
    std::vector<double> shifts;
    for (double m : with_default(p.a_multipliers, {1.0, 2.0, 4.0, 8.0})) shifts.push_back(m * floor);
    out.report = check_trace_norm_bound(in.a0, in.v1, shifts);
  } else if (tag == "trace_identity") {
    out.report = check_trace_identity(in.a0, in.v1);
  } else if (tag == "krein_formula") {
    std::vector<TraceTestFunction> fs;
    if (sc.functions.empty()) {
      fs = {TraceTestFunction::polynomial({0.0, 0.0, 1.0}), TraceTestFunction::polynomial({0.0, 0.0, 0.0, 1.0}),
            TraceTestFunction::exp_decay(0.5), TraceTestFunction::tanh()};
    } else {
      for (const auto& j : sc.functions) fs.push_back(trace_function_from_json(j));
    }
    out.report = check_trace_formula(in.a0, in.v1, fs);
  } else if (tag == "sum_reduction") {
    out.report = check_sum_reduction(in.v1);
    if (want_curves) {
      const auto spec = spectrum(in.v1);
      const auto id = Op<Scalar>::identity(in.v1.dim());
      const double up = spec.max() + 1.0;
      const double down = spec.min() - 1.0;
      out.curves.push_back({stem + "zeta_minus.csv", integrated_ssf_csv(ssf(up * id + in.v1, up * id), Side::minus)});
      out.curves.push_back(
          {stem + "zeta_plus.csv", integrated_ssf_csv(ssf(down * id + in.v1, down * id), Side::plus)});
    }
  } else if (tag == "inverse_convexity") {
    const auto id = Op<Scalar>::identity(in.a0.dim());
    const auto x = in.fixed ? in.a0 : square(in.v1) + 0.1 * id;
    const auto y = in.fixed ? in.v1 : square(in.v2) + 0.1 * id;
    out.report = check_inverse_convexity(x, y, p.betas);
  } else if (tag == "strong_coupling") {
    StrongCouplingResult res;
    const auto v = in.fixed ? in.v1 : square(in.w);
    out.report = check_strong_coupling(context(weight_or(Weight::threshold(0.0, Side::minus))), v, p.alpha_max,
                                       p.points, &res);
    if (want_curves) out.curves.push_back({stem + "ratio.csv", coupling_curve_csv(res.ratios)});
  } else {
    throw ConfigError("unknown tag '" + tag + "'");
  }
  return out;
}

TrialOutput run_task(const ScenarioSpec& sc, std::uint64_t scenario_seed, int trial) {
  const std::uint64_t trial_seed = stream_seed(scenario_seed, static_cast<std::uint64_t>(trial));
  std::mt19937_64 rng(stream_seed(trial_seed, 1000));
  const bool want_curves = trial == 0;
  if (trial_is_complex(sc.generator, trial)) {
    const auto in = make_instance<Complex>(sc.generator, trial, trial_seed, rng);
    return run_trial(sc, in, trial_seed, rng, want_curves);
  }
  const auto in = make_instance<double>(sc.generator, trial, trial_seed, rng);
  return run_trial(sc, in, trial_seed, rng, want_curves);
}

bool report_passes(const PropertyReport& r) {
  if (std::isnan(r.worst_gap)) return false;
  return r.kind == CheckKind::one_sided ? r.worst_gap >= -r.tolerance : std::abs(r.worst_gap) <= r.tolerance;
}

void apply_tolerance_scale(PropertyReport& r, double scale) {
  if (scale == 1.0) return;
  r.tolerance *= scale;
  r.pass = report_passes(r);
}

std::string failure_file(const ReportRow& row) {
  std::string f = "failures/" + row.scenario + "__" + row.report.property;
  if (row.trial >= 0) f += "__trial" + std::to_string(row.trial);
  return f + ".json";
}

}  // namespace

bool is_property_tag(std::string_view tag) {
  const auto& t = property_tags();
  return std::find(t.begin(), t.end(), tag) != t.end();
}

bool is_computation_tag(std::string_view tag) {
  const auto& t = computation_tags();
  return std::find(t.begin(), t.end(), tag) != t.end();
}

ScenarioConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_keys(root, "config", {"seed", "scenarios"});
  ScenarioConfig cfg;
  if (root.contains("seed")) {
    const auto& s = root.at("seed");
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0), "config.seed",
            "expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("scenarios")) {
    const auto& list = root.at("scenarios");
    require(list.is_array(), "config.scenarios", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "scenarios[" + std::to_string(i) + "]";
      auto s = parse_scenario(list[i], path);
      require(names.insert(s.name).second, path + ".name", "duplicate scenario name '" + s.name + "'");
      cfg.scenarios.push_back(std::move(s));
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

bool RunResult::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.report.pass; });
}

RunResult run_scenarios(const ScenarioConfig& config, int jobs) {
  struct Task {
    std::size_t scenario;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < config.scenarios.size(); ++s)
    for (int t = 0; t < config.scenarios[s].trials; ++t) tasks.push_back({s, t});

  std::vector<TrialOutput> outputs(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& sc = config.scenarios[tasks[i].scenario];
      try {
        outputs[i] = run_task(sc, stream_seed(config.seed, fnv1a(sc.name)), tasks[i].trial);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i]) continue;
    const auto& sc = config.scenarios[tasks[i].scenario];
    const std::string where = "scenario '" + sc.name + "' trial " + std::to_string(tasks[i].trial) + ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const NumericalError& e) {
      throw NumericalError(where + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const DomainError& e) {
      throw DomainError(where + e.what());
    } catch (const std::exception& e) {
      throw Error(where + e.what());
    }
  }

  RunResult result;
  std::size_t i = 0;
  for (const auto& sc : config.scenarios) {
    const bool per_trial = is_computation_tag(sc.property);
    std::vector<PropertyReport> reports;
    for (int t = 0; t < sc.trials; ++t, ++i) {
      auto& o = outputs[i];
      for (auto& c : o.curves) result.curves.push_back(std::move(c));
      if (per_trial) {
        apply_tolerance_scale(o.report, sc.tolerance_scale);
        result.rows.push_back({sc.name, t, std::move(o.report), {}});
      } else {
        reports.push_back(std::move(o.report));
      }
    }
    if (!per_trial) {
      auto merged = merge_reports(reports);
      merged.property = sc.property;
      apply_tolerance_scale(merged, sc.tolerance_scale);
      result.rows.push_back({sc.name, -1, std::move(merged), {}});
    }
  }
  for (auto& row : result.rows)
    if (!row.report.pass) row.witness_file = failure_file(row);
  return result;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "scenario,property,trials,worst_gap,tolerance,pass,witness_file\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.report.property << ',' << r.report.trials << ',' << format_number(r.report.worst_gap)
       << ',' << format_number(r.report.tolerance) << ',' << (r.report.pass ? "true" : "false") << ','
       << r.witness_file << '\n';
  }
  return os.str();
}

void write_outputs(const RunResult& result, const ScenarioConfig& config, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  fs::create_directories(out / "curves");
  fs::create_directories(out / "failures");
  const auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
  };
  write(out / "report.csv", report_csv(result.rows));
  for (const auto& c : result.curves) write(out / c.file, c.csv);
  for (const auto& row : result.rows) {
    if (row.witness_file.empty()) continue;
    auto j = report_to_json(row.report);
    j["scenario"] = row.scenario;
    j["seed"] = config.seed;
    if (row.trial >= 0) j["trial"] = row.trial;
    write(out / row.witness_file, j.dump(2) + "\n");
  }
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* s = std::getenv("SSF_LAB_SEED");
  if (!s) return std::nullopt;
  const std::string text(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("SSF_LAB_SEED: expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

}  // namespace ssflab

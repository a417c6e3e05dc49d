#include "ssflab/io.hpp"

#include <charconv>
#include <sstream>

namespace ssflab {

bool json_matrix_is_complex(const json& j) {
  if (!j.is_object() || !j.contains("entries_im")) return false;
  for (const auto& x : j.at("entries_im"))
    if (x.get<double>() != 0.0) return true;
  return false;
}

json step_function_to_json(const StepFunction& xi) {
  return json{{"breakpoints", xi.breakpoints()}, {"values", xi.values()}};
}

StepFunction step_function_from_json(const json& j) {
  return StepFunction(j.at("breakpoints").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
}

json weight_to_json(const Weight& w) {
  const std::string kind(w.kind());
  if (kind == "step") {
    // Threshold indicators keep their own spelling.
    const auto& t = w.thresholds();
    const auto& l = w.levels();
    if (t.size() == 1 && l == std::vector<double>{1.0, 0.0} && w.left_continuous()) {
      return json{{"kind", "threshold"}, {"sign", "minus"}, {"lambda0", t[0]}};
    }
    if (t.size() == 1 && l == std::vector<double>{0.0, 1.0} && !w.left_continuous()) {
      return json{{"kind", "threshold"}, {"sign", "plus"}, {"lambda0", t[0]}};
    }
    return json{{"kind", "step"}, {"thresholds", t}, {"levels", l}, {"left_continuous", w.left_continuous()}};
  }
  if (kind == "constant") return json{{"kind", kind}, {"value", w.parameter()}};
  if (kind == "exp_decay") return json{{"kind", kind}, {"t", w.parameter()}};
  if (kind == "power_decay") return json{{"kind", kind}, {"r", w.parameter()}};
  if (kind == "affine") {
    return json{{"kind", kind}, {"offset", w.offset()}, {"scale", w.scale()}, {"base", weight_to_json(w.base())}};
  }
  if (kind == "resolvent") {
    return json{{"kind", kind}, {"a", w.shift()}, {"exponent", w.exponent()}, {"base", weight_to_json(w.base())}};
  }
  throw DomainError("weight '" + w.label() + "' of kind " + kind + " cannot be serialized");
}

Weight weight_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "threshold") {
    return Weight::threshold(j.at("lambda0").get<double>(), parse_side(j.value("sign", std::string("minus"))));
  }
  if (kind == "step") {
    return Weight::step(j.at("thresholds").get<std::vector<double>>(), j.at("levels").get<std::vector<double>>(),
                        j.value("left_continuous", true));
  }
  if (kind == "constant") return Weight::constant(j.at("value").get<double>());
  if (kind == "exp_decay") return Weight::exp_decay(j.at("t").get<double>());
  if (kind == "power_decay") return Weight::power_decay(j.at("r").get<double>());
  if (kind == "affine") {
    return Weight::affine(j.at("offset").get<double>(), j.at("scale").get<double>(), weight_from_json(j.at("base")));
  }
  if (kind == "resolvent") {
    return resolvent_weight(weight_from_json(j.at("base")), j.at("a").get<double>(), j.at("exponent").get<int>());
  }
  throw DomainError("unknown weight kind '" + kind + "'");
}

json trace_function_to_json(const TraceTestFunction& f) {
  const auto& p = f.parameters();
  if (f.kind() == "polynomial") return json{{"kind", "polynomial"}, {"coeffs", p}};
  if (f.kind() == "exp_decay") return json{{"kind", "exp_decay"}, {"t", p.at(0)}};
  if (f.kind() == "tanh") return json{{"kind", "tanh"}};
  if (f.kind() == "resolvent_power") return json{{"kind", "resolvent_power"}, {"a", p.at(0)}, {"p", p.at(1)}};
  throw DomainError("trace test function '" + f.label() + "' cannot be serialized");
}

TraceTestFunction trace_function_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "polynomial") return TraceTestFunction::polynomial(j.at("coeffs").get<std::vector<double>>());
  if (kind == "exp_decay") return TraceTestFunction::exp_decay(j.at("t").get<double>());
  if (kind == "tanh") return TraceTestFunction::tanh();
  if (kind == "resolvent_power") {
    return TraceTestFunction::resolvent_power(j.at("a").get<double>(), j.at("p").get<double>());
  }
  throw DomainError("unknown trace test function kind '" + kind + "'");
}

json report_to_json(const PropertyReport& r) {
  return json{{"property", r.property},
              {"trials", r.trials},
              {"worst_gap", r.worst_gap},
              {"tolerance", r.tolerance},
              {"kind", r.kind == CheckKind::one_sided ? "one_sided" : "identity"},
              {"pass", r.pass},
              {"witness", r.witness}};
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string step_function_csv(const StepFunction& xi) {
  std::ostringstream os;
  os << "breakpoint,value\n";
  const auto& b = xi.breakpoints();
  for (std::size_t k = 0; k < b.size(); ++k) {
    os << format_number(b[k]) << ',' << format_number(k < xi.pieces() ? xi.values()[k] : 0.0) << '\n';
  }
  return os.str();
}

std::string integrated_ssf_csv(const StepFunction& xi, Side side) {
  std::ostringstream os;
  os << "lambda,value\n";
  const auto& b = xi.breakpoints();
  std::vector<double> pts;
  if (!b.empty()) {
    const double pad = 0.5 * (1.0 + b.back() - b.front());
    pts.push_back(b.front() - pad);
    for (std::size_t k = 0; k < b.size(); ++k) {
      pts.push_back(b[k]);
      if (k + 1 < b.size()) pts.push_back(0.5 * (b[k] + b[k + 1]));
    }
    pts.push_back(b.back() + pad);
  }
  for (double x : pts) os << format_number(x) << ',' << format_number(integrated_ssf(xi, x, side)) << '\n';
  return os.str();
}

std::string coupling_curve_csv(const CouplingCurve& curve) {
  std::ostringstream os;
  os << "alpha,value\n";
  for (std::size_t k = 0; k < curve.alphas.size(); ++k) {
    os << format_number(curve.alphas[k]) << ',' << format_number(curve.values[k]) << '\n';
  }
  return os.str();
}

}  // namespace ssflab

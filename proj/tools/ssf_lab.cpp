#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssflab/io.hpp"
#include "ssflab/scenario.hpp"
#include "ssflab/spectral_shift.hpp"

namespace {

using namespace ssflab;

struct Operands {
  json a0;
  json v;
  std::optional<json> weight;
};

json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

Operands load_operands(const std::string& config, const std::string& a0, const std::string& v,
                       const std::string& weight, bool need_a0) {
  Operands ops;
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw ConfigError("cannot open " + config);
    std::ostringstream os;
    os << in.rdbuf();
    const auto j = parse_json_arg(os.str(), config);
    if (!j.is_object()) throw ConfigError(config + ": expected an object");
    if (j.contains("a0")) ops.a0 = j.at("a0");
    if (j.contains("v")) ops.v = j.at("v");
    if (j.contains("weight")) ops.weight = j.at("weight");
  }
  if (!a0.empty()) ops.a0 = parse_json_arg(a0, "--a0");
  if (!v.empty()) ops.v = parse_json_arg(v, "--v");
  if (!weight.empty()) ops.weight = parse_json_arg(weight, "--weight");
  if (need_a0 && ops.a0.is_null()) throw ConfigError("missing operand a0 (use --a0 or --config)");
  if (ops.v.is_null()) throw ConfigError("missing operand v (use --v or --config)");
  return ops;
}

bool operands_complex(const Operands& ops) {
  return json_matrix_is_complex(ops.a0) || json_matrix_is_complex(ops.v);
}

template <typename Scalar>
StepFunction operand_ssf(const Operands& ops) {
  const auto a0 = operator_from_json<Scalar>(ops.a0);
  const auto v = operator_from_json<Scalar>(ops.v);
  return ssf(a0 + v, a0);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--lambda: '" + item + "' is not a number");
    }
  }
  return out;
}

template <typename Scalar>
std::string gamma_csv(const Operands& ops, double alpha_max, int points, std::ostream& log) {
  const auto a0 = operator_from_json<Scalar>(ops.a0);
  const auto v = operator_from_json<Scalar>(ops.v);
  const auto f = ops.weight ? weight_from_json(*ops.weight) : Weight::threshold(0.0, Side::minus);
  const auto res = strong_coupling_gamma(FunctionalContext<Scalar>(a0, f), v, alpha_max, points);
  log << "gamma " << format_number(res.gamma) << " monotone " << (res.monotone ? "true" : "false")
      << " worst_increase " << format_number(res.worst_increase) << '\n';
  return coupling_curve_csv(res.ratios);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot write " + out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral shift functions and spectral functionals of Hermitian matrix pairs"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the property scenarios of a config file");
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* compute = app.add_subcommand("compute", "Compute a shift function, integrated shift, eigenvalue sums or ratio curve");
  std::string what;
  std::string operand_config;
  std::string a0_text;
  std::string v_text;
  std::string weight_text;
  std::string side_text = "minus";
  std::string lambda_text;
  std::string out_file;
  double alpha_max = 4096.0;
  int points = 13;
  compute->add_option("what", what, "ssf | zeta | sums | gamma")
      ->required()
      ->check(CLI::IsMember({"ssf", "zeta", "sums", "gamma"}));
  compute->add_option("--config", operand_config, "JSON file with a0, v and optionally weight");
  compute->add_option("--a0", a0_text, "A0 as JSON (nested rows or {dim, entries_re, entries_im})");
  compute->add_option("--v", v_text, "V as JSON");
  compute->add_option("--weight", weight_text, "Weight as JSON (gamma)");
  compute->add_option("--sign,--side", side_text, "minus | plus (zeta, sums)")
      ->check(CLI::IsMember({"minus", "plus"}));
  compute->add_option("--lambda", lambda_text, "Comma-separated evaluation points (zeta, sums)");
  compute->add_option("--alpha-max", alpha_max, "Largest coupling constant (gamma)")->check(CLI::PositiveNumber);
  compute->add_option("--points", points, "Number of geometric grid points (gamma)")->check(CLI::Range(1, 64));
  compute->add_option("--out", out_file, "Write the CSV here instead of stdout");

  auto* list = app.add_subcommand("list-properties", "List the property tags");
  bool list_all = false;
  list->add_flag("--all", list_all, "Include the per-trial computation tags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      auto config = load_config(config_path);
      if (const auto seed = seed_from_environment()) config.seed = *seed;
      const auto result = run_scenarios(config, jobs);
      write_outputs(result, config, out_dir);
      return result.all_pass() ? 0 : 1;
    }
    if (*compute) {
      const auto ops = load_operands(operand_config, a0_text, v_text, weight_text, what != "sums");
      const bool cplx = operands_complex(ops);
      const Side side = parse_side(side_text);
      std::ostringstream os;
      if (what == "ssf") {
        emit(step_function_csv(cplx ? operand_ssf<Complex>(ops) : operand_ssf<double>(ops)), out_file);
      } else if (what == "zeta") {
        const auto xi = cplx ? operand_ssf<Complex>(ops) : operand_ssf<double>(ops);
        if (lambda_text.empty()) {
          emit(integrated_ssf_csv(xi, side), out_file);
        } else {
          os << "lambda,value\n";
          for (double x : parse_list(lambda_text)) os << format_number(x) << ',' << format_number(integrated_ssf(xi, x, side)) << '\n';
          emit(os.str(), out_file);
        }
      } else if (what == "sums") {
        const auto spec = cplx ? spectrum(operator_from_json<Complex>(ops.v)) : spectrum(operator_from_json<double>(ops.v));
        std::vector<double> pts;
        if (lambda_text.empty()) {
          for (Index k = 0; k < spec.size(); ++k) {
            pts.push_back(spec[k]);
            if (k + 1 < spec.size()) pts.push_back(0.5 * (spec[k] + spec[k + 1]));
          }
        } else {
          pts = parse_list(lambda_text);
        }
        os << "threshold,value\n";
        for (const auto& p : eigenvalue_sum_curve(spec, pts, side)) {
          os << format_number(p.threshold) << ',' << format_number(p.value) << '\n';
        }
        emit(os.str(), out_file);
      } else {
        emit(cplx ? gamma_csv<Complex>(ops, alpha_max, points, std::cerr)
                  : gamma_csv<double>(ops, alpha_max, points, std::cerr),
             out_file);
      }
      return 0;
    }
    if (*list) {
      for (const auto& p : property_catalog()) std::cout << p.tag << '\t' << p.statement << '\n';
      if (list_all)
        for (const auto& p : computation_catalog()) std::cout << p.tag << '\t' << p.statement << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

// Runs the acceptance suite through the ssf-lab binary and prints one
// PASS/FAIL line per criterion. The full suite is run twice with different
// worker counts; criteria 1-11 are read from the first report, criterion 12
// compares the two reports byte for byte.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Row {
  std::string scenario;
  std::string property;
  int trials = 0;
  double worst_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Criterion {
  int id;
  std::string title;
  // Scenario name prefix and the number of trials each must report.
  std::vector<std::pair<std::string, int>> scenarios;
};

json ensemble(const std::string& e, json dims) {
  return {{"kind", "ensemble"}, {"ensemble", e}, {"dims", std::move(dims)}};
}

json range(int lo, int hi) { return {{"min", lo}, {"max", hi}}; }

json scenario(const std::string& name, const std::string& property, int trials, json generator,
              json params = json::object()) {
  json s{{"name", name}, {"property", property}, {"trials", trials}, {"generator", std::move(generator)}};
  if (!params.empty()) s["params"] = std::move(params);
  return s;
}

json suite() {
  const json schrodinger{{"kind", "schrodinger"}, {"n", 32}, {"potential_scale", 1.0}};
  json sc = json::array();
  sc.push_back(scenario("c01_trace_identity", "trace_identity", 200, ensemble("mixed", range(2, 64))));
  sc.push_back(scenario("c02_krein_formula", "krein_formula", 50, ensemble("goe", range(2, 32))));
  sc.push_back(scenario("c03_th1_concavity", "th1_concavity", 100, ensemble("goe", 32)));
  sc.push_back(scenario("c03_cor1_convexity", "cor1_convexity", 100, ensemble("goe", 32)));
  sc.push_back(scenario("c04_sum_reduction", "sum_reduction", 50, ensemble("mixed", range(2, 32))));
  sc.push_back(scenario("c05_bs_monotone", "bs_monotone", 50, ensemble("mixed", range(2, 24)),
                        {{"s_points", 101}}));
  sc.push_back(scenario("c05_bs_identity", "bs_identity", 50, ensemble("goe", range(2, 10)),
                        {{"couplings", {0.25, 0.5, 1.0, 2.0}}}));
  sc.push_back(scenario("c06_invariance", "invariance", 50, ensemble("mixed", range(2, 16)),
                        {{"ps", {1.0, 2.0, 3.0}}, {"shift", 0.0}}));
  for (int q : {1, 3}) {
    const std::string s = std::to_string(q);
    sc.push_back(scenario("c07_weighted_concavity_q" + s, "weighted_concavity", 2, schrodinger,
                          {{"q", q}, {"a_multipliers", {1.0, 2.0, 4.0}}}));
    sc.push_back(scenario("c07_weight_limit_q" + s, "weight_limit", 2, schrodinger, {{"q", q}, {"ladder_max", 12}}));
  }
  sc.push_back(scenario("c08_inverse_convexity", "inverse_convexity", 100, ensemble("mixed", range(2, 16)),
                        {{"betas", {0.25, 0.5, 0.75}}}));
  sc.push_back(scenario("c09_projection_p1", "projection_convergence", 3, ensemble("goe", 64),
                        {{"n_step", 4}, {"p", 1.0}}));
  sc.push_back(scenario("c09_projection_p2", "projection_convergence", 3, ensemble("goe", 64),
                        {{"n_step", 4}, {"p", 2.0}}));
  sc.push_back(scenario("c10_subadditivity", "subadditivity", 100, ensemble("goe", 32), {{"pairs", 10}}));
  json closed = scenario("c11_strong_coupling_scalar", "strong_coupling", 1,
                         {{"kind", "fixed"}, {"a0", {{0.0}}}, {"v", {{1.0}}}}, {{"alpha_max", 4096.0}, {"points", 13}});
  closed["weight"] = {{"kind", "threshold"}, {"lambda0", 1.0}, {"sign", "minus"}};
  sc.push_back(closed);
  sc.push_back(scenario("c11_strong_coupling_psd", "strong_coupling", 20, ensemble("mixed", range(2, 16)),
                        {{"alpha_max", 4096.0}, {"points", 13}}));
  json decay = scenario("c11_strong_coupling_decay", "strong_coupling", 20, ensemble("goe", range(2, 16)),
                        {{"alpha_max", 4096.0}, {"points", 13}});
  decay["weight"] = {{"kind", "exp_decay"}, {"t", 1.0}};
  sc.push_back(decay);
  return {{"seed", 20240601}, {"scenarios", sc}};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c{
      {1, "trace identity", {{"c01_trace_identity", 200}}},
      {2, "trace formula for smooth test functions", {{"c02_krein_formula", 50}}},
      {3, "concavity and convexity in the perturbation", {{"c03_th1_concavity", 100}, {"c03_cor1_convexity", 100}}},
      {4, "eigenvalue-sum reduction", {{"c04_sum_reduction", 50}}},
      {5, "coupling-trace monotonicity and coupling integral", {{"c05_bs_monotone", 50}, {"c05_bs_identity", 50}}},
      {6, "invariance under resolvent powers", {{"c06_invariance", 50}}},
      {7,
       "weighted concavity and large-shift limit",
       {{"c07_weighted_concavity_q1", 2},
        {"c07_weighted_concavity_q3", 2},
        {"c07_weight_limit_q1", 2},
        {"c07_weight_limit_q3", 2}}},
      {8, "operator convexity of the inverse", {{"c08_inverse_convexity", 100}}},
      {9, "projection convergence", {{"c09_projection_p1", 3}, {"c09_projection_p2", 3}}},
      {10, "subadditivity in the coupling constant", {{"c10_subadditivity", 100}}},
      {11,
       "strong-coupling ratio",
       {{"c11_strong_coupling_scalar", 1}, {"c11_strong_coupling_psd", 20}, {"c11_strong_coupling_decay", 20}}},
  };
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_binary(const fs::path& config, const fs::path& out, int jobs, const fs::path& log) {
  const std::string cmd = "'" + std::string(SSF_LAB_BINARY) + "' run --config '" + config.string() + "' --out '" +
                          out.string() + "' --jobs " + std::to_string(jobs) + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<Row> parse_report(const std::string& csv) {
  std::vector<Row> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() < 6) continue;
    Row r;
    r.scenario = f[0];
    r.property = f[1];
    r.trials = std::stoi(f[2]);
    r.worst_gap = std::stod(f[3]);
    r.tolerance = std::stod(f[4]);
    r.pass = f[5] == "true";
    rows.push_back(r);
  }
  return rows;
}

// Violation in units of the tolerance: identities are two-sided, the other
// checks only fail below zero.
double violation(const Row& r) {
  static const std::set<std::string> identities{"bs_identity", "invariance",   "chain_rule",
                                                "trace_identity", "krein_formula", "sum_reduction"};
  if (!(r.tolerance > 0.0)) return 0.0;
  return identities.count(r.property) ? std::abs(r.worst_gap) / r.tolerance : -r.worst_gap / r.tolerance;
}

}  // namespace

int main() {
  const auto dir = fs::temp_directory_path() / "ssf_lab_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto config = dir / "suite.json";
  std::ofstream(config) << suite().dump(2) << '\n';

  const auto t0 = std::chrono::steady_clock::now();
  const int code1 = run_binary(config, dir / "run1", 1, dir / "run1.log");
  const auto t1 = std::chrono::steady_clock::now();
  const int code2 = run_binary(config, dir / "run2", 3, dir / "run2.log");
  const auto t2 = std::chrono::steady_clock::now();
  const auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  std::cout << "suite run 1 (--jobs 1): exit " << code1 << ", " << secs(t0, t1) << " s\n";
  std::cout << "suite run 2 (--jobs 3): exit " << code2 << ", " << secs(t1, t2) << " s\n";
  if (code1 != 0 && code1 != 1) std::cout << slurp(dir / "run1.log");

  const auto report1 = slurp(dir / "run1" / "report.csv");
  const auto report2 = slurp(dir / "run2" / "report.csv");
  const auto rows = parse_report(report1);

  bool all = true;
  for (const auto& c : criteria()) {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& [prefix, trials] : c.scenarios) {
      int seen = 0;
      int rows_seen = 0;
      double worst = 0.0;
      double worst_tol = 0.0;
      double worst_ratio = -std::numeric_limits<double>::infinity();
      for (const auto& r : rows) {
        if (r.scenario != prefix) continue;
        ++rows_seen;
        seen += r.trials;
        ok = ok && r.pass;
        const double ratio = violation(r);
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          worst = r.worst_gap;
          worst_tol = r.tolerance;
        }
      }
      if (rows_seen == 0 || seen != trials) ok = false;
      detail << ' ' << prefix << ": trials " << seen << "/" << trials << ", worst_gap " << worst << " (tol "
             << worst_tol << ");";
    }
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << " [" << c.title << "]" << detail.str() << '\n';
  }

  const bool same = !report1.empty() && report1 == report2 && code1 == code2;
  all = all && same;
  std::cout << (same ? "PASS" : "FAIL") << " criterion 12 [determinism across --jobs]: report.csv "
            << (same ? "byte-identical" : "differs") << " (" << report1.size() << " bytes)\n";

  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << '\n';
  if (all) fs::remove_all(dir);
  return all ? 0 : 1;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ssflab/hermitian_operator.hpp"
#include "ssflab/property_suite.hpp"

namespace ssflab {

struct GeneratorSpec {
  std::string kind = "ensemble";  // ensemble | schrodinger | fixed
  std::string ensemble = "goe";   // goe | gue | diagonal | mixed
  std::vector<Index> dims{8};     // cycled by trial index
  std::optional<std::pair<Index, Index>> dim_range;  // drawn per trial instead
  double scale = 1.0;
  Index n = 32;
  double potential_scale = 1.0;
  nlohmann::json fixed;  // a0, v, v2, w
};

struct ScenarioParams {
  std::vector<double> alphas;  // explicit coupling grid; empty selects the default
  int alpha_points = 11;
  int alpha_random = 5;
  std::vector<double> couplings{0.25, 0.5, 1.0, 2.0};
  int s_points = 101;
  double s_max = 2.0;
  std::vector<double> a_multipliers;  // empty selects the per-property default
  double shift = 0.0;                 // <= 0 selects the spectral floor
  int q = 1;
  double p = 1.0;
  std::vector<double> ps{1.0, 2.0, 3.0};
  int ladder_max = 12;
  double alpha_max = 4096.0;
  int points = 13;
  Index n_step = 4;
  std::vector<double> betas{0.25, 0.5, 0.75};
  int lambda0_count = 5;
  double lambda0_range = 2.0;
  int pairs = 10;
  double pair_alpha_max = 2.0;
  std::string family = "path";  // path | segment
  double path_lower = 0.0;
  double path_upper = 1.0;
  double abs_tol = 1e-10;
  int max_depth = 40;
  int coupling_nodes = 257;
};

struct ScenarioSpec {
  std::string name;
  std::string property;
  int trials = 1;
  GeneratorSpec generator;
  std::optional<nlohmann::json> weight;
  std::vector<nlohmann::json> functions;
  ScenarioParams params;
  double tolerance_scale = 1.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::vector<ScenarioSpec> scenarios;
};

/// Property tags that report one aggregated row per scenario.
bool is_property_tag(std::string_view tag);
/// Computation tags that report one row per trial.
bool is_computation_tag(std::string_view tag);

/// Parses and validates; errors are ConfigError naming the line (syntax) or
/// the field path (validation).
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

struct ReportRow {
  std::string scenario;
  int trial = -1;  // -1 for aggregated rows
  PropertyReport report;
  std::string witness_file;
};

struct Curve {
  std::string file;  // relative to the output directory
  std::string csv;
};

struct RunResult {
  std::vector<ReportRow> rows;
  std::vector<Curve> curves;
  bool all_pass() const;
};

/// Runs every scenario on `jobs` worker threads. Results are reduced in
/// (scenario, trial) order, so they do not depend on `jobs`.
RunResult run_scenarios(const ScenarioConfig& config, int jobs = 1);

std::string report_csv(const std::vector<ReportRow>& rows);

/// Writes report.csv, curves/ and failures/ under `out`.
void write_outputs(const RunResult& result, const ScenarioConfig& config, const std::filesystem::path& out);

/// SSF_LAB_SEED when set, otherwise nullopt; malformed values are a ConfigError.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace ssflab

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lep {

/// Flat experiment description. Presets fill one; CLI flags or key=value
/// config files override individual fields.
struct ExperimentConfig {
  std::string preset;
  std::string equation;  // "cnls" | "nls2d" | "nls-gl-box"
  std::string scheme;    // "et4" | "et4gl6" | "mst4" | "et2" | "st2" | "gl-box"
  std::string init;      // initial-condition id (see README)

  double x0 = 0.0, length = 0.0;
  int n = 0;
  double y0 = 0.0, length_y = 0.0;
  int m = 0;

  double dt = 0.0, t_end = 0.0, tol = 1e-14;
  int max_iter = 200;
  double alpha = 0.0, beta = 0.0;
  double quintic_amplitude = 1.5;
  int space_stages = 1, time_stages = 1;  // gl-box r and s

  std::string out;  // CSV path; empty -> "<preset|equation>-<scheme>.csv"
  std::vector<double> snapshot_times;
  bool record_stages = false;
};

std::vector<std::string> preset_ids();
/// Throws invalid_argument for an unknown id.
ExperimentConfig preset_config(const std::string& id);

/// Flat key=value file, one pair per line, '#' comments.
ExperimentConfig parse_config_file(const std::string& path);
/// Applies "key=value" to an existing config; throws on unknown keys.
void apply_setting(ExperimentConfig& config, const std::string& key,
                   const std::string& value);
/// Sanity-checks a config; throws invalid_argument with a message.
void validate(const ExperimentConfig& config);

/// One emitted CSV row; unset fields print as blanks.
struct StepRow {
  long step = 0;
  double time = 0.0;
  std::optional<double> energy, gee, charge_u, gce_u, charge_v, gce_v, momentum, gie;
  std::optional<double> max_ecl_residual;
  int iterations = 0;
  std::optional<double> sol_err_inf, sol_err_l2;
};

struct RunSummary {
  double max_gee = 0.0, max_gce_u = 0.0, max_gce_v = 0.0, max_gie = 0.0;
  double max_ecl_residual = 0.0;
  double max_sol_err_inf = 0.0, max_sol_err_l2 = 0.0;
  bool has_solution_error = false;
  bool absolute_fallback = false;  // some relative error used an absolute value
  long total_iterations = 0;
  double mean_iterations = 0.0;
  int steps = 0;
  double wall_seconds = 0.0;
};

std::string csv_header();
std::string csv_row(const StepRow& row);
/// Resolves `out` against the LEP_OUT_DIR environment override.
std::string resolve_output_path(const ExperimentConfig& config);

/// Executes the configured simulation, streaming one CSV row per step
/// (flushed as written, so a non-convergence abort leaves a partial file).
RunSummary run_experiment(const ExperimentConfig& config);
/// In-memory variant used by compare and the tests.
RunSummary run_experiment_rows(const ExperimentConfig& config,
                               std::vector<StepRow>* rows);

struct ConvergenceResult {
  std::vector<double> dts;
  std::vector<double> errors;  // max-in-time sup-norm solution error
  std::vector<double> orders;  // log2(e_i / e_{i+1})
};
/// Requires an exact solution for the configured initial condition.
ConvergenceResult run_convergence(const ExperimentConfig& config,
                                  const std::vector<double>& dts);

/// Runs each scheme on the same configuration; writes a common CSV with a
/// leading scheme column and returns one summary per scheme.
std::vector<std::pair<std::string, RunSummary>> run_compare(
    const ExperimentConfig& config, const std::vector<std::string>& schemes);

}  // namespace lep

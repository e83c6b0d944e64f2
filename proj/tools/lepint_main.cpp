// Command-line driver for the local energy-preserving integrator library:
// runs the bundled experiment presets, step-size studies and scheme
// comparisons, writing per-step conservation diagnostics as CSV.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lep/errors.hpp"
#include "lep/harness.hpp"

namespace {

struct CommonOptions {
  std::string preset;
  std::string config_file;
  std::vector<std::string> sets;  // raw key=value overrides
  std::string scheme, init, out, snapshots;
  double dt = 0, t_end = 0, tol = 0, x0 = 0, length = 0, y0 = 0, length_y = 0;
  double alpha = 0, beta = 0;
  int n = 0, m = 0, max_iter = 0, r = 0, s = 0;
  bool has(const CLI::App& app, const std::string& name) const {
    return app.count(name) > 0;
  }
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--preset", opt.preset, "experiment preset id");
  cmd->add_option("--config", opt.config_file, "key=value config file");
  cmd->add_option("--set", opt.sets, "extra key=value override (repeatable)");
  cmd->add_option("--scheme", opt.scheme, "integration scheme");
  cmd->add_option("--init", opt.init, "initial condition id");
  cmd->add_option("--dt", opt.dt, "time step");
  cmd->add_option("--t-end", opt.t_end, "final time");
  cmd->add_option("--tol", opt.tol, "fixed-point tolerance");
  cmd->add_option("--max-iter", opt.max_iter, "fixed-point sweep limit");
  cmd->add_option("--n", opt.n, "grid points (x)");
  cmd->add_option("--m", opt.m, "grid points (y)");
  cmd->add_option("--x0", opt.x0, "domain origin (x)");
  cmd->add_option("--length", opt.length, "domain length (x)");
  cmd->add_option("--y0", opt.y0, "domain origin (y)");
  cmd->add_option("--length-y", opt.length_y, "domain length (y)");
  cmd->add_option("--alpha", opt.alpha, "cross-advection coefficient");
  cmd->add_option("--beta", opt.beta, "coupling coefficient");
  cmd->add_option("--r", opt.r, "gl-box space stages");
  cmd->add_option("--s", opt.s, "gl-box time stages");
  cmd->add_option("--out", opt.out, "output CSV path");
  cmd->add_option("--snapshots", opt.snapshots, "comma-separated snapshot times");
}

lep::ExperimentConfig build_config(const CLI::App& cmd, const CommonOptions& opt) {
  lep::ExperimentConfig c;
  if (!opt.config_file.empty()) c = lep::parse_config_file(opt.config_file);
  if (!opt.preset.empty()) c = lep::preset_config(opt.preset);
  if (opt.preset.empty() && opt.config_file.empty())
    throw std::invalid_argument("either --preset or --config is required");
  for (const std::string& kv : opt.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    lep::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opt.has(cmd, "--scheme")) c.scheme = opt.scheme;
  if (opt.has(cmd, "--init")) c.init = opt.init;
  if (opt.has(cmd, "--dt")) c.dt = opt.dt;
  if (opt.has(cmd, "--t-end")) c.t_end = opt.t_end;
  if (opt.has(cmd, "--tol")) c.tol = opt.tol;
  if (opt.has(cmd, "--max-iter")) c.max_iter = opt.max_iter;
  if (opt.has(cmd, "--n")) c.n = opt.n;
  if (opt.has(cmd, "--m")) c.m = opt.m;
  if (opt.has(cmd, "--x0")) c.x0 = opt.x0;
  if (opt.has(cmd, "--length")) c.length = opt.length;
  if (opt.has(cmd, "--y0")) c.y0 = opt.y0;
  if (opt.has(cmd, "--length-y")) c.length_y = opt.length_y;
  if (opt.has(cmd, "--alpha")) c.alpha = opt.alpha;
  if (opt.has(cmd, "--beta")) c.beta = opt.beta;
  if (opt.has(cmd, "--r")) c.space_stages = opt.r;
  if (opt.has(cmd, "--s")) c.time_stages = opt.s;
  if (opt.has(cmd, "--out")) c.out = opt.out;
  if (opt.has(cmd, "--snapshots")) lep::apply_setting(c, "snapshots", opt.snapshots);
  return c;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_summary(const std::string& label, const lep::RunSummary& s) {
  std::printf("%s: steps=%d max|GEE|=%.3e max|GCE_U|=%.3e max|GCE_V|=%.3e "
              "max|GIE|=%.3e max|R|=%.3e",
              label.c_str(), s.steps, s.max_gee, s.max_gce_u, s.max_gce_v, s.max_gie,
              s.max_ecl_residual);
  if (s.has_solution_error)
    std::printf(" max_err_inf=%.3e max_err_l2=%.3e", s.max_sol_err_inf, s.max_sol_err_l2);
  std::printf(" mean_iters=%.1f wall=%.1fs", s.mean_iterations, s.wall_seconds);
  if (s.absolute_fallback) std::printf(" [abs-fallback]");
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local energy-preserving integrators for Hamiltonian PDEs"};
  app.require_subcommand(1);

  CommonOptions run_opt, conv_opt, cmp_opt;
  std::string dts_raw, schemes_raw;

  CLI::App* run_cmd = app.add_subcommand("run", "run one simulation, emit CSV");
  add_common(run_cmd, run_opt);

  CLI::App* conv_cmd =
      app.add_subcommand("converge", "step-size study against the exact solution");
  add_common(conv_cmd, conv_opt);
  conv_cmd->add_option("--dts", dts_raw, "comma-separated step sizes")->required();

  CLI::App* cmp_cmd = app.add_subcommand("compare", "run several schemes side by side");
  add_common(cmp_cmd, cmp_opt);
  cmp_cmd->add_option("--schemes", schemes_raw, "comma-separated scheme ids")->required();

  CLI::App* list_cmd = app.add_subcommand("list-presets", "print known preset ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const std::string& id : lep::preset_ids()) std::printf("%s\n", id.c_str());
      return 0;
    }
    if (run_cmd->parsed()) {
      const lep::ExperimentConfig c = build_config(*run_cmd, run_opt);
      const lep::RunSummary s = lep::run_experiment(c);
      print_summary(c.scheme, s);
      std::printf("csv: %s\n", lep::resolve_output_path(c).c_str());
      return 0;
    }
    if (conv_cmd->parsed()) {
      const lep::ExperimentConfig c = build_config(*conv_cmd, conv_opt);
      std::vector<double> dts;
      for (const std::string& s : split_list(dts_raw)) dts.push_back(std::stod(s));
      const lep::ConvergenceResult r = lep::run_convergence(c, dts);
      std::printf("%-12s %-14s %s\n", "dt", "max_err_inf", "observed_order");
      for (size_t i = 0; i < r.dts.size(); ++i) {
        if (i == 0)
          std::printf("%-12.6g %-14.6e %s\n", r.dts[i], r.errors[i], "-");
        else
          std::printf("%-12.6g %-14.6e %.3f\n", r.dts[i], r.errors[i], r.orders[i - 1]);
      }
      return 0;
    }
    if (cmp_cmd->parsed()) {
      const lep::ExperimentConfig c = build_config(*cmp_cmd, cmp_opt);
      const auto results = lep::run_compare(c, split_list(schemes_raw));
      for (const auto& [scheme, summary] : results) print_summary(scheme, summary);
      std::printf("csv: %s\n", lep::resolve_output_path(c).c_str());
      return 0;
    }
  } catch (const lep::NonConvergenceError& e) {
    std::fprintf(stderr, "non-convergence: %s (last change %.3e after %d sweeps)\n",
                 e.what(), e.last_change, e.iterations);
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

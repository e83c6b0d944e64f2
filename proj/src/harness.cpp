#include "lep/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "lep/cnls.hpp"
#include "lep/errors.hpp"
#include "lep/gl_box.hpp"
#include "lep/multisym.hpp"
#include "lep/nls2d.hpp"
#include "lep/spectral_grid.hpp"

namespace lep {

namespace {

const std::vector<SolitonComponent> kBisoliton = {
    {1.0, 1.5, 20.0}, {0.8, -1.5, 80.0}};
const std::vector<SolitonComponent> kTrisoliton = {
    {0.75, 1.5, 20.0}, {1.0, 0.1, 40.0}, {0.5, -1.2, 60.0}};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

double rel_err(double cur, double ref, bool* fallback) {
  if (std::abs(ref) < 1e-300) {
    if (cur != ref) *fallback = true;
    return cur - ref;
  }
  return (cur - ref) / std::abs(ref);
}

struct Emitter {
  std::ofstream* file = nullptr;
  std::vector<StepRow>* rows = nullptr;

  void emit(const StepRow& row) {
    if (rows) rows->push_back(row);
    if (file) {
      (*file) << csv_row(row) << '\n';
      file->flush();
    }
  }
};

void accumulate(RunSummary& s, const StepRow& row) {
  auto take = [](double& slot, const std::optional<double>& v) {
    if (v) slot = std::max(slot, std::abs(*v));
  };
  take(s.max_gee, row.gee);
  take(s.max_gce_u, row.gce_u);
  take(s.max_gce_v, row.gce_v);
  take(s.max_gie, row.gie);
  take(s.max_ecl_residual, row.max_ecl_residual);
  take(s.max_sol_err_inf, row.sol_err_inf);
  take(s.max_sol_err_l2, row.sol_err_l2);
  if (row.sol_err_inf) s.has_solution_error = true;
  if (row.step > 0) {
    s.total_iterations += row.iterations;
    s.steps += 1;
  }
}

long step_count(const ExperimentConfig& c) {
  const double raw = c.t_end / c.dt;
  const long n = std::lround(raw);
  if (n < 1 || std::abs(raw - double(n)) > 1e-9 * std::max(1.0, raw))
    throw std::invalid_argument("config: t_end must be a whole number of steps");
  return n;
}

bool want_snapshot(const ExperimentConfig& c, double t, std::vector<char>& done) {
  for (size_t i = 0; i < c.snapshot_times.size(); ++i)
    if (!done[i] && std::abs(t - c.snapshot_times[i]) <= 0.5 * c.dt) {
      done[i] = 1;
      return true;
    }
  return false;
}

std::string snapshot_path(const std::string& base, double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", t);
  return base + ".snap-" + buf + ".csv";
}

void write_cnls_stages(const std::string& path, const SpectralGrid1D& grid,
                       const CnlsStages& stages) {
  std::ofstream f(path);
  f << "j,abscissa,re_u,im_u,re_v,im_v\n";
  const int s = stages.degree();
  for (int a = 0; a <= s; ++a)
    for (int j = 0; j < grid.size(); ++j)
      f << j << ',' << fmt(double(a) / s) << ',' << fmt(stages.u[a](j).real()) << ','
        << fmt(stages.u[a](j).imag()) << ',' << fmt(stages.v[a](j).real()) << ','
        << fmt(stages.v[a](j).imag()) << '\n';
}

void write_nls2d_stages(const std::string& path, const SpectralGrid2D& grid,
                        const Nls2dStages& stages) {
  std::ofstream f(path);
  f << "j,l,abscissa,re_psi,im_psi\n";
  const int s = stages.degree();
  for (int a = 0; a <= s; ++a)
    for (int j = 0; j < grid.x().size(); ++j)
      for (int l = 0; l < grid.y().size(); ++l) {
        const auto v = stages.psi[a](grid.index(j, l));
        f << j << ',' << l << ',' << fmt(double(a) / s) << ',' << fmt(v.real()) << ','
          << fmt(v.imag()) << '\n';
      }
}

void write_cnls_snapshot(const std::string& path, const SpectralGrid1D& grid,
                         const CnlsState& st) {
  std::ofstream f(path);
  f << "x,abs_u,abs_v\n";
  for (int j = 0; j < grid.size(); ++j)
    f << fmt(grid.point(j)) << ',' << fmt(std::abs(st.u(j))) << ','
      << fmt(std::abs(st.v(j))) << '\n';
}

void write_nls2d_snapshot(const std::string& path, const SpectralGrid2D& grid,
                          const Nls2dState& st) {
  std::ofstream f(path);
  f << "x,y,abs_psi\n";
  for (int j = 0; j < grid.x().size(); ++j)
    for (int l = 0; l < grid.y().size(); ++l)
      f << fmt(grid.x().point(j)) << ',' << fmt(grid.y().point(l)) << ','
        << fmt(std::abs(st.psi(grid.index(j, l)))) << '\n';
}

RunSummary run_cnls(const ExperimentConfig& c, Emitter& em, const std::string& out_base) {
  CnlsParams params;
  params.alpha = c.alpha;
  params.beta = c.beta;
  params.grid = SpectralGrid1D(c.x0, c.length, c.n);
  params.dt = c.dt;
  params.tol = c.tol;
  params.max_iter = c.max_iter;

  CnlsIntegrator::Scheme scheme;
  if (c.scheme == "et4") scheme = CnlsIntegrator::Scheme::et4;
  else if (c.scheme == "et4gl6") scheme = CnlsIntegrator::Scheme::et4gl6;
  else if (c.scheme == "mst4") scheme = CnlsIntegrator::Scheme::mst4;
  else throw std::invalid_argument("config: scheme '" + c.scheme + "' is not a cnls scheme");

  CnlsState state;
  const bool exact_known = (c.init == "benchmark" && c.alpha == 0.0 && c.beta == 0.0);
  if (c.init == "benchmark") state = cnls_benchmark_state(params.grid);
  else if (c.init == "bisoliton")
    state = cnls_soliton_train_state(params.grid, c.alpha, c.beta, kBisoliton);
  else if (c.init == "trisoliton")
    state = cnls_soliton_train_state(params.grid, c.alpha, c.beta, kTrisoliton);
  else if (c.init == "zero") state = CnlsState::zero(c.n);
  else throw std::invalid_argument("config: init '" + c.init + "' is not a cnls initial condition");

  const CnlsIntegrator integrator(params, scheme);
  const CnlsInvariants ref = cnls_invariants(state, params.grid, c.alpha, c.beta);

  RunSummary summary;
  std::vector<char> snap_done(c.snapshot_times.size(), 0);

  auto solution_errors = [&](const CnlsState& st, double t, StepRow& row) {
    if (!exact_known) return;
    double inf = 0.0, l2 = 0.0;
    for (int j = 0; j < c.n; ++j) {
      const auto [ue, ve] = cnls_exact_solution(params.grid.point(j), t);
      (void)ve;
      const double d = std::abs(st.u(j) - ue);
      inf = std::max(inf, d);
      l2 += d * d;
    }
    row.sol_err_inf = inf;
    row.sol_err_l2 = std::sqrt(l2 / c.n);
  };

  StepRow row0;
  row0.step = 0;
  row0.time = 0.0;
  row0.energy = ref.energy;
  row0.charge_u = ref.charge_u;
  row0.charge_v = ref.charge_v;
  row0.momentum = ref.momentum;
  row0.gee = 0.0;
  row0.gce_u = 0.0;
  row0.gce_v = 0.0;
  row0.gie = 0.0;
  solution_errors(state, 0.0, row0);
  em.emit(row0);
  accumulate(summary, row0);
  if (!c.snapshot_times.empty() && want_snapshot(c, 0.0, snap_done))
    write_cnls_snapshot(snapshot_path(out_base, 0.0), params.grid, state);

  const long nsteps = step_count(c);
  CnlsStages last_stages;
  for (long k = 1; k <= nsteps; ++k) {
    CnlsStepResult res = integrator.step(state);
    state = std::move(res.state);
    if (c.record_stages && k == nsteps) last_stages = res.stages;
    const double t = k * c.dt;

    const CnlsInvariants inv = cnls_invariants(state, params.grid, c.alpha, c.beta);
    StepRow row;
    row.step = k;
    row.time = t;
    row.energy = inv.energy;
    row.charge_u = inv.charge_u;
    row.charge_v = inv.charge_v;
    row.momentum = inv.momentum;
    row.gee = rel_err(inv.energy, ref.energy, &summary.absolute_fallback);
    row.gce_u = rel_err(inv.charge_u, ref.charge_u, &summary.absolute_fallback);
    row.gce_v = rel_err(inv.charge_v, ref.charge_v, &summary.absolute_fallback);
    row.gie = rel_err(inv.momentum, ref.momentum, &summary.absolute_fallback);
    row.max_ecl_residual =
        cnls_ecl_residual(res.stages, params.grid, integrator.tableau(), c.dt, c.alpha,
                          c.beta)
            .cwiseAbs()
            .maxCoeff();
    row.iterations = res.iterations;
    solution_errors(state, t, row);
    em.emit(row);
    accumulate(summary, row);

    if (!c.snapshot_times.empty() && want_snapshot(c, t, snap_done))
      write_cnls_snapshot(snapshot_path(out_base, t), params.grid, state);
  }
  if (c.record_stages && nsteps > 0)
    write_cnls_stages(out_base + ".stages.csv", params.grid, last_stages);
  summary.mean_iterations =
      summary.steps ? double(summary.total_iterations) / summary.steps : 0.0;
  return summary;
}

RunSummary run_nls2d(const ExperimentConfig& c, Emitter& em, const std::string& out_base) {
  SpectralGrid2D grid(SpectralGrid1D(c.x0, c.length, c.n),
                      SpectralGrid1D(c.y0, c.length_y, c.m));

  Nls2dProblem problem;
  std::function<std::complex<double>(double, double, double)> exact;  // (x,y,t)
  if (c.init == "gp-attractive") {
    problem = make_gp_problem(
        grid, c.beta,
        [](double x, double y) {
          const double r2 = x * x + y * y;
          return -0.5 * r2 - 2.0 * std::exp(-r2);
        },
        c.dt, c.tol, c.max_iter);
    if (c.beta == 1.0)
      exact = [](double x, double y, double t) {
        return nls2d_exact_solution("gp-attractive", x, y, t);
      };
  } else if (c.init == "gp-repulsive") {
    problem = make_gp_problem(
        grid, c.beta,
        [](double x, double y) { return -0.5 * (x * x + y * y); }, c.dt, c.tol,
        c.max_iter);
  } else if (c.init == "quintic") {
    problem = make_quintic_problem(grid, c.quintic_amplitude, c.dt, c.tol, c.max_iter);
    const double amp = c.quintic_amplitude;
    exact = [amp](double x, double y, double t) {
      return nls2d_exact_solution("quintic", x, y, t, amp);
    };
  } else if (c.init == "zero" || c.init == "free-constant") {
    // free-constant: no external field, no coupling; a constant profile is
    // a stationary state of both the equation and the discretization, so
    // the time error sits at the round-off floor for any dt
    problem = make_gp_problem(
        grid, 0.0, [](double, double) { return 0.0; }, c.dt, c.tol, c.max_iter);
    if (c.init == "free-constant")
      exact = [](double, double, double) { return std::complex<double>(0.7, 0.2); };
  } else {
    throw std::invalid_argument("config: init '" + c.init +
                                "' is not an nls2d initial condition");
  }

  Nls2dState state = Nls2dState::zero(grid.size());
  if (c.init == "free-constant")
    state = nls2d_sample(
        grid, [](double, double) { return std::complex<double>(0.7, 0.2); });
  else if (c.init == "gp-attractive")
    state = nls2d_sample(grid, [](double x, double y) {
      return std::sqrt(2.0) * std::exp(-0.5 * (x * x + y * y));
    });
  else if (c.init == "gp-repulsive")
    state = nls2d_sample(grid, [](double x, double y) {
      return std::exp(-0.5 * (x * x + y * y)) / std::sqrt(M_PI);
    });
  else if (c.init == "quintic") {
    const double amp = c.quintic_amplitude;
    state = nls2d_sample(grid, [amp](double x, double y) {
      return nls2d_exact_solution("quintic", x, y, 0.0, amp);
    });
  }

  Nls2dIntegrator::Scheme scheme;
  if (c.scheme == "et2") scheme = Nls2dIntegrator::Scheme::et2;
  else if (c.scheme == "st2") scheme = Nls2dIntegrator::Scheme::st2;
  else throw std::invalid_argument("config: scheme '" + c.scheme + "' is not an nls2d scheme");

  const Nls2dIntegrator integrator(problem, scheme);
  const Nls2dInvariants ref = nls2d_invariants(state, problem);

  RunSummary summary;
  std::vector<char> snap_done(c.snapshot_times.size(), 0);

  auto solution_errors = [&](const Nls2dState& st, double t, StepRow& row) {
    if (!exact) return;
    double inf = 0.0, l2 = 0.0;
    for (int j = 0; j < c.n; ++j)
      for (int l = 0; l < c.m; ++l) {
        const double d = std::abs(st.psi(grid.index(j, l)) -
                                  exact(grid.x().point(j), grid.y().point(l), t));
        inf = std::max(inf, d);
        l2 += d * d;
      }
    row.sol_err_inf = inf;
    row.sol_err_l2 = std::sqrt(l2 / (double(c.n) * c.m));
  };

  StepRow row0;
  row0.step = 0;
  row0.time = 0.0;
  row0.energy = ref.energy;
  row0.charge_u = ref.charge;
  row0.gee = 0.0;
  row0.gce_u = 0.0;
  solution_errors(state, 0.0, row0);
  em.emit(row0);
  accumulate(summary, row0);
  if (!c.snapshot_times.empty() && want_snapshot(c, 0.0, snap_done))
    write_nls2d_snapshot(snapshot_path(out_base, 0.0), grid, state);

  const long nsteps = step_count(c);
  Nls2dStages last_stages;
  for (long k = 1; k <= nsteps; ++k) {
    Nls2dStepResult res = integrator.step(state);
    state = std::move(res.state);
    if (c.record_stages && k == nsteps) last_stages = res.stages;
    const double t = k * c.dt;

    const Nls2dInvariants inv = nls2d_invariants(state, problem);
    StepRow row;
    row.step = k;
    row.time = t;
    row.energy = inv.energy;
    row.charge_u = inv.charge;
    row.gee = rel_err(inv.energy, ref.energy, &summary.absolute_fallback);
    row.gce_u = rel_err(inv.charge, ref.charge, &summary.absolute_fallback);
    row.max_ecl_residual =
        nls2d_ecl_residual(res.stages, problem, integrator.tableau(), c.dt)
            .cwiseAbs()
            .maxCoeff();
    row.iterations = res.iterations;
    solution_errors(state, t, row);
    em.emit(row);
    accumulate(summary, row);

    if (!c.snapshot_times.empty() && want_snapshot(c, t, snap_done))
      write_nls2d_snapshot(snapshot_path(out_base, t), grid, state);
  }
  if (c.record_stages && nsteps > 0)
    write_nls2d_stages(out_base + ".stages.csv", grid, last_stages);
  summary.mean_iterations =
      summary.steps ? double(summary.total_iterations) / summary.steps : 0.0;
  return summary;
}

RunSummary run_gl_box(const ExperimentConfig& c, Emitter& em) {
  if (c.scheme != "gl-box")
    throw std::invalid_argument("config: scheme '" + c.scheme +
                                "' is not a gl-box scheme");
  const MultiSymplecticSystem1D system = nls_multisymplectic_system();
  GlBoxGrid grid{c.x0, c.length / c.n, c.n};
  const GlSpaceTableau space = gauss_legendre_space_tableau(c.space_stages);
  const CrkTableau time_tab = build_crk_tableau(gauss_legendre_rule(c.time_stages));
  const GlBoxStepper stepper(system, grid, c.dt, time_tab, space, c.tol, c.max_iter);

  // smooth periodic profile u = 0.5 cos x + 0.2 i sin x on [x0, x0 + length)
  auto profile = [](double x) {
    Eigen::VectorXd z(4);
    z << 0.5 * std::cos(x), 0.2 * std::sin(x), -0.25 * std::sin(x), 0.1 * std::cos(x);
    return z;
  };
  auto profile_dx = [](double x) {
    Eigen::VectorXd z(4);
    z << -0.5 * std::sin(x), 0.2 * std::cos(x), -0.25 * std::cos(x), -0.1 * std::sin(x);
    return z;
  };
  GlBoxState state = gl_initial_data(system, grid, space, profile, profile_dx);

  const double e_ref = gl_global_energy(system, grid, space, state.stages, state.dx_stages);

  RunSummary summary;
  StepRow row0;
  row0.step = 0;
  row0.energy = e_ref;
  row0.gee = 0.0;
  em.emit(row0);
  accumulate(summary, row0);

  const long nsteps = step_count(c);
  for (long k = 1; k <= nsteps; ++k) {
    GlBoxStepResult res = stepper.step(state);
    state = std::move(res.next);

    StepRow row;
    row.step = k;
    row.time = k * c.dt;
    const double e = gl_global_energy(system, grid, space, state.stages, state.dx_stages);
    row.energy = e;
    row.gee = rel_err(e, e_ref, &summary.absolute_fallback);
    row.max_ecl_residual = res.ecl_residual.cwiseAbs().maxCoeff();
    row.iterations = res.iterations;
    em.emit(row);
    accumulate(summary, row);
  }
  summary.mean_iterations =
      summary.steps ? double(summary.total_iterations) / summary.steps : 0.0;
  return summary;
}

}  // namespace

std::vector<std::string> preset_ids() {
  return {"exp-5.1",       "exp-5.1-et4-desk", "exp-5.1-mst4-desk", "exp-6.2",
          "exp-6.3",       "exp-6.3-et4-desk", "exp-7.1",           "gp-attractive",
          "exp-7.2",       "gp-repulsive",     "exp-7.3",           "quintic",
          "nls-gl-box",    "zero-smoke"};
}

ExperimentConfig preset_config(const std::string& id) {
  ExperimentConfig c;
  c.preset = id;
  if (id == "exp-5.1" || id == "exp-5.1-et4-desk" || id == "exp-5.1-mst4-desk") {
    c.equation = "cnls";
    c.scheme = (id == "exp-5.1-mst4-desk") ? "mst4" : "et4";
    c.init = "benchmark";
    c.x0 = -30.0;
    c.length = 60.0;
    c.n = 300;
    c.dt = 0.4;
    c.t_end = 120.0;  // desk-scale horizon; full span via --t-end 1200
  } else if (id == "exp-6.2") {
    c.equation = "cnls";
    c.scheme = "et4";
    c.init = "bisoliton";
    c.alpha = 0.5;
    c.beta = 2.0 / 3.0;
    c.x0 = 0.0;
    c.length = 100.0;
    c.n = 450;
    c.dt = 0.2;
    c.t_end = 20.0;
  } else if (id == "exp-6.3" || id == "exp-6.3-et4-desk") {
    c.equation = "cnls";
    c.scheme = (id == "exp-6.3-et4-desk") ? "et4" : "et4gl6";
    c.init = "trisoliton";
    c.alpha = 0.5;
    c.beta = 2.0 / 3.0;
    c.x0 = 0.0;
    c.length = 80.0;
    c.n = 360;
    c.dt = 0.2;
    c.t_end = 20.0;  // full span 100
  } else if (id == "exp-7.1" || id == "gp-attractive") {
    c.equation = "nls2d";
    c.scheme = "et2";
    c.init = "gp-attractive";
    c.beta = 1.0;
    c.x0 = -6.0;
    c.length = 12.0;
    c.n = 42;
    c.y0 = -6.0;
    c.length_y = 12.0;
    c.m = 42;
    c.dt = 0.05;
    c.t_end = 9.0;  // full span 45
  } else if (id == "exp-7.2" || id == "gp-repulsive") {
    c.equation = "nls2d";
    c.scheme = "et2";
    c.init = "gp-repulsive";
    c.beta = -2.0;
    c.x0 = -8.0;
    c.length = 16.0;
    c.n = 36;
    c.y0 = -8.0;
    c.length_y = 16.0;
    c.m = 36;
    c.dt = 0.1;
    c.t_end = 40.0;  // full span 200
  } else if (id == "exp-7.3" || id == "quintic") {
    c.equation = "nls2d";
    c.scheme = "et2";
    c.init = "quintic";
    c.quintic_amplitude = 1.5;
    c.x0 = -4.0;
    c.length = 8.0;
    c.n = 42;
    c.y0 = -4.0;
    c.length_y = 8.0;
    c.m = 42;
    c.dt = 0.01;
    c.t_end = 12.4;  // about ten periods; full span 124
  } else if (id == "nls-gl-box") {
    c.equation = "nls-gl-box";
    c.scheme = "gl-box";
    c.init = "smooth";
    c.x0 = 0.0;
    c.length = 2.0 * M_PI;
    c.n = 32;
    c.dt = 0.01;
    c.t_end = 1.0;
    c.space_stages = 1;
    c.time_stages = 1;
  } else if (id == "zero-smoke") {
    c.equation = "cnls";
    c.scheme = "et4";
    c.init = "zero";
    c.x0 = 0.0;
    c.length = 2.0 * M_PI;
    c.n = 16;
    c.dt = 0.1;
    c.t_end = 1.0;
  } else {
    throw std::invalid_argument("unknown preset '" + id + "'");
  }
  return c;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto to_d = [&](const std::string& v) { return std::stod(v); };
  auto to_i = [&](const std::string& v) { return std::stoi(v); };
  if (key == "preset") c = preset_config(value);
  else if (key == "equation") c.equation = value;
  else if (key == "scheme") c.scheme = value;
  else if (key == "init") c.init = value;
  else if (key == "x0") c.x0 = to_d(value);
  else if (key == "length") c.length = to_d(value);
  else if (key == "n") c.n = to_i(value);
  else if (key == "y0") c.y0 = to_d(value);
  else if (key == "length_y") c.length_y = to_d(value);
  else if (key == "m") c.m = to_i(value);
  else if (key == "dt") c.dt = to_d(value);
  else if (key == "t_end") c.t_end = to_d(value);
  else if (key == "tol") c.tol = to_d(value);
  else if (key == "max_iter") c.max_iter = to_i(value);
  else if (key == "alpha") c.alpha = to_d(value);
  else if (key == "beta") c.beta = to_d(value);
  else if (key == "quintic_amplitude") c.quintic_amplitude = to_d(value);
  else if (key == "space_stages" || key == "r") c.space_stages = to_i(value);
  else if (key == "time_stages" || key == "s") c.time_stages = to_i(value);
  else if (key == "out") c.out = value;
  else if (key == "record_stages") c.record_stages = (value == "1" || value == "true");
  else if (key == "snapshots") {
    c.snapshot_times.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) c.snapshot_times.push_back(std::stod(item));
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(start, end - start + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value");
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    apply_setting(c, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.equation != "cnls" && c.equation != "nls2d" && c.equation != "nls-gl-box")
    throw std::invalid_argument("config: unknown equation '" + c.equation + "'");
  if (!(c.dt != 0.0)) throw std::invalid_argument("config: dt must be nonzero");
  if (!(c.t_end > 0.0)) throw std::invalid_argument("config: t_end must be positive");
  if (!(c.tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
  if (c.max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
  if (c.n < 4) throw std::invalid_argument("config: n too small");
  if (c.equation == "nls2d" && c.m < 4) throw std::invalid_argument("config: m too small");
  step_count(c);
}

std::string csv_header() {
  return "step,time,energy,gee,charge_u,gce_u,charge_v,gce_v,momentum,gie,"
         "max_ecl_residual,iterations,sol_err_inf,sol_err_l2";
}

std::string csv_row(const StepRow& r) {
  std::string out = std::to_string(r.step) + ',' + fmt(r.time);
  out += ',' + fmt_opt(r.energy);
  out += ',' + fmt_opt(r.gee);
  out += ',' + fmt_opt(r.charge_u);
  out += ',' + fmt_opt(r.gce_u);
  out += ',' + fmt_opt(r.charge_v);
  out += ',' + fmt_opt(r.gce_v);
  out += ',' + fmt_opt(r.momentum);
  out += ',' + fmt_opt(r.gie);
  out += ',' + fmt_opt(r.max_ecl_residual);
  out += ',' + std::to_string(r.iterations);
  out += ',' + fmt_opt(r.sol_err_inf);
  out += ',' + fmt_opt(r.sol_err_l2);
  return out;
}

std::string resolve_output_path(const ExperimentConfig& c) {
  std::string path = c.out;
  if (path.empty())
    path = (c.preset.empty() ? c.equation : c.preset) + "-" + c.scheme + ".csv";
  const char* dir = std::getenv("LEP_OUT_DIR");
  if (dir && *dir && !path.empty() && path.front() != '/')
    path = std::string(dir) + "/" + path;
  return path;
}

RunSummary run_experiment_rows(const ExperimentConfig& c, std::vector<StepRow>* rows) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  Emitter em;
  em.rows = rows;
  RunSummary summary;
  const std::string out_base = resolve_output_path(c);
  if (c.equation == "cnls") summary = run_cnls(c, em, out_base);
  else if (c.equation == "nls2d") summary = run_nls2d(c, em, out_base);
  else summary = run_gl_box(c, em);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& c) {
  validate(c);
  const std::string path = resolve_output_path(c);
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
  file << csv_header() << '\n';
  file.flush();

  const auto t0 = std::chrono::steady_clock::now();
  Emitter em;
  em.file = &file;
  RunSummary summary;
  if (c.equation == "cnls") summary = run_cnls(c, em, path);
  else if (c.equation == "nls2d") summary = run_nls2d(c, em, path);
  else summary = run_gl_box(c, em);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

ConvergenceResult run_convergence(const ExperimentConfig& c,
                                  const std::vector<double>& dts) {
  if (dts.size() < 2)
    throw std::invalid_argument("converge: need at least two step sizes");
  ConvergenceResult result;
  for (double dt : dts) {
    ExperimentConfig cc = c;
    cc.dt = dt;
    RunSummary s = run_experiment_rows(cc, nullptr);
    if (!s.has_solution_error)
      throw std::invalid_argument("converge: no exact solution for init '" + c.init + "'");
    result.dts.push_back(dt);
    result.errors.push_back(s.max_sol_err_inf);
  }
  for (size_t i = 0; i + 1 < result.errors.size(); ++i)
    result.orders.push_back(std::log2(result.errors[i] / result.errors[i + 1]));
  return result;
}

std::vector<std::pair<std::string, RunSummary>> run_compare(
    const ExperimentConfig& c, const std::vector<std::string>& schemes) {
  if (schemes.empty()) throw std::invalid_argument("compare: no schemes given");
  const std::string path = resolve_output_path(c);
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
  file << "scheme," << csv_header() << '\n';

  std::vector<std::pair<std::string, RunSummary>> out;
  for (const std::string& scheme : schemes) {
    ExperimentConfig cc = c;
    cc.scheme = scheme;
    std::vector<StepRow> rows;
    RunSummary summary = run_experiment_rows(cc, &rows);
    for (const StepRow& row : rows) file << scheme << ',' << csv_row(row) << '\n';
    file.flush();
    out.emplace_back(scheme, summary);
  }
  return out;
}

}  // namespace lep

#pragma once

// Builds problems from a RunConfig and drives single runs and convergence studies.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermodamage/analysis.hpp"
#include "thermodamage/config.hpp"
#include "thermodamage/mesh.hpp"
#include "thermodamage/stepper.hpp"

namespace thermodamage {

struct Problem {
  MeshPtr mesh;
  ModelParams params;
  BCSpec bc;
  ProblemData data;
  TimeGrid grid;
  RunOptions options;
  double C_ell = 0.0;
  double h = 0.0;
};

inline Mesh build_mesh(const MeshConfig& m) {
  if (m.domain == "unit_square") return build_unit_square(m.n, m.kind);
  if (m.domain == "notched") return build_notched_square(m.n, m.kind, m.notch);
  throw std::invalid_argument("unknown domain '" + m.domain + "'");
}

inline ModelParams model_params(const MaterialConfig& m, double h) {
  ModelParams p;
  p.moduli = {m.lambda, m.mu, 2};
  p.rho = m.rho;
  p.kappa = m.kappa;
  p.ell = m.ell_over_h > 0.0 ? m.ell_over_h * h : m.ell;
  p.Gc = m.Gc;
  p.gamma0 = m.gamma0;
  p.conductivity = m.conductivity == "power_law" ? ConductivityModel::power_law(m.c1, m.beta, m.c0, m.c2)
                                                 : ConductivityModel::constant(m.K, m.beta);
  return p;
}

/// Assembles all run inputs. When `mesh` is given it replaces the configured mesh.
inline Problem build_problem(const RunConfig& cfg, MeshPtr mesh = nullptr) {
  Problem pr;
  pr.mesh = mesh ? std::move(mesh) : std::make_shared<const Mesh>(build_mesh(cfg.mesh));
  pr.h = shape_report(*pr.mesh).h_max;
  pr.params = model_params(cfg.material, pr.h);
  pr.params.validate();
  pr.grid = TimeGrid::from_steps(cfg.time.T, cfg.time.M);
  pr.C_ell = ellipticity_constant(pr.params.moduli, cfg.analysis.ellipticity == "inverse" ? EllipticityConvention::inverse
                                                                                          : EllipticityConvention::coercive);
  const CatalogContext ctx{pr.params, pr.grid};
  const auto fn = [&](const std::string& s) { return make_function(s, ctx); };
  const auto vec = [&](const std::string& a, const std::string& b) -> VectorSpaceTimeFunction {
    auto fa = fn(a), fb = fn(b);
    return [fa, fb](const Point& x, double t) { return std::array<double, 2>{fa(x, t), fb(x, t)}; };
  };
  const auto at0 = [](VectorSpaceTimeFunction f) -> VectorFunction { return [f](const Point& x) { return f(x, 0.0); }; };
  const auto s0 = [&](const std::string& s) -> ScalarFunction {
    auto f = fn(s);
    return [f](const Point& x) { return f(x, 0.0); };
  };
  const auto& d = cfg.data;
  pr.data.f = vec(d.f_x, d.f_y);
  pr.data.gamma = fn(d.gamma);
  pr.data.u0 = at0(vec(d.u0_x, d.u0_y));
  pr.data.v0 = at0(vec(d.v0_x, d.v0_y));
  pr.data.phi0 = s0(d.phi0);
  pr.data.theta0 = s0(d.theta0);
  for (const auto& e : cfg.bc) {
    BoundaryCondition b;
    b.tag = e.tag;
    b.kind = e.kind == "neumann" ? BCKind::neumann : BCKind::dirichlet;
    for (const auto& v : e.values) b.values.push_back(fn(v));
    if (e.field == "u") {
      pr.bc.u.push_back(b);
    } else if (e.field == "phi") {
      pr.bc.phi.push_back(b);
    } else {
      pr.bc.theta.push_back(b);
    }
  }
  pr.bc.validate();
  NewtonConfig nc;
  nc.tol_rel = cfg.solver.newton_tol;
  nc.max_iter = cfg.solver.newton_max_iter;
  nc.line_search = parse_line_search(cfg.solver.line_search);
  nc.linear_solver = cfg.solver.linear_solver == "cg" ? LinearSolverKind::cg : LinearSolverKind::direct;
  pr.options.step.damage_newton = nc;
  pr.options.step.heat_newton = nc;
  pr.options.step.momentum_solver = nc.linear_solver;
  pr.options.step.clip_damage = cfg.solver.clip_damage;
  pr.options.step.freeze_damage = cfg.solver.freeze_damage;
  pr.options.step.freeze_momentum = cfg.solver.freeze_momentum;
  pr.options.step.freeze_heat = cfg.solver.freeze_heat;
  pr.options.snapshot_stride = cfg.output.snapshot_stride;
  return pr;
}

inline Trajectory run_problem(const Problem& pr) { return run(pr.mesh, pr.params, pr.bc, pr.data, pr.grid, pr.options); }

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

struct ExactErrors {
  std::string field;
  double l2 = 0.0;
  double h1 = 0.0;
};

/// Errors of the final state against the analytic solution of an MMS preset.
inline ExactErrors exact_errors(const std::string& kind, const Trajectory& tr) {
  const double pi = M_PI;
  if (kind == "mms-elastic") {
    const VectorFunction u = [pi](const Point& x) {
      const double s = std::sin(pi * x[0]) * std::sin(pi * x[1]);
      return std::array<double, 2>{s, s};
    };
    const VectorGradientFunction g = [pi](const Point& x) {
      const double gx = pi * std::cos(pi * x[0]) * std::sin(pi * x[1]);
      const double gy = pi * std::sin(pi * x[0]) * std::cos(pi * x[1]);
      return std::array<std::array<double, 2>, 2>{{{gx, gy}, {gx, gy}}};
    };
    return {"u", l2_error(tr.final_state.u_curr, u), h1_semi_error(tr.final_state.u_curr, g)};
  }
  if (kind == "mms-heat") {
    const ScalarFunction th = [pi](const Point& x) { return std::cos(pi * x[0]) * std::cos(pi * x[1]); };
    const GradientFunction g = [pi](const Point& x) {
      return std::array<double, 2>{-pi * std::sin(pi * x[0]) * std::cos(pi * x[1]), -pi * std::cos(pi * x[0]) * std::sin(pi * x[1])};
    };
    return {"theta", l2_error(tr.final_state.theta_curr, th), h1_semi_error(tr.final_state.theta_curr, g)};
  }
  throw std::invalid_argument("no analytic solution for '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Runs with file output
// ---------------------------------------------------------------------------

struct RunSummary {
  Trajectory trajectory;
  AprioriQuantities apriori;
  AssumptionReport assumptions;
  StabilityReport stability;
};

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

/// Runs the configured problem and writes outputs into cfg.output.dir:
/// steps.csv, monitors.csv, stability.csv, apriori.txt, assumptions.txt,
/// assumptions.kv, VTK snapshots (vtk/), and exact_errors.csv for MMS runs.
inline RunSummary run_and_write(const RunConfig& cfg, std::ostream& log) {
  const Problem pr = build_problem(cfg);
  RunSummary s;
  s.trajectory = run_problem(pr);
  const auto& tr = s.trajectory;
  const std::filesystem::path dir(cfg.output.dir);
  std::filesystem::create_directories(dir);
  {
    auto os = open_out(dir / "config.txt");
    os << serialize_config(cfg);
  }
  {
    auto os = open_out(dir / "steps.csv");
    write_step_reports_csv(os, tr.reports);
  }
  {
    auto os = open_out(dir / "monitors.csv");
    write_monitors_csv(os, tr);
  }
  if (cfg.output.vtk) write_vtk_series(dir / "vtk", tr);
  const double area = pr.mesh->total_area();
  const int L = tr.steps_done();
  s.apriori = compute_L1L(tr.data_norms, pr.params, pr.grid, L, area, pr.C_ell);
  if (!tr.monitors.empty()) fill_monitors(s.apriori, tr.monitors.back(), pr.grid.tau);
  {
    auto os = open_out(dir / "apriori.txt");
    write_apriori(os, s.apriori);
  }
  s.stability = stability_monitor(tr, pr.params, pr.C_ell);
  {
    auto os = open_out(dir / "stability.csv");
    write_stability_csv(os, s.stability);
  }
  if (!tr.failed) {
    s.assumptions = check_theorem_assumptions(pr.params, tr.data_norms, pr.grid, area, pr.C_ell);
    auto os = open_out(dir / "assumptions.txt");
    write_assumption_text(os, s.assumptions);
    auto kv = open_out(dir / "assumptions.kv");
    write_assumption_kv(kv, s.assumptions);
  }
  if (cfg.analysis.exact != "none" && !tr.failed) {
    const auto e = exact_errors(cfg.analysis.exact, tr);
    auto os = open_out(dir / "exact_errors.csv");
    os.precision(17);
    os << "field,h,L2,H1semi\n" << e.field << ',' << pr.h << ',' << e.l2 << ',' << e.h1 << '\n';
    log << "error vs analytic " << e.field << ": L2 = " << e.l2 << ", H1 = " << e.h1 << '\n';
  }
  log << "steps completed: " << L << " / " << pr.grid.M << '\n';
  if (!tr.reports.empty()) {
    const auto& r = tr.reports.back();
    log << "final phi range [" << r.phi_min << ", " << r.phi_max << "], max theta " << r.theta_max << '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

struct ConvergenceResult {
  ErrorTable table;
  std::vector<Trajectory> levels;  // coarse to fine, reference last
  bool failed = false;
  std::string failure;
};

/// Runs the configured problem on `levels` nested uniform refinements of the
/// configured mesh plus one reference level, and tabulates L2 and
/// H1-seminorm errors of u, phi, theta at the final step.
inline ConvergenceResult run_convergence(const RunConfig& cfg, int levels, std::ostream* log = nullptr) {
  if (levels < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
  ConvergenceResult out;
  std::vector<MeshPtr> meshes{std::make_shared<const Mesh>(build_mesh(cfg.mesh))};
  for (int i = 1; i <= levels; ++i) meshes.push_back(std::make_shared<const Mesh>(refine_uniform(*meshes.back())));
  std::vector<double> hs;
  for (const auto& m : meshes) {
    const Problem pr = build_problem(cfg, m);
    hs.push_back(pr.h);
    if (log) *log << "level h = " << pr.h << " (" << m->num_cells() << " cells, ell = " << pr.params.ell << ")\n";
    out.levels.push_back(run_problem(pr));
    if (out.levels.back().failed) {
      out.failed = true;
      out.failure = out.levels.back().failure;
      break;
    }
  }
  out.table.columns = {"u_L2", "phi_L2", "theta_L2", "u_H1", "phi_H1", "theta_H1"};
  if (out.failed) return out;
  const Trajectory& ref = out.levels.back();
  for (int i = 0; i < levels; ++i) {
    const Trajectory& tr = out.levels[static_cast<std::size_t>(i)];
    ErrorRow row;
    row.h = hs[static_cast<std::size_t>(i)];
    row.tau = tr.grid.tau;
    for (ErrorNorm n : {ErrorNorm::L2, ErrorNorm::H1semi}) {
      for (FieldName f : {FieldName::u, FieldName::phi, FieldName::theta}) row.errors.push_back(error_vs_reference(tr, ref, f, n));
    }
    out.table.rows.push_back(row);
  }
  out.table = convergence_rates(out.table);
  return out;
}

}  // namespace thermodamage

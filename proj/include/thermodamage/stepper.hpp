#pragma once

// Time loop of the fully discrete scheme. Each step solves, in order,
//   damage   (semismooth Newton, given phi^k, u^k),
//   momentum (one linear solve, given phi^{k+1}, theta^k),
//   heat     (Newton, given theta^k and delta_tau u).
// All cross couplings are lagged, so this sequence solves the coupled step.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thermodamage/assembly.hpp"
#include "thermodamage/linalg.hpp"
#include "thermodamage/mesh.hpp"
#include "thermodamage/model.hpp"
#include "thermodamage/nonlinear.hpp"
#include "thermodamage/space.hpp"

namespace thermodamage {

struct TimeGrid {
  double T = 1.0;
  int M = 1;
  double tau = 1.0;

  static TimeGrid from_steps(double T, int M) {
    if (M < 1) throw std::invalid_argument("TimeGrid: M must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("TimeGrid: T must be positive");
    return {T, M, T / M};
  }

  double t(int k) const { return k * tau; }

  void validate() const {
    if (M < 1) throw std::invalid_argument("TimeGrid: M must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("TimeGrid: tau must be positive");
    if (std::abs(tau * M - T) > 1e-12 * std::max(1.0, T)) throw std::invalid_argument("TimeGrid: tau * M != T");
  }
};

/// (v^{k-1} - 2 v^k + v^{k+1}) / tau^2
template <class T>
T stencil_ddt2(const T& v_km1, const T& v_k, const T& v_kp1, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("stencil_ddt2: tau must be positive");
  return T((v_km1 - 2.0 * v_k + v_kp1) / (tau * tau));
}

/// (v^{k+1} - v^{k-1}) / (2 tau)
template <class T>
T stencil_centered(const T& v_km1, const T& v_kp1, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("stencil_centered: tau must be positive");
  return T((v_kp1 - v_km1) / (2.0 * tau));
}

/// (v^{k+1} - v^k) / tau
template <class T>
T stencil_forward(const T& v_k, const T& v_kp1, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("stencil_forward: tau must be positive");
  return T((v_kp1 - v_k) / tau);
}

using VectorSpaceTimeFunction = std::function<std::array<double, 2>(const Point&, double)>;

/// Volume data and initial conditions. Empty functions mean zero.
struct ProblemData {
  VectorSpaceTimeFunction f;
  SpaceTimeFunction gamma;
  VectorFunction u0, v0;
  ScalarFunction phi0, theta0;
};

struct StateHistory {
  Field u_prev;
  Field u_curr;
  Field phi_curr;
  Field theta_curr;
  int k = 0;
};

struct StepReport {
  int k = 0;  // index of the new level
  int damage_iters = 0;
  int heat_iters = 0;
  std::vector<double> damage_residuals;
  std::vector<double> heat_residuals;
  double momentum_residual = 0.0;  // ||A u - b|| / max(||b||, 1)
  bool damage_converged = true;
  bool heat_converged = true;
  double penalty_violation = 0.0;  // \int [phi^{k+1} - phi^k]_+
  double phi_min = 0.0;
  double phi_max = 0.0;
  double theta_max = 0.0;
};

struct StepOptions {
  NewtonConfig damage_newton{};
  NewtonConfig heat_newton{};
  LinearSolverKind momentum_solver = LinearSolverKind::direct;
  bool clip_damage = false;  // project phi^{k+1} onto [0, 1]
  bool freeze_damage = false;
  bool freeze_momentum = false;
  bool freeze_heat = false;
  bool operator==(const StepOptions&) const = default;
};

class StepFailure : public std::runtime_error {
public:
  StepFailure(const std::string& what, StepReport r) : std::runtime_error(what), report(std::move(r)) {}
  StepReport report;
};

namespace detail {

inline ScalarFunction at_time(const SpaceTimeFunction& f, double t) {
  if (!f) return [](const Point&) { return 0.0; };
  return [f, t](const Point& x) { return f(x, t); };
}

inline VectorFunction at_time(const VectorSpaceTimeFunction& f, double t) {
  if (!f) return [](const Point&) { return std::array<double, 2>{0.0, 0.0}; };
  return [f, t](const Point& x) { return f(x, t); };
}

inline std::set<int> nodes_on_tag(const Mesh& m, const std::string& tag) {
  std::set<int> out;
  for (std::size_t f : m.facets_with_tag(tag)) {
    for (int n : m.boundary_facets[f].nodes) out.insert(n);
  }
  return out;
}

inline void check_tags(const Mesh& m, const std::vector<BoundaryCondition>& list) {
  for (const auto& bc : list) {
    if (m.facets_with_tag(bc.tag).empty()) throw std::invalid_argument("boundary tag '" + bc.tag + "' not present in mesh");
  }
}

}  // namespace detail

/// Dirichlet dofs of one field at time t. Later conditions win on shared corner nodes.
inline Constraints dirichlet_dofs(const Mesh& m, const std::vector<BoundaryCondition>& list, int dofs_per_node, double t) {
  std::map<std::size_t, double> fixed;
  for (const auto& bc : list) {
    if (bc.kind != BCKind::dirichlet) continue;
    for (int n : detail::nodes_on_tag(m, bc.tag)) {
      for (int i = 0; i < dofs_per_node; ++i) {
        const auto& g = bc.values[static_cast<std::size_t>(i)];
        if (!g) continue;
        const double v = g(m.nodes[static_cast<std::size_t>(n)], t);
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite Dirichlet value on tag '" + bc.tag + "'");
        fixed[static_cast<std::size_t>(n) * static_cast<std::size_t>(dofs_per_node) + static_cast<std::size_t>(i)] = v;
      }
    }
  }
  return {fixed.begin(), fixed.end()};
}

/// Neumann data of one component at time t, as boundary fluxes.
inline std::vector<BoundaryFlux> neumann_data(const std::vector<BoundaryCondition>& list, int component, double t) {
  std::vector<BoundaryFlux> out;
  for (const auto& bc : list) {
    if (bc.kind != BCKind::neumann) continue;
    const auto& g = bc.values[static_cast<std::size_t>(component)];
    if (!g) continue;
    out.push_back({bc.tag, detail::at_time(g, t)});
  }
  return out;
}

/// u^{-1} = I_h u0 - tau I_h v0, u^0 = I_h u0, phi^0 = I_h phi0, theta^0 = I_h theta0.
inline StateHistory initialize(const MeshPtr& mesh, const ProblemData& d, const TimeGrid& grid) {
  if (!mesh) throw std::invalid_argument("initialize: null mesh");
  grid.validate();
  const VectorFunction zero_v = [](const Point&) { return std::array<double, 2>{0.0, 0.0}; };
  const ScalarFunction zero_s = [](const Point&) { return 0.0; };
  StateHistory s;
  s.u_curr = interpolate_nodal(mesh, d.u0 ? d.u0 : zero_v);
  const Field v = interpolate_nodal(mesh, d.v0 ? d.v0 : zero_v);
  s.u_prev = s.u_curr;
  s.u_prev.coeffs = s.u_curr.coeffs - grid.tau * v.coeffs;
  s.phi_curr = interpolate_nodal(mesh, d.phi0 ? d.phi0 : zero_s);
  s.theta_curr = interpolate_nodal(mesh, d.theta0 ? d.theta0 : zero_s);
  s.k = 0;
  return s;
}

/// Advances from level k to k+1. Volume and Neumann data are sampled at t_k,
/// Dirichlet data at t_{k+1}.
inline std::pair<StateHistory, StepReport> step(const StateHistory& s, const ModelParams& p, const BCSpec& bc,
                                                const ProblemData& d, const TimeGrid& grid, const StepOptions& opt = {}) {
  const MeshPtr& mesh = s.u_curr.mesh;
  for (const Field* f : {&s.u_prev, &s.phi_curr, &s.theta_curr}) require_same_mesh(s.u_curr, *f, "step");
  const Mesh& m = *mesh;
  const double tau = grid.tau;
  const double tk = grid.t(s.k), tk1 = grid.t(s.k + 1);

  StepReport rep;
  rep.k = s.k + 1;
  StateHistory next;
  next.k = s.k + 1;
  next.u_prev = s.u_curr;

  // damage
  next.phi_curr = s.phi_curr;
  if (!opt.freeze_damage) {
    const Constraints phi_bc = dirichlet_dofs(m, bc.phi, 1, tk1);
    const Vector phi_load = assemble_boundary_load(m, neumann_data(bc.phi, 0, tk));
    Field trial = s.phi_curr;
    for (const auto& [dof, v] : phi_bc) trial.coeffs[static_cast<Eigen::Index>(dof)] = v;
    auto eval = [&](const Vector& x) {
      trial.coeffs = x;
      Linearization lin = assemble_damage(trial, s.phi_curr, s.u_curr, p);
      lin.residual -= phi_load;
      constrain_linearization(lin, phi_bc);
      return lin;
    };
    try {
      auto [x, nr] = newton_solve(eval, trial.coeffs, opt.damage_newton);
      next.phi_curr.coeffs = std::move(x);
      rep.damage_iters = nr.iterations;
      rep.damage_residuals = std::move(nr.residual_history);
      rep.damage_converged = nr.converged;
    } catch (const SolverBreakdown& e) {
      throw StepFailure(std::string("damage solve failed: ") + e.what(), rep);
    }
    if (!rep.damage_converged) throw StepFailure("damage Newton did not converge", rep);
    if (opt.clip_damage) next.phi_curr.coeffs = next.phi_curr.coeffs.cwiseMax(0.0).cwiseMin(1.0);
  }

  // momentum
  next.u_curr = s.u_curr;
  if (!opt.freeze_momentum) {
    const Field f_k = interpolate_nodal(mesh, detail::at_time(d.f, tk));
    MomentumSystem sys = assemble_momentum(s.u_curr, s.u_prev, next.phi_curr, s.theta_curr, f_k, p, tau);
    sys.rhs += assemble_boundary_load(m, neumann_data(bc.u, 0, tk), 2, 0);
    sys.rhs += assemble_boundary_load(m, neumann_data(bc.u, 1, tk), 2, 1);
    const auto red = apply_dirichlet(sys.matrix, sys.rhs, dirichlet_dofs(m, bc.u, 2, tk1));
    try {
      next.u_curr.coeffs = solve_linear(red.matrix, red.rhs, true, opt.momentum_solver);
    } catch (const SolverBreakdown& e) {
      throw StepFailure(std::string("momentum solve failed: ") + e.what(), rep);
    }
    rep.momentum_residual = (spmv(red.matrix, next.u_curr.coeffs) - red.rhs).norm() / std::max(red.rhs.norm(), 1.0);
  }

  // heat
  next.theta_curr = s.theta_curr;
  if (!opt.freeze_heat) {
    const Field gamma_k = interpolate_nodal(mesh, detail::at_time(d.gamma, tk));
    const auto gbar = neumann_data(bc.theta, 0, tk);
    const Constraints th_bc = dirichlet_dofs(m, bc.theta, 1, tk1);
    Field trial = s.theta_curr;
    for (const auto& [dof, v] : th_bc) trial.coeffs[static_cast<Eigen::Index>(dof)] = v;
    auto eval = [&](const Vector& x) {
      trial.coeffs = x;
      Linearization lin = assemble_heat(trial, s.theta_curr, next.u_curr, s.u_prev, gamma_k, gbar, p, tau);
      constrain_linearization(lin, th_bc);
      return lin;
    };
    try {
      auto [x, nr] = newton_solve(eval, trial.coeffs, opt.heat_newton);
      next.theta_curr.coeffs = std::move(x);
      rep.heat_iters = nr.iterations;
      rep.heat_residuals = std::move(nr.residual_history);
      rep.heat_converged = nr.converged;
    } catch (const SolverBreakdown& e) {
      throw StepFailure(std::string("heat solve failed: ") + e.what(), rep);
    }
    if (!rep.heat_converged) throw StepFailure("heat Newton did not converge", rep);
  }

  rep.penalty_violation = penalty_violation(next.phi_curr, s.phi_curr);
  rep.phi_min = next.phi_curr.coeffs.minCoeff();
  rep.phi_max = next.phi_curr.coeffs.maxCoeff();
  rep.theta_max = next.theta_curr.coeffs.maxCoeff();
  return {std::move(next), std::move(rep)};
}

struct Snapshot {
  int k = 0;
  double t = 0.0;
  Field u, phi, theta;
};

/// Quantities of the a priori estimates at level L (every step is sampled).
struct MonitorSample {
  int k = 0;
  double theta_l2_sq = 0.0;       // ||theta^L||^2
  double grad_theta_l2_sq = 0.0;  // ||grad theta^L||^2
  double strain_l2_sq = 0.0;      // ||E(u^L)||^2
  double strain_A_sq = 0.0;       // ||E(u^L)||_A^2
  double strain_rate_l2_sq = 0.0; // ||E((u^L - u^{L-2}) / 2 tau)||^2
};

/// Data norms at t_k, k = 0..M-1.
struct DataNorms {
  int k = 0;
  double f_l2 = 0.0;
  double gamma_l2 = 0.0;
  double gammabar_l2 = 0.0;  // on the Neumann part of the heat boundary
};

struct RunOptions {
  StepOptions step{};
  int snapshot_stride = 1;
};

struct Trajectory {
  MeshPtr mesh;
  TimeGrid grid;
  StateHistory initial;
  StateHistory final_state;
  std::vector<Snapshot> snapshots;  // k = stride, 2 stride, ..., plus the last level
  std::vector<StepReport> reports;
  std::vector<MonitorSample> monitors;  // k = 1..M
  std::vector<DataNorms> data_norms;    // k = 0..M-1
  bool failed = false;
  std::string failure;
  StepReport failure_report;

  int steps_done() const { return final_state.k; }
};

inline DataNorms data_norms_at(const MeshPtr& mesh, const ProblemData& d, const BCSpec& bc, double t, int k) {
  DataNorms n;
  n.k = k;
  n.f_l2 = norm(interpolate_nodal(mesh, detail::at_time(d.f, t)), NormSpec::l2());
  n.gamma_l2 = norm(interpolate_nodal(mesh, detail::at_time(d.gamma, t)), NormSpec::l2());
  n.gammabar_l2 = boundary_l2_norm(*mesh, neumann_data(bc.theta, 0, t));
  return n;
}

inline MonitorSample monitor_at(const StateHistory& s, const Field& u_lm2, const ModelParams& p, double tau) {
  MonitorSample ms;
  ms.k = s.k;
  ms.theta_l2_sq = norm_squared(s.theta_curr, NormSpec::l2());
  ms.grad_theta_l2_sq = norm_squared(s.theta_curr, NormSpec::h1semi());
  ms.strain_l2_sq = strain_l2_squared(s.u_curr);
  ms.strain_A_sq = norm_squared(s.u_curr, NormSpec::anorm(p.moduli));
  Field rate = s.u_curr;
  rate.coeffs = stencil_centered(u_lm2.coeffs, s.u_curr.coeffs, tau);
  ms.strain_rate_l2_sq = strain_l2_squared(rate);
  return ms;
}

/// Runs M steps. A failing step stops the loop; the partial trajectory and
/// the failure report are returned.
inline Trajectory run(const MeshPtr& mesh, const ModelParams& p, const BCSpec& bc, const ProblemData& d,
                      const TimeGrid& grid, const RunOptions& opt = {}) {
  p.validate();
  bc.validate();
  grid.validate();
  validate_mesh(*mesh);
  detail::check_tags(*mesh, bc.u);
  detail::check_tags(*mesh, bc.phi);
  detail::check_tags(*mesh, bc.theta);
  if (opt.snapshot_stride < 1) throw std::invalid_argument("run: snapshot stride must be >= 1");

  Trajectory tr;
  tr.mesh = mesh;
  tr.grid = grid;
  tr.initial = initialize(mesh, d, grid);
  StateHistory s = tr.initial;
  for (int k = 0; k < grid.M; ++k) {
    tr.data_norms.push_back(data_norms_at(mesh, d, bc, grid.t(k), k));
    try {
      auto [next, rep] = step(s, p, bc, d, grid, opt.step);
      tr.monitors.push_back(monitor_at(next, s.u_prev, p, grid.tau));
      tr.reports.push_back(std::move(rep));
      s = std::move(next);
    } catch (const StepFailure& e) {
      tr.failed = true;
      tr.failure = "step " + std::to_string(k + 1) + ": " + e.what();
      tr.failure_report = e.report;
      break;
    } catch (const std::exception& e) {
      tr.failed = true;
      tr.failure = "step " + std::to_string(k + 1) + ": " + e.what();
      break;
    }
    if (s.k % opt.snapshot_stride == 0 || s.k == grid.M) {
      tr.snapshots.push_back({s.k, grid.t(s.k), s.u_curr, s.phi_curr, s.theta_curr});
    }
  }
  tr.final_state = std::move(s);
  return tr;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_vtk_snapshot(std::ostream& os, const Snapshot& s) {
  write_vtk_mesh(os, *s.u.mesh, "thermodamage k=" + std::to_string(s.k));
  os << "POINT_DATA " << s.u.mesh->num_nodes() << '\n';
  write_vtk_point_data(os, s.u, "u");
  write_vtk_point_data(os, s.phi, "phi");
  write_vtk_point_data(os, s.theta, "theta");
}

/// Writes one legacy VTK file per snapshot into `dir` (created if needed).
inline void write_vtk_series(const std::filesystem::path& dir, const Trajectory& tr) {
  std::filesystem::create_directories(dir);
  for (const auto& s : tr.snapshots) {
    std::ostringstream name;
    name << "step_" << std::setw(5) << std::setfill('0') << s.k << ".vtk";
    std::ofstream os(dir / name.str());
    if (!os) throw std::runtime_error("cannot write " + (dir / name.str()).string());
    write_vtk_snapshot(os, s);
  }
}

inline void write_step_reports_csv(std::ostream& os, const std::vector<StepReport>& reports) {
  os.precision(17);
  os << "k,damage_iters,heat_iters,damage_residual,heat_residual,momentum_residual,penalty_violation,phi_min,phi_max,theta_max\n";
  for (const auto& r : reports) {
    const double dr = r.damage_residuals.empty() ? 0.0 : r.damage_residuals.back();
    const double hr = r.heat_residuals.empty() ? 0.0 : r.heat_residuals.back();
    os << r.k << ',' << r.damage_iters << ',' << r.heat_iters << ',' << dr << ',' << hr << ',' << r.momentum_residual << ','
       << r.penalty_violation << ',' << r.phi_min << ',' << r.phi_max << ',' << r.theta_max << '\n';
  }
}

}  // namespace thermodamage

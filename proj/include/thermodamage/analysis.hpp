#pragma once

// Errors against reference solutions, rate fitting, a priori data functionals,
// stability monitoring and the error-theorem hypothesis checker.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermodamage/model.hpp"
#include "thermodamage/space.hpp"
#include "thermodamage/stepper.hpp"

namespace thermodamage {

// ---------------------------------------------------------------------------
// Error tables
// ---------------------------------------------------------------------------

struct ErrorRow {
  double h = 0.0;
  double tau = 0.0;
  std::vector<double> errors;               // one per column
  std::vector<std::optional<double>> rates;  // empty optional: undefined
};

struct ErrorTable {
  std::vector<std::string> columns;  // e.g. "u_L2", "phi_H1"
  std::vector<ErrorRow> rows;
};

/// rate_i = log(e_{i-1} / e_i) / log(h_{i-1} / h_i), i.e. log2 of the error
/// ratio when h halves. Undefined where either error is zero.
inline ErrorTable convergence_rates(ErrorTable t) {
  if (t.rows.size() < 2) throw std::invalid_argument("convergence_rates: need at least two rows");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto& r = t.rows[i];
    if (r.errors.size() != t.columns.size()) throw std::invalid_argument("convergence_rates: row width mismatch");
    if (i > 0 && !(r.h < t.rows[i - 1].h)) throw std::invalid_argument("convergence_rates: rows must have decreasing h");
    r.rates.assign(t.columns.size(), std::nullopt);
    if (i == 0) continue;
    const auto& prev = t.rows[i - 1];
    const double lh = std::log(prev.h / r.h);
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const double a = prev.errors[c], b = r.errors[c];
      if (a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b)) r.rates[c] = std::log(a / b) / lh;
    }
  }
  return t;
}

/// CSV: h,tau,<col>,<col>_rate,...; undefined rates are written as "nan".
inline void write_error_table_csv(std::ostream& os, const ErrorTable& t) {
  os.precision(17);
  os << "h,tau";
  for (const auto& c : t.columns) os << ',' << c << ',' << c << "_rate";
  os << '\n';
  for (const auto& r : t.rows) {
    os << r.h << ',' << r.tau;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      os << ',' << r.errors[c] << ',';
      if (c < r.rates.size() && r.rates[c]) {
        os << *r.rates[c];
      } else {
        os << "nan";
      }
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Errors against a reference on a nested finer mesh
// ---------------------------------------------------------------------------

enum class ErrorNorm { L2, H1semi };
enum class FieldName { u, phi, theta };

inline const char* to_string(FieldName f) {
  switch (f) {
    case FieldName::u: return "u";
    case FieldName::phi: return "phi";
    case FieldName::theta: return "theta";
  }
  return "?";
}

/// For every coarse node, the index of the fine node at the same position.
inline std::vector<std::size_t> nested_node_map(const Mesh& coarse, const Mesh& fine, double tol = 1e-10) {
  std::map<std::pair<long long, long long>, std::size_t> index;
  const auto key = [tol](const Point& p) { return std::pair{std::llround(p[0] / tol), std::llround(p[1] / tol)}; };
  for (std::size_t i = 0; i < fine.num_nodes(); ++i) index.emplace(key(fine.nodes[i]), i);
  std::vector<std::size_t> out(coarse.num_nodes());
  for (std::size_t i = 0; i < coarse.num_nodes(); ++i) {
    const auto base = key(coarse.nodes[i]);
    bool found = false;
    for (long long dx = -1; dx <= 1 && !found; ++dx) {
      for (long long dy = -1; dy <= 1 && !found; ++dy) {
        auto it = index.find({base.first + dx, base.second + dy});
        if (it != index.end()) {
          out[i] = it->second;
          found = true;
        }
      }
    }
    if (!found) {
      throw std::invalid_argument("meshes are not nested: coarse node " + std::to_string(i) + " has no fine counterpart");
    }
  }
  return out;
}

/// Nodal restriction of a fine field onto a nested coarse mesh.
inline Field restrict_to(const Field& fine, const MeshPtr& coarse, const std::vector<std::size_t>& map) {
  Field out = Field::zeros(coarse, fine.dofmap.kind);
  const int d = fine.dofmap.dofs_per_node;
  for (std::size_t i = 0; i < map.size(); ++i) {
    for (int c = 0; c < d; ++c) out.coeffs[static_cast<Eigen::Index>(out.dofmap.dof(i, c))] = fine.nodal(map[i], c);
  }
  return out;
}

inline Field restrict_to(const Field& fine, const MeshPtr& coarse) {
  return restrict_to(fine, coarse, nested_node_map(*coarse, *fine.mesh));
}

/// Error of `coarse` against `reference` (on a nested refinement). L2 uses
/// nodal restriction of the reference; H1semi recovers Gauss-point derivatives
/// to nodes on both meshes and compares the recovered nodal fields.
inline double error_vs_reference(const Field& coarse, const Field& reference, ErrorNorm kind, const RecoveryOptions& rec = {}) {
  if (coarse.is_vector() != reference.is_vector()) throw std::invalid_argument("error_vs_reference: field kinds differ");
  const auto map = nested_node_map(*coarse.mesh, *reference.mesh);
  if (kind == ErrorNorm::L2) {
    Field diff = restrict_to(reference, coarse.mesh, map);
    diff.coeffs = coarse.coeffs - diff.coeffs;
    return norm(diff, NormSpec::l2());
  }
  const int ncomp = coarse.is_vector() ? 4 : 2;
  double acc = 0.0;
  for (int c = 0; c < ncomp; ++c) {
    const Field gc = recover_gauss_to_nodes(sample_gradient(coarse, c), rec);
    const Field gr = recover_gauss_to_nodes(sample_gradient(reference, c), rec);
    Field diff = restrict_to(gr, coarse.mesh, map);
    diff.coeffs = gc.coeffs - diff.coeffs;
    acc += norm_squared(diff, NormSpec::l2());
  }
  return std::sqrt(acc);
}

inline const Field& pick(const StateHistory& s, FieldName f) {
  switch (f) {
    case FieldName::u: return s.u_curr;
    case FieldName::phi: return s.phi_curr;
    case FieldName::theta: return s.theta_curr;
  }
  return s.u_curr;
}

/// Error at the final level M of two trajectories with the same time grid.
inline double error_vs_reference(const Trajectory& coarse, const Trajectory& reference, FieldName field, ErrorNorm kind) {
  if (coarse.steps_done() != reference.steps_done() ||
      std::abs(coarse.grid.t(coarse.steps_done()) - reference.grid.t(reference.steps_done())) > 1e-12) {
    throw std::invalid_argument("error_vs_reference: trajectories end at different times");
  }
  return error_vs_reference(pick(coarse.final_state, field), pick(reference.final_state, field), kind);
}

// ---------------------------------------------------------------------------
// A priori data functionals
// ---------------------------------------------------------------------------

/// Ellipticity constant of A used in alpha_kappa = kappa * C_ell.
enum class EllipticityConvention {
  coercive,  // 2 mu: A(s):s >= 2 mu s:s
  inverse    // 1 / (2 mu)
};

inline double ellipticity_constant(const ElasticModuli& m, EllipticityConvention c) {
  return c == EllipticityConvention::coercive ? m.coercivity_constant() : 1.0 / m.coercivity_constant();
}

struct AprioriQuantities {
  int L = 0;
  double gamma_kappa = 0.0;  // rho^4 / kappa
  double alpha_kappa = 0.0;  // kappa C_ell
  double L1L = 0.0;
  double L1L_hat = 0.0;
  double f_sq_sum = 0.0;  // sum_{k<L} ||f^k||^2
  double f_sum = 0.0;     // sum_{k<L} ||f^k||
  // left sides at level L (zero when no monitor sample is supplied)
  double theta_l2_sq = 0.0;
  double tau_grad_theta_sq = 0.0;
  double strain_l2_sq = 0.0;
  double strain_A_sq = 0.0;
  double half_tau2_strain_rate_sq = 0.0;
};

/// Exponent (beta+2)^2 / (beta+1)^2 on ||f^k|| in the data functional.
inline double forcing_exponent(double beta) { return (beta + 2.0) * (beta + 2.0) / ((beta + 1.0) * (beta + 1.0)); }

/// L_{1,L} = sum_{k<L} ||gbar^k||^2 + gamma_kappa sum ||f^k||^q + tau sum ||gamma^k||^2 + (gamma_kappa + 1)|Omega|^2,
/// and the A-norm variant with 1/kappa on the f-sum and |Omega|^2.
inline AprioriQuantities compute_L1L(const std::vector<DataNorms>& data, const ModelParams& p, const TimeGrid& grid, int L,
                                     double area, double C_ell) {
  if (L < 0 || L > grid.M) throw std::invalid_argument("compute_L1L: L out of range");
  if (static_cast<int>(data.size()) < L) throw std::invalid_argument("compute_L1L: data missing for some k < L");
  AprioriQuantities a;
  a.L = L;
  a.gamma_kappa = std::pow(p.rho, 4) / p.kappa;
  a.alpha_kappa = p.kappa * C_ell;
  const double q = forcing_exponent(p.conductivity.beta);
  double gb = 0.0, fq = 0.0, g = 0.0;
  for (int k = 0; k < L; ++k) {
    const auto& d = data[static_cast<std::size_t>(k)];
    if (d.k != k) throw std::invalid_argument("compute_L1L: data series out of order");
    gb += d.gammabar_l2 * d.gammabar_l2;
    fq += std::pow(d.f_l2, q);
    g += d.gamma_l2 * d.gamma_l2;
    a.f_sq_sum += d.f_l2 * d.f_l2;
    a.f_sum += d.f_l2;
  }
  a.L1L = gb + a.gamma_kappa * fq + grid.tau * g + (a.gamma_kappa + 1.0) * area * area;
  a.L1L_hat = gb + fq / p.kappa + grid.tau * g + area * area;
  return a;
}

inline void fill_monitors(AprioriQuantities& a, const MonitorSample& m, double tau) {
  a.theta_l2_sq = m.theta_l2_sq;
  a.tau_grad_theta_sq = tau * m.grad_theta_l2_sq;
  a.strain_l2_sq = m.strain_l2_sq;
  a.strain_A_sq = m.strain_A_sq;
  a.half_tau2_strain_rate_sq = 0.5 * tau * tau * m.strain_rate_l2_sq;
}

inline void write_apriori(std::ostream& os, const AprioriQuantities& a) {
  os.precision(17);
  os << "L=" << a.L << "\ngamma_kappa=" << a.gamma_kappa << "\nalpha_kappa=" << a.alpha_kappa << "\nL1L=" << a.L1L
     << "\nL1L_hat=" << a.L1L_hat << "\ntheta_l2_sq=" << a.theta_l2_sq << "\ntau_grad_theta_sq=" << a.tau_grad_theta_sq
     << "\nstrain_l2_sq=" << a.strain_l2_sq << "\nstrain_A_sq=" << a.strain_A_sq
     << "\nhalf_tau2_strain_rate_sq=" << a.half_tau2_strain_rate_sq << '\n';
}

// ---------------------------------------------------------------------------
// Hypotheses of the error theorem
// ---------------------------------------------------------------------------

struct AssumptionCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;  // four entries
  bool overall = false;
  AprioriQuantities quantities;
};

/// Evaluates
///   1. ell (rho^2 tau^2 / kappa Lhat_M + tau^2 / kappa sum ||f||^2) <= 1
///   2. ell (rho tau / alpha sqrt(L_M) + tau / sqrt(2 alpha) sum ||f||^2) <= 1
///   3. 2 tau^2 L_M <= kappa C_ell
///   4. rho tau / sqrt(alpha) sqrt(L_M) + tau / sqrt(alpha) sum ||f|| <= 1
/// with all sums over the available data k = 0..M-1.
inline AssumptionReport check_theorem_assumptions(const ModelParams& p, const std::vector<DataNorms>& data, const TimeGrid& grid,
                                                  double area, double C_ell) {
  AssumptionReport r;
  const auto a = compute_L1L(data, p, grid, grid.M, area, C_ell);
  r.quantities = a;
  const double t = grid.tau, rho = p.rho, kap = p.kappa, al = a.alpha_kappa;
  r.checks.push_back({"bullet1", p.ell * (rho * rho * t * t / kap * a.L1L_hat + t * t / kap * a.f_sq_sum), 1.0, false});
  r.checks.push_back({"bullet2", p.ell * (rho * t / al * std::sqrt(a.L1L) + t / std::sqrt(2.0 * al) * a.f_sq_sum), 1.0, false});
  r.checks.push_back({"bullet3", 2.0 * t * t * a.L1L, kap * C_ell, false});
  r.checks.push_back({"bullet4", rho * t / std::sqrt(al) * std::sqrt(a.L1L) + t / std::sqrt(al) * a.f_sum, 1.0, false});
  r.overall = true;
  for (auto& c : r.checks) {
    c.pass = c.lhs <= c.rhs;
    r.overall = r.overall && c.pass;
  }
  return r;
}

inline void write_assumption_text(std::ostream& os, const AssumptionReport& r) {
  os.precision(6);
  os << "Error theorem hypotheses\n";
  for (const auto& c : r.checks) {
    os << "  " << c.name << ": lhs = " << std::scientific << c.lhs << ", rhs = " << c.rhs << std::defaultfloat << "  "
       << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  os << "  overall: " << (r.overall ? "PASS" : "FAIL") << '\n';
}

inline void write_assumption_kv(std::ostream& os, const AssumptionReport& r) {
  os.precision(17);
  for (const auto& c : r.checks) {
    os << c.name << ".lhs=" << c.lhs << '\n' << c.name << ".rhs=" << c.rhs << '\n' << c.name << ".pass=" << (c.pass ? 1 : 0) << '\n';
  }
  os << "overall=" << (r.overall ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// Stability monitor
// ---------------------------------------------------------------------------

struct StabilityStep {
  int L = 0;
  double heat_ratio = 0.0;    // (||theta||^2 + tau ||grad theta||^2) / (tau L1L)
  double strain_ratio = 0.0;  // (tau^2/2 ||E(delta u)||^2 + ||E(u)||^2) / (rho^2 tau^2 / alpha L1L + tau^2 / (2 alpha) sum ||f||^2)
  double anorm_ratio = 0.0;   // ||E(u)||_A^2 / (rho^2 tau^2 / kappa Lhat + tau^2 / kappa sum ||f||^2)
};

struct StabilityReport {
  std::vector<StabilityStep> steps;
  double heat_constant = 0.0;  // max over L
  double strain_constant = 0.0;
  double anorm_constant = 0.0;
};

namespace detail {
inline double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}
}  // namespace detail

inline StabilityReport stability_monitor(const Trajectory& tr, const ModelParams& p, double C_ell) {
  StabilityReport out;
  const double area = tr.mesh->total_area();
  const double t = tr.grid.tau;
  for (const auto& m : tr.monitors) {
    const auto a = compute_L1L(tr.data_norms, p, tr.grid, m.k, area, C_ell);
    StabilityStep s;
    s.L = m.k;
    s.heat_ratio = detail::ratio(m.theta_l2_sq + t * m.grad_theta_l2_sq, t * a.L1L);
    s.strain_ratio = detail::ratio(0.5 * t * t * m.strain_rate_l2_sq + m.strain_l2_sq,
                                   p.rho * p.rho * t * t / a.alpha_kappa * a.L1L + t * t / (2.0 * a.alpha_kappa) * a.f_sq_sum);
    s.anorm_ratio = detail::ratio(m.strain_A_sq, p.rho * p.rho * t * t / p.kappa * a.L1L_hat + t * t / p.kappa * a.f_sq_sum);
    out.heat_constant = std::max(out.heat_constant, s.heat_ratio);
    out.strain_constant = std::max(out.strain_constant, s.strain_ratio);
    out.anorm_constant = std::max(out.anorm_constant, s.anorm_ratio);
    out.steps.push_back(s);
  }
  return out;
}

inline void write_stability_csv(std::ostream& os, const StabilityReport& r) {
  os.precision(17);
  os << "L,heat_ratio,strain_ratio,anorm_ratio\n";
  for (const auto& s : r.steps) os << s.L << ',' << s.heat_ratio << ',' << s.strain_ratio << ',' << s.anorm_ratio << '\n';
}

inline void write_monitors_csv(std::ostream& os, const Trajectory& tr) {
  os.precision(17);
  os << "L,theta_l2_sq,grad_theta_l2_sq,strain_l2_sq,strain_A_sq,strain_rate_l2_sq\n";
  for (const auto& m : tr.monitors) {
    os << m.k << ',' << m.theta_l2_sq << ',' << m.grad_theta_l2_sq << ',' << m.strain_l2_sq << ',' << m.strain_A_sq << ','
       << m.strain_rate_l2_sq << '\n';
  }
}

}  // namespace thermodamage

#pragma once

// Newton and semismooth Newton iteration.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thermodamage/linalg.hpp"

namespace thermodamage {

enum class LineSearch {
  off,           // always take the full step
  backtracking,  // Armijo backtracking on ||R||^2 every iteration
  automatic      // full steps unless the residual grows, then backtrack
};

inline const char* to_string(LineSearch l) {
  switch (l) {
    case LineSearch::off: return "off";
    case LineSearch::backtracking: return "backtracking";
    case LineSearch::automatic: return "auto";
  }
  return "auto";
}

inline LineSearch parse_line_search(const std::string& s) {
  if (s == "off") return LineSearch::off;
  if (s == "backtracking") return LineSearch::backtracking;
  if (s == "auto") return LineSearch::automatic;
  throw std::invalid_argument("unknown line search '" + s + "'");
}

struct NewtonConfig {
  double tol_rel = 1e-8;
  int max_iter = 50;
  LineSearch line_search = LineSearch::automatic;
  double abs_floor = 1e-14;
  LinearSolverKind linear_solver = LinearSolverKind::direct;

  void validate() const {
    if (!(tol_rel > 0.0)) throw std::invalid_argument("NewtonConfig: tol_rel must be positive");
    if (max_iter < 1) throw std::invalid_argument("NewtonConfig: max_iter must be >= 1");
  }
  bool operator==(const NewtonConfig&) const = default;
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;  // Euclidean norms, starting with ||R(x0)||
  bool converged = false;
};

/// Residual and Jacobian at one iterate. Constrained rows must already be
/// eliminated (zero residual, identity row/column).
struct Linearization {
  Vector residual;
  SystemMatrix jacobian;
  bool symmetric = true;
};

/// Solves R(x) = 0 with Newton's method. `eval(x)` returns a Linearization.
/// Stops when ||R(x)|| <= max(tol_rel ||R(x0)||, abs_floor). Non-convergence is
/// reported through NewtonReport::converged and returns the best iterate;
/// a singular Jacobian throws SolverBreakdown.
template <class Eval>
std::pair<Vector, NewtonReport> newton_solve(Eval&& eval, Vector x0, const NewtonConfig& cfg = {}) {
  cfg.validate();
  NewtonReport rep;
  Vector x = std::move(x0);
  Linearization lin = eval(x);
  double r = lin.residual.norm();
  rep.residual_history.push_back(r);
  const double target = std::max(cfg.tol_rel * r, cfg.abs_floor);
  if (!std::isfinite(r)) throw SolverBreakdown("newton_solve: non-finite initial residual");
  if (r <= target) {
    rep.converged = true;
    return {x, rep};
  }
  Vector best = x;
  double best_r = r;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Vector dx = solve_linear(lin.jacobian, -lin.residual, lin.symmetric, cfg.linear_solver);
    double alpha = 1.0;
    Vector trial = x + dx;
    Linearization next = eval(trial);
    double r_new = next.residual.norm();
    const bool search = cfg.line_search == LineSearch::backtracking ||
                        (cfg.line_search == LineSearch::automatic && !(r_new < r));
    if (search) {
      constexpr double c_armijo = 1e-4;
      while (!(r_new * r_new <= (1.0 - 2.0 * c_armijo * alpha) * r * r) && alpha > 1.0 / 1024.0) {
        alpha *= 0.5;
        trial = x + alpha * dx;
        next = eval(trial);
        r_new = next.residual.norm();
      }
    }
    x = std::move(trial);
    lin = std::move(next);
    r = r_new;
    rep.iterations = it;
    rep.residual_history.push_back(r);
    if (!std::isfinite(r)) break;
    if (r < best_r) {
      best_r = r;
      best = x;
    }
    if (r <= target) {
      rep.converged = true;
      return {x, rep};
    }
  }
  return {best, rep};
}

}  // namespace thermodamage

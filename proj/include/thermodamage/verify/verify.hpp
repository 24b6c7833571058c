#pragma once

// Property suite behind the `verify` command: operator identities, dense
// oracle equivalence, finite-difference Jacobians, stencil exactness and
// penalty monotonicity.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thermodamage/assembly.hpp"
#include "thermodamage/stepper.hpp"
#include "thermodamage/tensor.hpp"
#include "thermodamage/verify/dense_oracle.hpp"

namespace thermodamage::verify {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  int samples = 1000;
  std::uint64_t seed = 20240611;
  /// Scales the Lipschitz constant under test; values below one are a
  /// negative control that the suite must reject.
  double lipschitz_factor = 1.0;
};

namespace detail {

inline SymTensor2 random_tensor(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymTensor2 t(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) t(i, j) = u(rng);
  }
  return t;
}

inline ElasticModuli random_moduli(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.1, 10.0);
  return ElasticModuli(u(rng), u(rng), dim);
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace detail

/// Five operator identities over `samples` random draws in d = 2 and d = 3.
inline std::vector<PropertyResult> tensor_properties(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::vector<PropertyResult> out;
  const auto run = [&](const std::string& name, const std::function<double(int)>& violation) {
    int fails = 0;
    double worst = 0.0;
    for (int s = 0; s < o.samples; ++s) {
      const double v = violation(s % 2 == 0 ? 2 : 3);
      worst = std::max(worst, v);
      if (v > 0.0) ++fails;
    }
    out.push_back({name, fails == 0, std::to_string(fails) + " failures in " + std::to_string(o.samples) + " samples, worst " + detail::fmt(worst)});
  };
  run("A Lipschitz bound 2*lambda*d + 2*mu", [&](int d) {
    const auto m = detail::random_moduli(rng, d);
    const auto a = detail::random_tensor(rng, d), b = detail::random_tensor(rng, d);
    const double lhs = (apply_A(m, a) - apply_A(m, b)).frobenius_norm();
    const double rhs = o.lipschitz_factor * m.lipschitz_constant() * (a - b).frobenius_norm();
    return lhs - rhs * (1.0 + 1e-14);
  });
  run("A coercivity 2*mu", [&](int d) {
    const auto m = detail::random_moduli(rng, d);
    const auto a = detail::random_tensor(rng, d);
    const double lhs = apply_A(m, a).contract(a), rhs = m.coercivity_constant() * a.contract(a);
    return rhs - lhs - 1e-14 * std::abs(lhs);
  });
  run("A^{1/2} composition", [&](int d) {
    const auto m = detail::random_moduli(rng, d);
    const auto a = detail::random_tensor(rng, d);
    const auto Aa = apply_A(m, a);
    return (apply_A_sqrt(m, apply_A_sqrt(m, a)) - Aa).frobenius_norm() - 1e-12 * Aa.frobenius_norm();
  });
  run("dev: norm bound, self-adjointness, Pythagoras", [&](int d) {
    const auto a = detail::random_tensor(rng, d), b = detail::random_tensor(rng, d);
    const double tol = 1e-14;
    double v = dev(a).frobenius_norm() - a.frobenius_norm() * (1.0 + tol);
    v = std::max(v, std::abs(dev(a).contract(b) - a.contract(dev(b))) - tol * 10);
    const double tr = a.trace();
    v = std::max(v, std::abs(dev(a).contract(dev(a)) - (a.contract(a) - tr * tr / d)) - tol * 10);
    v = std::max(v, std::abs(dev(a).contract(dev(a)) - dev(a).contract(a)) - tol * 10);
    return v;
  });
  run("positive part: monotonicity and 1-Lipschitz", [&](int) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double c = u(rng), d = u(rng);
    const double dp = positive_part(c) - positive_part(d);
    return std::max(dp * dp - dp * (c - d) - 1e-14, std::abs(dp) - std::abs(c - d) - 1e-14);
  });
  return out;
}

/// Two-cell meshes: a triangle pair on the unit square and two distorted quads.
inline std::vector<MeshPtr> two_cell_meshes() {
  std::vector<MeshPtr> out;
  out.push_back(std::make_shared<const Mesh>(build_unit_square(1, CellKind::triangle)));
  Mesh q;
  q.cell_kind = CellKind::quadrilateral;
  q.nodes = {{0.0, 0.0}, {1.0, 0.05}, {2.1, 0.1}, {0.05, 1.0}, {0.9, 1.2}, {2.0, 1.05}};
  q.cells = {{0, 1, 4, 3}, {1, 2, 5, 4}};
  q.boundary_facets = {{{0, 1}, "bottom"}, {{1, 2}, "bottom"}, {{2, 5}, "right"},
                       {{5, 4}, "top"},    {{4, 3}, "top"},    {{3, 0}, "left"}};
  out.push_back(std::make_shared<const Mesh>(std::move(q)));
  return out;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Assembled residuals and matrices against the dense oracle (relative 1e-12),
/// assembled Jacobians against central differences (relative 1e-6).
inline std::vector<PropertyResult> oracle_properties(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.5, 1.5);
  std::vector<PropertyResult> out;
  const auto rnd = [&](Eigen::Index n, std::uniform_real_distribution<double>& d) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
  };
  ModelParams p;
  p.moduli = ElasticModuli(1.7, 0.9, 2);
  p.rho = 0.8;
  p.kappa = 1e-3;
  p.ell = 0.3;
  p.Gc = 2.5;
  p.gamma0 = 50.0;
  const double tau = 0.1;
  double worst_res = 0.0, worst_jac = 0.0;
  for (const auto& mesh : two_cell_meshes()) {
    const Mesh& m = *mesh;
    const auto nn = static_cast<Eigen::Index>(m.num_nodes());
    Field us = Field::zeros(mesh, FieldKind::scalar), uv = Field::zeros(mesh, FieldKind::vector);
    auto S = [&](Vector c) {
      Field f = us;
      f.coeffs = std::move(c);
      return f;
    };
    auto V = [&](Vector c) {
      Field f = uv;
      f.coeffs = std::move(c);
      return f;
    };
    const Field uk = V(rnd(2 * nn, u)), ukm1 = V(rnd(2 * nn, u)), ukp1 = V(rnd(2 * nn, u)), f = V(rnd(2 * nn, u));
    const Field phi = S(rnd(nn, u)), theta = S(rnd(nn, u)), gamma = S(rnd(nn, u));

    // momentum
    const auto sys = assemble_momentum(uk, ukm1, phi, theta, f, p, tau);
    const auto ref = oracle::momentum(m, uk.coeffs, ukm1.coeffs, phi.coeffs, theta.coeffs, f.coeffs, p, tau);
    worst_res = std::max({worst_res, rel_diff(sys.matrix.to_dense(), ref.A), rel_diff(sys.rhs, ref.b)});
    const Vector ut = rnd(2 * nn, u);
    worst_res = std::max(worst_res, rel_diff(spmv(sys.matrix, ut) - sys.rhs, ref.A * ut - ref.b));

    // damage, penalty active (offset > 0) and inactive (offset < 0)
    for (double sign : {1.0, -1.0}) {
      Vector off = rnd(nn, pos);
      const Field phik = phi;
      const Field trial = S(phik.coeffs + sign * 0.3 * off);
      const auto lin = assemble_damage(trial, phik, uk, p);
      worst_res = std::max(worst_res, rel_diff(lin.residual, oracle::damage_residual(m, trial.coeffs, phik.coeffs, uk.coeffs, p)));
      const auto fd = oracle::fd_jacobian(
          [&](const Vector& x) { return oracle::damage_residual(m, x, phik.coeffs, uk.coeffs, p); }, trial.coeffs);
      worst_jac = std::max(worst_jac, rel_diff(lin.jacobian.to_dense(), fd));
    }

    // heat, constant and power-law conductivity
    for (const auto& K : {ConductivityModel::constant(1.3), ConductivityModel::power_law(0.7, 1.5)}) {
      ModelParams q = p;
      q.conductivity = K;
      const Field th = S(rnd(nn, pos));
      const std::vector<BoundaryFlux> gb{{"bottom", [](const Point& x) { return 2.0 + x[0]; }}};
      const std::vector<oracle::FacetDatum> gbo{{"bottom", [](double x, double) { return 2.0 + x; }}};
      const auto lin = assemble_heat(th, theta, ukp1, ukm1, gamma, gb, q, tau);
      const auto R = [&](const Vector& x) {
        return oracle::heat_residual(m, x, theta.coeffs, ukp1.coeffs, ukm1.coeffs, gamma.coeffs, gbo, q, tau);
      };
      worst_res = std::max(worst_res, rel_diff(lin.residual, R(th.coeffs)));
      worst_jac = std::max(worst_jac, rel_diff(lin.jacobian.to_dense(), oracle::fd_jacobian(R, th.coeffs)));
    }
  }
  out.push_back({"assembled residuals equal dense oracle (rel 1e-12)", worst_res <= 1e-12, "worst " + detail::fmt(worst_res)});
  out.push_back({"Jacobians equal central differences (rel 1e-6)", worst_jac <= 1e-6, "worst " + detail::fmt(worst_jac)});
  return out;
}

inline std::vector<PropertyResult> stencil_properties(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 2);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ut(0.01, 1.0);
  double worst_q = 0.0, worst_a = 0.0;
  for (int s = 0; s < o.samples; ++s) {
    const double a = u(rng), b = u(rng), c = u(rng), t = u(rng), tau = ut(rng);
    const auto q = [&](double x) { return a * x * x + b * x + c; };
    const auto l = [&](double x) { return b * x + c; };
    const double e1 = std::abs(stencil_ddt2(q(t - tau), q(t), q(t + tau), tau) - 2.0 * a);
    const double e2 = std::abs(stencil_centered(l(t - tau), l(t + tau), tau) - b);
    // scale by the conditioning of the difference quotients
    const double s1 = (std::abs(q(t - tau)) + 2 * std::abs(q(t)) + std::abs(q(t + tau))) / (tau * tau);
    const double s2 = (std::abs(l(t - tau)) + std::abs(l(t + tau))) / (2 * tau);
    worst_q = std::max(worst_q, e1 / s1);
    worst_a = std::max(worst_a, e2 / s2);
  }
  const double eps = 8 * std::numeric_limits<double>::epsilon();
  return {{"second difference exact on quadratics", worst_q <= eps, "worst scaled error " + detail::fmt(worst_q)},
          {"centered difference exact on affine data", worst_a <= eps, "worst scaled error " + detail::fmt(worst_a)}};
}

/// <pen(a) - pen(b), a - b> >= 0 for random nodal fields a, b.
inline std::vector<PropertyResult> penalty_properties(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto mesh = std::make_shared<const Mesh>(build_unit_square(4, CellKind::triangle));
  Field pk = Field::zeros(mesh, FieldKind::scalar);
  int fails = 0;
  const int n = std::max(1, o.samples / 10);
  for (int s = 0; s < n; ++s) {
    Field a = pk, b = pk;
    for (Eigen::Index i = 0; i < pk.coeffs.size(); ++i) {
      pk.coeffs[i] = u(rng);
      a.coeffs[i] = u(rng);
      b.coeffs[i] = u(rng);
    }
    const double v = (assemble_penalty(a, pk, 10.0) - assemble_penalty(b, pk, 10.0)).dot(a.coeffs - b.coeffs);
    if (v < -1e-13) ++fails;
  }
  return {{"penalty operator monotone", fails == 0, std::to_string(fails) + " failures in " + std::to_string(n) + " samples"}};
}

inline std::vector<PropertyResult> run_all(const VerifyOptions& o = {}) {
  std::vector<PropertyResult> all;
  for (auto part : {tensor_properties(o), oracle_properties(o), stencil_properties(o), penalty_properties(o)}) {
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

inline bool print_summary(std::ostream& os, const std::vector<PropertyResult>& r) {
  bool ok = true;
  for (const auto& p : r) {
    os << (p.passed ? "PASS  " : "FAIL  ") << p.name << "  (" << p.detail << ")\n";
    ok = ok && p.passed;
  }
  os << (ok ? "verify: all properties hold\n" : "verify: FAILED\n");
  return ok;
}

}  // namespace thermodamage::verify

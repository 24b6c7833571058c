#pragma once

// Brute-force dense reference for the three discrete equations. Written
// against the mesh and raw coefficient vectors only, with its own shape
// functions, geometry and quadrature tables, for cross-checking assembly.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "thermodamage/mesh.hpp"
#include "thermodamage/model.hpp"

namespace thermodamage::oracle {

using Dense = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Physical quadrature point with shape values and gradients.
struct Sample {
  double x = 0.0, y = 0.0, w = 0.0;
  std::vector<double> N;
  std::vector<std::array<double, 2>> dN;
};

/// Same point sets as the solver: edge midpoints on triangles, 2x2 Gauss on quads.
inline std::vector<Sample> samples(const Mesh& m, std::size_t c) {
  std::vector<Sample> out;
  const auto& cell = m.cells[c];
  if (m.cell_kind == CellKind::triangle) {
    const auto& a = m.nodes[static_cast<std::size_t>(cell[0])];
    const auto& b = m.nodes[static_cast<std::size_t>(cell[1])];
    const auto& d = m.nodes[static_cast<std::size_t>(cell[2])];
    const double det = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
    const double area = 0.5 * std::abs(det);
    // gradients of barycentric coordinates
    const std::array<double, 2> g0{(b[1] - d[1]) / det, (d[0] - b[0]) / det};
    const std::array<double, 2> g1{(d[1] - a[1]) / det, (a[0] - d[0]) / det};
    const std::array<double, 2> g2{(a[1] - b[1]) / det, (b[0] - a[0]) / det};
    const double bary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    for (const auto& l : bary) {
      Sample s;
      s.x = l[0] * a[0] + l[1] * b[0] + l[2] * d[0];
      s.y = l[0] * a[1] + l[1] * b[1] + l[2] * d[1];
      s.w = area / 3.0;
      s.N = {l[0], l[1], l[2]};
      s.dN = {g0, g1, g2};
      out.push_back(s);
    }
    return out;
  }
  const double g = 1.0 / std::sqrt(3.0);
  const double xi_n[4] = {-1, 1, 1, -1}, eta_n[4] = {-1, -1, 1, 1};
  for (double eta : {-g, g}) {
    for (double xi : {-g, g}) {
      Sample s;
      double J[2][2] = {{0, 0}, {0, 0}};
      double dref[4][2];
      for (int a = 0; a < 4; ++a) {
        const auto& p = m.nodes[static_cast<std::size_t>(cell[static_cast<std::size_t>(a)])];
        const double Na = 0.25 * (1 + xi_n[a] * xi) * (1 + eta_n[a] * eta);
        dref[a][0] = 0.25 * xi_n[a] * (1 + eta_n[a] * eta);
        dref[a][1] = 0.25 * eta_n[a] * (1 + xi_n[a] * xi);
        s.N.push_back(Na);
        s.x += Na * p[0];
        s.y += Na * p[1];
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) J[i][j] += p[static_cast<std::size_t>(i)] * dref[a][j];
        }
      }
      const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      s.w = std::abs(det);
      for (auto& r : dref) {
        // grad N = J^{-T} grad_ref N
        s.dN.push_back({(J[1][1] * r[0] - J[1][0] * r[1]) / det, (-J[0][1] * r[0] + J[0][0] * r[1]) / det});
      }
      out.push_back(s);
    }
  }
  return out;
}

inline double interp(const Mesh& m, std::size_t c, const Sample& s, const Vec& v, int stride = 1, int comp = 0) {
  double r = 0.0;
  for (std::size_t a = 0; a < s.N.size(); ++a) r += s.N[a] * v[m.cells[c][a] * stride + comp];
  return r;
}

inline std::array<double, 2> grad(const Mesh& m, std::size_t c, const Sample& s, const Vec& v, int stride = 1, int comp = 0) {
  std::array<double, 2> g{0, 0};
  for (std::size_t a = 0; a < s.N.size(); ++a) {
    const double val = v[m.cells[c][a] * stride + comp];
    g[0] += s.dN[a][0] * val;
    g[1] += s.dN[a][1] * val;
  }
  return g;
}

/// Strain energy density lambda (tr e)^2 + 2 mu e:e from a 2x2 displacement gradient.
inline double strain_energy(double lam, double mu, const std::array<double, 2>& gx, const std::array<double, 2>& gy) {
  const double exx = gx[0], eyy = gy[1], exy = 0.5 * (gx[1] + gy[0]);
  const double tr = exx + eyy;
  return lam * tr * tr + 2.0 * mu * (exx * exx + eyy * eyy + 2.0 * exy * exy);
}

struct DenseSystem {
  Dense A;
  Vec b;
};

/// Dense momentum matrix and right-hand side (no boundary conditions).
inline DenseSystem momentum(const Mesh& m, const Vec& u_k, const Vec& u_km1, const Vec& phi, const Vec& theta, const Vec& f,
                            const ModelParams& p, double tau) {
  const auto n = static_cast<Eigen::Index>(2 * m.num_nodes());
  DenseSystem S{Dense::Zero(n, n), Vec::Zero(n)};
  const double lam = p.moduli.lambda, mu = p.moduli.mu;
  const Vec inertia = 2.0 * u_k - u_km1;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& s : samples(m, c)) {
      const double ph = interp(m, c, s, phi);
      const double coef = ph * ph + p.kappa;
      const double th = interp(m, c, s, theta);
      for (std::size_t a = 0; a < s.N.size(); ++a) {
        for (int i = 0; i < 2; ++i) {
          const Eigen::Index I = 2 * m.cells[c][a] + i;
          S.b[I] += s.w * (interp(m, c, s, f, 2, i) * s.N[a] + p.rho * th * s.dN[a][static_cast<std::size_t>(i)] +
                           interp(m, c, s, inertia, 2, i) * s.N[a] / (tau * tau));
          for (std::size_t bb = 0; bb < s.N.size(); ++bb) {
            for (int j = 0; j < 2; ++j) {
              const Eigen::Index J = 2 * m.cells[c][bb] + j;
              // (coef A E(N_b e_j)) : E(N_a e_i)
              double eps_a[2][2] = {{0, 0}, {0, 0}}, eps_b[2][2] = {{0, 0}, {0, 0}};
              for (int r = 0; r < 2; ++r) {
                eps_a[i][r] += 0.5 * s.dN[a][static_cast<std::size_t>(r)];
                eps_a[r][i] += 0.5 * s.dN[a][static_cast<std::size_t>(r)];
                eps_b[j][r] += 0.5 * s.dN[bb][static_cast<std::size_t>(r)];
                eps_b[r][j] += 0.5 * s.dN[bb][static_cast<std::size_t>(r)];
              }
              const double tr_a = eps_a[0][0] + eps_a[1][1], tr_b = eps_b[0][0] + eps_b[1][1];
              double ee = 0.0;
              for (int r = 0; r < 2; ++r) {
                for (int q = 0; q < 2; ++q) ee += eps_a[r][q] * eps_b[r][q];
              }
              double v = coef * (lam * tr_a * tr_b + 2.0 * mu * ee);
              if (i == j) v += s.N[a] * s.N[bb] / (tau * tau);
              S.A(I, J) += s.w * v;
            }
          }
        }
      }
    }
  }
  return S;
}

/// Dense damage residual.
inline Vec damage_residual(const Mesh& m, const Vec& phi, const Vec& phi_k, const Vec& u_k, const ModelParams& p) {
  Vec R = Vec::Zero(static_cast<Eigen::Index>(m.num_nodes()));
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& s : samples(m, c)) {
      const double ph = interp(m, c, s, phi);
      const auto gp = grad(m, c, s, phi);
      const double diff = ph - interp(m, c, s, phi_k);
      const double pen = diff > 0.0 ? diff : 0.0;
      const double W = strain_energy(p.moduli.lambda, p.moduli.mu, grad(m, c, s, u_k, 2, 0), grad(m, c, s, u_k, 2, 1));
      for (std::size_t a = 0; a < s.N.size(); ++a) {
        R[m.cells[c][a]] += s.w * (p.ell * (gp[0] * s.dN[a][0] + gp[1] * s.dN[a][1]) +
                                   (ph / p.ell + p.gamma0 * pen + ph * W / p.Gc) * s.N[a]);
      }
    }
  }
  return R;
}

struct FacetDatum {
  std::string tag;
  std::function<double(double, double)> g;
};

/// Dense heat residual, boundary data entering with a plus sign.
inline Vec heat_residual(const Mesh& m, const Vec& theta, const Vec& theta_k, const Vec& u_kp1, const Vec& u_km1, const Vec& gamma,
                         const std::vector<FacetDatum>& gbar, const ModelParams& p, double tau) {
  Vec R = Vec::Zero(static_cast<Eigen::Index>(m.num_nodes()));
  const Vec du = (u_kp1 - u_km1) / (2.0 * tau);
  const auto& K = p.conductivity;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& s : samples(m, c)) {
      const double th = interp(m, c, s, theta);
      const double th0 = interp(m, c, s, theta_k);
      const auto gt = grad(m, c, s, theta);
      const double Kv = K.kind == ConductivityModel::Kind::constant ? K.K_const : K.c1 * (std::pow(std::abs(th), K.beta) + 1.0);
      const double div = grad(m, c, s, du, 2, 0)[0] + grad(m, c, s, du, 2, 1)[1];
      for (std::size_t a = 0; a < s.N.size(); ++a) {
        R[m.cells[c][a]] += s.w * (Kv * (gt[0] * s.dN[a][0] + gt[1] * s.dN[a][1]) +
                                   ((th - th0) / tau + p.rho * th0 * div - interp(m, c, s, gamma)) * s.N[a]);
      }
    }
  }
  const double q = 0.5 / std::sqrt(3.0);
  for (const auto& d : gbar) {
    for (const auto& f : m.boundary_facets) {
      if (f.tag != d.tag) continue;
      const auto& A = m.nodes[static_cast<std::size_t>(f.nodes[0])];
      const auto& B = m.nodes[static_cast<std::size_t>(f.nodes[1])];
      const double len = std::hypot(B[0] - A[0], B[1] - A[1]);
      for (double t : {0.5 - q, 0.5 + q}) {
        const double g = d.g(A[0] + t * (B[0] - A[0]), A[1] + t * (B[1] - A[1]));
        R[f.nodes[0]] += 0.5 * len * g * (1.0 - t);
        R[f.nodes[1]] += 0.5 * len * g * t;
      }
    }
  }
  return R;
}

/// Central finite-difference Jacobian of a residual map.
inline Dense fd_jacobian(const std::function<Vec(const Vec&)>& R, const Vec& x, double h = 1e-6) {
  const Eigen::Index n = x.size();
  Dense J(R(x).size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    const double step = h * std::max(1.0, std::abs(x[j]));
    xp[j] += step;
    xm[j] -= step;
    J.col(j) = (R(xp) - R(xm)) / (2.0 * step);
  }
  return J;
}

}  // namespace thermodamage::oracle

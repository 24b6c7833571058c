#pragma once

// Weak forms of the fully discrete momentum, damage and heat equations.
//
//   momentum: (1/tau^2) M u^{k+1} + K(phi^{k+1}) u^{k+1}
//               = F(I_h f^k) + rho (theta^k, div v) + (1/tau^2) M (2 u^k - u^{k-1})
//   damage:   ell (grad phi, grad w) + (1/ell)(phi, w) + gamma0 ([phi - phi^k]_+, w)
//               + (1/Gc)(phi A(E(u^k)):E(u^k), w) = 0
//   heat:     ((theta - theta^k)/tau, z) + (K(theta) grad theta, grad z)
//               + rho (theta^k div delta_tau u, z) + <gbar^k, z>_Gamma = (I_h gamma^k, z)

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thermodamage/linalg.hpp"
#include "thermodamage/model.hpp"
#include "thermodamage/nonlinear.hpp"
#include "thermodamage/parallel.hpp"
#include "thermodamage/space.hpp"

namespace thermodamage {

/// Quadrature data of a mesh, shared between assembly calls.
inline std::shared_ptr<const CellValues> cell_values_for(const MeshPtr& mesh) {
  static std::mutex mtx;
  static std::map<const Mesh*, std::pair<std::weak_ptr<const Mesh>, std::shared_ptr<const CellValues>>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  for (auto it = cache.begin(); it != cache.end();) {
    if (it->second.first.expired()) {
      it = cache.erase(it);
    } else {
      ++it;
    }
  }
  auto it = cache.find(mesh.get());
  if (it != cache.end()) return it->second.second;
  auto cv = std::make_shared<const CellValues>(*mesh);
  cache.emplace(mesh.get(), std::pair{std::weak_ptr<const Mesh>(mesh), cv});
  return cv;
}

namespace detail {

using LocalMatrix = Eigen::Matrix<double, 8, 8>;
using LocalVector = Eigen::Matrix<double, 8, 1>;

/// Cell loop with local-to-global scatter. kernel(c, qps, Ke, Fe) fills the
/// local arrays (size nodes_per_cell * dofs_per_node).
template <class Kernel>
void assemble_cells(const Mesh& m, const CellValues& cv, int dofs_per_node, bool with_matrix, Vector* vec,
                    std::vector<Triplet>* trip, Kernel&& kernel) {
  const int nv = m.nodes_per_cell();
  const int nl = nv * dofs_per_node;
  const Eigen::Index n = static_cast<Eigen::Index>(m.num_nodes()) * dofs_per_node;
  const int chunks = num_threads();
  std::vector<Vector> vecs(static_cast<std::size_t>(chunks));
  std::vector<std::vector<Triplet>> trips(static_cast<std::size_t>(chunks));
  parallel_chunks(m.num_cells(), chunks, [&](int k, std::size_t b, std::size_t e) {
    auto& v = vecs[static_cast<std::size_t>(k)];
    auto& t = trips[static_cast<std::size_t>(k)];
    if (vec) v = Vector::Zero(n);
    if (with_matrix) t.reserve((e - b) * static_cast<std::size_t>(nl * nl));
    LocalMatrix Ke;
    LocalVector Fe;
    std::array<Eigen::Index, 8> gdof{};
    for (std::size_t c = b; c < e; ++c) {
      Ke.setZero();
      Fe.setZero();
      kernel(c, cv[c], Ke, Fe);
      for (int a = 0; a < nv; ++a) {
        for (int i = 0; i < dofs_per_node; ++i) {
          gdof[static_cast<std::size_t>(a * dofs_per_node + i)] =
              static_cast<Eigen::Index>(m.cells[c][static_cast<std::size_t>(a)]) * dofs_per_node + i;
        }
      }
      for (int r = 0; r < nl; ++r) {
        if (vec) v[gdof[static_cast<std::size_t>(r)]] += Fe[r];
        if (with_matrix) {
          for (int s = 0; s < nl; ++s) t.emplace_back(gdof[static_cast<std::size_t>(r)], gdof[static_cast<std::size_t>(s)], Ke(r, s));
        }
      }
    }
  });
  if (vec) {
    *vec = Vector::Zero(n);
    for (const auto& v : vecs) *vec += v;
  }
  if (trip) {
    trip->clear();
    for (auto& t : trips) trip->insert(trip->end(), t.begin(), t.end());
  }
}

inline void require_scalar(const Field& f, const char* where) {
  if (f.is_vector()) throw std::invalid_argument(std::string(where) + ": expected a scalar field");
}
inline void require_vector(const Field& f, const char* where) {
  if (!f.is_vector()) throw std::invalid_argument(std::string(where) + ": expected a vector field");
}
inline void require_tau(double tau, const char* where) {
  if (!(tau > 0.0)) throw std::invalid_argument(std::string(where) + ": time step must be positive");
}

}  // namespace detail

/// Linear system of the momentum equation.
struct MomentumSystem {
  SystemMatrix matrix;
  Vector rhs;
};

/// Matrix (1/tau^2) M + K_phi with stiffness coefficient g(phi^{k+1}) + kappa at
/// quadrature points; rhs = load of I_h f^k + rho (theta^k, div v) + (1/tau^2) M (2u^k - u^{k-1}).
inline MomentumSystem assemble_momentum(const Field& u_k, const Field& u_km1, const Field& phi_kp1, const Field& theta_k,
                                        const Field& f_k, const ModelParams& p, double tau) {
  detail::require_tau(tau, "assemble_momentum");
  detail::require_vector(u_k, "assemble_momentum");
  detail::require_vector(u_km1, "assemble_momentum");
  detail::require_vector(f_k, "assemble_momentum");
  detail::require_scalar(phi_kp1, "assemble_momentum");
  detail::require_scalar(theta_k, "assemble_momentum");
  for (const Field* f : {&u_km1, &phi_kp1, &theta_k, &f_k}) require_same_mesh(u_k, *f, "assemble_momentum");

  const Mesh& m = *u_k.mesh;
  const auto cv = cell_values_for(u_k.mesh);
  const int nv = m.nodes_per_cell();
  const double lam = p.moduli.lambda, mu = p.moduli.mu;
  const double inv_tau2 = 1.0 / (tau * tau);
  const Vector inertia = 2.0 * u_k.coeffs - u_km1.coeffs;

  MomentumSystem sys;
  std::vector<Triplet> trip;
  detail::assemble_cells(m, *cv, 2, true, &sys.rhs, &trip, [&](std::size_t c, const std::vector<QuadPoint>& qps, auto& Ke, auto& Fe) {
    for (const auto& qp : qps) {
      const double phi = value_at(m, phi_kp1.coeffs, c, qp);
      const double coef = degradation(phi) + p.kappa;
      const double theta = value_at(m, theta_k.coeffs, c, qp);
      double fq[2] = {0, 0}, iq[2] = {0, 0};
      for (int b = 0; b < nv; ++b) {
        const auto node = static_cast<Eigen::Index>(m.cells[c][static_cast<std::size_t>(b)]);
        const double Nb = qp.N[static_cast<std::size_t>(b)];
        for (int i = 0; i < 2; ++i) {
          fq[i] += Nb * f_k.coeffs[2 * node + i];
          iq[i] += Nb * inertia[2 * node + i];
        }
      }
      for (int a = 0; a < nv; ++a) {
        const double Na = qp.N[static_cast<std::size_t>(a)];
        const auto& ga = qp.dN[static_cast<std::size_t>(a)];
        for (int i = 0; i < 2; ++i) {
          Fe[2 * a + i] += (fq[i] * Na + p.rho * theta * ga[static_cast<std::size_t>(i)] + inv_tau2 * iq[i] * Na) * qp.JxW;
        }
        for (int b = 0; b < nv; ++b) {
          const double Nb = qp.N[static_cast<std::size_t>(b)];
          const auto& gb = qp.dN[static_cast<std::size_t>(b)];
          const double dot = ga[0] * gb[0] + ga[1] * gb[1];
          for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
              const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
              double k = coef * (lam * ga[si] * gb[sj] + mu * ga[sj] * gb[si]);
              if (i == j) k += coef * mu * dot + inv_tau2 * Na * Nb;
              Ke(2 * a + i, 2 * b + j) += k * qp.JxW;
            }
          }
        }
      }
    }
  });
  sys.matrix = SystemMatrix::from_triplets(static_cast<Eigen::Index>(u_k.size()), trip);
  return sys;
}

/// Residual and Jacobian of the damage equation at phi_trial. The penalty is
/// active at quadrature points where phi_trial - phi_k > 0.
inline Linearization assemble_damage(const Field& phi_trial, const Field& phi_k, const Field& u_k, const ModelParams& p) {
  detail::require_scalar(phi_trial, "assemble_damage");
  detail::require_scalar(phi_k, "assemble_damage");
  detail::require_vector(u_k, "assemble_damage");
  require_same_mesh(phi_trial, phi_k, "assemble_damage");
  require_same_mesh(phi_trial, u_k, "assemble_damage");

  const Mesh& m = *phi_trial.mesh;
  const auto cv = cell_values_for(phi_trial.mesh);
  const int nv = m.nodes_per_cell();
  Linearization lin;
  std::vector<Triplet> trip;
  detail::assemble_cells(m, *cv, 1, true, &lin.residual, &trip, [&](std::size_t c, const std::vector<QuadPoint>& qps, auto& Ke, auto& Fe) {
    for (const auto& qp : qps) {
      const double phi = value_at(m, phi_trial.coeffs, c, qp);
      const auto gphi = gradient_at(m, phi_trial.coeffs, c, qp);
      const double s = phi - value_at(m, phi_k.coeffs, c, qp);
      const double W = energy_density_B(p.moduli, strain_at(m, u_k.coeffs, c, qp));
      const double react = phi / p.ell + p.gamma0 * positive_part(s) + phi * W / p.Gc;
      const double dreact = 1.0 / p.ell + p.gamma0 * positive_part_slope(s) + W / p.Gc;
      for (int a = 0; a < nv; ++a) {
        const double Na = qp.N[static_cast<std::size_t>(a)];
        const auto& ga = qp.dN[static_cast<std::size_t>(a)];
        Fe[a] += (p.ell * (gphi[0] * ga[0] + gphi[1] * ga[1]) + react * Na) * qp.JxW;
        for (int b = 0; b < nv; ++b) {
          const auto& gb = qp.dN[static_cast<std::size_t>(b)];
          Ke(a, b) += (p.ell * (ga[0] * gb[0] + ga[1] * gb[1]) + dreact * Na * qp.N[static_cast<std::size_t>(b)]) * qp.JxW;
        }
      }
    }
  });
  lin.jacobian = SystemMatrix::from_triplets(static_cast<Eigen::Index>(phi_trial.size()), trip);
  lin.symmetric = true;
  return lin;
}

/// Boundary datum on one tag, already evaluated at the current time level.
struct BoundaryFlux {
  std::string tag;
  ScalarFunction value;
};

/// Load vector sum_tags \int_tag g z ds for a scalar field (2-point Gauss per facet).
inline Vector assemble_boundary_load(const Mesh& m, const std::vector<BoundaryFlux>& data, int dofs_per_node = 1, int component = 0) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(m.num_nodes()) * dofs_per_node);
  const double gp = 0.5 / std::sqrt(3.0);
  for (const auto& d : data) {
    for (std::size_t f : m.facets_with_tag(d.tag)) {
      const auto& fac = m.boundary_facets[f];
      const auto& a = m.nodes[static_cast<std::size_t>(fac.nodes[0])];
      const auto& b = m.nodes[static_cast<std::size_t>(fac.nodes[1])];
      const double len = m.facet_length(f);
      for (double s : {0.5 - gp, 0.5 + gp}) {
        const Point x{a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
        const double g = d.value(x) * 0.5 * len;
        out[static_cast<Eigen::Index>(fac.nodes[0]) * dofs_per_node + component] += g * (1.0 - s);
        out[static_cast<Eigen::Index>(fac.nodes[1]) * dofs_per_node + component] += g * s;
      }
    }
  }
  return out;
}

/// L2(Gamma_tags) norm of boundary data.
inline double boundary_l2_norm(const Mesh& m, const std::vector<BoundaryFlux>& data) {
  const double gp = 0.5 / std::sqrt(3.0);
  double acc = 0.0;
  for (const auto& d : data) {
    for (std::size_t f : m.facets_with_tag(d.tag)) {
      const auto& fac = m.boundary_facets[f];
      const auto& a = m.nodes[static_cast<std::size_t>(fac.nodes[0])];
      const auto& b = m.nodes[static_cast<std::size_t>(fac.nodes[1])];
      for (double s : {0.5 - gp, 0.5 + gp}) {
        const double g = d.value({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
        acc += g * g * 0.5 * m.facet_length(f);
      }
    }
  }
  return std::sqrt(acc);
}

/// Residual and Jacobian of the heat equation at theta_trial with the full
/// Newton linearization of K(theta) grad theta. `gammabar_k` enters the left
/// side as +<gbar, z>; in strong form this is the flux (K grad theta).n = -gbar.
inline Linearization assemble_heat(const Field& theta_trial, const Field& theta_k, const Field& u_kp1, const Field& u_km1,
                                   const Field& gamma_k, const std::vector<BoundaryFlux>& gammabar_k, const ModelParams& p,
                                   double tau) {
  detail::require_tau(tau, "assemble_heat");
  detail::require_scalar(theta_trial, "assemble_heat");
  detail::require_scalar(theta_k, "assemble_heat");
  detail::require_scalar(gamma_k, "assemble_heat");
  detail::require_vector(u_kp1, "assemble_heat");
  detail::require_vector(u_km1, "assemble_heat");
  for (const Field* f : {&theta_k, &u_kp1, &u_km1, &gamma_k}) require_same_mesh(theta_trial, *f, "assemble_heat");

  const Mesh& m = *theta_trial.mesh;
  const auto cv = cell_values_for(theta_trial.mesh);
  const int nv = m.nodes_per_cell();
  const Vector du = (u_kp1.coeffs - u_km1.coeffs) / (2.0 * tau);
  const auto& K = p.conductivity;
  Linearization lin;
  std::vector<Triplet> trip;
  detail::assemble_cells(m, *cv, 1, true, &lin.residual, &trip, [&](std::size_t c, const std::vector<QuadPoint>& qps, auto& Ke, auto& Fe) {
    for (const auto& qp : qps) {
      const double th = value_at(m, theta_trial.coeffs, c, qp);
      const double th_old = value_at(m, theta_k.coeffs, c, qp);
      const auto g = gradient_at(m, theta_trial.coeffs, c, qp);
      const double Kv = K.value(th), dK = K.derivative(th);
      const double src = value_at(m, gamma_k.coeffs, c, qp);
      const double coupling = p.rho * th_old * divergence_at(m, du, c, qp);
      const double react = (th - th_old) / tau + coupling - src;
      for (int a = 0; a < nv; ++a) {
        const double Na = qp.N[static_cast<std::size_t>(a)];
        const auto& ga = qp.dN[static_cast<std::size_t>(a)];
        const double gga = g[0] * ga[0] + g[1] * ga[1];
        Fe[a] += (Kv * gga + react * Na) * qp.JxW;
        for (int b = 0; b < nv; ++b) {
          const double Nb = qp.N[static_cast<std::size_t>(b)];
          const auto& gb = qp.dN[static_cast<std::size_t>(b)];
          Ke(a, b) += (Na * Nb / tau + Kv * (ga[0] * gb[0] + ga[1] * gb[1]) + dK * Nb * gga) * qp.JxW;
        }
      }
    }
  });
  lin.residual += assemble_boundary_load(m, gammabar_k);
  lin.jacobian = SystemMatrix::from_triplets(static_cast<Eigen::Index>(theta_trial.size()), trip);
  lin.symmetric = K.kind == ConductivityModel::Kind::constant;
  return lin;
}

/// Penalty vector gamma0 ([phi - phi_k]_+, w).
inline Vector assemble_penalty(const Field& phi, const Field& phi_k, double gamma0) {
  require_same_mesh(phi, phi_k, "assemble_penalty");
  const Mesh& m = *phi.mesh;
  const auto cv = cell_values_for(phi.mesh);
  Vector out;
  detail::assemble_cells(m, *cv, 1, false, &out, nullptr, [&](std::size_t c, const std::vector<QuadPoint>& qps, auto&, auto& Fe) {
    for (const auto& qp : qps) {
      const double s = positive_part(value_at(m, phi.coeffs, c, qp) - value_at(m, phi_k.coeffs, c, qp));
      for (int a = 0; a < m.nodes_per_cell(); ++a) Fe[a] += gamma0 * s * qp.N[static_cast<std::size_t>(a)] * qp.JxW;
    }
  });
  return out;
}

/// Irreversibility violation \int [phi_new - phi_old]_+ dx.
inline double penalty_violation(const Field& phi_new, const Field& phi_old) {
  require_same_mesh(phi_new, phi_old, "penalty_violation");
  const Mesh& m = *phi_new.mesh;
  const auto cv = cell_values_for(phi_new.mesh);
  double acc = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : (*cv)[c]) {
      acc += positive_part(value_at(m, phi_new.coeffs, c, qp) - value_at(m, phi_old.coeffs, c, qp)) * qp.JxW;
    }
  }
  return acc;
}

/// Scalar mass matrix (consistent).
inline SystemMatrix assemble_mass(const MeshPtr& mesh) {
  const Mesh& m = *mesh;
  const auto cv = cell_values_for(mesh);
  std::vector<Triplet> trip;
  detail::assemble_cells(m, *cv, 1, true, nullptr, &trip, [&](std::size_t, const std::vector<QuadPoint>& qps, auto& Ke, auto&) {
    for (const auto& qp : qps) {
      for (int a = 0; a < m.nodes_per_cell(); ++a) {
        for (int b = 0; b < m.nodes_per_cell(); ++b) {
          Ke(a, b) += qp.N[static_cast<std::size_t>(a)] * qp.N[static_cast<std::size_t>(b)] * qp.JxW;
        }
      }
    }
  });
  return SystemMatrix::from_triplets(static_cast<Eigen::Index>(m.num_nodes()), trip);
}

/// Dirichlet data as (dof, value) pairs.
using Constraints = std::vector<std::pair<std::size_t, double>>;

/// Eliminates constrained dofs symmetrically: rows and columns are zeroed,
/// the diagonal set to one, and the right-hand side lifted.
inline MomentumSystem apply_dirichlet(const SystemMatrix& mat, const Vector& rhs, const Constraints& bc) {
  const Eigen::Index n = mat.rows();
  if (rhs.size() != n) throw std::invalid_argument("apply_dirichlet: rhs size does not match the matrix");
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  Vector g = Vector::Zero(n);
  for (const auto& [dof, value] : bc) {
    if (dof >= static_cast<std::size_t>(n)) {
      throw std::invalid_argument("apply_dirichlet: constrained dof " + std::to_string(dof) + " out of range");
    }
    fixed[dof] = 1;
    g[static_cast<Eigen::Index>(dof)] = value;
  }
  MomentumSystem out;
  out.rhs = rhs;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mat.csr.nonZeros()));
  for (Eigen::Index i = 0; i < mat.csr.outerSize(); ++i) {
    for (CsrMatrix::InnerIterator it(mat.csr, i); it; ++it) {
      const Eigen::Index j = it.col();
      const bool fi = fixed[static_cast<std::size_t>(i)] != 0, fj = fixed[static_cast<std::size_t>(j)] != 0;
      if (!fi && !fj) {
        trip.emplace_back(i, j, it.value());
      } else if (!fi && fj) {
        out.rhs[i] -= it.value() * g[j];
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (fixed[static_cast<std::size_t>(i)]) {
      trip.emplace_back(i, i, 1.0);
      out.rhs[i] = g[i];
    }
  }
  out.matrix = SystemMatrix::from_triplets(n, trip);
  return out;
}

/// Restricts a Newton linearization to the free dofs: constrained residual
/// entries are zeroed and their rows/columns replaced by the identity.
inline void constrain_linearization(Linearization& lin, const Constraints& bc) {
  if (bc.empty()) return;
  Constraints zero;
  zero.reserve(bc.size());
  for (const auto& [dof, v] : bc) zero.emplace_back(dof, 0.0);
  auto sys = apply_dirichlet(lin.jacobian, lin.residual, zero);
  lin.jacobian = std::move(sys.matrix);
  for (const auto& [dof, v] : bc) lin.residual[static_cast<Eigen::Index>(dof)] = 0.0;
}

}  // namespace thermodamage

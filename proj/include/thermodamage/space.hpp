#pragma once

// Lowest-order Lagrange spaces on triangles (P1) and quadrilaterals (Q1).

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thermodamage/mesh.hpp"
#include "thermodamage/tensor.hpp"

namespace thermodamage {

using Vector = Eigen::VectorXd;
using MeshPtr = std::shared_ptr<const Mesh>;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Points are reference coordinates: the unit triangle (0,0),(1,0),(0,1) or
/// the square [-1,1]^2. Weights sum to the reference measure.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;
  std::size_t size() const { return points.size(); }
};

inline double reference_measure(CellKind k) { return k == CellKind::triangle ? 0.5 : 4.0; }

inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // p1 = P_n(z), p0 = P_{n-1}(z)
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Tensor-product Gauss rule with n points per direction on [-1,1]^2.
inline QuadratureRule quad_gauss_rule(int n) {
  const auto [x, w] = gauss_legendre(n);
  QuadratureRule q;
  q.degree = 2 * n - 1;
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      q.points.push_back({x[i], x[j]});
      q.weights.push_back(w[i] * w[j]);
    }
  }
  return q;
}

/// Three-point edge-midpoint rule, exact for P2.
inline QuadratureRule triangle_midpoint_rule() {
  QuadratureRule q;
  q.degree = 2;
  q.points = {{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
  q.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  return q;
}

/// Collapsed (Duffy) Gauss rule on the unit triangle, exact for degree 2n - 2.
inline QuadratureRule triangle_collapsed_rule(int n) {
  const auto [x, w] = gauss_legendre(n);
  QuadratureRule q;
  q.degree = 2 * n - 2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double a = 0.5 * (x[i] + 1.0);
      const double b = 0.5 * (x[j] + 1.0);
      q.points.push_back({a * (1.0 - b), b});
      q.weights.push_back(0.25 * w[i] * w[j] * (1.0 - b));
    }
  }
  return q;
}

/// The rule used by assembly: edge midpoints on triangles, 2x2 Gauss on quadrilaterals.
inline QuadratureRule default_rule(CellKind k) {
  return k == CellKind::triangle ? triangle_midpoint_rule() : quad_gauss_rule(2);
}

/// Rule for measuring errors against smooth functions.
inline QuadratureRule accurate_rule(CellKind k, int n = 5) {
  return k == CellKind::triangle ? triangle_collapsed_rule(n) : quad_gauss_rule(n);
}

// ---------------------------------------------------------------------------
// Reference shape functions and cell geometry
// ---------------------------------------------------------------------------

using ShapeValues = std::array<double, 4>;
using ShapeGradients = std::array<std::array<double, 2>, 4>;

inline ShapeValues shape_values(CellKind k, const Point& xi) {
  if (k == CellKind::triangle) return {1.0 - xi[0] - xi[1], xi[0], xi[1], 0.0};
  const double a = xi[0], b = xi[1];
  return {0.25 * (1 - a) * (1 - b), 0.25 * (1 + a) * (1 - b), 0.25 * (1 + a) * (1 + b), 0.25 * (1 - a) * (1 + b)};
}

inline ShapeGradients reference_gradients(CellKind k, const Point& xi) {
  if (k == CellKind::triangle) return {{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}};
  const double a = xi[0], b = xi[1];
  return {{{-0.25 * (1 - b), -0.25 * (1 - a)},
           {0.25 * (1 - b), -0.25 * (1 + a)},
           {0.25 * (1 + b), 0.25 * (1 + a)},
           {-0.25 * (1 + b), 0.25 * (1 - a)}}};
}

/// Geometry and shape data of one cell at one quadrature point.
struct QuadPoint {
  Point x{};
  double JxW = 0.0;
  ShapeValues N{};
  ShapeGradients dN{};  // physical gradients
};

/// Quadrature data of every point of one cell.
inline std::vector<QuadPoint> cell_quadrature(const Mesh& m, std::size_t c, const QuadratureRule& rule) {
  const auto pts = m.cell_points(c);
  const int nv = m.nodes_per_cell();
  std::vector<QuadPoint> out(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    auto& qp = out[q];
    qp.N = shape_values(m.cell_kind, rule.points[q]);
    const auto dref = reference_gradients(m.cell_kind, rule.points[q]);
    double J[2][2] = {{0, 0}, {0, 0}};
    for (int a = 0; a < nv; ++a) {
      const auto& p = pts[static_cast<std::size_t>(a)];
      qp.x[0] += qp.N[static_cast<std::size_t>(a)] * p[0];
      qp.x[1] += qp.N[static_cast<std::size_t>(a)] * p[1];
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) J[i][j] += p[static_cast<std::size_t>(i)] * dref[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
      }
    }
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!(det > 0.0)) throw InvalidMesh("cell " + std::to_string(c) + " has a non-positive Jacobian");
    const double inv[2][2] = {{J[1][1] / det, -J[0][1] / det}, {-J[1][0] / det, J[0][0] / det}};
    for (int a = 0; a < nv; ++a) {
      const auto& g = dref[static_cast<std::size_t>(a)];
      // grad N = J^{-T} grad_ref N
      qp.dN[static_cast<std::size_t>(a)] = {inv[0][0] * g[0] + inv[1][0] * g[1], inv[0][1] * g[0] + inv[1][1] * g[1]};
    }
    qp.JxW = det * rule.weights[q];
  }
  return out;
}

/// Quadrature data for all cells with the assembly rule.
class CellValues {
public:
  CellValues() = default;
  explicit CellValues(const Mesh& m) : CellValues(m, default_rule(m.cell_kind)) {}
  CellValues(const Mesh& m, QuadratureRule rule) : rule_(std::move(rule)) {
    data_.reserve(m.num_cells());
    for (std::size_t c = 0; c < m.num_cells(); ++c) data_.push_back(cell_quadrature(m, c, rule_));
  }
  const std::vector<QuadPoint>& operator[](std::size_t c) const { return data_[c]; }
  std::size_t num_cells() const { return data_.size(); }
  const QuadratureRule& rule() const { return rule_; }

private:
  QuadratureRule rule_;
  std::vector<std::vector<QuadPoint>> data_;
};

// ---------------------------------------------------------------------------
// Degrees of freedom and fields
// ---------------------------------------------------------------------------

enum class FieldKind { scalar, vector };

struct DofMap {
  FieldKind kind = FieldKind::scalar;
  int dofs_per_node = 1;
  std::size_t num_nodes = 0;
  /// Dirichlet data as (dof, value), sorted by dof.
  std::vector<std::pair<std::size_t, double>> constrained;

  static DofMap scalar(std::size_t nodes) { return {FieldKind::scalar, 1, nodes, {}}; }
  static DofMap vector(std::size_t nodes, int dim = 2) { return {FieldKind::vector, dim, nodes, {}}; }

  std::size_t size() const { return num_nodes * static_cast<std::size_t>(dofs_per_node); }
  std::size_t dof(std::size_t node, int comp = 0) const {
    return node * static_cast<std::size_t>(dofs_per_node) + static_cast<std::size_t>(comp);
  }
  bool operator==(const DofMap&) const = default;
};

/// Nodal coefficient vector on a mesh; vector fields interleave components per node.
struct Field {
  MeshPtr mesh;
  DofMap dofmap;
  Vector coeffs;

  static Field zeros(MeshPtr m, FieldKind kind) {
    Field f;
    f.dofmap = kind == FieldKind::scalar ? DofMap::scalar(m->num_nodes()) : DofMap::vector(m->num_nodes(), m->dim());
    f.coeffs = Vector::Zero(static_cast<Eigen::Index>(f.dofmap.size()));
    f.mesh = std::move(m);
    return f;
  }

  bool is_vector() const { return dofmap.kind == FieldKind::vector; }
  std::size_t size() const { return dofmap.size(); }

  double nodal(std::size_t node, int comp = 0) const { return coeffs[static_cast<Eigen::Index>(dofmap.dof(node, comp))]; }
};

inline void require_same_mesh(const Field& a, const Field& b, const char* where) {
  if (a.mesh != b.mesh && (a.mesh == nullptr || b.mesh == nullptr || a.mesh->nodes != b.mesh->nodes ||
                           a.mesh->cells != b.mesh->cells)) {
    throw std::invalid_argument(std::string(where) + ": fields live on different meshes");
  }
}

using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<std::array<double, 2>(const Point&)>;

namespace detail {
inline double checked(double v, std::size_t node) {
  if (!std::isfinite(v)) throw std::domain_error("interpolate_nodal: function is undefined at node " + std::to_string(node));
  return v;
}
}  // namespace detail

/// Nodal interpolant of a continuous scalar function.
inline Field interpolate_nodal(MeshPtr m, const ScalarFunction& f) {
  Field out = Field::zeros(m, FieldKind::scalar);
  for (std::size_t i = 0; i < m->num_nodes(); ++i) out.coeffs[static_cast<Eigen::Index>(i)] = detail::checked(f(m->nodes[i]), i);
  return out;
}

inline Field interpolate_nodal(MeshPtr m, const VectorFunction& f) {
  Field out = Field::zeros(m, FieldKind::vector);
  for (std::size_t i = 0; i < m->num_nodes(); ++i) {
    const auto v = f(m->nodes[i]);
    out.coeffs[static_cast<Eigen::Index>(out.dofmap.dof(i, 0))] = detail::checked(v[0], i);
    out.coeffs[static_cast<Eigen::Index>(out.dofmap.dof(i, 1))] = detail::checked(v[1], i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation at quadrature points
// ---------------------------------------------------------------------------

inline double value_at(const Mesh& m, const Vector& coeffs, std::size_t c, const QuadPoint& qp) {
  double v = 0.0;
  for (int a = 0; a < m.nodes_per_cell(); ++a) {
    v += qp.N[static_cast<std::size_t>(a)] * coeffs[m.cells[c][static_cast<std::size_t>(a)]];
  }
  return v;
}

inline std::array<double, 2> gradient_at(const Mesh& m, const Vector& coeffs, std::size_t c, const QuadPoint& qp) {
  std::array<double, 2> g{0.0, 0.0};
  for (int a = 0; a < m.nodes_per_cell(); ++a) {
    const double v = coeffs[m.cells[c][static_cast<std::size_t>(a)]];
    g[0] += qp.dN[static_cast<std::size_t>(a)][0] * v;
    g[1] += qp.dN[static_cast<std::size_t>(a)][1] * v;
  }
  return g;
}

/// Displacement gradient G[i][j] = d u_i / d x_j.
inline std::array<std::array<double, 2>, 2> vector_gradient_at(const Mesh& m, const Vector& coeffs, std::size_t c,
                                                               const QuadPoint& qp) {
  std::array<std::array<double, 2>, 2> G{};
  for (int a = 0; a < m.nodes_per_cell(); ++a) {
    const auto node = static_cast<Eigen::Index>(m.cells[c][static_cast<std::size_t>(a)]);
    for (int i = 0; i < 2; ++i) {
      const double v = coeffs[2 * node + i];
      G[static_cast<std::size_t>(i)][0] += v * qp.dN[static_cast<std::size_t>(a)][0];
      G[static_cast<std::size_t>(i)][1] += v * qp.dN[static_cast<std::size_t>(a)][1];
    }
  }
  return G;
}

inline SymTensor2 strain_at(const Mesh& m, const Vector& coeffs, std::size_t c, const QuadPoint& qp) {
  const auto G = vector_gradient_at(m, coeffs, c, qp);
  return SymTensor2::from_2d(G[0][0], 0.5 * (G[0][1] + G[1][0]), G[1][1]);
}

inline double divergence_at(const Mesh& m, const Vector& coeffs, std::size_t c, const QuadPoint& qp) {
  const auto G = vector_gradient_at(m, coeffs, c, qp);
  return G[0][0] + G[1][1];
}

/// E(u) = (grad u + grad u^T)/2 at quadrature point `qp` of the assembly rule.
inline SymTensor2 eval_strain(const Field& u, std::size_t cell, std::size_t qp) {
  if (!u.is_vector()) throw std::invalid_argument("eval_strain: displacement must be a vector field");
  const auto q = cell_quadrature(*u.mesh, cell, default_rule(u.mesh->cell_kind));
  return strain_at(*u.mesh, u.coeffs, cell, q.at(qp));
}

inline double eval_divergence(const Field& u, std::size_t cell, std::size_t qp) {
  if (!u.is_vector()) throw std::invalid_argument("eval_divergence: displacement must be a vector field");
  const auto q = cell_quadrature(*u.mesh, cell, default_rule(u.mesh->cell_kind));
  return divergence_at(*u.mesh, u.coeffs, cell, q.at(qp));
}

inline std::array<double, 2> eval_gradient(const Field& f, std::size_t cell, std::size_t qp) {
  if (f.is_vector()) throw std::invalid_argument("eval_gradient: expected a scalar field");
  const auto q = cell_quadrature(*f.mesh, cell, default_rule(f.mesh->cell_kind));
  return gradient_at(*f.mesh, f.coeffs, cell, q.at(qp));
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

enum class NormKind { L2, H1semi, Anorm };

struct NormSpec {
  NormKind kind = NormKind::L2;
  ElasticModuli moduli{};  // used by Anorm only

  static NormSpec l2() { return {NormKind::L2, {}}; }
  static NormSpec h1semi() { return {NormKind::H1semi, {}}; }
  static NormSpec anorm(const ElasticModuli& m) { return {NormKind::Anorm, m}; }
};

/// Squared norm of a field, integrated with the assembly rule (exact for
/// discrete fields on affine cells). Anorm is the energy norm of E(u).
inline double norm_squared(const Field& f, const NormSpec& spec) {
  if (spec.kind == NormKind::Anorm && !f.is_vector()) {
    throw std::invalid_argument("norm: the A-norm applies to strains of vector fields");
  }
  const Mesh& m = *f.mesh;
  const auto rule = default_rule(m.cell_kind);
  double acc = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) {
      double v = 0.0;
      switch (spec.kind) {
        case NormKind::L2:
          if (f.is_vector()) {
            for (int i = 0; i < 2; ++i) {
              double ui = 0.0;
              for (int a = 0; a < m.nodes_per_cell(); ++a) {
                ui += qp.N[static_cast<std::size_t>(a)] * f.coeffs[2 * m.cells[c][static_cast<std::size_t>(a)] + i];
              }
              v += ui * ui;
            }
          } else {
            const double s = value_at(m, f.coeffs, c, qp);
            v = s * s;
          }
          break;
        case NormKind::H1semi:
          if (f.is_vector()) {
            const auto G = vector_gradient_at(m, f.coeffs, c, qp);
            v = G[0][0] * G[0][0] + G[0][1] * G[0][1] + G[1][0] * G[1][0] + G[1][1] * G[1][1];
          } else {
            const auto g = gradient_at(m, f.coeffs, c, qp);
            v = g[0] * g[0] + g[1] * g[1];
          }
          break;
        case NormKind::Anorm:
          v = energy_density_B(spec.moduli, strain_at(m, f.coeffs, c, qp));
          break;
      }
      acc += v * qp.JxW;
    }
  }
  return acc;
}

inline double norm(const Field& f, const NormSpec& spec) { return std::sqrt(norm_squared(f, spec)); }

/// ||E(u)||^2 in L2 (Frobenius).
inline double strain_l2_squared(const Field& u) {
  if (!u.is_vector()) throw std::invalid_argument("strain_l2_squared: expected a vector field");
  const Mesh& m = *u.mesh;
  const auto rule = default_rule(m.cell_kind);
  double acc = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) {
      const auto e = strain_at(m, u.coeffs, c, qp);
      acc += e.contract(e) * qp.JxW;
    }
  }
  return acc;
}

/// L2 error of a scalar field against a smooth function, by a high-order rule.
inline double l2_error(const Field& f, const ScalarFunction& exact, int order = 5) {
  const Mesh& m = *f.mesh;
  const auto rule = accurate_rule(m.cell_kind, order);
  double acc = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) {
      const double e = value_at(m, f.coeffs, c, qp) - exact(qp.x);
      acc += e * e * qp.JxW;
    }
  }
  return std::sqrt(acc);
}

inline double l2_error(const Field& u, const VectorFunction& exact, int order = 5) {
  const Mesh& m = *u.mesh;
  const auto rule = accurate_rule(m.cell_kind, order);
  double acc = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) {
      const auto ex = exact(qp.x);
      for (int i = 0; i < 2; ++i) {
        double ui = 0.0;
        for (int a = 0; a < m.nodes_per_cell(); ++a) {
          ui += qp.N[static_cast<std::size_t>(a)] * u.coeffs[2 * m.cells[c][static_cast<std::size_t>(a)] + i];
        }
        const double e = ui - ex[static_cast<std::size_t>(i)];
        acc += e * e * qp.JxW;
      }
    }
  }
  return std::sqrt(acc);
}

using GradientFunction = std::function<std::array<double, 2>(const Point&)>;
using VectorGradientFunction = std::function<std::array<std::array<double, 2>, 2>(const Point&)>;

inline double h1_semi_error(const Field& f, const GradientFunction& exact_grad, int order = 5) {
  const Mesh& m = *f.mesh;
  const auto rule = accurate_rule(m.cell_kind, order);
  double acc = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) {
      const auto g = gradient_at(m, f.coeffs, c, qp);
      const auto ge = exact_grad(qp.x);
      acc += ((g[0] - ge[0]) * (g[0] - ge[0]) + (g[1] - ge[1]) * (g[1] - ge[1])) * qp.JxW;
    }
  }
  return std::sqrt(acc);
}

inline double h1_semi_error(const Field& u, const VectorGradientFunction& exact_grad, int order = 5) {
  const Mesh& m = *u.mesh;
  const auto rule = accurate_rule(m.cell_kind, order);
  double acc = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) {
      const auto G = vector_gradient_at(m, u.coeffs, c, qp);
      const auto Ge = exact_grad(qp.x);
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) acc += (G[i][j] - Ge[i][j]) * (G[i][j] - Ge[i][j]) * qp.JxW;
      }
    }
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Gauss point to node recovery
// ---------------------------------------------------------------------------

/// Values sampled at the assembly-rule points of every cell, cell-major.
struct QuadratureData {
  MeshPtr mesh;
  std::vector<double> values;

  std::size_t points_per_cell() const { return default_rule(mesh->cell_kind).size(); }
};

struct RecoveryOptions {
  int neighbours = 4;
  double exponent = 1.0;  // weights 1 / dist^exponent
};

namespace detail {

inline std::vector<std::vector<std::size_t>> node_to_cells(const Mesh& m) {
  std::vector<std::vector<std::size_t>> out(m.num_nodes());
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (int a = 0; a < m.nodes_per_cell(); ++a) out[static_cast<std::size_t>(m.cells[c][static_cast<std::size_t>(a)])].push_back(c);
  }
  return out;
}

/// Ordering used to pick the nearest points: distance, ties (relative 1e-12)
/// broken by the global point index.
inline bool closer(double da, std::size_t ia, double db, std::size_t ib) {
  const double tol = 1e-12 * std::max({da, db, 1e-300});
  if (std::abs(da - db) > tol) return da < db;
  return ia < ib;
}

}  // namespace detail

/// Physical coordinates of the assembly-rule points, cell-major.
inline std::vector<Point> quadrature_point_coordinates(const Mesh& m) {
  const auto rule = default_rule(m.cell_kind);
  std::vector<Point> out;
  out.reserve(m.num_cells() * rule.size());
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) out.push_back(qp.x);
  }
  return out;
}

/// Inverse-distance average of the nearest integration points of the cells
/// around each node. Candidates are the points of the cells containing the
/// node, widened to the cells touching those if fewer than `neighbours` exist.
inline Field recover_gauss_to_nodes(const QuadratureData& data, const RecoveryOptions& opt = {}) {
  const Mesh& m = *data.mesh;
  const std::size_t npc = data.points_per_cell();
  if (data.values.size() != m.num_cells() * npc) {
    throw std::invalid_argument("recover_gauss_to_nodes: expected one value per integration point");
  }
  if (data.values.size() < static_cast<std::size_t>(opt.neighbours)) {
    throw std::invalid_argument("recover_gauss_to_nodes: fewer integration points than neighbours");
  }
  const auto xq = quadrature_point_coordinates(m);
  const auto n2c = detail::node_to_cells(m);
  Field out = Field::zeros(data.mesh, FieldKind::scalar);

  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const auto& x = m.nodes[i];
    std::vector<std::size_t> cells = n2c[i];
    if (cells.size() * npc < static_cast<std::size_t>(opt.neighbours)) {
      std::vector<std::size_t> wide;
      for (std::size_t c : n2c[i]) {
        for (int a = 0; a < m.nodes_per_cell(); ++a) {
          for (std::size_t c2 : n2c[static_cast<std::size_t>(m.cells[c][static_cast<std::size_t>(a)])]) wide.push_back(c2);
        }
      }
      std::sort(wide.begin(), wide.end());
      wide.erase(std::unique(wide.begin(), wide.end()), wide.end());
      cells = std::move(wide);
    }
    cand.clear();
    for (std::size_t c : cells) {
      for (std::size_t q = 0; q < npc; ++q) cand.push_back(c * npc + q);
    }
    std::vector<double> dist(cand.size());
    for (std::size_t k = 0; k < cand.size(); ++k) {
      dist[k] = std::hypot(xq[cand[k]][0] - x[0], xq[cand[k]][1] - x[1]);
    }
    std::vector<std::size_t> order(cand.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return detail::closer(dist[a], cand[a], dist[b], cand[b]);
    });
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(opt.neighbours), order.size());
    double value = 0.0;
    if (dist[order[0]] == 0.0) {
      value = data.values[cand[order[0]]];
    } else {
      double wsum = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        const double w = 1.0 / std::pow(dist[order[r]], opt.exponent);
        wsum += w;
        value += w * data.values[cand[order[r]]];
      }
      value /= wsum;
    }
    out.coeffs[static_cast<Eigen::Index>(i)] = value;
  }
  return out;
}

/// Samples a derivative of a field at every assembly-rule point. For scalar
/// fields `component` selects d/dx (0) or d/dy (1); for vector fields
/// component = 2 i + j selects d u_i / d x_j.
inline QuadratureData sample_gradient(const Field& f, int component) {
  const Mesh& m = *f.mesh;
  const auto rule = default_rule(m.cell_kind);
  QuadratureData out{f.mesh, {}};
  out.values.reserve(m.num_cells() * rule.size());
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& qp : cell_quadrature(m, c, rule)) {
      if (f.is_vector()) {
        const auto G = vector_gradient_at(m, f.coeffs, c, qp);
        out.values.push_back(G[static_cast<std::size_t>(component / 2)][static_cast<std::size_t>(component % 2)]);
      } else {
        out.values.push_back(gradient_at(m, f.coeffs, c, qp)[static_cast<std::size_t>(component)]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Appends point data for a field to a VTK stream written by write_vtk_mesh.
/// The caller writes the POINT_DATA header once.
inline void write_vtk_point_data(std::ostream& os, const Field& f, const std::string& name) {
  os.precision(17);
  if (f.is_vector()) {
    os << "VECTORS " << name << " double\n";
    for (std::size_t i = 0; i < f.mesh->num_nodes(); ++i) os << f.nodal(i, 0) << ' ' << f.nodal(i, 1) << " 0\n";
  } else {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < f.mesh->num_nodes(); ++i) os << f.nodal(i) << '\n';
  }
}

/// CSV with one row per node: node,x,y,<columns...>.
inline void write_nodal_csv(std::ostream& os, const Mesh& m,
                            const std::vector<std::pair<std::string, const Field*>>& fields) {
  os.precision(17);
  os << "node,x,y";
  for (const auto& [name, f] : fields) {
    if (f->is_vector()) {
      os << ',' << name << "_x," << name << "_y";
    } else {
      os << ',' << name;
    }
  }
  os << '\n';
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    os << i << ',' << m.nodes[i][0] << ',' << m.nodes[i][1];
    for (const auto& [name, f] : fields) {
      if (f->is_vector()) {
        os << ',' << f->nodal(i, 0) << ',' << f->nodal(i, 1);
      } else {
        os << ',' << f->nodal(i);
      }
    }
    os << '\n';
  }
}

}  // namespace thermodamage

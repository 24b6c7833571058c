#pragma once

// Structured meshes of the unit square and of the single-edge-notched square.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace thermodamage {

class InvalidMesh : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class CellKind { triangle, quadrilateral };

inline const char* to_string(CellKind k) { return k == CellKind::triangle ? "triangle" : "quadrilateral"; }

inline CellKind parse_cell_kind(const std::string& s) {
  if (s == "triangle" || s == "tri") return CellKind::triangle;
  if (s == "quadrilateral" || s == "quad") return CellKind::quadrilateral;
  throw std::invalid_argument("unknown cell kind '" + s + "'");
}

using Point = std::array<double, 2>;

struct BoundaryFacet {
  std::array<int, 2> nodes{};
  std::string tag;
  bool operator==(const BoundaryFacet&) const = default;
};

/// Conforming 2D mesh. Cells are counter-clockwise; quadrilateral nodes follow
/// the lexicographic reference order (0,0), (1,0), (1,1), (0,1).
struct Mesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 4>> cells;  // last entry unused (-1) for triangles
  CellKind cell_kind = CellKind::triangle;
  std::vector<BoundaryFacet> boundary_facets;

  int dim() const { return 2; }
  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_cells() const { return cells.size(); }
  int nodes_per_cell() const { return cell_kind == CellKind::triangle ? 3 : 4; }

  std::array<Point, 4> cell_points(std::size_t c) const {
    std::array<Point, 4> p{};
    for (int a = 0; a < nodes_per_cell(); ++a) p[static_cast<std::size_t>(a)] = nodes[static_cast<std::size_t>(cells[c][static_cast<std::size_t>(a)])];
    return p;
  }

  /// Signed area of cell c (shoelace).
  double cell_area(std::size_t c) const {
    const auto p = cell_points(c);
    const int nv = nodes_per_cell();
    double a = 0.0;
    for (int i = 0; i < nv; ++i) {
      const auto& p0 = p[static_cast<std::size_t>(i)];
      const auto& p1 = p[static_cast<std::size_t>((i + 1) % nv)];
      a += p0[0] * p1[1] - p1[0] * p0[1];
    }
    return 0.5 * a;
  }

  double cell_diameter(std::size_t c) const {
    const auto p = cell_points(c);
    const int nv = nodes_per_cell();
    double d = 0.0;
    for (int i = 0; i < nv; ++i) {
      for (int j = i + 1; j < nv; ++j) {
        d = std::max(d, std::hypot(p[static_cast<std::size_t>(i)][0] - p[static_cast<std::size_t>(j)][0],
                                   p[static_cast<std::size_t>(i)][1] - p[static_cast<std::size_t>(j)][1]));
      }
    }
    return d;
  }

  /// Mesh-width contribution of a cell: the diameter for triangles, the
  /// longest edge for quadrilaterals (the usual h of tensor-product elements).
  double cell_size(std::size_t c) const {
    if (cell_kind == CellKind::triangle) return cell_diameter(c);
    const auto p = cell_points(c);
    double e = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& a = p[i];
      const auto& b = p[(i + 1) % 4];
      e = std::max(e, std::hypot(a[0] - b[0], a[1] - b[1]));
    }
    return e;
  }

  double total_area() const {
    double a = 0.0;
    for (std::size_t c = 0; c < num_cells(); ++c) a += cell_area(c);
    return a;
  }

  std::vector<std::size_t> facets_with_tag(const std::string& tag) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < boundary_facets.size(); ++f) {
      if (boundary_facets[f].tag == tag) out.push_back(f);
    }
    return out;
  }

  double facet_length(std::size_t f) const {
    const auto& a = nodes[static_cast<std::size_t>(boundary_facets[f].nodes[0])];
    const auto& b = nodes[static_cast<std::size_t>(boundary_facets[f].nodes[1])];
    return std::hypot(a[0] - b[0], a[1] - b[1]);
  }

  /// Local edges of a cell as node pairs in counter-clockwise order.
  std::vector<std::array<int, 2>> cell_edges(std::size_t c) const {
    const int nv = nodes_per_cell();
    std::vector<std::array<int, 2>> e;
    for (int i = 0; i < nv; ++i) {
      e.push_back({cells[c][static_cast<std::size_t>(i)], cells[c][static_cast<std::size_t>((i + 1) % nv)]});
    }
    return e;
  }
};

struct ShapeReport {
  double h_max = 0.0;
  double h_min = 0.0;
  double gamma = 0.0;  // max diam(T) / |T|^{1/d}
  double quasi_uniformity = 0.0;
};

namespace detail {

inline std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

/// Counts cells per undirected edge.
inline std::map<std::pair<int, int>, int> edge_cell_counts(const Mesh& m) {
  std::map<std::pair<int, int>, int> counts;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& e : m.cell_edges(c)) ++counts[edge_key(e[0], e[1])];
  }
  return counts;
}

/// Creates the boundary facets of a mesh (edges owned by exactly one cell),
/// oriented counter-clockwise with respect to the owning cell, and tags them
/// with `tagger(midpoint, a, b)`.
template <class Tagger>
void build_boundary(Mesh& m, Tagger&& tagger) {
  const auto counts = edge_cell_counts(m);
  m.boundary_facets.clear();
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& e : m.cell_edges(c)) {
      if (counts.at(edge_key(e[0], e[1])) != 1) continue;
      const auto& a = m.nodes[static_cast<std::size_t>(e[0])];
      const auto& b = m.nodes[static_cast<std::size_t>(e[1])];
      const Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      m.boundary_facets.push_back({e, tagger(mid, a, b)});
    }
  }
}

/// Splits a lattice of quadrilaterals (node ids by (i, j), -1 for holes) into cells.
inline void push_lattice_cell(Mesh& m, CellKind kind, int n00, int n10, int n11, int n01) {
  if (kind == CellKind::quadrilateral) {
    m.cells.push_back({n00, n10, n11, n01});
  } else {
    m.cells.push_back({n00, n10, n11, -1});
    m.cells.push_back({n00, n11, n01, -1});
  }
}

inline std::string square_side_tag(const Point& mid, double tol) {
  if (std::abs(mid[1]) < tol) return "bottom";
  if (std::abs(mid[1] - 1.0) < tol) return "top";
  if (std::abs(mid[0]) < tol) return "left";
  if (std::abs(mid[0] - 1.0) < tol) return "right";
  return "";
}

}  // namespace detail

/// Uniform (n+1)^2 lattice on (0,1)^2; triangles use the lower-left to
/// upper-right diagonal. Boundary tags: left, right, top, bottom.
inline Mesh build_unit_square(int n, CellKind kind) {
  if (n < 1) throw std::invalid_argument("build_unit_square: need n >= 1, got " + std::to_string(n));
  Mesh m;
  m.cell_kind = kind;
  const int np = n + 1;
  m.nodes.reserve(static_cast<std::size_t>(np * np));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      m.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  const auto id = [np](int i, int j) { return j * np + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      detail::push_lattice_cell(m, kind, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
  const double tol = 1e-12;
  detail::build_boundary(m, [tol](const Point& mid, const Point&, const Point&) {
    return detail::square_side_tag(mid, tol);
  });
  return m;
}

struct NotchGeometry {
  double length = 0.5;      // slit enters from x = 0 up to x = length
  double thickness = 1e-3;  // slit opening
  double height = 0.5;      // y of the slit centre line
};

/// Unit square minus a thin horizontal slit entering from the left side.
///
/// The lattice line y = height is doubled into y = height -/+ thickness/2;
/// cells of the resulting thin strip are removed for x < length. Slit faces are
/// tagged notch_lower, notch_upper and notch_front (the vertical face at x = length).
inline Mesh build_notched_square(int n, CellKind kind, const NotchGeometry& g = {}) {
  if (n < 2) throw std::invalid_argument("build_notched_square: need n >= 2");
  const double hn = 1.0 / n;
  if (!(g.length > 0.0 && g.length < 1.0)) throw std::invalid_argument("build_notched_square: notch length must lie in (0, 1)");
  if (!(g.thickness > 0.0 && g.thickness < hn)) {
    throw std::invalid_argument("build_notched_square: notch thickness must lie in (0, 1/n)");
  }
  const double ji = g.height * n;
  const double il = g.length * n;
  if (std::abs(ji - std::round(ji)) > 1e-9 || std::round(ji) < 1 || std::round(ji) > n - 1) {
    throw std::invalid_argument("build_notched_square: notch height must be an interior lattice line for this n");
  }
  if (std::abs(il - std::round(il)) > 1e-9) {
    throw std::invalid_argument("build_notched_square: notch length must be a multiple of 1/n");
  }
  const int jm = static_cast<int>(std::round(ji));
  const int im = static_cast<int>(std::round(il));

  // y lattice with the doubled centre line
  std::vector<double> ys;
  for (int j = 0; j <= n; ++j) {
    if (j == jm) {
      ys.push_back(g.height - 0.5 * g.thickness);
      ys.push_back(g.height + 0.5 * g.thickness);
    } else {
      ys.push_back(static_cast<double>(j) / n);
    }
  }
  const int nrows = static_cast<int>(ys.size());  // n + 2 node rows
  const int np = n + 1;

  Mesh m;
  m.cell_kind = kind;
  for (int r = 0; r < nrows; ++r) {
    for (int i = 0; i <= n; ++i) m.nodes.push_back({static_cast<double>(i) / n, ys[static_cast<std::size_t>(r)]});
  }
  const auto id = [np](int i, int r) { return r * np + i; };
  for (int r = 0; r + 1 < nrows; ++r) {
    const bool strip = (r == jm);
    for (int i = 0; i < n; ++i) {
      if (strip && i < im) continue;
      detail::push_lattice_cell(m, kind, id(i, r), id(i + 1, r), id(i + 1, r + 1), id(i, r + 1));
    }
  }
  // nodes inside the slit mouth on x = 0 are still used by the outer cells; none are orphaned.

  const double tol = 1e-12;
  const double ylo = g.height - 0.5 * g.thickness;
  const double yhi = g.height + 0.5 * g.thickness;
  const double xf = static_cast<double>(im) / n;
  detail::build_boundary(m, [=](const Point& mid, const Point& a, const Point& b) -> std::string {
    const bool horizontal = std::abs(a[1] - b[1]) < tol;
    const bool vertical = std::abs(a[0] - b[0]) < tol;
    if (vertical && std::abs(mid[0] - xf) < tol && mid[1] > ylo - tol && mid[1] < yhi + tol) return "notch_front";
    if (horizontal && mid[0] < xf + tol && std::abs(mid[1] - ylo) < tol) return "notch_lower";
    if (horizontal && mid[0] < xf + tol && std::abs(mid[1] - yhi) < tol) return "notch_upper";
    return detail::square_side_tag(mid, tol);
  });
  return m;
}

/// Splits every cell into four similar children; tags are inherited and the
/// parent nodes keep their indices.
inline Mesh refine_uniform(const Mesh& m) {
  Mesh r;
  r.cell_kind = m.cell_kind;
  r.nodes = m.nodes;
  std::map<std::pair<int, int>, int> midpoint;
  const auto mid = [&](int a, int b) {
    const auto key = detail::edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto& pa = m.nodes[static_cast<std::size_t>(a)];
    const auto& pb = m.nodes[static_cast<std::size_t>(b)];
    r.nodes.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    const int id = static_cast<int>(r.nodes.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto& v = m.cells[c];
    if (m.cell_kind == CellKind::triangle) {
      const int m01 = mid(v[0], v[1]), m12 = mid(v[1], v[2]), m20 = mid(v[2], v[0]);
      r.cells.push_back({v[0], m01, m20, -1});
      r.cells.push_back({m01, v[1], m12, -1});
      r.cells.push_back({m20, m12, v[2], -1});
      r.cells.push_back({m01, m12, m20, -1});
    } else {
      const int m01 = mid(v[0], v[1]), m12 = mid(v[1], v[2]), m23 = mid(v[2], v[3]), m30 = mid(v[3], v[0]);
      Point ctr{0.0, 0.0};
      for (int a = 0; a < 4; ++a) {
        ctr[0] += 0.25 * m.nodes[static_cast<std::size_t>(v[static_cast<std::size_t>(a)])][0];
        ctr[1] += 0.25 * m.nodes[static_cast<std::size_t>(v[static_cast<std::size_t>(a)])][1];
      }
      r.nodes.push_back(ctr);
      const int cc = static_cast<int>(r.nodes.size()) - 1;
      r.cells.push_back({v[0], m01, cc, m30});
      r.cells.push_back({m01, v[1], m12, cc});
      r.cells.push_back({cc, m12, v[2], m23});
      r.cells.push_back({m30, cc, m23, v[3]});
    }
  }
  for (const auto& f : m.boundary_facets) {
    const int mm = mid(f.nodes[0], f.nodes[1]);
    r.boundary_facets.push_back({{f.nodes[0], mm}, f.tag});
    r.boundary_facets.push_back({{mm, f.nodes[1]}, f.tag});
  }
  return r;
}

inline ShapeReport shape_report(const Mesh& m) {
  if (m.num_cells() == 0) throw InvalidMesh("shape_report: empty mesh");
  ShapeReport rep;
  rep.h_min = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const double area = m.cell_area(c);
    if (!(area > 0.0)) throw InvalidMesh("shape_report: degenerate or inverted cell " + std::to_string(c));
    const double size = m.cell_size(c);
    rep.h_max = std::max(rep.h_max, size);
    rep.h_min = std::min(rep.h_min, size);
    rep.gamma = std::max(rep.gamma, m.cell_diameter(c) / std::sqrt(area));
  }
  rep.quasi_uniformity = rep.h_max / rep.h_min;
  return rep;
}

/// Structural checks: positive cell areas, each boundary facet owned by one
/// cell and tagged, no edge shared by more than two cells.
inline void validate_mesh(const Mesh& m) {
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    if (!(m.cell_area(c) > 0.0)) throw InvalidMesh("cell " + std::to_string(c) + " has non-positive area");
  }
  const auto counts = detail::edge_cell_counts(m);
  std::size_t boundary_edges = 0;
  for (const auto& [e, k] : counts) {
    if (k > 2) throw InvalidMesh("edge shared by more than two cells");
    if (k == 1) ++boundary_edges;
  }
  if (boundary_edges != m.boundary_facets.size()) throw InvalidMesh("boundary facet list does not match the mesh boundary");
  for (const auto& f : m.boundary_facets) {
    auto it = counts.find(detail::edge_key(f.nodes[0], f.nodes[1]));
    if (it == counts.end() || it->second != 1) throw InvalidMesh("boundary facet is not a boundary edge");
    if (f.tag.empty()) throw InvalidMesh("untagged boundary facet");
  }
}

/// Legacy ASCII VTK unstructured grid. Point data can be appended by the caller.
inline void write_vtk_mesh(std::ostream& os, const Mesh& m, const std::string& title = "thermodamage mesh") {
  os.precision(17);
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << m.num_nodes() << " double\n";
  for (const auto& p : m.nodes) os << p[0] << ' ' << p[1] << " 0\n";
  const int nv = m.nodes_per_cell();
  os << "CELLS " << m.num_cells() << ' ' << m.num_cells() * static_cast<std::size_t>(nv + 1) << '\n';
  for (const auto& c : m.cells) {
    os << nv;
    for (int a = 0; a < nv; ++a) os << ' ' << c[static_cast<std::size_t>(a)];
    os << '\n';
  }
  os << "CELL_TYPES " << m.num_cells() << '\n';
  const int type = m.cell_kind == CellKind::triangle ? 5 : 9;
  for (std::size_t c = 0; c < m.num_cells(); ++c) os << type << '\n';
}

}  // namespace thermodamage

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "thermodamage/mesh.hpp"

using namespace thermodamage;

namespace {

double area_sum(const Mesh& m) {
  double a = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) a += m.cell_area(c);
  return a;
}

// Every interior edge is shared by two cells, every boundary edge by one
// cell and one tagged facet.
void expect_conforming(const Mesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (const auto& e : m.cell_edges(c)) ++count[detail::edge_key(e[0], e[1])];
  }
  std::set<std::pair<int, int>> facets;
  for (const auto& f : m.boundary_facets) {
    EXPECT_FALSE(f.tag.empty());
    EXPECT_TRUE(facets.insert(detail::edge_key(f.nodes[0], f.nodes[1])).second) << "duplicate facet";
  }
  for (const auto& [e, k] : count) {
    EXPECT_LE(k, 2);
    EXPECT_EQ(k == 1, facets.count(e) == 1);
  }
  EXPECT_EQ(facets.size(), static_cast<std::size_t>(std::count_if(count.begin(), count.end(), [](auto& p) { return p.second == 1; })));
}

}  // namespace

TEST(UnitSquare, Counts) {
  const auto t1 = build_unit_square(1, CellKind::triangle);
  EXPECT_EQ(t1.num_nodes(), 4u);
  EXPECT_EQ(t1.num_cells(), 2u);
  const auto t2 = build_unit_square(2, CellKind::triangle);
  EXPECT_EQ(t2.num_nodes(), 9u);
  EXPECT_EQ(t2.num_cells(), 8u);
  EXPECT_THROW(build_unit_square(0, CellKind::triangle), std::invalid_argument);
}

TEST(UnitSquare, AreaAndWidth) {
  const auto q = build_unit_square(4, CellKind::quadrilateral);
  EXPECT_NEAR(area_sum(q), 1.0, 1e-14);
  EXPECT_NEAR(shape_report(q).h_max, 0.25, 1e-14);
  const auto t = build_unit_square(4, CellKind::triangle);
  EXPECT_NEAR(shape_report(t).h_max, std::sqrt(2.0) / 4.0, 1e-14);
}

TEST(UnitSquare, TagsAndOrientation) {
  for (auto kind : {CellKind::triangle, CellKind::quadrilateral}) {
    const auto m = build_unit_square(3, kind);
    for (std::size_t c = 0; c < m.num_cells(); ++c) EXPECT_GT(m.cell_area(c), 0.0);
    std::map<std::string, int> n;
    for (const auto& f : m.boundary_facets) ++n[f.tag];
    EXPECT_EQ(n.size(), 4u);
    for (const char* tag : {"left", "right", "top", "bottom"}) EXPECT_EQ(n[tag], 3);
    for (auto f : m.facets_with_tag("left")) {
      const auto& bf = m.boundary_facets[f];
      EXPECT_EQ(m.nodes[static_cast<std::size_t>(bf.nodes[0])][0], 0.0);
      EXPECT_EQ(m.nodes[static_cast<std::size_t>(bf.nodes[1])][0], 0.0);
    }
    expect_conforming(m);
    EXPECT_NO_THROW(validate_mesh(m));
  }
}

TEST(ShapeReport, GammaMatchesPerCellOracle) {
  const auto m = build_unit_square(4, CellKind::triangle);
  double gamma = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto p = m.cell_points(c);
    double diam = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) diam = std::max(diam, std::hypot(p[a][0] - p[b][0], p[a][1] - p[b][1]));
    }
    const double area = 0.5 * std::abs((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
    gamma = std::max(gamma, diam / std::sqrt(area));
  }
  const auto r = shape_report(m);
  EXPECT_NEAR(r.gamma, gamma, 1e-12);
  EXPECT_NEAR(r.gamma, 2.0, 1e-12);  // sqrt(2)/4 / sqrt(1/32)
  EXPECT_NEAR(r.quasi_uniformity, 1.0, 1e-12);
  // equilateral simplex bound: diam / sqrt(area) >= sqrt(4 / sqrt(3))
  EXPECT_GE(r.gamma, std::sqrt(4.0 / std::sqrt(3.0)));
}

TEST(ShapeReport, DegenerateCellRejected) {
  Mesh m;
  m.cell_kind = CellKind::triangle;
  m.nodes = {{0, 0}, {1, 0}, {2, 0}};
  m.cells = {{0, 1, 2, -1}};
  EXPECT_THROW(shape_report(m), InvalidMesh);
}

TEST(Refine, TrianglesSplitIntoFour) {
  const auto m = build_unit_square(1, CellKind::triangle);
  const auto r = refine_uniform(m);
  EXPECT_EQ(r.num_cells(), 8u);
  EXPECT_NEAR(shape_report(r).h_max, shape_report(m).h_max / 2.0, 1e-14);
  EXPECT_NEAR(shape_report(r).gamma, shape_report(m).gamma, 1e-12);
  expect_conforming(r);
}

TEST(Refine, PreservesAreaAndTags) {
  for (auto kind : {CellKind::triangle, CellKind::quadrilateral}) {
    const auto m = build_notched_square(8, kind);
    const auto r = refine_uniform(m);
    EXPECT_EQ(r.num_cells(), 4 * m.num_cells());
    EXPECT_NEAR(area_sum(r), area_sum(m), 1e-13);
    std::map<std::string, double> lm, lr;
    for (std::size_t f = 0; f < m.boundary_facets.size(); ++f) lm[m.boundary_facets[f].tag] += m.facet_length(f);
    for (std::size_t f = 0; f < r.boundary_facets.size(); ++f) lr[r.boundary_facets[f].tag] += r.facet_length(f);
    ASSERT_EQ(lm.size(), lr.size());
    for (const auto& [tag, len] : lm) EXPECT_NEAR(lr[tag], len, 1e-13) << tag;
    EXPECT_NEAR(shape_report(r).h_max, shape_report(m).h_max / 2.0, 1e-14);
    EXPECT_NEAR(shape_report(r).gamma, shape_report(m).gamma, 1e-9);
    expect_conforming(r);
  }
}

TEST(Notched, AreaMatchesSlitRemoval) {
  const auto m = build_notched_square(20, CellKind::quadrilateral, {0.5, 1e-3, 0.5});
  EXPECT_NEAR(area_sum(m), 1.0 - 0.5 * 1e-3, 1e-10);
  const auto t = build_notched_square(20, CellKind::triangle, {0.5, 1e-3, 0.5});
  EXPECT_NEAR(area_sum(t), 1.0 - 0.5 * 1e-3, 1e-10);
}

TEST(Notched, FrontFacetsAtNotchTip) {
  const auto m = build_notched_square(20, CellKind::quadrilateral);
  const auto front = m.facets_with_tag("notch_front");
  ASSERT_FALSE(front.empty());
  for (auto f : front) {
    for (int a : m.boundary_facets[f].nodes) EXPECT_NEAR(m.nodes[static_cast<std::size_t>(a)][0], 0.5, 1e-12);
  }
  double len = 0.0;
  for (auto f : front) len += m.facet_length(f);
  EXPECT_NEAR(len, 1e-3, 1e-12);
  for (const char* tag : {"notch_upper", "notch_lower", "left", "right", "top", "bottom"}) {
    EXPECT_FALSE(m.facets_with_tag(tag).empty()) << tag;
  }
  double upper = 0.0;
  for (auto f : m.facets_with_tag("notch_upper")) upper += m.facet_length(f);
  EXPECT_NEAR(upper, 0.5, 1e-12);
}

TEST(Notched, ShapeDiagnostics) {
  const auto r = shape_report(build_notched_square(20, CellKind::quadrilateral));
  EXPECT_TRUE(std::isfinite(r.gamma));
  EXPECT_LE(r.quasi_uniformity, 4.0);
}

TEST(Notched, Conforming) {
  for (auto kind : {CellKind::triangle, CellKind::quadrilateral}) {
    const auto m = build_notched_square(4, kind);
    expect_conforming(m);
    EXPECT_NO_THROW(validate_mesh(m));
  }
}

TEST(Notched, IncompatibleGeometryRejected) {
  EXPECT_THROW(build_notched_square(20, CellKind::quadrilateral, {0.5, 0.1, 0.5}), std::invalid_argument);
  EXPECT_THROW(build_notched_square(20, CellKind::quadrilateral, {1.0, 1e-3, 0.5}), std::invalid_argument);
  EXPECT_THROW(build_notched_square(20, CellKind::quadrilateral, {0.5, 1e-3, 0.52}), std::invalid_argument);
}

TEST(Vtk, WritesPointsCellsTypes) {
  const auto m = build_unit_square(2, CellKind::quadrilateral);
  std::ostringstream os;
  write_vtk_mesh(os, m);
  const auto s = os.str();
  EXPECT_NE(s.find("POINTS 9"), std::string::npos);
  EXPECT_NE(s.find("CELLS 4 20"), std::string::npos);
  EXPECT_NE(s.find("CELL_TYPES 4"), std::string::npos);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "thermodamage/space.hpp"

using namespace thermodamage;

namespace {

MeshPtr square(int n, CellKind k) { return std::make_shared<const Mesh>(build_unit_square(n, k)); }

Field random_field(const MeshPtr& m, FieldKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f = Field::zeros(m, kind);
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = U(rng);
  return f;
}

}  // namespace

TEST(Interpolation, ReproducesLinearAndConstant) {
  const auto m = square(3, CellKind::triangle);
  const auto fx = interpolate_nodal(m, ScalarFunction([](const Point& x) { return x[0]; }));
  for (std::size_t i = 0; i < m->num_nodes(); ++i) EXPECT_EQ(fx.coeffs[static_cast<Eigen::Index>(i)], m->nodes[i][0]);
  const auto fc = interpolate_nodal(m, ScalarFunction([](const Point&) { return 2.5; }));
  EXPECT_TRUE((fc.coeffs.array() == 2.5).all());
}

TEST(Interpolation, NonFiniteValueRejected) {
  const auto m = square(1, CellKind::triangle);
  EXPECT_THROW(interpolate_nodal(m, ScalarFunction([](const Point&) { return std::nan(""); })), std::domain_error);
}

TEST(Interpolation, SecondOrderInL2) {
  const ScalarFunction f = [](const Point& x) { return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); };
  for (auto k : {CellKind::triangle, CellKind::quadrilateral}) {
    const double e8 = l2_error(interpolate_nodal(square(8, k), f), f, 8);
    const double e16 = l2_error(interpolate_nodal(square(16, k), f), f, 8);
    EXPECT_NEAR(e8 / e16, 4.0, 0.15);
  }
}

TEST(Quadrature, PartitionOfUnity) {
  for (auto k : {CellKind::triangle, CellKind::quadrilateral}) {
    const auto m = std::make_shared<const Mesh>(build_notched_square(4, k));
    const CellValues cv(*m);
    for (std::size_t c = 0; c < cv.num_cells(); ++c) {
      for (const auto& qp : cv[c]) {
        EXPECT_NEAR(std::accumulate(qp.N.begin(), qp.N.end(), 0.0), 1.0, 1e-14);
        double gx = 0.0, gy = 0.0;
        for (const auto& g : qp.dN) {
          gx += g[0];
          gy += g[1];
        }
        EXPECT_NEAR(gx, 0.0, 1e-9);
        EXPECT_NEAR(gy, 0.0, 1e-9);
      }
    }
  }
}

TEST(Quadrature, TriangleRuleExactForQuadratics) {
  // reference triangle: int x^a y^b = a! b! / (a + b + 2)!
  const auto q = triangle_midpoint_rule();
  const auto fact = [](int n) { return std::tgamma(n + 1.0); };
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; a + b <= 2; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i][0], a) * std::pow(q.points[i][1], b);
      EXPECT_NEAR(s, fact(a) * fact(b) / fact(a + b + 2), 1e-15) << a << ' ' << b;
    }
  }
}

TEST(Quadrature, GaussRuleExactForQ3) {
  // [-1,1]: int x^a = 2/(a+1) for even a, else 0
  const auto q = quad_gauss_rule(2);
  const auto I = [](int a) { return a % 2 ? 0.0 : 2.0 / (a + 1); };
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 3; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i][0], a) * std::pow(q.points[i][1], b);
      EXPECT_NEAR(s, I(a) * I(b), 1e-14) << a << ' ' << b;
    }
  }
}

TEST(Strain, ShearAndRigidMotions) {
  const auto m = square(2, CellKind::triangle);
  const auto u = interpolate_nodal(m, VectorFunction([](const Point& x) { return std::array<double, 2>{0.5 * x[1], 0.5 * x[0]}; }));
  const auto t = interpolate_nodal(m, VectorFunction([](const Point&) { return std::array<double, 2>{3.0, -1.0}; }));
  const auto r = interpolate_nodal(m, VectorFunction([](const Point& x) { return std::array<double, 2>{-x[1], x[0]}; }));
  const auto d = interpolate_nodal(m, VectorFunction([](const Point& x) { return std::array<double, 2>{x[0], x[1]}; }));
  for (std::size_t c = 0; c < m->num_cells(); ++c) {
    for (std::size_t q = 0; q < 3; ++q) {
      const auto e = eval_strain(u, c, q);
      EXPECT_NEAR(e(0, 0), 0.0, 1e-14);
      EXPECT_NEAR(e(0, 1), 0.5, 1e-14);
      EXPECT_NEAR(e(1, 1), 0.0, 1e-14);
      EXPECT_NEAR(eval_strain(t, c, q).frobenius_norm(), 0.0, 1e-14);
      EXPECT_NEAR(eval_strain(r, c, q).frobenius_norm(), 0.0, 1e-14);
      EXPECT_NEAR(eval_divergence(r, c, q), 0.0, 1e-14);
      EXPECT_NEAR(eval_divergence(d, c, q), 2.0, 1e-14);
    }
  }
}

TEST(Strain, MatchesFiniteDifferencesOfInterpolant) {
  Mesh one;
  one.cell_kind = CellKind::triangle;
  one.nodes = {{0.1, 0.2}, {0.9, 0.3}, {0.4, 0.8}};
  one.cells = {{0, 1, 2, -1}};
  const auto m = std::make_shared<const Mesh>(one);
  const auto u = interpolate_nodal(m, VectorFunction([](const Point& x) { return std::array<double, 2>{x[0] * x[0], 0.0}; }));
  // the interpolant is affine: evaluate it through barycentric coordinates
  const auto eval = [&](double x, double y) {
    const auto& a = one.nodes[0];
    const auto& b = one.nodes[1];
    const auto& c = one.nodes[2];
    const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    const double l1 = ((x - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y - a[1])) / det;
    const double l2 = ((b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1])) / det;
    return (1 - l1 - l2) * u.coeffs[0] + l1 * u.coeffs[2] + l2 * u.coeffs[4];
  };
  const double cx = (0.1 + 0.9 + 0.4) / 3, cy = (0.2 + 0.3 + 0.8) / 3, h = 1e-5;
  const double dxx = (eval(cx + h, cy) - eval(cx - h, cy)) / (2 * h);
  const double dxy = (eval(cx, cy + h) - eval(cx, cy - h)) / (2 * h);
  const auto e = eval_strain(u, 0, 0);
  EXPECT_NEAR(e(0, 0), dxx, 1e-8);
  EXPECT_NEAR(e(0, 1), 0.5 * dxy, 1e-8);
  EXPECT_NEAR(e(1, 1), 0.0, 1e-14);
  // analytic 2x at the centroid, up to interpolation error
  EXPECT_NEAR(e(0, 0), 2 * cx, 0.2);
}

TEST(Strain, DivergenceEqualsTrace) {
  std::mt19937_64 rng(1);
  for (auto k : {CellKind::triangle, CellKind::quadrilateral}) {
    const auto m = square(3, k);
    const auto u = random_field(m, FieldKind::vector, rng);
    const auto nq = default_rule(k).size();
    for (std::size_t c = 0; c < m->num_cells(); ++c) {
      for (std::size_t q = 0; q < nq; ++q) EXPECT_NEAR(eval_divergence(u, c, q), eval_strain(u, c, q).trace(), 1e-14);
    }
  }
}

TEST(Norms, Examples) {
  for (auto k : {CellKind::triangle, CellKind::quadrilateral}) {
    const auto m = square(4, k);
    EXPECT_NEAR(norm(interpolate_nodal(m, ScalarFunction([](const Point&) { return 1.0; })), NormSpec::l2()), 1.0, 1e-14);
    EXPECT_NEAR(norm(interpolate_nodal(m, ScalarFunction([](const Point& x) { return x[0]; })), NormSpec::h1semi()), 1.0, 1e-14);
    const auto u = interpolate_nodal(m, VectorFunction([](const Point& x) { return std::array<double, 2>{x[0], x[1]}; }));
    EXPECT_NEAR(norm(u, NormSpec::anorm(ElasticModuli(1.0, 1.0, 2))), std::sqrt(8.0), 1e-13);
    EXPECT_NEAR(strain_l2_squared(u), 2.0, 1e-13);
  }
}

TEST(Norms, TriangleInequalityAndHomogeneity) {
  std::mt19937_64 rng(2);
  const auto m = square(3, CellKind::quadrilateral);
  for (auto spec : {NormSpec::l2(), NormSpec::h1semi(), NormSpec::anorm(ElasticModuli(2.0, 0.5, 2))}) {
    for (int k = 0; k < 20; ++k) {
      auto a = random_field(m, FieldKind::vector, rng), b = random_field(m, FieldKind::vector, rng);
      Field s = a;
      s.coeffs += b.coeffs;
      EXPECT_LE(norm(s, spec), norm(a, spec) + norm(b, spec) + 1e-13);
      Field sc = a;
      sc.coeffs *= -3.0;
      EXPECT_NEAR(norm(sc, spec), 3.0 * norm(a, spec), 1e-12);
    }
  }
}

TEST(Norms, AnormBounds) {
  std::mt19937_64 rng(4);
  const ElasticModuli mod(2.0, 0.5, 2);
  const auto m = square(3, CellKind::triangle);
  for (int k = 0; k < 20; ++k) {
    const auto u = random_field(m, FieldKind::vector, rng);
    const double e2 = strain_l2_squared(u), a2 = norm_squared(u, NormSpec::anorm(mod));
    EXPECT_GE(a2, 2.0 * mod.mu * e2 * (1 - 1e-13));
    EXPECT_LE(a2, (mod.lambda * 2 + 2.0 * mod.mu) * e2 * (1 + 1e-13));
  }
}

TEST(Recovery, ConstantIsReproduced) {
  const auto m = square(4, CellKind::quadrilateral);
  QuadratureData d{m, std::vector<double>(m->num_cells() * 4, 1.75)};
  const auto r = recover_gauss_to_nodes(d);
  for (Eigen::Index i = 0; i < r.coeffs.size(); ++i) EXPECT_NEAR(r.coeffs[i], 1.75, 1e-14);
}

TEST(Recovery, LinearExactAtInteriorNodes) {
  const auto m = square(4, CellKind::quadrilateral);
  QuadratureData d{m, {}};
  for (const auto& x : quadrature_point_coordinates(*m)) d.values.push_back(3.0 * x[0] - 2.0 * x[1] + 0.5);
  const auto r = recover_gauss_to_nodes(d);
  for (std::size_t i = 0; i < m->num_nodes(); ++i) {
    const auto& x = m->nodes[i];
    const bool interior = x[0] > 1e-12 && x[0] < 1 - 1e-12 && x[1] > 1e-12 && x[1] < 1 - 1e-12;
    if (interior) {
      EXPECT_NEAR(r.coeffs[static_cast<Eigen::Index>(i)], 3.0 * x[0] - 2.0 * x[1] + 0.5, 1e-12);
    }
  }
}

TEST(Recovery, BoundaryNodesMatchBruteForceSearch) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  // Gauss points are cell-interior, so no point is shared between cells
  // and the global search cannot pick a copy from a non-adjacent cell.
  {
    const auto m = square(5, CellKind::quadrilateral);
    const auto xq = quadrature_point_coordinates(*m);
    QuadratureData d{m, {}};
    for (std::size_t i = 0; i < xq.size(); ++i) d.values.push_back(U(rng));
    const auto r = recover_gauss_to_nodes(d);
    for (std::size_t i = 0; i < m->num_nodes(); ++i) {
      const auto& x = m->nodes[i];
      if (x[0] > 1e-12 && x[0] < 1 - 1e-12 && x[1] > 1e-12 && x[1] < 1 - 1e-12) continue;
      // global search over every integration point; distances equal to
      // relative 1e-12 count as ties and are broken by index
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t q = 0; q < xq.size(); ++q) all.push_back({std::hypot(xq[q][0] - x[0], xq[q][1] - x[1]), q});
      std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.first - b.first) > 1e-12 * std::max(a.first, b.first)) return a.first < b.first;
        return a.second < b.second;
      });
      double num = 0.0, den = 0.0;
      for (int j = 0; j < 4; ++j) {
        num += d.values[all[static_cast<std::size_t>(j)].second] / all[static_cast<std::size_t>(j)].first;
        den += 1.0 / all[static_cast<std::size_t>(j)].first;
      }
      EXPECT_NEAR(r.coeffs[static_cast<Eigen::Index>(i)], num / den, 1e-14) << "node " << i;
    }
  }
}

TEST(Recovery, WrongSizeRejected) {
  const auto m = square(2, CellKind::quadrilateral);
  EXPECT_THROW(recover_gauss_to_nodes(QuadratureData{m, {1.0, 2.0}}), std::invalid_argument);
}

TEST(Errors, AnalyticErrorsOfExactFieldsVanish) {
  const auto m = square(4, CellKind::quadrilateral);
  const auto f = interpolate_nodal(m, ScalarFunction([](const Point& x) { return 2 * x[0] - x[1]; }));
  EXPECT_NEAR(l2_error(f, [](const Point& x) { return 2 * x[0] - x[1]; }), 0.0, 1e-14);
  EXPECT_NEAR(h1_semi_error(f, GradientFunction([](const Point&) { return std::array<double, 2>{2.0, -1.0}; })), 0.0, 1e-13);
}

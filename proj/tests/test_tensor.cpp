#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "thermodamage/tensor.hpp"

using namespace thermodamage;

namespace {

// Dense 2x2 / 3x3 matrix view of a symmetric tensor.
Eigen::MatrixXd dense(const SymTensor2& s) {
  Eigen::MatrixXd m(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i) {
    for (int j = 0; j < s.dim(); ++j) m(i, j) = s(i, j);
  }
  return m;
}

SymTensor2 random_tensor(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SymTensor2 s(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) s(i, j) = U(rng);
  }
  return s;
}

}  // namespace

TEST(SymTensor2, StorageIsSymmetric) {
  SymTensor2 s(3);
  s(0, 2) = 4.0;
  EXPECT_EQ(s(2, 0), 4.0);
  const auto m = dense(s);
  EXPECT_EQ((m - m.transpose()).norm(), 0.0);
  EXPECT_EQ(s.size(), 6u);
  EXPECT_EQ(SymTensor2(2).size(), 3u);
  EXPECT_THROW(SymTensor2(4), std::invalid_argument);
}

TEST(ApplyA, IdentityGivesFourI) {
  const ElasticModuli m(1.0, 1.0, 2);
  EXPECT_EQ(apply_A(m, SymTensor2::identity(2)), 4.0 * SymTensor2::identity(2));
}

TEST(ApplyA, ZeroMapsToZero) {
  const ElasticModuli m(3.7, 0.2, 2);
  EXPECT_EQ(apply_A(m, SymTensor2::zero(2)), SymTensor2::zero(2));
}

TEST(ApplyA, MatchesDenseOracle) {
  const ElasticModuli m(2.0, 3.0, 2);
  const auto s = SymTensor2::from_2d(1.0, 1.0, 0.0);
  const Eigen::Matrix2d S = dense(s);
  const Eigen::Matrix2d expect = 2.0 * S.trace() * Eigen::Matrix2d::Identity() + 2.0 * 3.0 * S;
  const auto got = dense(apply_A(m, s));
  EXPECT_NEAR((got - expect).norm(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(got(0, 0), 8.0);
  EXPECT_DOUBLE_EQ(got(0, 1), 6.0);
  EXPECT_DOUBLE_EQ(got(1, 1), 2.0);
}

TEST(ApplyA, DimensionMismatchThrows) {
  const ElasticModuli m(1.0, 1.0, 2);
  EXPECT_THROW(apply_A(m, SymTensor2::identity(3)), std::invalid_argument);
  EXPECT_THROW(apply_A_sqrt(m, SymTensor2::identity(3)), std::invalid_argument);
  EXPECT_THROW(energy_density_B(m, SymTensor2::identity(3)), std::invalid_argument);
}

TEST(ApplyA, Linear) {
  std::mt19937_64 rng(7);
  const ElasticModuli m(1.3, 0.4, 3);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_tensor(rng, 3), b = random_tensor(rng, 3);
    const auto lhs = apply_A(m, 0.3 * a + (-1.7) * b);
    const auto rhs = 0.3 * apply_A(m, a) + (-1.7) * apply_A(m, b);
    EXPECT_LE((lhs - rhs).frobenius_norm(), 1e-14 * (1.0 + rhs.frobenius_norm()));
  }
}

TEST(ApplyASqrt, IdentityGivesTwoI) {
  const ElasticModuli m(1.0, 1.0, 2);
  const auto r = apply_A_sqrt(m, SymTensor2::identity(2));
  EXPECT_NEAR((r - 2.0 * SymTensor2::identity(2)).frobenius_norm(), 0.0, 1e-15);
  EXPECT_EQ(apply_A_sqrt(m, SymTensor2::zero(2)), SymTensor2::zero(2));
}

TEST(ApplyASqrt, CompositionReproducesA) {
  std::mt19937_64 rng(11);
  for (int dim : {2, 3}) {
    const ElasticModuli m(8.88, 13.33, dim);
    for (int k = 0; k < 200; ++k) {
      const auto s = random_tensor(rng, dim);
      const auto a = apply_A(m, s);
      EXPECT_LE((apply_A_sqrt(m, apply_A_sqrt(m, s)) - a).frobenius_norm(), 1e-12 * a.frobenius_norm());
    }
  }
}

TEST(Dev, IdentityAndTraceFree) {
  EXPECT_NEAR(dev(SymTensor2::identity(2)).frobenius_norm(), 0.0, 1e-16);
  EXPECT_NEAR(dev(SymTensor2::identity(3)).frobenius_norm(), 0.0, 1e-16);
  const auto s = SymTensor2::from_2d(0.7, -0.2, -0.7);
  EXPECT_EQ(dev(s), s);
}

TEST(Dev, NormIdentity) {
  std::mt19937_64 rng(3);
  for (int dim : {2, 3}) {
    for (int k = 0; k < 100; ++k) {
      const auto s = random_tensor(rng, dim);
      const auto d = dev(s);
      EXPECT_NEAR(d.trace(), 0.0, 1e-15);
      EXPECT_NEAR(d.contract(d), s.contract(s) - s.trace() * s.trace() / dim, 1e-14);
      EXPECT_LE(d.frobenius_norm(), s.frobenius_norm() + 1e-15);
      const auto t = random_tensor(rng, dim);
      EXPECT_NEAR(dev(s).contract(t), s.contract(dev(t)), 1e-14);
    }
  }
}

TEST(EnergyDensityB, Examples) {
  const ElasticModuli m(1.0, 1.0, 2);
  EXPECT_DOUBLE_EQ(energy_density_B(m, SymTensor2::identity(2)), 8.0);
  EXPECT_EQ(energy_density_B(ElasticModuli(5.0, 2.0, 3), SymTensor2::zero(3)), 0.0);
}

TEST(EnergyDensityB, MatchesFullContraction) {
  std::mt19937_64 rng(5);
  const ElasticModuli m(2.5, 0.75, 2);
  for (int k = 0; k < 100; ++k) {
    const auto s = random_tensor(rng, 2);
    const Eigen::Matrix2d S = dense(s);
    const Eigen::Matrix2d AS = m.lambda * S.trace() * Eigen::Matrix2d::Identity() + 2.0 * m.mu * S;
    const double oracle = (AS.array() * S.array()).sum();
    EXPECT_NEAR(energy_density_B(m, s), oracle, 1e-14 * (1.0 + oracle));
    EXPECT_GE(energy_density_B(m, s), 2.0 * m.mu * s.contract(s) * (1.0 - 1e-14));
  }
}

TEST(PositivePart, Examples) {
  EXPECT_EQ(positive_part(3.0), 3.0);
  EXPECT_EQ(positive_part(-2.0), 0.0);
  EXPECT_EQ(positive_part(0.0), 0.0);
  EXPECT_EQ(positive_part_slope(0.0), 0.0);
  EXPECT_EQ(positive_part_slope(1e-300), 1.0);
}

TEST(PositivePart, MonotoneAndNonexpansive) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const double c = U(rng), d = U(rng);
    const double dp = positive_part(c) - positive_part(d);
    EXPECT_GE(dp * (c - d), dp * dp - 1e-15);
    EXPECT_LE(std::abs(dp), std::abs(c - d) + 1e-15);
  }
}

TEST(ElasticModuli, ConstantsAndValidation) {
  const ElasticModuli m(2.0, 3.0, 2);
  EXPECT_DOUBLE_EQ(m.lipschitz_constant(), 2.0 * 2.0 * 2 + 6.0);
  EXPECT_DOUBLE_EQ(m.coercivity_constant(), 6.0);
  EXPECT_THROW(ElasticModuli(0.0, 1.0, 2), std::invalid_argument);
  EXPECT_THROW(ElasticModuli(1.0, -1.0, 2), std::invalid_argument);
}

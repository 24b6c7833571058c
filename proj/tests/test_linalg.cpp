#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>
#include <sstream>

#include "thermodamage/linalg.hpp"

using namespace thermodamage;

namespace {

SystemMatrix from_dense(const Eigen::MatrixXd& D) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      if (D(i, j) != 0.0) t.emplace_back(i, j, D(i, j));
    }
  }
  return SystemMatrix::from_triplets(D.rows(), t);
}

Eigen::MatrixXd random_spd(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd B(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) B(i, j) = U(rng);
  }
  return B.transpose() * B + Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST(SolveDirect, Identity) {
  const Vector b = Vector::LinSpaced(5, 1.0, 5.0);
  EXPECT_EQ(solve_direct(SystemMatrix::identity(5), b), b);
}

TEST(SolveDirect, HandSolve) {
  Eigen::Matrix2d A;
  A << 2, 1, 1, 2;
  const Vector x = solve_direct(from_dense(A), Vector::Constant(2, 3.0));
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(SolveDirect, RandomSpdAgainstDenseFactorization) {
  const auto D = random_spd(50, 42);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  Vector b(50);
  for (auto& v : b) v = N(rng);
  FactorizationInfo info;
  const Vector x = solve_direct(from_dense(D), b, &info);
  const Vector oracle = D.llt().solve(b);
  EXPECT_LE((D * x - b).norm(), 1e-10 * b.norm());
  EXPECT_LE((x - oracle).norm(), 1e-10 * oracle.norm());
  EXPECT_EQ(info.negative_pivots, 0);
  EXPECT_GT(info.min_pivot, 0.0);
}

TEST(SolveDirect, SingularReportsBreakdown) {
  Eigen::Matrix2d A;
  A << 1, 1, 1, 1;
  try {
    solve_direct(from_dense(A), Vector::Ones(2));
    FAIL() << "expected SolverBreakdown";
  } catch (const SolverBreakdown& e) {
    EXPECT_NE(std::string(e.what()).find("pivot"), std::string::npos);
  }
}

TEST(SolveDirect, DimensionMismatch) { EXPECT_THROW(solve_direct(SystemMatrix::identity(3), Vector::Ones(2)), std::invalid_argument); }

TEST(SolveGeneral, NonSymmetric) {
  Eigen::Matrix3d A;
  A << 4, 1, 0, 2, 5, 1, 0, 3, 6;
  const Vector b = Vector::LinSpaced(3, 1.0, 3.0);
  const Vector x = solve_general(from_dense(A), b);
  EXPECT_LE((A * x - b).norm(), 1e-14);
  EXPECT_EQ(solve_linear(from_dense(A), b, false), x);
}

TEST(SolveCg, MatchesDirect) {
  const auto D = random_spd(30, 5);
  const Vector b = Vector::Ones(30);
  const auto A = from_dense(D);
  EXPECT_LE((solve_cg(A, b) - solve_direct(A, b)).norm(), 1e-8 * solve_direct(A, b).norm());
  EXPECT_LE((solve_linear(A, b, true, LinearSolverKind::cg) - D.llt().solve(b)).norm(), 1e-8 * b.norm() * 30);
}

TEST(Spmv, Examples) {
  const Vector x = Vector::LinSpaced(4, -1.0, 2.0);
  EXPECT_EQ(spmv(SystemMatrix::identity(4), x), x);
  EXPECT_EQ(spmv(SystemMatrix::from_triplets(4, {}), x), Vector::Zero(4));
  EXPECT_THROW(spmv(SystemMatrix::identity(3), x), std::invalid_argument);
}

TEST(Spmv, RandomSparseAgainstDense) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> I(0, 39);
  std::vector<Triplet> t;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(40, 40);
  for (int k = 0; k < 300; ++k) {
    const int i = I(rng), j = I(rng);
    const double v = U(rng);
    t.emplace_back(i, j, v);
    D(i, j) += v;
  }
  Vector x(40);
  for (auto& v : x) v = U(rng);
  const Vector y = spmv(SystemMatrix::from_triplets(40, t), x);
  EXPECT_LE((y - D * x).norm(), 1e-14 * (D * x).norm());
}

TEST(SystemMatrix, SortedUniqueAndSymmetryMeasure) {
  const auto A = SystemMatrix::from_triplets(3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {2, 0, 4.0}});
  EXPECT_EQ(A.csr.nonZeros(), 3);
  EXPECT_EQ(A.coeff(0, 2), 4.0);
  EXPECT_EQ(A.asymmetry(), 0.0);
  const auto B = SystemMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 0.5}});
  EXPECT_EQ(B.asymmetry(), 0.5);
}

TEST(Coordinate, RoundTrip) {
  const auto A = from_dense(random_spd(6, 9));
  std::stringstream ss;
  write_coordinate(ss, A);
  const auto B = read_coordinate(ss);
  EXPECT_EQ(Eigen::MatrixXd(A.csr), Eigen::MatrixXd(B.csr));
}

TEST(Coordinate, Malformed) {
  std::istringstream bad1("2 1\n0 5 1.0\n"), bad2("x"), bad3("2 2\n0 0 1\n");
  EXPECT_THROW(read_coordinate(bad1), std::invalid_argument);
  EXPECT_THROW(read_coordinate(bad2), std::invalid_argument);
  EXPECT_THROW(read_coordinate(bad3), std::invalid_argument);
}

#pragma once

// Small symmetric tensors and the isotropic elasticity operator.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace thermodamage {

/// Symmetric d x d tensor (d = 2 or 3) stored as its upper triangle.
///
/// Storage order for d = 2: (00, 01, 11); for d = 3: (00, 01, 02, 11, 12, 22).
class SymTensor2 {
public:
  SymTensor2() = default;

  explicit SymTensor2(int dim) : dim_(dim) {
    if (dim != 2 && dim != 3) {
      throw std::invalid_argument("SymTensor2: dimension must be 2 or 3, got " + std::to_string(dim));
    }
  }

  static SymTensor2 zero(int dim) { return SymTensor2(dim); }

  static SymTensor2 identity(int dim) {
    SymTensor2 t(dim);
    for (int i = 0; i < dim; ++i) t(i, i) = 1.0;
    return t;
  }

  /// 2D tensor from its three independent components.
  static SymTensor2 from_2d(double xx, double xy, double yy) {
    SymTensor2 t(2);
    t.data_ = {xx, xy, yy, 0.0, 0.0, 0.0};
    return t;
  }

  int dim() const { return dim_; }
  static constexpr std::size_t storage_size(int dim) { return static_cast<std::size_t>(dim * (dim + 1) / 2); }
  std::size_t size() const { return storage_size(dim_); }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  double& component(std::size_t k) { return data_[k]; }
  double component(std::size_t k) const { return data_[k]; }

  double trace() const {
    double tr = 0.0;
    for (int i = 0; i < dim_; ++i) tr += (*this)(i, i);
    return tr;
  }

  /// Full contraction s : t = sum_ij s_ij t_ij.
  double contract(const SymTensor2& other) const {
    require_same_dim(other);
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) acc += (*this)(i, j) * other(i, j);
    }
    return acc;
  }

  double frobenius_norm() const { return std::sqrt(contract(*this)); }

  SymTensor2& operator+=(const SymTensor2& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  SymTensor2& operator*=(double a) {
    for (std::size_t k = 0; k < size(); ++k) data_[k] *= a;
    return *this;
  }

  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }

  bool operator==(const SymTensor2&) const = default;

  void require_same_dim(const SymTensor2& other) const {
    if (other.dim_ != dim_) {
      throw std::invalid_argument("SymTensor2: dimension mismatch (" + std::to_string(dim_) + " vs " +
                                  std::to_string(other.dim_) + ")");
    }
  }

private:
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // row-major upper triangle
    return static_cast<std::size_t>(i * dim_ - i * (i - 1) / 2 + (j - i));
  }

  int dim_ = 2;
  std::array<double, 6> data_{};
};

/// Lame parameters of an isotropic material.
struct ElasticModuli {
  double lambda = 1.0;
  double mu = 1.0;
  int dim = 2;

  ElasticModuli() = default;
  ElasticModuli(double lambda_, double mu_, int dim_) : lambda(lambda_), mu(mu_), dim(dim_) { validate(); }

  void validate() const {
    if (!(lambda > 0.0) || !(mu > 0.0)) {
      throw std::invalid_argument("ElasticModuli: Lame parameters must be positive");
    }
    if (dim != 2 && dim != 3) throw std::invalid_argument("ElasticModuli: dimension must be 2 or 3");
  }

  /// Lipschitz constant of A in the Frobenius norm, 2 lambda d + 2 mu.
  double lipschitz_constant() const { return 2.0 * lambda * dim + 2.0 * mu; }

  /// Provable coercivity constant: A(t):t >= 2 mu |t|^2.
  double coercivity_constant() const { return 2.0 * mu; }
};

namespace detail {
inline void check_dims(const ElasticModuli& m, const SymTensor2& s) {
  if (m.dim != s.dim()) {
    throw std::invalid_argument("elasticity operator: tensor dimension " + std::to_string(s.dim()) +
                                " does not match moduli dimension " + std::to_string(m.dim));
  }
}
}  // namespace detail

/// A(s) = lambda tr(s) I + 2 mu s
inline SymTensor2 apply_A(const ElasticModuli& m, const SymTensor2& s) {
  detail::check_dims(m, s);
  SymTensor2 out = (2.0 * m.mu) * s;
  const double ltr = m.lambda * s.trace();
  for (int i = 0; i < s.dim(); ++i) out(i, i) += ltr;
  return out;
}

/// Square root of A: sqrt(2 mu) s + (sqrt(2 mu + d lambda) - sqrt(2 mu)) / d tr(s) I.
inline SymTensor2 apply_A_sqrt(const ElasticModuli& m, const SymTensor2& s) {
  detail::check_dims(m, s);
  const double d = static_cast<double>(m.dim);
  const double r2mu = std::sqrt(2.0 * m.mu);
  const double vol = (std::sqrt(2.0 * m.mu + d * m.lambda) - r2mu) / d;
  SymTensor2 out = r2mu * s;
  const double shift = vol * s.trace();
  for (int i = 0; i < s.dim(); ++i) out(i, i) += shift;
  return out;
}

inline SymTensor2 dev(const SymTensor2& s) {
  SymTensor2 out = s;
  const double mean = s.trace() / static_cast<double>(s.dim());
  for (int i = 0; i < s.dim(); ++i) out(i, i) -= mean;
  return out;
}

/// B(s) = A(s) : s = lambda (tr s)^2 + 2 mu s:s
inline double energy_density_B(const ElasticModuli& m, const SymTensor2& s) {
  detail::check_dims(m, s);
  const double tr = s.trace();
  return m.lambda * tr * tr + 2.0 * m.mu * s.contract(s);
}

/// [a]_+ ; zero at a = 0.
inline double positive_part(double a) { return a > 0.0 ? a : 0.0; }

/// Generalized derivative of [a]_+ used by semismooth Newton; 0 at the kink.
inline double positive_part_slope(double a) { return a > 0.0 ? 1.0 : 0.0; }

}  // namespace thermodamage

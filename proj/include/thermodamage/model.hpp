#pragma once

// Material parameters, conductivity laws and boundary condition specs.

#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thermodamage/mesh.hpp"
#include "thermodamage/tensor.hpp"

namespace thermodamage {

/// Heat conductivity K(theta): a constant, or c1 (|theta|^beta + 1).
struct ConductivityModel {
  enum class Kind { constant, power_law };

  Kind kind = Kind::constant;
  double K_const = 1.0;
  double c0 = 1.0;  // lower ellipticity constant
  double c1 = 1.0;
  double c2 = 1.0;  // upper growth constant
  /// Growth exponent; for constant K it only enters the data functional exponent.
  double beta = 1.5;

  static ConductivityModel constant(double K, double beta_ = 1.5) {
    ConductivityModel c;
    c.K_const = K;
    c.beta = beta_;
    return c;
  }
  static ConductivityModel power_law(double c1_, double beta_, double c0_ = -1.0, double c2_ = -1.0) {
    ConductivityModel c;
    c.kind = Kind::power_law;
    c.c1 = c1_;
    c.beta = beta_;
    c.c0 = c0_ > 0 ? c0_ : c1_;
    c.c2 = c2_ > 0 ? c2_ : c1_;
    return c;
  }

  double value(double theta) const {
    if (kind == Kind::constant) return K_const;
    return c1 * (std::pow(std::abs(theta), beta) + 1.0);
  }

  double derivative(double theta) const {
    if (kind == Kind::constant) return 0.0;
    if (theta == 0.0) return 0.0;
    const double s = theta > 0.0 ? 1.0 : -1.0;
    return c1 * beta * std::pow(std::abs(theta), beta - 1.0) * s;
  }

  /// 1 < beta < beta_d with beta_d = 2 (d = 2) or 5/3 (d = 3).
  static double beta_limit(int dim) { return dim == 2 ? 2.0 : 5.0 / 3.0; }

  void validate(int dim) const {
    if (!(beta > 1.0 && beta < beta_limit(dim))) {
      throw std::invalid_argument("ConductivityModel: beta must lie in (1, " + std::to_string(beta_limit(dim)) + ")");
    }
    if (kind == Kind::constant) {
      if (!(K_const > 0.0)) throw std::invalid_argument("ConductivityModel: K must be positive");
      return;
    }
    if (!(c0 > 0.0 && c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("ConductivityModel: c0, c1, c2 must be positive");
    if (c0 > c1 || c1 > c2) throw std::invalid_argument("ConductivityModel: need c0 <= c1 <= c2 for K = c1(|t|^beta + 1)");
  }

  bool operator==(const ConductivityModel&) const = default;
};

/// Ratios behind the scaling assumptions kappa = O(ell), h = O(ell), kappa << ell.
struct AdvisoryFlags {
  double kappa_over_ell = 0.0;
  double h_over_ell = 0.0;
  bool kappa_small = false;  // kappa <= ell
  bool h_resolved = false;   // h <= ell
};

struct ModelParams {
  ElasticModuli moduli{};
  double rho = 1.0;     // thermal expansion constant
  double kappa = 1e-8;  // bulk regularization
  double ell = 1.0;     // damage length scale
  double Gc = 1.0;
  double gamma0 = 1e4;  // irreversibility penalty
  ConductivityModel conductivity{};

  void validate() const {
    moduli.validate();
    const auto pos = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("ModelParams: ") + name + " must be positive");
    };
    pos(rho, "rho");
    pos(kappa, "kappa");
    pos(ell, "ell");
    pos(Gc, "Gc");
    pos(gamma0, "gamma0");
    conductivity.validate(moduli.dim);
  }

  AdvisoryFlags advisory(double h) const {
    AdvisoryFlags a;
    a.kappa_over_ell = kappa / ell;
    a.h_over_ell = h / ell;
    a.kappa_small = kappa <= ell;
    a.h_resolved = h <= ell;
    return a;
  }
};

/// g(phi) = phi^2
inline double degradation(double phi) { return phi * phi; }

using SpaceTimeFunction = std::function<double(const Point&, double)>;

enum class BCKind { dirichlet, neumann };

/// One boundary condition on a tag. Dirichlet conditions on vector fields may
/// leave a component free by passing an empty function. Neumann data are the
/// traction (u), the normal derivative (phi) or the boundary heat datum (theta).
struct BoundaryCondition {
  std::string tag;
  BCKind kind = BCKind::dirichlet;
  std::vector<SpaceTimeFunction> values;
};

struct BCSpec {
  std::vector<BoundaryCondition> u;
  std::vector<BoundaryCondition> phi;
  std::vector<BoundaryCondition> theta;

  void validate() const {
    const auto check = [](const std::vector<BoundaryCondition>& list, const char* field, std::size_t ncomp) {
      std::set<std::string> seen;
      for (const auto& bc : list) {
        if (!seen.insert(bc.tag).second) {
          throw std::invalid_argument(std::string("BCSpec: tag '") + bc.tag + "' appears twice for field " + field);
        }
        if (bc.values.size() != ncomp) {
          throw std::invalid_argument(std::string("BCSpec: wrong number of components for field ") + field);
        }
      }
    };
    check(u, "u", 2);
    check(phi, "phi", 1);
    check(theta, "theta", 1);
  }
};

}  // namespace thermodamage

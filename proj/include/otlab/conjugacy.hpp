#pragma once

#include <limits>

#include "otlab/core_model.hpp"

namespace otlab {

/// An extended-real function on a finite space (values finite or -inf), tagged with
/// the exponent of the cost d^p it is conjugated against.
class Potential {
 public:
  static constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

  /// Throws DomainError when every entry is -inf, when an entry is +inf or NaN,
  /// or when p < 1; ShapeError when the length does not match the space.
  Potential(SpacePtr space, Vector values, double p);

  static Potential zero(SpacePtr space, double p);

  const SpacePtr& space() const { return space_; }
  const Vector& values() const { return values_; }
  double p() const { return p_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_(i); }

  static bool is_minus_infinity(double v) { return v == kMinusInfinity; }
  bool all_finite() const { return values_.allFinite(); }

 private:
  SpacePtr space_;
  Vector values_;
  double p_;
};

/// out(j) = min over i with f(i) > -inf of cost(i, j) - f(i); smallest index wins ties.
/// Requires at least one finite entry of f.
Vector c_transform(const Matrix& cost, const Vector& f);

/// The same transform in the other direction: out(i) = min_j cost(i, j) - g(j).
Vector c_transform_rows(const Matrix& cost, const Vector& g);

/// f^{[p*]}(y) = min_x (d(x,y)^p - f(x)).
Potential p_legendre(const Potential& f);

/// Double convexification of feasible duals: b' = a^{[p*]}, a' = b'^{[p*]}.
/// Throws FeasibilityError when the input violates a_i + b_j <= c_ij by more than kFeasTol.
DualPair conjugate_normalize(const DualPair& duals);

/// Fixed-point test (g^{[p*]})^{[p*]} == g componentwise within tol.
bool is_dp_concave(const Potential& g, double tol = 1e-9);

/// phi = -(a^{[1*]}) for duals of the cost d on one space; phi is 1-Lipschitz.
/// Throws DomainError when duals.p != 1, IncompatibleSpacesError across spaces.
Potential kr_potential(const DualPair& duals);

/// max over x != y of |phi(x) - phi(y)| / d(x, y); 0 for a single point.
double lipschitz_constant(const Potential& phi);

/// <phi, mu> - <phi, nu>.
double kr_objective(const Potential& phi, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct BridgeCheck {
  double max_residual = 0.0;
  bool holds = false;
};

/// For p = 2 on a Euclidean-built space: compares G(y) = max_x (x.y - F(x)) with
/// F = (|x|^2 - f)/2 against (|y|^2 - g(y))/2 where g = f^{[2*]}, over the point set.
/// Throws UnsupportedInstanceError without coordinates, DomainError when p != 2.
BridgeCheck legendre_bridge_check(const Potential& f, double tol = 1e-9);

}  // namespace otlab

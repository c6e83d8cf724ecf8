#include "otlab/conjugacy.hpp"

#include <algorithm>
#include <cmath>

namespace otlab {

Potential::Potential(SpacePtr space, Vector values, double p)
    : space_(std::move(space)), values_(std::move(values)), p_(p) {
  if (!space_) throw DomainError("potential without a space");
  if (values_.size() != space_->size()) throw ShapeError("potential length does not match the space");
  if (!(p_ >= 1.0) || !std::isfinite(p_)) throw DomainError("potential exponent must satisfy p >= 1");
  bool any_finite = false;
  for (Index i = 0; i < values_.size(); ++i) {
    const double v = values_(i);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw DomainError("potential entries must be finite or -inf");
    any_finite = any_finite || std::isfinite(v);
  }
  if (!any_finite) throw DomainError("potential is identically -inf");
}

Potential Potential::zero(SpacePtr space, double p) {
  const Index n = space->size();
  return {std::move(space), Vector::Zero(n), p};
}

Vector c_transform(const Matrix& cost, const Vector& f) {
  if (cost.rows() != f.size()) throw ShapeError("c_transform: size mismatch");
  Vector out(cost.cols());
  bool any = false;
  for (Index j = 0; j < cost.cols(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < cost.rows(); ++i) {
      if (Potential::is_minus_infinity(f(i))) continue;
      any = true;
      const double candidate = cost(i, j) - f(i);
      if (candidate < best) best = candidate;
    }
    out(j) = best;
  }
  if (!any) throw DomainError("transform of an identically -inf function");
  return out;
}

Vector c_transform_rows(const Matrix& cost, const Vector& g) {
  return c_transform(cost.transpose(), g);
}

Potential p_legendre(const Potential& f) {
  const Matrix cost = cost_matrix(*f.space(), f.p());
  return {f.space(), c_transform(cost, f.values()), f.p()};
}

DualPair conjugate_normalize(const DualPair& duals) {
  if (dual_feasibility_violation(duals) > kFeasTol)
    throw FeasibilityError("conjugate_normalize needs feasible duals");
  const Matrix cost = cost_matrix(*duals.first, *duals.second, duals.p);
  DualPair out = duals;
  out.b = c_transform(cost, duals.a);
  out.a = c_transform_rows(cost, out.b);
  return out;
}

bool is_dp_concave(const Potential& g, double tol) {
  if (!g.all_finite()) return false;
  const Potential back = p_legendre(p_legendre(g));
  return (back.values() - g.values()).cwiseAbs().maxCoeff() <= tol;
}

Potential kr_potential(const DualPair& duals) {
  if (duals.p != 1.0) throw DomainError("kr_potential is defined for p = 1 only");
  if (!same_space(*duals.first, *duals.second))
    throw IncompatibleSpacesError("kr_potential needs both measures on one space");
  const Matrix cost = cost_matrix(*duals.first, 1.0);
  return {duals.second, -c_transform(cost, duals.a), 1.0};
}

double lipschitz_constant(const Potential& phi) {
  const Matrix& d = phi.space()->distances();
  double worst = 0.0;
  for (Index x = 0; x < phi.size(); ++x)
    for (Index y = x + 1; y < phi.size(); ++y) {
      const double diff = std::abs(phi[x] - phi[y]);
      if (d(x, y) > 0.0)
        worst = std::max(worst, diff / d(x, y));
      else if (diff > 0.0)
        return std::numeric_limits<double>::infinity();
    }
  return worst;
}

double kr_objective(const Potential& phi, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return phi.values().dot(mu.weights()) - phi.values().dot(nu.weights());
}

BridgeCheck legendre_bridge_check(const Potential& f, double tol) {
  const auto& coords = f.space()->coordinates();
  if (!coords) throw UnsupportedInstanceError("Legendre bridge needs a Euclidean-built space");
  if (f.p() != 2.0) throw DomainError("Legendre bridge is the p = 2 case");

  const Potential g = p_legendre(f);
  const Matrix& x = *coords;
  const Vector sq = x.rowwise().squaredNorm();
  const Index n = x.rows();

  BridgeCheck check;
  for (Index y = 0; y < n; ++y) {
    // F(x) = +inf where f(x) = -inf; those points drop out of the sup.
    double G = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (Potential::is_minus_infinity(f[i])) continue;
      const double F = 0.5 * (sq(i) - f[i]);
      G = std::max(G, x.row(i).dot(x.row(y)) - F);
    }
    const double expected = 0.5 * (sq(y) - g[y]);
    check.max_residual = std::max(check.max_residual, std::abs(G - expected));
  }
  check.holds = check.max_residual <= tol;
  return check;
}

}  // namespace otlab

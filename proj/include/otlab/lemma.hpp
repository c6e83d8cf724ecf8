#pragma once

// Scalar side of the duality proof: the optimal coefficient f(eta) in
//   (X + Y)^p <= (1 + eta) X^p + (1 + f(eta)) Y^p,   X, Y >= 0, eta > 0,
// its critical point, the choice of eta that makes the bound collapse to
// (W1 + W2)^p, and brute-force checks of each.
//
// Everything is written in terms of r = (1 + eta)^{1/(p-1)} - 1, evaluated as
// expm1(log1p(eta) / (p - 1)). Then
//   1 + f(eta) = (1 + 1/r)^{p-1},   critical Z = r^{-p},
// which is the closed form with the factor (1 + eta) = (1 + r)^{p-1} cancelled.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "otlab/error.hpp"

namespace otlab {

namespace detail {

template <std::floating_point Scalar>
void check_lemma_domain(Scalar p, Scalar eta) {
  if (!(p > Scalar(1)) || !std::isfinite(p))
    throw DomainError("this inequality needs p > 1; p = 1 is handled by the Kantorovich-Rubinstein path");
  if (!(eta > Scalar(0)) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
}

}  // namespace detail

/// (1 + eta)^{1/(p-1)} - 1 without cancellation for small eta.
template <std::floating_point Scalar>
Scalar lemma_root_gap(Scalar p, Scalar eta) {
  detail::check_lemma_domain(p, eta);
  return std::expm1(std::log1p(eta) / (p - Scalar(1)));
}

/// Optimal f(eta) for exponent p. Positive and strictly decreasing in eta.
template <std::floating_point Scalar>
Scalar f_eta(Scalar p, Scalar eta) {
  const Scalar r = lemma_root_gap(p, eta);
  return std::expm1((p - Scalar(1)) * std::log1p(Scalar(1) / r));
}

/// 1 + f(eta): the coefficient multiplying Y^p.
template <std::floating_point Scalar>
Scalar lemma_coefficient(Scalar p, Scalar eta) {
  const Scalar r = lemma_root_gap(p, eta);
  return std::exp((p - Scalar(1)) * std::log1p(Scalar(1) / r));
}

/// Coefficient pair of the scalar inequality for one (p, eta).
template <std::floating_point Scalar>
struct EtaWeightsT {
  Scalar p;
  Scalar eta;
  Scalar left;   ///< 1 + eta
  Scalar right;  ///< 1 + f(eta)
};

using EtaWeights = EtaWeightsT<double>;

template <std::floating_point Scalar>
EtaWeightsT<Scalar> make_eta_weights(Scalar p, Scalar eta) {
  return {p, eta, Scalar(1) + eta, lemma_coefficient(p, eta)};
}

/// The unique maximizer Z of  -eta Z - 1 - Z + (1 + Z^{1/p})^p.
template <std::floating_point Scalar>
Scalar critical_z(Scalar p, Scalar eta) {
  const Scalar r = lemma_root_gap(p, eta);
  return std::exp(-p * std::log(r));
}

/// The objective whose supremum over Z > 0 is f(eta), rearranged as
/// expm1(p log1p(Z^{1/p})) - (1 + eta) Z so tiny Z keeps its digits.
template <std::floating_point Scalar>
Scalar lemma_objective(Scalar p, Scalar eta, Scalar z) {
  return std::expm1(p * std::log1p(std::pow(z, Scalar(1) / p))) - (Scalar(1) + eta) * z;
}

/// d/dZ of the objective: -(eta + 1) + (Z^{-1/p} + 1)^{p-1}.
template <std::floating_point Scalar>
Scalar lemma_objective_derivative(Scalar p, Scalar eta, Scalar z) {
  return -(eta + Scalar(1)) + std::pow(std::pow(z, -Scalar(1) / p) + Scalar(1), p - Scalar(1));
}

struct BruteGrid {
  /// Geometric grid points spanning [Zc / 10^decades, Zc * 10^decades].
  std::size_t points = 2001;
  double decades = 3.0;
  bool include_critical = true;
};

/// Supremum of the objective over a geometric grid around the critical point.
template <std::floating_point Scalar>
Scalar f_eta_brute(Scalar p, Scalar eta, const BruteGrid& grid = {}) {
  detail::check_lemma_domain(p, eta);
  const Scalar zc = critical_z(p, eta);
  const Scalar log_lo = std::log(zc) - Scalar(grid.decades) * std::log(Scalar(10));
  const Scalar log_hi = std::log(zc) + Scalar(grid.decades) * std::log(Scalar(10));
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  const std::size_t count = std::max<std::size_t>(grid.points, 2);
  for (std::size_t k = 0; k < count; ++k) {
    const Scalar t = log_lo + (log_hi - log_lo) * Scalar(k) / Scalar(count - 1);
    best = std::max(best, lemma_objective(p, eta, std::exp(t)));
  }
  if (grid.include_critical) best = std::max(best, lemma_objective(p, eta, zc));
  return best;
}

template <std::floating_point Scalar>
struct Lemma2Result {
  Scalar max_violation;           ///< max of (X+Y)^p - (1+eta) X^p - (1+f) Y^p
  Scalar max_relative_violation;  ///< same, each sample divided by 1 + (X+Y)^p
  std::size_t worst_sample;
};

/// Evaluates the scalar inequality on every sample. Throws DomainError on negative X or Y.
template <std::floating_point Scalar>
Lemma2Result<Scalar> lemma2_check(Scalar p, Scalar eta,
                                  std::span<const std::pair<Scalar, Scalar>> samples) {
  const EtaWeightsT<Scalar> w = make_eta_weights(p, eta);
  Lemma2Result<Scalar> out{-std::numeric_limits<Scalar>::infinity(),
                           -std::numeric_limits<Scalar>::infinity(), 0};
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto [x, y] = samples[k];
    if (!(x >= Scalar(0)) || !(y >= Scalar(0))) throw DomainError("lemma2_check needs X, Y >= 0");
    const Scalar lhs = std::pow(x + y, p);
    const Scalar violation = lhs - w.left * std::pow(x, p) - w.right * std::pow(y, p);
    out.max_violation = std::max(out.max_violation, violation);
    const Scalar relative = violation / (Scalar(1) + lhs);
    if (relative > out.max_relative_violation) {
      out.max_relative_violation = relative;
      out.worst_sample = k;
    }
  }
  return out;
}

/// eta = (w_mu_nu / w_lambda_mu + 1)^{p-1} - 1. Empty when either distance is not
/// positive: the caller then takes the trivial branch.
template <std::floating_point Scalar>
std::optional<Scalar> choose_eta(Scalar p, Scalar w_lambda_mu, Scalar w_mu_nu) {
  if (!(p > Scalar(1))) throw DomainError("choose_eta needs p > 1");
  if (!(w_lambda_mu > Scalar(0)) || !(w_mu_nu > Scalar(0))) return std::nullopt;
  const Scalar ratio = w_mu_nu / w_lambda_mu;
  if (p == Scalar(2)) return ratio;
  return std::expm1((p - Scalar(1)) * std::log1p(ratio));
}

/// Relative residual of (1 + eta) Z + 1 + f(eta) = (1 + Z^{1/p})^p at
/// eta + 1 = (Z^{-1/p} + 1)^{p-1}.
template <std::floating_point Scalar>
Scalar collapse_identity_check(Scalar p, Scalar z) {
  if (!(p > Scalar(1))) throw DomainError("collapse identity needs p > 1");
  if (!(z > Scalar(0)) || !std::isfinite(z)) throw DomainError("collapse identity needs Z > 0");
  const Scalar root = std::pow(z, Scalar(1) / p);
  const Scalar eta = std::expm1((p - Scalar(1)) * std::log1p(Scalar(1) / root));
  const Scalar lhs = (Scalar(1) + eta) * z + lemma_coefficient(p, eta);
  const Scalar rhs = std::pow(Scalar(1) + root, p);
  return std::abs(lhs - rhs) / rhs;
}

}  // namespace otlab

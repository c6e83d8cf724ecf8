#pragma once

#include <vector>

#include "otlab/core_model.hpp"

namespace otlab {

/// Optimum of the discrete Kantorovich problem together with its dual certificate.
struct TransportSolution {
  double value = 0.0;  ///< W_p(mu, nu)^p = <c, pi>
  Coupling coupling;
  DualPair duals;
  double gap = 0.0;  ///< primal minus dual objective
  std::size_t iterations = 0;
};

struct SolveOptions {
  /// Hard cap on simplex pivots; 0 picks a size-dependent default.
  std::size_t max_iterations = 0;
};

/// Exact transport between two measures for cost d^p via primal network simplex
/// on the bipartite transportation graph. Duals are the node potentials.
TransportSolution solve_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                  const SolveOptions& options = {});

/// value^(1/p) of solve_transport.
double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Brute force over the n! permutation couplings of two uniform measures with
/// equal support size n <= 8. Returns W_p, not W_p^p.
double permutation_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

inline constexpr Index kPermutationOracleMaxSize = 8;

/// <c, pi> - (<a, mu> + <b, nu>).
double duality_gap(const TransportSolution& solution);

/// Largest |a_i + b_j - c_ij| over cells with pi_ij > threshold.
double complementary_slackness_violation(const TransportSolution& solution,
                                         double threshold = 1e-10);

/// A measure on the triple product with prescribed (1,2) and (2,3) marginals.
/// Stored as one n x k slab per middle point: sigma(i, j, k) = slabs[j](i, k).
class GluedTriple {
 public:
  GluedTriple(std::vector<Matrix> slabs, DiscreteMeasure lambda, DiscreteMeasure mu,
              DiscreteMeasure nu);

  double operator()(Index i, Index j, Index k) const { return slabs_[j](i, k); }
  const std::vector<Matrix>& slabs() const { return slabs_; }

  Matrix marginal12() const;
  Matrix marginal23() const;
  Matrix marginal13() const;
  double total_mass() const;

  const DiscreteMeasure& lambda() const { return lambda_; }
  const DiscreteMeasure& mu() const { return mu_; }
  const DiscreteMeasure& nu() const { return nu_; }

 private:
  std::vector<Matrix> slabs_;
  DiscreteMeasure lambda_;
  DiscreteMeasure mu_;
  DiscreteMeasure nu_;
};

/// Discrete disintegration through the shared middle marginal:
/// sigma(i,j,k) = rho12(i,j) rho23(j,k) / mu_j (0 where mu_j = 0).
/// Throws GlueingError when the middle marginals disagree by more than kMarginalTol.
GluedTriple glue_couplings(const Coupling& rho12, const Coupling& rho23);

struct GlueingCertificate {
  double bound = 0.0;  ///< (<d^p, rho13>)^(1/p)
  double w_lambda_mu = 0.0;
  double w_mu_nu = 0.0;
  double w_lambda_nu = 0.0;
  double rho13_marginal_error = 0.0;
  bool ok = false;
};

/// Classical proof route: glue optimal couplings, project to (1,3), apply Minkowski.
/// ok iff W_p(lambda,nu) <= bound <= W_p(lambda,mu) + W_p(mu,nu), each up to tol.
GlueingCertificate triangle_via_glueing(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                                        const DiscreteMeasure& nu, double p, double tol = 1e-8);

}  // namespace otlab

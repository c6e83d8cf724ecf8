#pragma once

#include <optional>
#include <string_view>

#include "otlab/conjugacy.hpp"
#include "otlab/core_model.hpp"
#include "otlab/lemma.hpp"
#include "otlab/transport.hpp"

namespace otlab {

/// beta(y) = K min_z (d(y,z)^p - gamma(z) / K) with K = 1 + f(eta).
Potential beta_eta(const Potential& gamma, double p, double eta);

struct LemmaBoundResult {
  double max_violation = 0.0;         ///< max over (x,y) of alpha(x) - beta(y) - (1+eta) d(x,y)^p
  double max_scaled_violation = 0.0;  ///< same, divided by 1 + |alpha(x)| + |beta(y)|
  Index worst_x = 0;
  Index worst_y = 0;
};

/// Pointwise check of alpha(x) - beta(y) <= (1 + eta) d(x,y)^p with alpha = gamma^{[p*]}.
/// alpha is recomputed from gamma; a supplied alpha that differs by more than kFeasTol
/// raises DomainError.
LemmaBoundResult lemma_bound_check(const Potential& alpha, const Potential& beta,
                                   const Potential& gamma, double p, double eta);

/// Builds alpha and beta from gamma, then checks.
LemmaBoundResult lemma_bound_check(const Potential& gamma, double p, double eta);

struct IntegrabilityCheck {
  double lhs = 0.0;  ///< sum_y mu(y) |beta(y)|
  double rhs = 0.0;  ///< 2^{p-1} K (M_p(mu, x0) + M_p(nu, x0)) + sum_z nu(z) |gamma(z)|
  bool holds = false;
};

IntegrabilityCheck beta_integrability_bound(const Potential& beta, const Potential& gamma,
                                            const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                            double p, double eta, Index x0 = 0);

enum class ChainBranch { Duality, Trivial, KantorovichRubinstein };

std::string_view to_string(ChainBranch branch);

/// Assembled state of one triangle-inequality certificate. Slacks are stored so that
/// negative values expose the failing link.
struct ChainReport {
  ChainBranch branch = ChainBranch::Duality;
  double p = 0.0;
  double eta = 0.0;  ///< 0 on the trivial and KR branches
  double w_lambda_mu = 0.0;
  double w_mu_nu = 0.0;
  double w_lambda_nu = 0.0;
  double value_lambda_mu = 0.0;  ///< W_p^p as returned by the solver
  double value_mu_nu = 0.0;
  double value_lambda_nu = 0.0;

  double potential_objective = 0.0;  ///< <alpha,lambda> + <gamma,nu> (KR: <phi,lambda> - <phi,nu>)
  double potential_error = 0.0;      ///< |potential_objective - W_p(lambda,nu)^p|

  double lemma_bound_max_violation = 0.0;  ///< scaled, see LemmaBoundResult
  std::optional<std::pair<Index, Index>> offending_pair;

  double ineq_wlamu_slack = 0.0;  ///< (1+eta) W^p(lambda,mu) - (<alpha,lambda> - <beta,mu>)
  double ineq_wmunu_slack = 0.0;  ///< K W^p(mu,nu) - (<beta,mu> + <gamma,nu>)
  double rhs_collapsed = 0.0;     ///< (1+eta) W^p(lambda,mu) + K W^p(mu,nu)
  double collapse_residual = 0.0; ///< |rhs_collapsed - (W(lambda,mu) + W(mu,nu))^p| relative
  double chain_slack = 0.0;       ///< rhs_collapsed - W^p(lambda,nu)
  double triangle_slack = 0.0;    ///< W(lambda,mu) + W(mu,nu) - W(lambda,nu)

  bool integrability_holds = true;
  bool beta_dp_concave = true;
  double lipschitz = 0.0;  ///< KR branch only

  bool certified = false;

  std::optional<Potential> alpha;
  std::optional<Potential> gamma;
  std::optional<Potential> beta;
};

struct CertifyOptions {
  double triangle_tol = 1e-8;
  double slack_tol = 1e-9;         ///< relative to 1 + magnitude of the compared terms
  double lemma_tol = 1e-9;
  double collapse_tol = 1e-9;
  double potential_tol = 1e-7;     ///< relative to 1 + W^p(lambda,nu)
  double degenerate_distance = 1e-12;
  Index x0 = 0;
};

/// Duality-route certificate of W_p(lambda,nu) <= W_p(lambda,mu) + W_p(mu,nu) for p > 1.
/// All three measures must live on one space.
ChainReport certify_triangle(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, double p, const CertifyOptions& options = {});

/// p = 1 through the optimal 1-Lipschitz potential.
ChainReport certify_triangle_kr(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, const CertifyOptions& options = {});

struct ChainAtEta {
  double eta = 0.0;
  double ineq_wlamu_slack = 0.0;
  double ineq_wmunu_slack = 0.0;
  double chain_slack = 0.0;  ///< (1+eta) W^p(lambda,mu) + K W^p(mu,nu) - W^p(lambda,nu)
  double lemma_violation = 0.0;
};

/// Re-runs the two dual links and the chain at an arbitrary eta > 0 using the
/// potentials stored in a duality-branch report.
ChainAtEta check_chain_at_eta(const ChainReport& report, const DiscreteMeasure& lambda,
                              const DiscreteMeasure& mu, const DiscreteMeasure& nu, double eta);

}  // namespace otlab

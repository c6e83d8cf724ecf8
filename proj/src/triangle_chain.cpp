#include "otlab/triangle_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otlab {

std::string_view to_string(ChainBranch branch) {
  switch (branch) {
    case ChainBranch::Duality: return "duality";
    case ChainBranch::Trivial: return "trivial";
    case ChainBranch::KantorovichRubinstein: return "kantorovich-rubinstein";
  }
  return "unknown";
}

Potential beta_eta(const Potential& gamma, double p, double eta) {
  if (gamma.p() != p) throw DomainError("beta_eta: gamma was built for a different exponent");
  const double k = lemma_coefficient(p, eta);
  const Matrix cost = cost_matrix(*gamma.space(), p);
  // K * (gamma / K)^{[p*]}
  const Vector scaled = gamma.values() / k;
  return {gamma.space(), k * c_transform(cost, scaled), p};
}

LemmaBoundResult lemma_bound_check(const Potential& alpha, const Potential& beta,
                                   const Potential& gamma, double p, double eta) {
  if (alpha.size() != gamma.size() || beta.size() != gamma.size() ||
      !same_space(*alpha.space(), *gamma.space()) || !same_space(*beta.space(), *gamma.space()))
    throw ShapeError("lemma_bound_check: potentials live on different spaces");
  if (gamma.p() != p) throw DomainError("lemma_bound_check: gamma was built for a different exponent");
  detail::check_lemma_domain(p, eta);

  const Matrix cost = cost_matrix(*gamma.space(), p);
  const Vector recomputed = c_transform(cost, gamma.values());
  if ((recomputed - alpha.values()).cwiseAbs().maxCoeff() > kFeasTol)
    throw DomainError("lemma_bound_check: alpha is not the p-Legendre transform of gamma");

  LemmaBoundResult out{-std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(), 0, 0};
  const double left = 1.0 + eta;
  for (Index y = 0; y < cost.cols(); ++y)
    for (Index x = 0; x < cost.rows(); ++x) {
      const double v = recomputed(x) - beta[y] - left * cost(x, y);
      out.max_violation = std::max(out.max_violation, v);
      const double scaled = v / (1.0 + std::abs(recomputed(x)) + std::abs(beta[y]));
      if (scaled > out.max_scaled_violation) {
        out.max_scaled_violation = scaled;
        out.worst_x = x;
        out.worst_y = y;
      }
    }
  return out;
}

LemmaBoundResult lemma_bound_check(const Potential& gamma, double p, double eta) {
  const Potential alpha = p_legendre(gamma);
  const Potential beta = beta_eta(gamma, p, eta);
  return lemma_bound_check(alpha, beta, gamma, p, eta);
}

IntegrabilityCheck beta_integrability_bound(const Potential& beta, const Potential& gamma,
                                            const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                            double p, double eta, Index x0) {
  if (beta.size() != mu.size() || gamma.size() != nu.size())
    throw ShapeError("beta_integrability_bound: potential/measure size mismatch");
  const double k = lemma_coefficient(p, eta);
  IntegrabilityCheck check;
  check.lhs = beta.values().cwiseAbs().dot(mu.weights());
  check.rhs = std::pow(2.0, p - 1.0) * k * (p_moment(mu, x0, p) + p_moment(nu, x0, p)) +
              gamma.values().cwiseAbs().dot(nu.weights());
  check.holds = check.lhs <= check.rhs + 1e-9 * (1.0 + check.rhs);
  return check;
}

namespace {

void require_shared_space(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu) {
  if (!same_space(*lambda.space(), *mu.space()) || !same_space(*mu.space(), *nu.space()))
    throw IncompatibleSpacesError("triangle certificates need all three measures on one space");
}

double root(double value, double p) { return std::pow(std::max(value, 0.0), 1.0 / p); }

struct Links {
  double wlamu_slack;
  double wmunu_slack;
  double rhs;
};

Links evaluate_links(const Potential& alpha, const Potential& beta, const Potential& gamma,
                     const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double eta, double k, double value_lambda_mu,
                     double value_mu_nu) {
  const double a_l = alpha.values().dot(lambda.weights());
  const double b_m = beta.values().dot(mu.weights());
  const double g_n = gamma.values().dot(nu.weights());
  return {(1.0 + eta) * value_lambda_mu - (a_l - b_m), k * value_mu_nu - (b_m + g_n),
          (1.0 + eta) * value_lambda_mu + k * value_mu_nu};
}

}  // namespace

ChainReport certify_triangle(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, double p, const CertifyOptions& options) {
  if (!(p > 1.0)) throw DomainError("certify_triangle needs p > 1; use certify_triangle_kr for p = 1");
  require_shared_space(lambda, mu, nu);

  ChainReport report;
  report.p = p;

  // (1) conjugate optimal potentials for (lambda, nu)
  const TransportSolution s_ln = solve_transport(lambda, nu, p);
  const DualPair conj = conjugate_normalize(s_ln.duals);
  Potential alpha(lambda.space(), conj.a, p);
  Potential gamma(nu.space(), conj.b, p);
  report.value_lambda_nu = s_ln.value;
  report.w_lambda_nu = root(s_ln.value, p);
  report.potential_objective = dual_objective(conj, lambda, nu);
  report.potential_error = std::abs(report.potential_objective - s_ln.value);
  const bool potentials_ok = report.potential_error <= options.potential_tol * (1.0 + s_ln.value);

  // (2) the two legs
  const TransportSolution s_lm = solve_transport(lambda, mu, p);
  const TransportSolution s_mn = solve_transport(mu, nu, p);
  report.value_lambda_mu = s_lm.value;
  report.value_mu_nu = s_mn.value;
  report.w_lambda_mu = root(s_lm.value, p);
  report.w_mu_nu = root(s_mn.value, p);
  report.triangle_slack = report.w_lambda_mu + report.w_mu_nu - report.w_lambda_nu;
  const bool triangle_ok = report.triangle_slack >= -options.triangle_tol;

  // (3) trivial branch when a leg vanishes
  const std::optional<double> eta =
      (report.w_lambda_mu <= options.degenerate_distance || report.w_mu_nu <= options.degenerate_distance)
          ? std::nullopt
          : choose_eta(p, report.w_lambda_mu, report.w_mu_nu);
  if (!eta) {
    report.branch = ChainBranch::Trivial;
    report.rhs_collapsed = std::pow(report.w_lambda_mu + report.w_mu_nu, p);
    report.chain_slack = report.rhs_collapsed - s_ln.value;
    report.certified = potentials_ok && triangle_ok;
    report.alpha = std::move(alpha);
    report.gamma = std::move(gamma);
    return report;
  }

  report.branch = ChainBranch::Duality;
  report.eta = *eta;
  const double k = lemma_coefficient(p, *eta);
  Potential beta = beta_eta(gamma, p, *eta);

  const LemmaBoundResult lemma = lemma_bound_check(alpha, beta, gamma, p, *eta);
  report.lemma_bound_max_violation = lemma.max_scaled_violation;
  const bool lemma_ok = lemma.max_scaled_violation <= options.lemma_tol;
  if (!lemma_ok) report.offending_pair = std::make_pair(lemma.worst_x, lemma.worst_y);

  const Links links = evaluate_links(alpha, beta, gamma, lambda, mu, nu, *eta, k, s_lm.value, s_mn.value);
  report.ineq_wlamu_slack = links.wlamu_slack;
  report.ineq_wmunu_slack = links.wmunu_slack;
  report.rhs_collapsed = links.rhs;
  report.chain_slack = links.rhs - s_ln.value;

  // (4) collapse of the weighted bound onto (W(lambda,mu) + W(mu,nu))^p
  const double target = std::pow(report.w_lambda_mu + report.w_mu_nu, p);
  report.collapse_residual = std::abs(links.rhs - target) / target;

  const IntegrabilityCheck integ = beta_integrability_bound(beta, gamma, mu, nu, p, *eta, options.x0);
  report.integrability_holds = integ.holds;
  report.beta_dp_concave = is_dp_concave(Potential(beta.space(), beta.values() / k, p));

  const double scale = 1.0 + std::abs(links.rhs);
  report.certified = potentials_ok && lemma_ok && triangle_ok &&
                     report.ineq_wlamu_slack >= -options.slack_tol * scale &&
                     report.ineq_wmunu_slack >= -options.slack_tol * scale &&
                     report.chain_slack >= -options.slack_tol * scale &&
                     report.collapse_residual <= options.collapse_tol && report.integrability_holds &&
                     report.beta_dp_concave;

  report.alpha = std::move(alpha);
  report.gamma = std::move(gamma);
  report.beta = std::move(beta);
  return report;
}

ChainReport certify_triangle_kr(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, const CertifyOptions& options) {
  require_shared_space(lambda, mu, nu);
  ChainReport report;
  report.branch = ChainBranch::KantorovichRubinstein;
  report.p = 1.0;

  const TransportSolution s_ln = solve_transport(lambda, nu, 1.0);
  const TransportSolution s_lm = solve_transport(lambda, mu, 1.0);
  const TransportSolution s_mn = solve_transport(mu, nu, 1.0);
  report.value_lambda_nu = report.w_lambda_nu = s_ln.value;
  report.value_lambda_mu = report.w_lambda_mu = s_lm.value;
  report.value_mu_nu = report.w_mu_nu = s_mn.value;

  Potential phi = kr_potential(s_ln.duals);
  report.lipschitz = lipschitz_constant(phi);
  report.potential_objective = kr_objective(phi, lambda, nu);
  report.potential_error = std::abs(report.potential_objective - s_ln.value);

  // Each leg is bounded by the KR supremum because phi is 1-Lipschitz.
  const double leg1 = std::abs(kr_objective(phi, lambda, mu));
  const double leg2 = std::abs(kr_objective(phi, mu, nu));
  report.ineq_wlamu_slack = s_lm.value - leg1;
  report.ineq_wmunu_slack = s_mn.value - leg2;
  report.rhs_collapsed = s_lm.value + s_mn.value;
  report.chain_slack = report.rhs_collapsed - report.potential_objective;
  report.triangle_slack = report.rhs_collapsed - s_ln.value;

  const double tol = options.triangle_tol;
  report.certified = report.lipschitz <= 1.0 + 1e-9 && report.potential_error <= tol &&
                     report.potential_objective <= leg1 + leg2 + tol &&
                     report.ineq_wlamu_slack >= -tol && report.ineq_wmunu_slack >= -tol &&
                     report.triangle_slack >= -tol;
  report.alpha = phi;
  report.gamma = std::move(phi);
  return report;
}

ChainAtEta check_chain_at_eta(const ChainReport& report, const DiscreteMeasure& lambda,
                              const DiscreteMeasure& mu, const DiscreteMeasure& nu, double eta) {
  if (!report.alpha || !report.gamma || report.branch == ChainBranch::KantorovichRubinstein)
    throw DomainError("check_chain_at_eta needs conjugate potentials from certify_triangle");
  const double p = report.p;
  const double k = lemma_coefficient(p, eta);
  const Potential beta = beta_eta(*report.gamma, p, eta);
  const Links links = evaluate_links(*report.alpha, beta, *report.gamma, lambda, mu, nu, eta, k,
                                     report.value_lambda_mu, report.value_mu_nu);
  ChainAtEta out;
  out.eta = eta;
  out.ineq_wlamu_slack = links.wlamu_slack;
  out.ineq_wmunu_slack = links.wmunu_slack;
  out.chain_slack = links.rhs - report.value_lambda_nu;
  out.lemma_violation = lemma_bound_check(*report.alpha, beta, *report.gamma, p, eta).max_scaled_violation;
  return out;
}

}  // namespace otlab

#include "otlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "network_simplex.hpp"

namespace otlab {

namespace {

Vector gather(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
  return out;
}

}  // namespace

TransportSolution solve_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                  const SolveOptions& options) {
  if (!(p >= 1.0)) throw DomainError("solve_transport needs p >= 1");
  const Matrix cost = cost_matrix(*mu.space(), *nu.space(), p);
  const Index n = mu.size();
  const Index m = nu.size();

  // Zero-weight points carry no mass; solve on the supports only.
  const std::vector<Index> rows = mu.support();
  const std::vector<Index> cols = nu.support();
  Matrix sub_cost(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      sub_cost(static_cast<Index>(r), static_cast<Index>(c)) = cost(rows[r], cols[c]);

  const std::size_t nodes = rows.size() + cols.size();
  const std::size_t cap =
      options.max_iterations ? options.max_iterations : std::max<std::size_t>(10000, 50 * nodes * nodes);
  detail::SimplexResult sub = detail::solve_transportation(gather(mu.weights(), rows),
                                                           gather(nu.weights(), cols), sub_cost, cap);

  Matrix plan = Matrix::Zero(n, m);
  Vector a = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  Vector b = Vector::Constant(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a(rows[r]) = sub.row_potential(static_cast<Index>(r));
    for (std::size_t c = 0; c < cols.size(); ++c)
      plan(rows[r], cols[c]) = sub.flow(static_cast<Index>(r), static_cast<Index>(c));
  }
  for (std::size_t c = 0; c < cols.size(); ++c) b(cols[c]) = sub.col_potential(static_cast<Index>(c));

  // Back-fill duals of dropped points by conjugation: dropped rows against the
  // surviving columns, then dropped columns against every row.
  std::vector<char> row_kept(static_cast<std::size_t>(n), 0);
  std::vector<char> col_kept(static_cast<std::size_t>(m), 0);
  for (Index r : rows) row_kept[static_cast<std::size_t>(r)] = 1;
  for (Index c : cols) col_kept[static_cast<std::size_t>(c)] = 1;
  for (Index i = 0; i < n; ++i) {
    if (row_kept[static_cast<std::size_t>(i)]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (Index j : cols) best = std::min(best, cost(i, j) - b(j));
    a(i) = best;
  }
  for (Index j = 0; j < m; ++j) {
    if (col_kept[static_cast<std::size_t>(j)]) continue;
    b(j) = (cost.col(j) - a).minCoeff();
  }

  TransportSolution sol{0.0, Coupling(std::move(plan), mu, nu),
                        DualPair{std::move(a), std::move(b), p, mu.space(), nu.space()}, 0.0,
                        sub.iterations};
  sol.value = cost.cwiseProduct(sol.coupling.plan()).sum();
  sol.gap = duality_gap(sol);
  return sol;
}

double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  const double value = solve_transport(mu, nu, p).value;
  return std::pow(std::max(value, 0.0), 1.0 / p);
}

double duality_gap(const TransportSolution& solution) {
  const Coupling& pi = solution.coupling;
  const Matrix cost = cost_matrix(*pi.first().space(), *pi.second().space(), solution.duals.p);
  const double primal = cost.cwiseProduct(pi.plan()).sum();
  return primal - dual_objective(solution.duals, pi.first(), pi.second());
}

double complementary_slackness_violation(const TransportSolution& solution, double threshold) {
  const Coupling& pi = solution.coupling;
  const Matrix cost = cost_matrix(*pi.first().space(), *pi.second().space(), solution.duals.p);
  double worst = 0.0;
  for (Index j = 0; j < cost.cols(); ++j)
    for (Index i = 0; i < cost.rows(); ++i)
      if (pi.plan()(i, j) > threshold)
        worst = std::max(worst,
                         std::abs(solution.duals.a(i) + solution.duals.b(j) - cost(i, j)));
  return worst;
}

double permutation_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  const std::vector<Index> xs = mu.support();
  std::vector<Index> ys = nu.support();
  const auto size = static_cast<Index>(xs.size());
  if (xs.size() != ys.size())
    throw UnsupportedInstanceError("permutation oracle needs equal support sizes");
  if (size > kPermutationOracleMaxSize)
    throw UnsupportedInstanceError("permutation oracle is capped at n = 8");
  const double mass = 1.0 / static_cast<double>(size);
  for (Index i : xs)
    if (std::abs(mu[i] - mass) > kWeightTol)
      throw UnsupportedInstanceError("permutation oracle needs uniform measures");
  for (Index j : ys)
    if (std::abs(nu[j] - mass) > kWeightTol)
      throw UnsupportedInstanceError("permutation oracle needs uniform measures");

  const Matrix cost = cost_matrix(*mu.space(), *nu.space(), p);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) total += cost(xs[k], ys[k]);
    best = std::min(best, total * mass);
  } while (std::next_permutation(ys.begin(), ys.end()));
  return std::pow(best, 1.0 / p);
}

// ---------------------------------------------------------------------------

GluedTriple::GluedTriple(std::vector<Matrix> slabs, DiscreteMeasure lambda, DiscreteMeasure mu,
                         DiscreteMeasure nu)
    : slabs_(std::move(slabs)), lambda_(std::move(lambda)), mu_(std::move(mu)), nu_(std::move(nu)) {
  if (static_cast<Index>(slabs_.size()) != mu_.size())
    throw ShapeError("one slab per middle point expected");
  for (const Matrix& s : slabs_)
    if (s.rows() != lambda_.size() || s.cols() != nu_.size())
      throw ShapeError("glued slab has the wrong shape");
}

Matrix GluedTriple::marginal12() const {
  Matrix out(lambda_.size(), mu_.size());
  for (std::size_t j = 0; j < slabs_.size(); ++j)
    out.col(static_cast<Index>(j)) = slabs_[j].rowwise().sum();
  return out;
}

Matrix GluedTriple::marginal23() const {
  Matrix out(mu_.size(), nu_.size());
  for (std::size_t j = 0; j < slabs_.size(); ++j)
    out.row(static_cast<Index>(j)) = slabs_[j].colwise().sum();
  return out;
}

Matrix GluedTriple::marginal13() const {
  Matrix out = Matrix::Zero(lambda_.size(), nu_.size());
  for (const Matrix& s : slabs_) out += s;
  return out;
}

double GluedTriple::total_mass() const { return marginal13().sum(); }

GluedTriple glue_couplings(const Coupling& rho12, const Coupling& rho23) {
  if (!same_space(*rho12.second().space(), *rho23.first().space()))
    throw GlueingError("couplings do not share a middle space");
  const Vector middle12 = rho12.plan().colwise().sum().transpose();
  const Vector middle23 = rho23.plan().rowwise().sum();
  if ((middle12 - middle23).cwiseAbs().maxCoeff() > kMarginalTol)
    throw GlueingError("middle marginals of the two couplings disagree");

  std::vector<Matrix> slabs;
  slabs.reserve(static_cast<std::size_t>(middle12.size()));
  for (Index j = 0; j < middle12.size(); ++j) {
    if (middle12(j) > 0.0)
      slabs.emplace_back(rho12.plan().col(j) * rho23.plan().row(j) / middle12(j));
    else
      slabs.emplace_back(Matrix::Zero(rho12.plan().rows(), rho23.plan().cols()));
  }
  return {std::move(slabs), rho12.first(), rho12.second(), rho23.second()};
}

GlueingCertificate triangle_via_glueing(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                                        const DiscreteMeasure& nu, double p, double tol) {
  const TransportSolution s12 = solve_transport(lambda, mu, p);
  const TransportSolution s23 = solve_transport(mu, nu, p);
  const TransportSolution s13 = solve_transport(lambda, nu, p);

  const GluedTriple sigma = glue_couplings(s12.coupling, s23.coupling);
  const Matrix rho13 = sigma.marginal13();
  const Matrix cost = cost_matrix(*lambda.space(), *nu.space(), p);

  GlueingCertificate cert;
  cert.w_lambda_mu = std::pow(std::max(s12.value, 0.0), 1.0 / p);
  cert.w_mu_nu = std::pow(std::max(s23.value, 0.0), 1.0 / p);
  cert.w_lambda_nu = std::pow(std::max(s13.value, 0.0), 1.0 / p);
  cert.bound = std::pow(std::max(cost.cwiseProduct(rho13).sum(), 0.0), 1.0 / p);
  cert.rho13_marginal_error =
      std::max((rho13.rowwise().sum() - lambda.weights()).cwiseAbs().maxCoeff(),
               (rho13.colwise().sum().transpose() - nu.weights()).cwiseAbs().maxCoeff());
  cert.ok = cert.rho13_marginal_error <= kMarginalTol && cert.w_lambda_nu <= cert.bound + tol &&
            cert.bound <= cert.w_lambda_mu + cert.w_mu_nu + tol;
  return cert;
}

}  // namespace otlab

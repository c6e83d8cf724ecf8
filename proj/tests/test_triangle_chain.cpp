#include <gtest/gtest.h>

#include <cmath>

#include "otlab/triangle_chain.hpp"

namespace otlab {
namespace {

SpacePtr line(std::initializer_list<double> xs) {
  Matrix c(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) c(i++, 0) = x;
  return euclidean_space(c);
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

struct Triple {
  SpacePtr space;
  DiscreteMeasure lambda, mu, nu;
};

Triple random_triple(std::uint64_t seed) {
  Rng rng(seed);
  const Index n = 2 + static_cast<Index>(rng.below(7));
  const auto s = seed % 2 ? random_metric_space(n, rng) : random_euclidean_space(n, 2, rng);
  auto l = DiscreteMeasure::random(s, rng);
  auto m = DiscreteMeasure::random(s, rng);
  auto v = DiscreteMeasure::random(s, rng);
  return {s, std::move(l), std::move(m), std::move(v)};
}

TEST(BetaEta, ZeroGammaStaysZero) {
  const auto s = random_metric_space(4, 1);
  EXPECT_EQ(beta_eta(Potential::zero(s, 2.0), 2.0, 0.3).values(), Vector::Zero(4));
}

TEST(BetaEta, TwoPointExample) {
  const auto s = line({0, 1});
  const Potential gamma(s, vec({-2, 0}), 2.0);
  EXPECT_EQ(beta_eta(gamma, 2.0, 1.0).values(), vec({2, 0}));
  EXPECT_EQ(p_legendre(gamma).values(), vec({1, 0}));
  const auto r = lemma_bound_check(gamma, 2.0, 1.0);
  EXPECT_LE(r.max_violation, 0.0);
  EXPECT_THROW(beta_eta(gamma, 3.0, 1.0), DomainError);
}

TEST(BetaEta, QuadraticFormula) {
  // p = 2: K = (1+eta)/eta, beta(y) = min_z (K d(y,z)^2 - gamma(z))
  Rng rng(3);
  const auto s = random_metric_space(6, rng);
  Vector g(6);
  for (Index i = 0; i < 6; ++i) g(i) = rng.uniform(-1, 1);
  const Potential gamma(s, g, 2.0);
  const double eta = 0.4;
  const double k = (1 + eta) / eta;
  const Vector beta = beta_eta(gamma, 2.0, eta).values();
  for (Index y = 0; y < 6; ++y) {
    double best = std::numeric_limits<double>::infinity();
    for (Index z = 0; z < 6; ++z) best = std::min(best, k * std::pow(s->distance(y, z), 2) - g(z));
    EXPECT_NEAR(beta(y), best, 1e-13);
  }
}

TEST(LemmaBound, HoldsOnRandomDraws) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto s = random_metric_space(2 + static_cast<Index>(rng.below(9)), rng);
    const double p = 1.05 + 4.95 * rng.uniform();
    const double eta = std::exp(rng.uniform(-5, 5));
    Vector g(s->size());
    for (Index i = 0; i < g.size(); ++i) g(i) = rng.uniform(-2, 2);
    const Potential gamma = p_legendre(p_legendre(Potential(s, g, p)));
    const auto r = lemma_bound_check(gamma, p, eta);
    EXPECT_LE(r.max_scaled_violation, 1e-9) << seed;
    const Potential beta = beta_eta(gamma, p, eta);
    EXPECT_TRUE(is_dp_concave(Potential(s, beta.values() / lemma_coefficient(p, eta), p)));
  }
}

TEST(LemmaBound, RejectsForeignAlpha) {
  const auto s = line({0, 1});
  const Potential gamma(s, vec({-2, 0}), 2.0);
  const Potential wrong(s, vec({5, 0}), 2.0);
  EXPECT_THROW(lemma_bound_check(wrong, beta_eta(gamma, 2.0, 1.0), gamma, 2.0, 1.0), DomainError);
  EXPECT_THROW(lemma_bound_check(gamma, 1.0, 1.0), DomainError);
}

TEST(Integrability, DiracExample) {
  const auto s = line({0, 1, 3});
  const auto mu = DiscreteMeasure::dirac(s, 1);
  const auto nu = DiscreteMeasure::dirac(s, 2);
  const Potential gamma = Potential::zero(s, 2.0);
  const Potential beta = beta_eta(gamma, 2.0, 2.0);
  const auto c = beta_integrability_bound(beta, gamma, mu, nu, 2.0, 2.0);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_NEAR(c.rhs, 2.0 * 1.5 * (1.0 + 9.0), 1e-12);
  EXPECT_TRUE(c.holds);
}

TEST(Integrability, ArbitraryGammaIsNotCovered) {
  // gamma is not a d^2-transform; the lower side of beta escapes the bound
  const auto s = line({0, 1});
  const DiscreteMeasure mu(s, vec({0.5, 0.5}));
  const DiscreteMeasure nu(s, vec({0.999, 0.001}));
  const Potential gamma(s, vec({0, 1000}), 2.0);
  const auto c = beta_integrability_bound(beta_eta(gamma, 2.0, 1.0), gamma, mu, nu, 2.0, 1.0);
  EXPECT_FALSE(c.holds);
  EXPECT_FALSE(is_dp_concave(gamma));
}

TEST(Integrability, HoldsForConjugateOptimalGamma) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto t = random_triple(seed + 300);
    Rng rng(seed);
    const double p = 1.1 + 3.0 * rng.uniform();
    const double eta = std::exp(rng.uniform(-6, 6));
    const DualPair conj = conjugate_normalize(solve_transport(t.lambda, t.nu, p).duals);
    const Potential gamma(t.space, conj.b, p);
    EXPECT_TRUE(beta_integrability_bound(beta_eta(gamma, p, eta), gamma, t.mu, t.nu, p, eta).holds) << seed;
  }
}

TEST(CertifyTriangle, DiracTripleIsTight) {
  const auto s = line({0, 1, 3});
  const auto r = certify_triangle(DiscreteMeasure::dirac(s, 0), DiscreteMeasure::dirac(s, 1),
                                  DiscreteMeasure::dirac(s, 2), 2.0);
  EXPECT_EQ(r.branch, ChainBranch::Duality);
  EXPECT_TRUE(r.certified);
  EXPECT_NEAR(r.w_lambda_mu, 1.0, 1e-12);
  EXPECT_NEAR(r.w_mu_nu, 2.0, 1e-12);
  EXPECT_NEAR(r.w_lambda_nu, 3.0, 1e-12);
  EXPECT_NEAR(r.eta, 2.0, 1e-12);
  EXPECT_NEAR(r.rhs_collapsed, 9.0, 1e-12);
  EXPECT_LE(std::abs(r.chain_slack), 1e-9);
  EXPECT_LE(std::abs(r.triangle_slack), 1e-9);
}

TEST(CertifyTriangle, EqualMeasuresTakeTheTrivialBranch) {
  const auto t = random_triple(4);
  const auto r = certify_triangle(t.lambda, t.lambda, t.nu, 3.0);
  EXPECT_EQ(r.branch, ChainBranch::Trivial);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.eta, 0.0);
  EXPECT_NEAR(r.triangle_slack, 0.0, 1e-9);
}

TEST(CertifyTriangle, Errors) {
  const auto t = random_triple(1);
  EXPECT_THROW(certify_triangle(t.lambda, t.mu, t.nu, 1.0), DomainError);
  const auto other = random_triple(2);
  EXPECT_THROW(certify_triangle(t.lambda, t.mu, other.nu, 2.0), IncompatibleSpacesError);
}

TEST(CertifyTriangle, RandomSweepWithArbitraryEta) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto t = random_triple(seed);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const auto r = certify_triangle(t.lambda, t.mu, t.nu, p);
      ASSERT_TRUE(r.certified) << seed << " p=" << p;
      EXPECT_LE(r.collapse_residual, 1e-10);
      EXPECT_TRUE(r.integrability_holds);
      EXPECT_TRUE(r.beta_dp_concave);
      Rng rng(seed * 7 + 1);
      for (int k = 0; k < 5; ++k) {
        const double eta = std::exp(rng.uniform(-4, 4));
        const auto c = check_chain_at_eta(r, t.lambda, t.mu, t.nu, eta);
        const double scale = 1.0 + std::abs(c.chain_slack + r.value_lambda_nu);
        EXPECT_GE(c.ineq_wlamu_slack, -1e-9 * scale);
        EXPECT_GE(c.ineq_wmunu_slack, -1e-9 * scale);
        EXPECT_GE(c.chain_slack, -1e-9 * scale);
        EXPECT_LE(c.lemma_violation, 1e-9);
        // the chosen eta minimizes the weighted bound
        EXPECT_GE(c.chain_slack, r.chain_slack - 1e-9 * scale);
      }
      const auto g = triangle_via_glueing(t.lambda, t.mu, t.nu, p);
      EXPECT_TRUE(g.ok);
      EXPECT_NEAR(g.w_lambda_nu, r.w_lambda_nu, 1e-9);
    }
  }
}

TEST(CertifyTriangleKr, DiracTriple) {
  const auto s = line({0, 1, 3});
  const auto r = certify_triangle_kr(DiscreteMeasure::dirac(s, 0), DiscreteMeasure::dirac(s, 1),
                                     DiscreteMeasure::dirac(s, 2));
  EXPECT_EQ(r.branch, ChainBranch::KantorovichRubinstein);
  EXPECT_TRUE(r.certified);
  EXPECT_NEAR(r.potential_objective, 3.0, 1e-12);
  EXPECT_LE(r.lipschitz, 1.0 + 1e-12);
}

TEST(CertifyTriangleKr, RandomInstances) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto t = random_triple(seed);
    const auto r = certify_triangle_kr(t.lambda, t.mu, t.nu);
    EXPECT_TRUE(r.certified) << seed;
    EXPECT_NEAR(r.potential_objective, r.w_lambda_nu, 1e-8);
  }
}

TEST(CheckChainAtEta, NeedsDualityPotentials) {
  const auto t = random_triple(3);
  const auto kr = certify_triangle_kr(t.lambda, t.mu, t.nu);
  EXPECT_THROW(check_chain_at_eta(kr, t.lambda, t.mu, t.nu, 1.0), DomainError);
}

}  // namespace
}  // namespace otlab

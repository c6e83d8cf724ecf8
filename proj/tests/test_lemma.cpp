#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "otlab/lemma.hpp"
#include "otlab/random.hpp"

namespace otlab {
namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Reference values from a 60-digit bisection on the derivative of the objective,
// independent of the closed form.
struct Frozen {
  double p, eta, f, zc;
};
constexpr Frozen kFrozen[] = {
    {1.5, 0.7, 0.23656804467062351093, 0.38486400394354921943},
    {3.0, 3.0, 3.0, 1.0},
    {2.0, 0.5, 2.0, 4.0},
    {4.0, 0.1, 32701.988901341659677, 921000.11074918394122},
    {1.1, 10.0, 3.8554328943771570048e-12, 3.5049389949626432508e-12},
    {6.0, 0.001, 3134385004375629678.0, 1.5662530008750628045e+22},
    {2.5, 1.0, 3.4425049023396835689, 3.7814921231875751224},
    {1.5, 1000.0, 4.9900187150655014842e-7, 9.9700748253928856229e-10},
};

TEST(FEta, MatchesHighPrecisionReference) {
  for (const auto& r : kFrozen) {
    EXPECT_LE(rel(f_eta(r.p, r.eta), r.f), 1e-13) << r.p << " " << r.eta;
    EXPECT_LE(rel(critical_z(r.p, r.eta), r.zc), 1e-13) << r.p << " " << r.eta;
    EXPECT_LE(rel(lemma_coefficient(r.p, r.eta), 1.0 + r.f), 1e-13);
  }
}

TEST(FEta, Examples) {
  EXPECT_NEAR(f_eta(2.0, 0.5), 2.0, 1e-15);
  EXPECT_NEAR(f_eta(3.0, 3.0), 3.0, 1e-14);
  EXPECT_NEAR(f_eta(2.0, 1.0), 1.0, 1e-15);
}

TEST(FEta, QuadraticCaseIsReciprocal) {
  for (int k = -40; k <= 40; ++k) {
    const double eta = std::pow(10.0, k / 10.0);
    EXPECT_LE(std::abs(f_eta(2.0, eta) * eta - 1.0), 1e-12) << eta;
  }
}

TEST(FEta, StrictlyDecreasingInEta) {
  for (double p : {1.1, 1.5, 2.0, 3.0, 6.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = -30; k <= 30; ++k) {
      const double f = f_eta(p, std::pow(10.0, k / 10.0));
      EXPECT_GT(f, 0.0);
      EXPECT_LT(f, prev);
      prev = f;
    }
  }
}

TEST(FEta, DomainErrors) {
  EXPECT_THROW(f_eta(1.0, 1.0), DomainError);
  EXPECT_THROW(f_eta(0.5, 1.0), DomainError);
  EXPECT_THROW(f_eta(2.0, 0.0), DomainError);
  EXPECT_THROW(f_eta(2.0, -1.0), DomainError);
  EXPECT_THROW(f_eta(2.0, std::nan("")), DomainError);
  EXPECT_THROW(critical_z(1.0, 1.0), DomainError);
  EXPECT_THROW(f_eta_brute(1.0, 1.0), DomainError);
}

TEST(FEtaBrute, AgreesWithClosedForm) {
  for (double p : {1.1, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0})
    for (double eta : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
      const double f = f_eta(p, eta);
      EXPECT_LE(std::abs(f_eta_brute(p, eta) - f), 1e-9 * std::abs(f)) << p << " " << eta;
      // without the critical point the grid can only undershoot, up to cancellation in the objective
      BruteGrid coarse{201, 2.0, false};
      EXPECT_LE(f_eta_brute(p, eta, coarse), f * (1 + 1e-9));
    }
}

TEST(CriticalZ, Examples) {
  EXPECT_NEAR(critical_z(2.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(critical_z(2.0, 3.0), 1.0 / 9.0, 1e-15);
}

TEST(CriticalZ, StationaryPointOfTheObjective) {
  for (double p : {1.5, 2.0, 3.0, 4.0})
    for (double eta : {0.1, 1.0, 10.0}) {
      const double zc = critical_z(p, eta);
      EXPECT_NEAR(lemma_objective_derivative(p, eta, zc), 0.0, 1e-12 * (1 + eta));
      EXPECT_GT(lemma_objective_derivative(p, eta, zc * 0.9), 0.0);
      EXPECT_LT(lemma_objective_derivative(p, eta, zc * 1.1), 0.0);
      EXPECT_LE(rel(lemma_objective(p, eta, zc), f_eta(p, eta)), 1e-12);
    }
}

TEST(Lemma2Check, Examples) {
  // p = 2, eta = 1: (X+Y)^2 <= 2X^2 + 2Y^2, equality on the diagonal
  const std::vector<std::pair<double, double>> diag{{1.0, 1.0}, {0.0, 0.0}, {3.0, 3.0}};
  const auto r = lemma2_check<double>(2.0, 1.0, diag);
  EXPECT_NEAR(r.max_violation, 0.0, 1e-14);

  const std::vector<std::pair<double, double>> off{{1.0, 0.0}, {0.0, 1.0}, {2.0, 1.0}};
  EXPECT_LT(lemma2_check<double>(2.0, 1.0, off).max_violation, 0.0);

  const std::vector<std::pair<double, double>> bad{{-1.0, 1.0}};
  EXPECT_THROW(lemma2_check<double>(2.0, 1.0, bad), DomainError);
}

TEST(Lemma2Check, RandomSamplesAndTightness) {
  Rng rng(17);
  std::vector<std::pair<double, double>> samples(4000);
  for (auto& s : samples) s = {std::exp(rng.uniform(-7, 7)), std::exp(rng.uniform(-7, 7))};
  for (double p : {1.1, 1.5, 2.0, 3.0, 6.0})
    for (double eta : {1e-3, 1.0, 1e3}) {
      EXPECT_LE(lemma2_check<double>(p, eta, samples).max_relative_violation, 1e-9);
      // Y = 1, X = Zc^{1/p} attains equality
      const std::pair<double, double> tight{std::pow(critical_z(p, eta), 1.0 / p), 1.0};
      const auto t = lemma2_check<double>(p, eta, std::span(&tight, 1));
      EXPECT_LE(std::abs(t.max_relative_violation), 1e-9) << p << " " << eta;
    }
}

TEST(ChooseEta, Examples) {
  EXPECT_EQ(*choose_eta(2.0, 2.0, 1.0), 0.5);
  EXPECT_NEAR(*choose_eta(3.0, 1.0, 1.0), 3.0, 1e-15);
  EXPECT_FALSE(choose_eta(2.0, 0.0, 1.0).has_value());
  EXPECT_FALSE(choose_eta(2.0, 1.0, 0.0).has_value());
  EXPECT_THROW(choose_eta(1.0, 1.0, 1.0), DomainError);
}

TEST(ChooseEta, CollapsesTheRightHandSide) {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const double p = 1.0 + 5.0 * rng.uniform() + 1e-3;
    const double a = rng.uniform(0.01, 10);
    const double b = rng.uniform(0.01, 10);
    const double eta = *choose_eta(p, a, b);
    const double rhs = (1 + eta) * std::pow(a, p) + lemma_coefficient(p, eta) * std::pow(b, p);
    EXPECT_LE(rel(rhs, std::pow(a + b, p)), 1e-12) << p << " " << a << " " << b;
  }
}

TEST(CollapseIdentity, Examples) {
  EXPECT_EQ(collapse_identity_check(3.0, 1.0), 0.0);
  EXPECT_LE(collapse_identity_check(2.0, 4.0), 1e-15);
  EXPECT_THROW(collapse_identity_check(1.0, 1.0), DomainError);
  EXPECT_THROW(collapse_identity_check(2.0, 0.0), DomainError);
}

TEST(CollapseIdentity, Grid) {
  double worst = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double p = 1.0 + 5.0 * i / 50.0;
    for (int k = 0; k <= 60; ++k) worst = std::max(worst, collapse_identity_check(p, std::pow(10.0, -3.0 + 0.1 * k)));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(LemmaTemplates, LongDoubleAgrees) {
  for (const auto& r : kFrozen)
    EXPECT_LE(std::abs(static_cast<double>(f_eta<long double>(r.p, r.eta)) - r.f), 1e-15 * r.f);
}

}  // namespace
}  // namespace otlab

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otlab/error.hpp"
#include "otlab/random.hpp"

namespace otlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Absolute tolerances. Three tiers: construction error, LP round-off, conjugacy round-off.
inline constexpr double kMetricTol = 1e-12;
inline constexpr double kWeightTol = 1e-12;
inline constexpr double kMarginalTol = 1e-10;
inline constexpr double kFeasTol = 1e-9;

enum class Axiom { ZeroDiagonal, Symmetry, Triangle, Nonnegativity };

std::string_view to_string(Axiom axiom);

/// One failed metric axiom. For Triangle, indices are (i, k, j) with
/// d(i,k) > d(i,j) + d(j,k); magnitude is the excess.
struct MetricViolation {
  Axiom axiom;
  std::vector<Index> indices;
  double magnitude;
};

/// Scans the four metric axioms. An empty result means the matrix is a metric.
/// Throws ShapeError for non-square or non-finite input.
template <typename Derived>
std::vector<MetricViolation> validate_metric(const Eigen::MatrixBase<Derived>& dist,
                                             double tol = kMetricTol) {
  if (dist.rows() != dist.cols()) throw ShapeError("distance matrix must be square");
  if (!dist.allFinite()) throw ShapeError("distance matrix has non-finite entries");

  std::vector<MetricViolation> out;
  const Index n = dist.rows();
  for (Index i = 0; i < n; ++i) {
    if (std::abs(dist(i, i)) > tol) out.push_back({Axiom::ZeroDiagonal, {i}, std::abs(dist(i, i))});
    for (Index j = 0; j < n; ++j) {
      if (dist(i, j) < -tol) out.push_back({Axiom::Nonnegativity, {i, j}, -dist(i, j)});
      if (i < j) {
        const double asym = std::abs(dist(i, j) - dist(j, i));
        if (asym > tol) out.push_back({Axiom::Symmetry, {i, j}, asym});
      }
    }
  }
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) {
      if (i == k) continue;
      for (Index j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double excess = dist(i, k) - (dist(i, j) + dist(j, k));
        if (excess > tol) out.push_back({Axiom::Triangle, {i, k, j}, excess});
      }
    }
  return out;
}

/// A finite metric space: n points, a validated distance matrix, optional labels,
/// and optional coordinates when the space was built from Euclidean points.
class FiniteMetricSpace {
 public:
  /// Throws ShapeError on bad shape, DomainError when an axiom fails.
  static std::shared_ptr<const FiniteMetricSpace> from_distances(
      Matrix dist, std::vector<std::string> labels = {});

  Index size() const { return dist_.rows(); }
  const Matrix& distances() const { return dist_; }
  double distance(Index i, Index j) const { return dist_(i, j); }
  const std::optional<Matrix>& coordinates() const { return coords_; }
  const std::vector<std::string>& labels() const { return labels_; }

  double diameter() const { return dist_.size() == 0 ? 0.0 : dist_.maxCoeff(); }

 private:
  FiniteMetricSpace(Matrix dist, std::optional<Matrix> coords, std::vector<std::string> labels)
      : dist_(std::move(dist)), coords_(std::move(coords)), labels_(std::move(labels)) {}

  friend std::shared_ptr<const FiniteMetricSpace> euclidean_space(const Eigen::Ref<const Matrix>&);

  Matrix dist_;
  std::optional<Matrix> coords_;
  std::vector<std::string> labels_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// Points given as rows of an n x k matrix, Euclidean metric.
SpacePtr euclidean_space(const Eigen::Ref<const Matrix>& coords);

/// Random symmetric matrix from the seeded generator, repaired into a metric by
/// all-pairs shortest-path closure.
SpacePtr random_metric_space(Index n, std::uint64_t seed);
SpacePtr random_metric_space(Index n, Rng& rng);

/// n points drawn uniformly in [0,1]^dim.
SpacePtr random_euclidean_space(Index n, Index dim, std::uint64_t seed);
SpacePtr random_euclidean_space(Index n, Index dim, Rng& rng);

bool same_space(const FiniteMetricSpace& a, const FiniteMetricSpace& b);

/// A probability vector over the points of a space.
class DiscreteMeasure {
 public:
  /// Throws InvalidMeasureError unless weights are nonnegative and sum to 1 within kWeightTol.
  DiscreteMeasure(SpacePtr space, Vector weights);

  static DiscreteMeasure dirac(SpacePtr space, Index point);
  static DiscreteMeasure uniform(SpacePtr space);
  static DiscreteMeasure uniform_on(SpacePtr space, std::span<const Index> support);
  /// Positive weights drawn from the generator and normalized.
  static DiscreteMeasure random(SpacePtr space, Rng& rng);

  const SpacePtr& space() const { return space_; }
  const Vector& weights() const { return weights_; }
  Index size() const { return weights_.size(); }
  double operator[](Index i) const { return weights_(i); }

  std::vector<Index> support() const;

 private:
  SpacePtr space_;
  Vector weights_;
};

/// Same space and weights equal within tol.
bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol = kWeightTol);

/// A joint probability matrix with prescribed marginals (rows: first, columns: second).
class Coupling {
 public:
  /// Throws InvalidCouplingError on shape mismatch, negative entries, or marginals
  /// off by more than kMarginalTol.
  Coupling(Matrix plan, DiscreteMeasure first, DiscreteMeasure second);

  static Coupling product(const DiscreteMeasure& first, const DiscreteMeasure& second);

  const Matrix& plan() const { return plan_; }
  const DiscreteMeasure& first() const { return first_; }
  const DiscreteMeasure& second() const { return second_; }

  double marginal_error() const;

 private:
  Matrix plan_;
  DiscreteMeasure first_;
  DiscreteMeasure second_;
};

/// Kantorovich potentials for cost d^p between two spaces.
struct DualPair {
  Vector a;
  Vector b;
  double p = 1.0;
  SpacePtr first;
  SpacePtr second;
};

/// max_ij (a_i + b_j - c_ij); feasible when <= kFeasTol.
double dual_feasibility_violation(const DualPair& duals);

double dual_objective(const DualPair& duals, const DiscreteMeasure& first,
                      const DiscreteMeasure& second);

/// sum_i w_i d(x0, i)^p.
double p_moment(const DiscreteMeasure& mu, Index x0, double p);

/// Pairwise distances between the points of two spaces: the distance matrix when the
/// spaces coincide, Euclidean cross distances when both carry coordinates of the same
/// dimension. Throws IncompatibleSpacesError otherwise.
Matrix cross_distances(const FiniteMetricSpace& first, const FiniteMetricSpace& second);

/// Entrywise d(i,j)^p.
Matrix cost_matrix(const FiniteMetricSpace& space, double p);
Matrix cost_matrix(const FiniteMetricSpace& first, const FiniteMetricSpace& second, double p);

/// d^p with an exact fast path for p = 1.
inline double pow_cost(double d, double p) { return p == 1.0 ? d : std::pow(d, p); }

}  // namespace otlab

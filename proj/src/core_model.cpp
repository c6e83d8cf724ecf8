#include "otlab/core_model.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace otlab {

std::string_view to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::ZeroDiagonal: return "zero-diagonal";
    case Axiom::Symmetry: return "symmetry";
    case Axiom::Triangle: return "triangle";
    case Axiom::Nonnegativity: return "nonnegativity";
  }
  return "unknown";
}

namespace {

[[noreturn]] void throw_not_metric(const std::vector<MetricViolation>& violations) {
  std::ostringstream msg;
  msg << "not a metric: " << violations.size() << " violation(s); first: "
      << to_string(violations.front().axiom) << " at (";
  for (std::size_t k = 0; k < violations.front().indices.size(); ++k)
    msg << (k ? "," : "") << violations.front().indices[k];
  msg << ") by " << violations.front().magnitude;
  throw DomainError(msg.str());
}

}  // namespace

SpacePtr FiniteMetricSpace::from_distances(Matrix dist, std::vector<std::string> labels) {
  if (dist.rows() == 0) throw EmptySpaceError("a metric space needs at least one point");
  if (!labels.empty() && static_cast<Index>(labels.size()) != dist.rows())
    throw ShapeError("label count does not match the number of points");
  if (auto violations = validate_metric(dist); !violations.empty()) throw_not_metric(violations);
  return SpacePtr(new FiniteMetricSpace(std::move(dist), std::nullopt, std::move(labels)));
}

SpacePtr euclidean_space(const Eigen::Ref<const Matrix>& coords) {
  if (coords.rows() == 0) throw EmptySpaceError("a metric space needs at least one point");
  if (!coords.allFinite()) throw ShapeError("coordinates must be finite");
  const Index n = coords.rows();
  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d = (coords.row(i) - coords.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  if (auto violations = validate_metric(dist); !violations.empty()) throw_not_metric(violations);
  return SpacePtr(new FiniteMetricSpace(std::move(dist), Matrix(coords), {}));
}

SpacePtr random_metric_space(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return random_metric_space(n, rng);
}

SpacePtr random_metric_space(Index n, Rng& rng) {
  if (n <= 0) throw EmptySpaceError("random_metric_space needs n >= 1");
  Matrix dist = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double d = rng.uniform(0.1, 1.0);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  // Floyd-Warshall closure; symmetric updates keep the matrix exactly symmetric.
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double via = dist(i, k) + dist(k, j);
        if (via < dist(i, j)) {
          dist(i, j) = via;
          dist(j, i) = via;
        }
      }
  return FiniteMetricSpace::from_distances(std::move(dist));
}

SpacePtr random_euclidean_space(Index n, Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_euclidean_space(n, dim, rng);
}

SpacePtr random_euclidean_space(Index n, Index dim, Rng& rng) {
  if (n <= 0) throw EmptySpaceError("random_euclidean_space needs n >= 1");
  if (dim <= 0) throw ShapeError("dimension must be positive");
  Matrix coords(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < dim; ++k) coords(i, k) = rng.uniform();
  return euclidean_space(coords);
}

bool same_space(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
  if (&a == &b) return true;
  if (a.size() != b.size() || a.distances() != b.distances()) return false;
  if (a.coordinates().has_value() != b.coordinates().has_value()) return false;
  return !a.coordinates() || *a.coordinates() == *b.coordinates();
}

// ---------------------------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(SpacePtr space, Vector weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_) throw InvalidMeasureError("measure without a space");
  if (weights_.size() != space_->size())
    throw InvalidMeasureError("weight vector length does not match the space");
  if (!weights_.allFinite()) throw InvalidMeasureError("weights must be finite");
  if ((weights_.array() < 0.0).any()) throw InvalidMeasureError("weights must be nonnegative");
  if (std::abs(weights_.sum() - 1.0) > kWeightTol)
    throw InvalidMeasureError("weights must sum to 1");
}

DiscreteMeasure DiscreteMeasure::dirac(SpacePtr space, Index point) {
  if (!space || point < 0 || point >= space->size())
    throw ShapeError("dirac point out of range");
  Vector w = Vector::Zero(space->size());
  w(point) = 1.0;
  return {std::move(space), std::move(w)};
}

DiscreteMeasure DiscreteMeasure::uniform(SpacePtr space) {
  const Index n = space->size();
  return {std::move(space), Vector::Constant(n, 1.0 / static_cast<double>(n))};
}

DiscreteMeasure DiscreteMeasure::uniform_on(SpacePtr space, std::span<const Index> support) {
  if (support.empty()) throw InvalidMeasureError("empty support");
  Vector w = Vector::Zero(space->size());
  const double mass = 1.0 / static_cast<double>(support.size());
  for (Index i : support) {
    if (i < 0 || i >= space->size()) throw ShapeError("support index out of range");
    w(i) = mass;
  }
  return {std::move(space), std::move(w)};
}

DiscreteMeasure DiscreteMeasure::random(SpacePtr space, Rng& rng) {
  Vector w(space->size());
  for (Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(0.05, 1.0);
  w /= w.sum();
  return {std::move(space), std::move(w)};
}

std::vector<Index> DiscreteMeasure::support() const {
  std::vector<Index> out;
  for (Index i = 0; i < weights_.size(); ++i)
    if (weights_(i) > 0.0) out.push_back(i);
  return out;
}

bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  return same_space(*a.space(), *b.space()) &&
         (a.weights() - b.weights()).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------

Coupling::Coupling(Matrix plan, DiscreteMeasure first, DiscreteMeasure second)
    : plan_(std::move(plan)), first_(std::move(first)), second_(std::move(second)) {
  if (plan_.rows() != first_.size() || plan_.cols() != second_.size())
    throw InvalidCouplingError("coupling shape does not match its marginals");
  if (!plan_.allFinite()) throw InvalidCouplingError("coupling entries must be finite");
  if ((plan_.array() < 0.0).any()) throw InvalidCouplingError("coupling entries must be >= 0");
  if (marginal_error() > kMarginalTol)
    throw InvalidCouplingError("coupling marginals do not match the measures");
}

Coupling Coupling::product(const DiscreteMeasure& first, const DiscreteMeasure& second) {
  return {first.weights() * second.weights().transpose(), first, second};
}

double Coupling::marginal_error() const {
  const double rows = (plan_.rowwise().sum() - first_.weights()).cwiseAbs().maxCoeff();
  const double cols = (plan_.colwise().sum().transpose() - second_.weights()).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

// ---------------------------------------------------------------------------

double dual_feasibility_violation(const DualPair& duals) {
  const Matrix cost = cost_matrix(*duals.first, *duals.second, duals.p);
  if (duals.a.size() != cost.rows() || duals.b.size() != cost.cols())
    throw ShapeError("dual vectors do not match the spaces");
  double worst = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < cost.cols(); ++j)
    for (Index i = 0; i < cost.rows(); ++i)
      worst = std::max(worst, duals.a(i) + duals.b(j) - cost(i, j));
  return worst;
}

double dual_objective(const DualPair& duals, const DiscreteMeasure& first,
                      const DiscreteMeasure& second) {
  if (duals.a.size() != first.size() || duals.b.size() != second.size())
    throw ShapeError("dual vectors do not match the measures");
  return duals.a.dot(first.weights()) + duals.b.dot(second.weights());
}

double p_moment(const DiscreteMeasure& mu, Index x0, double p) {
  if (x0 < 0 || x0 >= mu.size()) throw ShapeError("base point out of range");
  if (!(p >= 1.0)) throw DomainError("p_moment needs p >= 1");
  double sum = 0.0;
  for (Index i = 0; i < mu.size(); ++i) sum += mu[i] * pow_cost(mu.space()->distance(x0, i), p);
  return sum;
}

Matrix cross_distances(const FiniteMetricSpace& first, const FiniteMetricSpace& second) {
  if (same_space(first, second)) return first.distances();
  const auto& ca = first.coordinates();
  const auto& cb = second.coordinates();
  if (!ca || !cb || ca->cols() != cb->cols())
    throw IncompatibleSpacesError("measures live on different spaces without shared coordinates");
  Matrix dist(ca->rows(), cb->rows());
  for (Index i = 0; i < ca->rows(); ++i)
    for (Index j = 0; j < cb->rows(); ++j) dist(i, j) = (ca->row(i) - cb->row(j)).norm();
  return dist;
}

Matrix cost_matrix(const FiniteMetricSpace& space, double p) {
  return cost_matrix(space, space, p);
}

Matrix cost_matrix(const FiniteMetricSpace& first, const FiniteMetricSpace& second, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("cost exponent must satisfy p >= 1");
  Matrix dist = cross_distances(first, second);
  if (p == 1.0) return dist;
  return dist.unaryExpr([p](double d) { return std::pow(d, p); });
}

}  // namespace otlab

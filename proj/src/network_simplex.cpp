#include "network_simplex.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

namespace otlab::detail {
namespace {

// Scratch state for one solve. Rows are nodes [0, n), columns are nodes [n, n + m).
class TransportationTree {
 public:
  TransportationTree(const Vector& supply, const Vector& demand, const Matrix& cost)
      : n_(supply.size()),
        m_(demand.size()),
        cost_(cost),
        flow_(Matrix::Zero(n_, m_)),
        basic_(static_cast<std::size_t>(n_ * m_), 0),
        adjacency_(static_cast<std::size_t>(n_ + m_)),
        u_(Vector::Zero(n_)),
        v_(Vector::Zero(m_)) {
    north_west_corner(supply, demand);
  }

  // Returns false once no cell prices out.
  bool pivot(double pricing_tol) {
    compute_potentials();
    const auto entering = first_improving_cell(pricing_tol);
    if (!entering) return false;
    const Index i = *entering / m_;
    const Index j = *entering % m_;

    // Tree path from column node j back to row node i; cells alternate -, +, -, ..., -.
    const std::vector<Index> path = tree_path(n_ + j, i);
    Index leaving = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Index cell = path[k];
      const double f = flow_(cell / m_, cell % m_);
      if (f < theta || (f == theta && cell < leaving)) {
        theta = f;
        leaving = cell;
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      double& f = flow_(path[k] / m_, path[k] % m_);
      f = (k % 2 == 0) ? std::max(0.0, f - theta) : f + theta;
    }
    flow_(leaving / m_, leaving % m_) = 0.0;
    flow_(i, j) = theta;
    remove_basic(leaving);
    add_basic(*entering);
    return true;
  }

  void compute_potentials() {
    // BFS from row 0 over the spanning tree.
    std::vector<char> seen(static_cast<std::size_t>(n_ + m_), 0);
    std::vector<Index> queue{0};
    seen[0] = 1;
    u_(0) = 0.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Index node = queue[head];
      for (Index cell : adjacency_[static_cast<std::size_t>(node)]) {
        const Index i = cell / m_;
        const Index j = cell % m_;
        const Index other = node < n_ ? n_ + j : i;
        if (seen[static_cast<std::size_t>(other)]) continue;
        seen[static_cast<std::size_t>(other)] = 1;
        if (node < n_)
          v_(j) = cost_(i, j) - u_(i);
        else
          u_(i) = cost_(i, j) - v_(j);
        queue.push_back(other);
      }
    }
  }

  const Matrix& flow() const { return flow_; }
  const Vector& u() const { return u_; }
  const Vector& v() const { return v_; }

 private:
  void north_west_corner(const Vector& supply, const Vector& demand) {
    Vector rs = supply;
    Vector cs = demand;
    Index i = 0;
    Index j = 0;
    while (true) {
      double q;
      if (i == n_ - 1)
        q = cs(j);
      else if (j == m_ - 1)
        q = rs(i);
      else
        q = std::min(rs(i), cs(j));
      q = std::max(q, 0.0);
      flow_(i, j) = q;
      add_basic(i * m_ + j);
      rs(i) -= q;
      cs(j) -= q;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (i == n_ - 1)
        ++j;
      else if (j == m_ - 1)
        ++i;
      else if (rs(i) <= cs(j))
        ++i;
      else
        ++j;
    }
  }

  std::optional<Index> first_improving_cell(double tol) const {
    for (Index i = 0; i < n_; ++i)
      for (Index j = 0; j < m_; ++j) {
        if (basic_[static_cast<std::size_t>(i * m_ + j)]) continue;
        if (cost_(i, j) - u_(i) - v_(j) < -tol) return i * m_ + j;
      }
    return std::nullopt;
  }

  std::vector<Index> tree_path(Index from, Index to) const {
    std::vector<Index> parent_cell(static_cast<std::size_t>(n_ + m_), -1);
    std::vector<Index> parent_node(static_cast<std::size_t>(n_ + m_), -1);
    std::vector<char> seen(static_cast<std::size_t>(n_ + m_), 0);
    std::vector<Index> queue{to};
    seen[static_cast<std::size_t>(to)] = 1;
    for (std::size_t head = 0; head < queue.size() && !seen[static_cast<std::size_t>(from)]; ++head) {
      const Index node = queue[head];
      for (Index cell : adjacency_[static_cast<std::size_t>(node)]) {
        const Index other = node < n_ ? n_ + cell % m_ : cell / m_;
        if (seen[static_cast<std::size_t>(other)]) continue;
        seen[static_cast<std::size_t>(other)] = 1;
        parent_cell[static_cast<std::size_t>(other)] = cell;
        parent_node[static_cast<std::size_t>(other)] = node;
        queue.push_back(other);
      }
    }
    std::vector<Index> path;
    for (Index node = from; node != to; node = parent_node[static_cast<std::size_t>(node)])
      path.push_back(parent_cell[static_cast<std::size_t>(node)]);
    return path;
  }

  void add_basic(Index cell) {
    basic_[static_cast<std::size_t>(cell)] = 1;
    adjacency_[static_cast<std::size_t>(cell / m_)].push_back(cell);
    adjacency_[static_cast<std::size_t>(n_ + cell % m_)].push_back(cell);
  }

  void remove_basic(Index cell) {
    basic_[static_cast<std::size_t>(cell)] = 0;
    for (Index node : {cell / m_, n_ + cell % m_}) {
      auto& list = adjacency_[static_cast<std::size_t>(node)];
      list.erase(std::find(list.begin(), list.end(), cell));
    }
  }

  Index n_;
  Index m_;
  const Matrix& cost_;
  Matrix flow_;
  std::vector<char> basic_;
  std::vector<std::vector<Index>> adjacency_;
  Vector u_;
  Vector v_;
};

}  // namespace

SimplexResult solve_transportation(const Vector& supply, const Vector& demand, const Matrix& cost,
                                   std::size_t max_iterations) {
  if (supply.size() == 0 || demand.size() == 0) throw SolverError("empty transportation problem");
  if (cost.rows() != supply.size() || cost.cols() != demand.size())
    throw ShapeError("cost matrix does not match supplies and demands");

  const double scale = 1.0 + cost.cwiseAbs().maxCoeff();
  const double pricing_tol = 1e-12 * scale;

  TransportationTree tree(supply, demand, cost);
  std::size_t iterations = 0;
  while (tree.pivot(pricing_tol)) {
    if (++iterations > max_iterations)
      throw SolverError("network simplex exceeded its iteration limit");
  }

  SimplexResult result{tree.flow(), tree.u(), tree.v(), iterations};
  // Tighten column potentials to the c-transform of the row potentials so that
  // u_i + v_j <= c_ij holds up to one rounding.
  for (Index j = 0; j < cost.cols(); ++j) {
    const double tight = (cost.col(j) - result.row_potential).minCoeff();
    result.col_potential(j) = std::min(result.col_potential(j), tight);
  }
  return result;
}

}  // namespace otlab::detail

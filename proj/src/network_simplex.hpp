#pragma once

#include <cstddef>

#include "otlab/core_model.hpp"

namespace otlab::detail {

struct SimplexResult {
  Matrix flow;
  Vector row_potential;
  Vector col_potential;
  std::size_t iterations = 0;
};

/// Balanced transportation problem min <cost, flow> subject to row sums = supply and
/// column sums = demand, flow >= 0. All supplies and demands must be positive.
///
/// Primal network simplex on the bipartite graph with a spanning-tree basis of
/// n + m - 1 cells, north-west corner start, and Bland's smallest-index rule for both
/// the entering and the leaving cell. On return the potentials satisfy
/// u_i + v_j = c_ij on basic cells and u_i + v_j <= c_ij everywhere (to one rounding).
SimplexResult solve_transportation(const Vector& supply, const Vector& demand, const Matrix& cost,
                                   std::size_t max_iterations);

}  // namespace otlab::detail

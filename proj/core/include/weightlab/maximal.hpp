#pragma once

#include <vector>

#include "weightlab/geometry.hpp"
#include "weightlab/weights.hpp"

namespace weightlab {

/// Non-negative function sampled on the cells of a uniform grid.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(Grid g, std::vector<double> v);
  explicit GridFunction(Grid g);

  double max() const;
  /// Sum of values times cell volume.
  double integral() const;
};

/// Cell averages of a weight on a grid.
GridFunction sample_weight(const Weight& w, const Grid& grid);

/// Exact M(chi_Q)(x) for the uncentered cube maximal operator. In 1-D this is
/// side(Q) / dist(x, far endpoint) off Q; in 2-D the supremum over side
/// lengths is taken over the finite set of breakpoints and critical points
/// of the piecewise rational overlap function.
double m_chi_cube(const Cube& q, const Point& x);

/// Certified bounds of M(chi_Q) over a box (the operator is monotone in the
/// distance to Q along every axis).
std::pair<double, double> m_chi_cube_bounds(const Cube& q, const Box& cell);

struct MaximalOptions {
  /// 2-D only: use every side length instead of powers of two plus the box.
  bool all_sides = false;
};

/// Sup of averages of |f| over grid-aligned cubes containing each cell. In 1-D every
/// window length is used; in 2-D side lengths are powers of two plus the
/// full box unless options.all_sides is set.
GridFunction hl_maximal(const GridFunction& f, const MaximalOptions& options = {});

/// Dyadic maximal function of w relative to Q on the 2^depth grid of Q.
GridFunction dyadic_local_maximal(const Weight& w, const Cube& q, int depth);

/// M(chi_Q w) sampled on the grid over Q (1-D) or 3Q (2-D) with
/// `cells_per_side` cells across Q.
GridFunction maximal_of_localized(const Weight& w, const Cube& q, int cells_per_side);

/// Lower approximation of int_Q M(chi_Q w) from maximal_of_localized.
double localized_maximal_integral(const Weight& w, const Cube& q, int cells_per_side);

/// Sums of w over the dyadic tree of Q down to `depth`, leaves first computed
/// through the integral oracle and parents as exact sums of children.
/// sums[k] holds 2^{kn} entries in row-major order.
std::vector<std::vector<double>> dyadic_sums(const Weight& w, const Cube& q, int depth);

struct CzCube {
  DyadicCube cube;
  /// Exact dyadic sum of w over the cube.
  double mass = 0.0;
  double volume = 0.0;
};

/// Calderon-Zygmund decomposition of w on Q at height lambda: the maximal
/// dyadic subcubes of Q, down to level `depth`, whose average exceeds lambda.
/// Comparisons are made as mass > lambda * volume with volumes scaled by
/// exact powers of two, so the selection and its sandwich bounds are exact in
/// floating point. Output is ordered by (level, index).
std::vector<CzCube> cz_decompose(const Weight& w, const Cube& q, double lambda, int depth);

}  // namespace weightlab

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace weightlab {

/// A point of R^n for n in {1, 2}; the second coordinate is ignored when n = 1.
using Point = std::array<double, 2>;

/// Axis-parallel box [lo, hi) in R^n.
struct Box {
  int dim = 1;
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  double volume() const;
  bool empty() const;
  bool contains(const Box& other) const;
  Box intersect(const Box& other) const;
};

/// Axis-parallel cube given by its center and half side length.
class Cube {
 public:
  Cube() = default;
  Cube(int dim, Point center, double half_side);

  static Cube interval(double lo, double hi);
  static Cube square(double x0, double y0, double side);

  int dim() const { return dim_; }
  const Point& center() const { return center_; }
  double half_side() const { return half_side_; }
  double side() const { return 2.0 * half_side_; }
  double lo(int axis) const { return center_[axis] - half_side_; }
  double hi(int axis) const { return center_[axis] + half_side_; }
  double volume() const;

  /// Same center, half side scaled by t > 0.
  Cube dilate(double t) const;
  Box box() const;
  /// Half-open membership, like every cube and cell in the library.
  bool contains(const Point& x) const;
  /// L-infinity distance from the center of the cube to x.
  double center_distance(const Point& x) const;
  /// L-infinity norm of the center.
  double center_norm() const;

  std::string to_string() const;

  bool operator==(const Cube&) const = default;

 private:
  int dim_ = 1;
  Point center_{0.0, 0.0};
  double half_side_ = 0.5;
};

/// Dyadic cube relative to an ambient cube: level k splits every axis of the
/// ambient cube into 2^k equal half-open pieces and `index` picks one.
struct DyadicCube {
  int level = 0;
  std::array<std::int64_t, 2> index{0, 0};

  DyadicCube parent() const;
  std::vector<DyadicCube> children(int dim) const;
  /// True when `other` lies inside this cube (nesting in the dyadic tree).
  bool contains(const DyadicCube& other) const;
  Cube to_cube(const Cube& ambient) const;

  auto operator<=>(const DyadicCube&) const = default;
};

/// Finite surrogate for "all cubes": an explicit, ordered list.
struct CubeFamily {
  std::vector<Cube> cubes;
  std::string policy;
  Cube ambient;
  /// One past the last cube of each dyadic level, used for refinement traces.
  std::vector<std::size_t> level_ends;
};

inline constexpr int kMaxFamilyDepth = 14;

/// All dyadic subcubes of `box` at levels 0..depth, ordered by level then index.
CubeFamily enumerate_dyadic(const Cube& box, int depth, int max_depth = kMaxFamilyDepth);

/// Dyadic cubes (level, index) of levels 0..depth in lexicographic order.
std::vector<DyadicCube> dyadic_cubes(int dim, int depth);

/// Uniform grid of N^n cells over a cube. Cells are half-open and stored
/// row-major: linear index = i + N * j.
struct Grid {
  Cube box;
  int resolution = 1;

  int dim() const { return box.dim(); }
  std::size_t cell_count() const;
  double cell_width() const { return box.side() / resolution; }
  double cell_volume() const;
  Box cell_box(std::size_t index) const;
  Point cell_center(std::size_t index) const;
  std::array<int, 2> cell_coords(std::size_t index) const;
  std::size_t cell_index(int i, int j = 0) const;
  /// Cell containing x, or -1 when x is outside the box.
  std::int64_t locate(const Point& x) const;
  /// log2(resolution); throws when resolution is not a power of two.
  int levels() const;
};

/// Union of grid cells, used for open sets and measurable subsets.
struct CellSet {
  Grid grid;
  std::vector<std::uint8_t> mask;

  explicit CellSet(Grid g);
  CellSet(Grid g, std::vector<std::uint8_t> m);
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  double measure() const;
};

struct GapBand {
  double lower = 5.0;
  double upper = 15.0;
};

struct WhitneyOptions {
  double R = 1.0;
  /// Defaults to [5R, 15R] when unset.
  bool custom_band = false;
  GapBand band{};
  /// Throw when a cell at grid resolution cannot reach the lower band edge.
  bool strict = false;
};

/// Whitney cube: a dyadic cube of the grid's box together with its achieved
/// distance-to-complement over side ratio.
struct WhitneyCube {
  DyadicCube cube;
  double ratio = 0.0;
  /// Cube sits at grid resolution and is kept only to complete the cover.
  bool resolution_floor = false;
};

struct WhitneyResult {
  std::vector<WhitneyCube> cubes;
  GapBand band;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t floor_count = 0;
};

/// Whitney decomposition of a union of grid cells. Distances are L-infinity
/// distances between cell boundaries; the complement includes everything
/// outside the grid box. Output is ordered by (level, index).
WhitneyResult whitney_decompose(const CellSet& omega, const WhitneyOptions& options = {});

/// Maximum over cell centers of sum_j chi_{R Q_j}, restricted to the grid box.
int whitney_overlap(const WhitneyResult& result, const Grid& grid, double R);

/// L-infinity distance, in cell widths, from every cell to the complement of
/// the mask (cells outside the grid count as complement).
std::vector<std::int64_t> chebyshev_gap(const CellSet& omega);

}  // namespace weightlab

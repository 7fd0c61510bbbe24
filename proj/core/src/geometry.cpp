#include "weightlab/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace weightlab {

namespace {

void check_dim(int dim) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("dimension must be 1 or 2, got " + std::to_string(dim));
  }
}

}  // namespace

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= std::max(0.0, hi[i] - lo[i]);
  return v;
}

bool Box::empty() const {
  for (int i = 0; i < dim; ++i) {
    if (!(hi[i] > lo[i])) return true;
  }
  return false;
}

bool Box::contains(const Box& other) const {
  for (int i = 0; i < dim; ++i) {
    if (other.lo[i] < lo[i] || other.hi[i] > hi[i]) return false;
  }
  return true;
}

Box Box::intersect(const Box& other) const {
  Box out{dim, lo, hi};
  for (int i = 0; i < dim; ++i) {
    out.lo[i] = std::max(lo[i], other.lo[i]);
    out.hi[i] = std::min(hi[i], other.hi[i]);
    if (out.hi[i] < out.lo[i]) out.hi[i] = out.lo[i];
  }
  return out;
}

Cube::Cube(int dim, Point center, double half_side)
    : dim_(dim), center_(center), half_side_(half_side) {
  check_dim(dim);
  if (!(half_side > 0.0) || !std::isfinite(half_side)) {
    throw std::invalid_argument("cube half side must be positive and finite");
  }
  if (dim == 1) center_[1] = 0.0;
}

Cube Cube::interval(double lo, double hi) {
  return Cube(1, {0.5 * (lo + hi), 0.0}, 0.5 * (hi - lo));
}

Cube Cube::square(double x0, double y0, double side) {
  return Cube(2, {x0 + 0.5 * side, y0 + 0.5 * side}, 0.5 * side);
}

double Cube::volume() const { return dim_ == 1 ? side() : side() * side(); }

Cube Cube::dilate(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("dilation factor must be positive");
  return Cube(dim_, center_, half_side_ * t);
}

Box Cube::box() const {
  Box b;
  b.dim = dim_;
  for (int i = 0; i < dim_; ++i) {
    b.lo[i] = lo(i);
    b.hi[i] = hi(i);
  }
  return b;
}

bool Cube::contains(const Point& x) const {
  for (int i = 0; i < dim_; ++i) {
    if (x[i] < lo(i) || x[i] >= hi(i)) return false;
  }
  return true;
}

double Cube::center_distance(const Point& x) const {
  double d = 0.0;
  for (int i = 0; i < dim_; ++i) d = std::max(d, std::abs(x[i] - center_[i]));
  return d;
}

double Cube::center_norm() const {
  double d = 0.0;
  for (int i = 0; i < dim_; ++i) d = std::max(d, std::abs(center_[i]));
  return d;
}

std::string Cube::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (int i = 0; i < dim_; ++i) {
    if (i) os << " x ";
    os << lo(i) << "," << hi(i);
  }
  os << ")";
  return os.str();
}

DyadicCube DyadicCube::parent() const {
  if (level == 0) throw std::logic_error("level-zero dyadic cube has no parent");
  DyadicCube p;
  p.level = level - 1;
  // Floor division keeps negative indices consistent.
  for (int i = 0; i < 2; ++i) p.index[i] = index[i] >> 1;
  return p;
}

std::vector<DyadicCube> DyadicCube::children(int dim) const {
  std::vector<DyadicCube> out;
  const int ny = dim == 2 ? 2 : 1;
  for (int b = 0; b < ny; ++b) {
    for (int a = 0; a < 2; ++a) {
      DyadicCube c;
      c.level = level + 1;
      c.index = {2 * index[0] + a, dim == 2 ? 2 * index[1] + b : 0};
      out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.level < level) return false;
  const int shift = other.level - level;
  return (other.index[0] >> shift) == index[0] && (other.index[1] >> shift) == index[1];
}

Cube DyadicCube::to_cube(const Cube& ambient) const {
  const double side = ambient.side() / std::ldexp(1.0, level);
  Point c{0.0, 0.0};
  for (int i = 0; i < ambient.dim(); ++i) {
    c[i] = ambient.lo(i) + (static_cast<double>(index[i]) + 0.5) * side;
  }
  return Cube(ambient.dim(), c, 0.5 * side);
}

std::vector<DyadicCube> dyadic_cubes(int dim, int depth) {
  check_dim(dim);
  std::vector<DyadicCube> out;
  for (int k = 0; k <= depth; ++k) {
    const std::int64_t m = std::int64_t{1} << k;
    const std::int64_t my = dim == 2 ? m : 1;
    for (std::int64_t i = 0; i < m; ++i) {
      for (std::int64_t j = 0; j < my; ++j) {
        out.push_back(DyadicCube{k, {i, j}});
      }
    }
  }
  return out;
}

CubeFamily enumerate_dyadic(const Cube& box, int depth, int max_depth) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  if (depth > max_depth) {
    throw std::invalid_argument("dyadic depth " + std::to_string(depth) +
                                " exceeds the configured maximum " + std::to_string(max_depth));
  }
  CubeFamily family;
  family.ambient = box;
  family.policy = "dyadic-depth-" + std::to_string(depth);
  for (const auto& d : dyadic_cubes(box.dim(), depth)) {
    if (!family.cubes.empty() && d.level != static_cast<int>(family.level_ends.size())) {
      family.level_ends.push_back(family.cubes.size());
    }
    family.cubes.push_back(d.to_cube(box));
  }
  family.level_ends.push_back(family.cubes.size());
  return family;
}

std::size_t Grid::cell_count() const {
  const auto n = static_cast<std::size_t>(resolution);
  return dim() == 1 ? n : n * n;
}

double Grid::cell_volume() const {
  const double h = cell_width();
  return dim() == 1 ? h : h * h;
}

std::array<int, 2> Grid::cell_coords(std::size_t index) const {
  const auto n = static_cast<std::size_t>(resolution);
  return {static_cast<int>(index % n), static_cast<int>(index / n)};
}

std::size_t Grid::cell_index(int i, int j) const {
  return static_cast<std::size_t>(i) + static_cast<std::size_t>(resolution) * static_cast<std::size_t>(j);
}

Box Grid::cell_box(std::size_t index) const {
  const auto ij = cell_coords(index);
  const double h = cell_width();
  Box b;
  b.dim = dim();
  for (int a = 0; a < dim(); ++a) {
    b.lo[a] = box.lo(a) + ij[a] * h;
    b.hi[a] = box.lo(a) + (ij[a] + 1) * h;
  }
  return b;
}

Point Grid::cell_center(std::size_t index) const {
  const auto ij = cell_coords(index);
  const double h = cell_width();
  Point p{0.0, 0.0};
  for (int a = 0; a < dim(); ++a) p[a] = box.lo(a) + (ij[a] + 0.5) * h;
  return p;
}

std::int64_t Grid::locate(const Point& x) const {
  std::array<int, 2> ij{0, 0};
  const double h = cell_width();
  for (int a = 0; a < dim(); ++a) {
    const double t = std::floor((x[a] - box.lo(a)) / h);
    if (t < 0 || t >= resolution) return -1;
    ij[a] = static_cast<int>(t);
  }
  return static_cast<std::int64_t>(cell_index(ij[0], ij[1]));
}

int Grid::levels() const {
  if (resolution <= 0 || !std::has_single_bit(static_cast<unsigned>(resolution))) {
    throw std::invalid_argument("grid resolution must be a power of two, got " +
                                std::to_string(resolution));
  }
  return std::countr_zero(static_cast<unsigned>(resolution));
}

CellSet::CellSet(Grid g) : grid(g), mask(g.cell_count(), 0) {}

CellSet::CellSet(Grid g, std::vector<std::uint8_t> m) : grid(g), mask(std::move(m)) {
  if (mask.size() != grid.cell_count()) {
    throw std::invalid_argument("cell mask size does not match the grid");
  }
}

std::size_t CellSet::count() const {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
}

double CellSet::measure() const { return static_cast<double>(count()) * grid.cell_volume(); }

std::vector<std::int64_t> chebyshev_gap(const CellSet& omega) {
  const int n = omega.grid.resolution;
  const int dim = omega.grid.dim();
  const int w = n + 2;
  const int h = dim == 2 ? n + 2 : 1;
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // Padded grid: a ring of complement cells surrounds the box.
  std::vector<std::int64_t> d(static_cast<std::size_t>(w) * h, 0);
  auto at = [&](int i, int j) -> std::int64_t& { return d[static_cast<std::size_t>(i) + static_cast<std::size_t>(w) * j]; };
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const int ci = i - 1;
      const int cj = dim == 2 ? j - 1 : 0;
      const bool inside = ci >= 0 && ci < n && cj >= 0 && cj < (dim == 2 ? n : 1);
      at(i, j) = inside && omega.mask[omega.grid.cell_index(ci, cj)] ? kInf : 0;
    }
  }
  // Two-pass chamfer with the 8-neighbourhood is exact for the Chebyshev metric.
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      auto& v = at(i, j);
      if (i > 0) v = std::min(v, at(i - 1, j) + 1);
      if (dim == 2 && j > 0) {
        v = std::min(v, at(i, j - 1) + 1);
        if (i > 0) v = std::min(v, at(i - 1, j - 1) + 1);
        if (i + 1 < w) v = std::min(v, at(i + 1, j - 1) + 1);
      }
    }
  }
  for (int j = h - 1; j >= 0; --j) {
    for (int i = w - 1; i >= 0; --i) {
      auto& v = at(i, j);
      if (i + 1 < w) v = std::min(v, at(i + 1, j) + 1);
      if (dim == 2 && j + 1 < h) {
        v = std::min(v, at(i, j + 1) + 1);
        if (i + 1 < w) v = std::min(v, at(i + 1, j + 1) + 1);
        if (i > 0) v = std::min(v, at(i - 1, j + 1) + 1);
      }
    }
  }
  std::vector<std::int64_t> gap(omega.grid.cell_count(), -1);
  for (std::size_t c = 0; c < gap.size(); ++c) {
    if (!omega.mask[c]) continue;
    const auto ij = omega.grid.cell_coords(c);
    gap[c] = at(ij[0] + 1, dim == 2 ? ij[1] + 1 : 0) - 1;
  }
  return gap;
}

namespace {

// Per-level block minimum of the gap (-1 marks blocks leaving omega).
struct GapPyramid {
  int dim;
  int levels;
  std::vector<std::vector<std::int64_t>> mins;  // mins[k] has 2^{k n} entries

  std::int64_t at(int level, std::int64_t i, std::int64_t j) const {
    const std::int64_t m = std::int64_t{1} << level;
    return mins[level][static_cast<std::size_t>(i + m * j)];
  }
};

GapPyramid build_pyramid(const CellSet& omega, const std::vector<std::int64_t>& gap) {
  GapPyramid pyr{omega.grid.dim(), omega.grid.levels(), {}};
  pyr.mins.resize(pyr.levels + 1);
  pyr.mins[pyr.levels] = gap;
  for (int k = pyr.levels - 1; k >= 0; --k) {
    const std::int64_t m = std::int64_t{1} << k;
    const std::int64_t my = pyr.dim == 2 ? m : 1;
    auto& cur = pyr.mins[k];
    cur.assign(static_cast<std::size_t>(m * my), 0);
    for (std::int64_t j = 0; j < my; ++j) {
      for (std::int64_t i = 0; i < m; ++i) {
        std::int64_t v = std::numeric_limits<std::int64_t>::max();
        bool outside = false;
        for (int b = 0; b < (pyr.dim == 2 ? 2 : 1); ++b) {
          for (int a = 0; a < 2; ++a) {
            const std::int64_t g = pyr.at(k + 1, 2 * i + a, pyr.dim == 2 ? 2 * j + b : 0);
            if (g < 0) outside = true;
            v = std::min(v, g);
          }
        }
        cur[static_cast<std::size_t>(i + m * j)] = outside ? -1 : v;
      }
    }
  }
  return pyr;
}

}  // namespace

WhitneyResult whitney_decompose(const CellSet& omega, const WhitneyOptions& options) {
  if (options.R < 1.0) throw std::invalid_argument("Whitney parameter R must be >= 1");
  WhitneyResult result;
  result.band = options.custom_band ? options.band : GapBand{5.0 * options.R, 15.0 * options.R};
  if (!(result.band.lower > 0.0) || result.band.upper < result.band.lower) {
    throw std::invalid_argument("Whitney gap band must satisfy 0 < lower <= upper");
  }
  if (omega.empty()) return result;
  const int levels = omega.grid.levels();
  const int dim = omega.grid.dim();
  const auto gap = chebyshev_gap(omega);
  const auto pyr = build_pyramid(omega, gap);

  result.min_ratio = std::numeric_limits<double>::infinity();
  result.max_ratio = 0.0;
  // Depth-first on a stack, then sorted, keeps memory small for deep grids.
  std::vector<DyadicCube> stack{DyadicCube{0, {0, 0}}};
  while (!stack.empty()) {
    const DyadicCube d = stack.back();
    stack.pop_back();
    const std::int64_t block_gap = pyr.at(d.level, d.index[0], d.index[1]);
    const std::int64_t cells_per_side = std::int64_t{1} << (levels - d.level);
    if (block_gap >= 0) {
      const double ratio = static_cast<double>(block_gap) / static_cast<double>(cells_per_side);
      if (ratio >= result.band.lower || d.level == levels) {
        const bool floor = ratio < result.band.lower;
        if (floor && options.strict) {
          const auto idx = omega.grid.cell_index(static_cast<int>(d.index[0]), static_cast<int>(d.index[1]));
          const auto b = omega.grid.cell_box(idx);
          std::ostringstream os;
          os << "Whitney gap band lower edge " << result.band.lower
             << " unreachable at grid resolution for cell (" << d.index[0] << "," << d.index[1]
             << ") starting at " << b.lo[0] << (dim == 2 ? "," + std::to_string(b.lo[1]) : "")
             << "; achieved ratio " << ratio;
          throw std::runtime_error(os.str());
        }
        result.cubes.push_back(WhitneyCube{d, ratio, floor});
        if (floor) ++result.floor_count;
        result.min_ratio = std::min(result.min_ratio, ratio);
        result.max_ratio = std::max(result.max_ratio, ratio);
        continue;
      }
    }
    if (d.level == levels) continue;  // a cell outside omega
    // Descend only into blocks that meet omega.
    for (const auto& c : d.children(dim)) {
      const std::int64_t span = std::int64_t{1} << (levels - c.level);
      bool meets = false;
      for (std::int64_t j = 0; j < (dim == 2 ? span : 1) && !meets; ++j) {
        for (std::int64_t i = 0; i < span && !meets; ++i) {
          const auto idx = omega.grid.cell_index(static_cast<int>(c.index[0] * span + i),
                                                 static_cast<int>(dim == 2 ? c.index[1] * span + j : 0));
          meets = omega.mask[idx] != 0;
        }
      }
      if (meets) stack.push_back(c);
    }
  }
  std::sort(result.cubes.begin(), result.cubes.end(),
            [](const WhitneyCube& a, const WhitneyCube& b) { return a.cube < b.cube; });
  return result;
}

int whitney_overlap(const WhitneyResult& result, const Grid& grid, double R) {
  std::vector<int> counts(grid.cell_count(), 0);
  for (const auto& wc : result.cubes) {
    const Cube q = wc.cube.to_cube(grid.box).dilate(R);
    const double h = grid.cell_width();
    std::array<int, 2> lo{0, 0}, hi{0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
      // Cells whose centers lie in the closed dilated cube.
      lo[a] = std::max(0, static_cast<int>(std::ceil((q.lo(a) - grid.box.lo(a)) / h - 0.5)));
      hi[a] = std::min(grid.resolution - 1, static_cast<int>(std::floor((q.hi(a) - grid.box.lo(a)) / h - 0.5)));
    }
    for (int j = lo[1]; j <= (grid.dim() == 2 ? hi[1] : 0); ++j) {
      for (int i = lo[0]; i <= hi[0]; ++i) ++counts[grid.cell_index(i, j)];
    }
  }
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

}  // namespace weightlab

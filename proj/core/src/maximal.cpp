#include "weightlab/maximal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace weightlab {

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.cell_count()) throw std::invalid_argument("grid function size mismatch");
}

GridFunction::GridFunction(Grid g) : grid(g), values(g.cell_count(), 0.0) {}

double GridFunction::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double GridFunction::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

GridFunction sample_weight(const Weight& w, const Grid& grid) {
  GridFunction f(grid);
  const double cv = grid.cell_volume();
  for (std::size_t c = 0; c < f.values.size(); ++c) f.values[c] = w.integral(grid.cell_box(c)) / cv;
  return f;
}

namespace {

// Best overlap of an interval of length l containing a point at distance e
// from an interval of length s.
inline double overlap(double l, double e, double s) { return std::min(std::max(l - e, 0.0), s); }

double m_chi_from_gaps(double e0, double e1, double side, int dim) {
  if (dim == 1) return e0 <= 0.0 ? 1.0 : side / (e0 + side);
  if (e0 <= 0.0 && e1 <= 0.0) return 1.0;
  auto ratio = [&](double l) {
    if (!(l > 0.0)) return 0.0;
    return overlap(l, e0, side) * overlap(l, e1, side) / (l * l);
  };
  double best = 0.0;
  const double candidates[] = {e0 + side, e1 + side, 2.0 * e0, 2.0 * e1,
                               e0 + e1 > 0.0 ? 2.0 * e0 * e1 / (e0 + e1) : 0.0, e0, e1};
  for (double l : candidates) {
    if (l >= std::max(e0, e1)) best = std::max(best, ratio(l));
  }
  return best;
}

double gap_to(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

}  // namespace

double m_chi_cube(const Cube& q, const Point& x) {
  const double e0 = gap_to(x[0], q.lo(0), q.hi(0));
  const double e1 = q.dim() == 2 ? gap_to(x[1], q.lo(1), q.hi(1)) : 0.0;
  return m_chi_from_gaps(e0, e1, q.side(), q.dim());
}

std::pair<double, double> m_chi_cube_bounds(const Cube& q, const Box& cell) {
  std::array<double, 2> near{0.0, 0.0}, far{0.0, 0.0};
  for (int a = 0; a < q.dim(); ++a) {
    const double g0 = gap_to(cell.lo[a], q.lo(a), q.hi(a));
    const double g1 = gap_to(cell.hi[a], q.lo(a), q.hi(a));
    far[a] = std::max(g0, g1);
    // The box may straddle Q along this axis.
    near[a] = (cell.lo[a] <= q.hi(a) && cell.hi[a] >= q.lo(a)) ? 0.0 : std::min(g0, g1);
  }
  return {m_chi_from_gaps(far[0], far[1], q.side(), q.dim()), m_chi_from_gaps(near[0], near[1], q.side(), q.dim())};
}

namespace {

// out[i] = max(out[i], max of a[j] for j in [i - s + 1, i] within [0, len)),
// for i in [0, n).
void window_max_into(const double* a, std::size_t len, std::size_t s, std::size_t n, double* out,
                     std::vector<std::size_t>& dq) {
  dq.resize(len);
  std::size_t head = 0, tail = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hi = std::min(i, len - 1);
    while (next <= hi) {
      while (tail > head && a[dq[tail - 1]] <= a[next]) --tail;
      dq[tail++] = next++;
    }
    const std::size_t lo = i + 1 >= s ? i + 1 - s : 0;
    while (dq[head] < lo) ++head;
    out[i] = std::max(out[i], a[dq[head]]);
  }
}

void window_max(const double* a, std::size_t len, std::size_t s, std::size_t n, double* out,
                std::vector<std::size_t>& dq) {
  std::fill(out, out + n, -1.0);
  window_max_into(a, len, s, n, out, dq);
}

GridFunction hl_maximal_1d(const GridFunction& f) {
  const std::size_t n = f.values.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + f.values[i];
  GridFunction out(f.grid, f.values);
  std::vector<double> avg(n);
  std::vector<std::size_t> dq;
  for (std::size_t s = 2; s <= n; ++s) {
    const std::size_t len = n - s + 1;
    const double inv = 1.0 / static_cast<double>(s);
    for (std::size_t j = 0; j < len; ++j) avg[j] = (prefix[j + s] - prefix[j]) * inv;
    window_max_into(avg.data(), len, s, n, out.values.data(), dq);
  }
  return out;
}

GridFunction hl_maximal_2d(const GridFunction& f, const MaximalOptions& options) {
  const std::size_t n = static_cast<std::size_t>(f.grid.resolution);
  const std::size_t w = n + 1;
  std::vector<double> prefix(w * w, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      row += f.values[i + n * j];
      prefix[(i + 1) + w * (j + 1)] = prefix[(i + 1) + w * j] + row;
    }
  }
  std::vector<std::size_t> sides;
  if (options.all_sides) {
    for (std::size_t s = 2; s <= n; ++s) sides.push_back(s);
  } else {
    for (std::size_t s = 2; s < n; s *= 2) sides.push_back(s);
    if (n >= 2) sides.push_back(n);
  }
  GridFunction out(f.grid, f.values);
  std::vector<double> avg, rowmax, col, colout;
  std::vector<std::size_t> dq;
  for (std::size_t s : sides) {
    const std::size_t len = n - s + 1;
    const double inv = 1.0 / static_cast<double>(s * s);
    avg.assign(len * len, 0.0);
    for (std::size_t v = 0; v < len; ++v) {
      for (std::size_t u = 0; u < len; ++u) {
        avg[u + len * v] = (prefix[(u + s) + w * (v + s)] - prefix[u + w * (v + s)] - prefix[(u + s) + w * v] +
                            prefix[u + w * v]) * inv;
      }
    }
    // Window max along x for each placement row, then along y.
    rowmax.assign(n * len, 0.0);
    for (std::size_t v = 0; v < len; ++v) window_max(&avg[len * v], len, s, n, &rowmax[n * v], dq);
    col.resize(len);
    colout.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t v = 0; v < len; ++v) col[v] = rowmax[i + n * v];
      window_max(col.data(), len, s, n, colout.data(), dq);
      for (std::size_t j = 0; j < n; ++j) out.values[i + n * j] = std::max(out.values[i + n * j], colout[j]);
    }
  }
  return out;
}

}  // namespace

GridFunction hl_maximal(const GridFunction& f, const MaximalOptions& options) {
  for (double v : f.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("hl_maximal requires finite values");
  }
  GridFunction g = f;
  for (auto& v : g.values) v = std::abs(v);
  return f.grid.dim() == 1 ? hl_maximal_1d(g) : hl_maximal_2d(g, options);
}

std::vector<std::vector<double>> dyadic_sums(const Weight& w, const Cube& q, int depth) {
  const int dim = q.dim();
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(depth) + 1);
  const Grid leaves{q, 1 << depth};
  auto& last = sums[depth];
  last.resize(leaves.cell_count());
  for (std::size_t c = 0; c < last.size(); ++c) last[c] = w.integral(leaves.cell_box(c));
  for (int k = depth - 1; k >= 0; --k) {
    const std::size_t m = std::size_t{1} << k;
    const std::size_t my = dim == 2 ? m : 1;
    const auto& fine = sums[k + 1];
    auto& cur = sums[k];
    cur.assign(m * my, 0.0);
    for (std::size_t j = 0; j < my; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t b = 0; b < (dim == 2 ? 2u : 1u); ++b) {
          for (std::size_t a = 0; a < 2; ++a) s += fine[(2 * i + a) + 2 * m * (dim == 2 ? 2 * j + b : 0)];
        }
        cur[i + m * j] = s;
      }
    }
  }
  return sums;
}

GridFunction dyadic_local_maximal(const Weight& w, const Cube& q, int depth) {
  if (depth < 0 || depth > 20) throw std::invalid_argument("dyadic depth out of range");
  const int dim = q.dim();
  const auto sums = dyadic_sums(w, q, depth);
  GridFunction out(Grid{q, 1 << depth});
  const std::size_t n = std::size_t{1} << depth;
  for (std::size_t c = 0; c < out.values.size(); ++c) {
    const std::size_t i = c % n;
    const std::size_t j = dim == 2 ? c / n : 0;
    double best = 0.0;
    for (int k = 0; k <= depth; ++k) {
      const int shift = depth - k;
      const std::size_t m = std::size_t{1} << k;
      const double vol = q.volume() / std::ldexp(1.0, k * dim);
      best = std::max(best, sums[k][(i >> shift) + m * (j >> shift)] / vol);
    }
    out.values[c] = best;
  }
  return out;
}

GridFunction maximal_of_localized(const Weight& w, const Cube& q, int cells_per_side) {
  if (cells_per_side < 1) throw std::invalid_argument("cells_per_side must be positive");
  const int dim = q.dim();
  // In 2-D competitor cubes may stick out of Q; those of side <= side(Q)
  // that meet Q lie inside 3Q.
  const int pad = dim == 2 ? cells_per_side : 0;
  const Cube box = dim == 2 ? q.dilate(3.0) : q;
  const Grid grid{box, cells_per_side + 2 * pad};
  GridFunction f(grid);
  const double cv = grid.cell_volume();
  for (int j = 0; j < (dim == 2 ? grid.resolution : 1); ++j) {
    for (int i = 0; i < grid.resolution; ++i) {
      const bool inside = i >= pad && i < pad + cells_per_side && (dim == 1 || (j >= pad && j < pad + cells_per_side));
      if (!inside) continue;
      const auto idx = grid.cell_index(i, j);
      f.values[idx] = w.integral(grid.cell_box(idx)) / cv;
    }
  }
  return hl_maximal(f);
}

double localized_maximal_integral(const Weight& w, const Cube& q, int cells_per_side) {
  const GridFunction m = maximal_of_localized(w, q, cells_per_side);
  const int dim = q.dim();
  const int pad = dim == 2 ? cells_per_side : 0;
  double s = 0.0;
  for (int j = pad; j < (dim == 2 ? pad + cells_per_side : 1); ++j) {
    for (int i = pad; i < pad + cells_per_side; ++i) s += m.values[m.grid.cell_index(i, j)];
  }
  return s * m.grid.cell_volume();
}

std::vector<CzCube> cz_decompose(const Weight& w, const Cube& q, double lambda, int depth) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("CZ height must be positive");
  if (depth < 0 || depth > 20) throw std::invalid_argument("dyadic depth out of range");
  const int dim = q.dim();
  const auto sums = dyadic_sums(w, q, depth);
  if (sums[0][0] > lambda * q.volume()) {
    throw std::invalid_argument("CZ height " + std::to_string(lambda) + " is below the average of w over " +
                                q.to_string());
  }
  std::vector<CzCube> out;
  // Depth-first over the tree; a cube is selected when its average exceeds
  // lambda, which can only happen below level 0.
  std::vector<DyadicCube> stack{DyadicCube{}};
  while (!stack.empty()) {
    const DyadicCube d = stack.back();
    stack.pop_back();
    const std::size_t m = std::size_t{1} << d.level;
    const double mass = sums[d.level][static_cast<std::size_t>(d.index[0]) + m * static_cast<std::size_t>(d.index[1])];
    const double vol = std::ldexp(q.volume(), -d.level * dim);
    if (d.level > 0 && mass > lambda * vol) {
      out.push_back({d, mass, vol});
      continue;
    }
    if (d.level == depth) continue;
    auto kids = d.children(dim);
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }
  std::sort(out.begin(), out.end(), [](const CzCube& a, const CzCube& b) { return a.cube < b.cube; });
  return out;
}

}  // namespace weightlab

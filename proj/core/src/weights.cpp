#include "weightlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "weightlab/numeric.hpp"

namespace weightlab {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Integral of max(x, y)^a over [x0, x1] x [y0, y1] inside the closed first quadrant.
double quadrant_power(double a, double x0, double x1, double y0, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) return 0.0;
  auto half = [a](double u0, double u1, double v0, double v1) {
    // Region u >= v: integrate u^a * |{v in [v0, v1] : v <= u}| du.
    double s = 0.0;
    const double lo = std::max(u0, v0);
    const double hi = std::min(u1, v1);
    if (hi > lo) {
      s += monomial_integral(a + 1.0, lo, hi);
      if (v0 != 0.0) s -= v0 * monomial_integral(a, lo, hi);
    }
    const double lo2 = std::max(u0, v1);
    if (u1 > lo2) s += (v1 - v0) * monomial_integral(a, lo2, u1);
    return s;
  };
  return half(x0, x1, y0, y1) + half(y0, y1, x0, x1);
}

}  // namespace

double Weight::integral_over(const CellSet& cells) const {
  double s = 0.0;
  for (std::size_t c = 0; c < cells.mask.size(); ++c) {
    if (cells.mask[c]) s += integral(cells.grid.cell_box(c));
  }
  return s;
}

double Weight::centered_mass(double R) const {
  return integral(Cube(dim(), {0.0, 0.0}, R).box());
}

// ----------------------------------------------------------------------------

ConstantWeight::ConstantWeight(int dim, double value) : dim_(dim), value_(value) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("constant weight must be positive and finite");
  }
}

WeightPtr ConstantWeight::pow(double r) const {
  return std::make_shared<ConstantWeight>(dim_, std::pow(value_, r));
}

WeightPtr ConstantWeight::scaled(double c) const {
  return std::make_shared<ConstantWeight>(dim_, c * value_);
}

std::string ConstantWeight::id() const { return "constant(" + fmt_double(value_) + ")"; }

// ----------------------------------------------------------------------------

PowerWeight::PowerWeight(int dim, double exponent, double coeff)
    : dim_(dim), exponent_(exponent), coeff_(coeff) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (!(exponent > -dim)) {
    throw std::invalid_argument("power weight exponent must exceed -n for local integrability, got " +
                                fmt_double(exponent));
  }
  if (!(coeff > 0.0)) throw std::invalid_argument("power weight coefficient must be positive");
}

double PowerWeight::integral(const Box& box) const {
  if (box.empty()) return 0.0;
  const double a = exponent_;
  if (dim_ == 1) return coeff_ * power_integral_1d(a, box.lo[0], box.hi[0]);
  // Split at the axes and reflect every piece into the first quadrant.
  double s = 0.0;
  const std::array<std::pair<double, double>, 2> xs{{{std::min(box.lo[0], 0.0), std::min(box.hi[0], 0.0)},
                                                     {std::max(box.lo[0], 0.0), std::max(box.hi[0], 0.0)}}};
  const std::array<std::pair<double, double>, 2> ys{{{std::min(box.lo[1], 0.0), std::min(box.hi[1], 0.0)},
                                                     {std::max(box.lo[1], 0.0), std::max(box.hi[1], 0.0)}}};
  for (const auto& [xa, xb] : xs) {
    for (const auto& [ya, yb] : ys) {
      const double u0 = std::min(std::abs(xa), std::abs(xb));
      const double u1 = std::max(std::abs(xa), std::abs(xb));
      const double v0 = std::min(std::abs(ya), std::abs(yb));
      const double v1 = std::max(std::abs(ya), std::abs(yb));
      s += quadrant_power(a, u0, u1, v0, v1);
    }
  }
  return coeff_ * s;
}

double PowerWeight::density(const Point& x) const {
  double r = std::abs(x[0]);
  if (dim_ == 2) r = std::max(r, std::abs(x[1]));
  if (exponent_ == 0.0) return coeff_;
  return coeff_ * std::pow(r, exponent_);
}

WeightPtr PowerWeight::pow(double r) const {
  return std::make_shared<PowerWeight>(dim_, exponent_ * r, std::pow(coeff_, r));
}

WeightPtr PowerWeight::scaled(double c) const {
  return std::make_shared<PowerWeight>(dim_, exponent_, coeff_ * c);
}

std::string PowerWeight::id() const {
  std::string s = "power(a=" + fmt_double(exponent_);
  if (coeff_ != 1.0) s += ",c=" + fmt_double(coeff_);
  return s + ")";
}

std::vector<double> PowerWeight::breakpoints(double lo, double hi) const {
  if (lo < 0.0 && hi > 0.0) return {0.0};
  return {};
}

// ----------------------------------------------------------------------------

GridWeight::GridWeight(Grid grid, std::vector<double> values, std::string name)
    : grid_(grid), values_(std::move(values)), name_(std::move(name)) {
  if (values_.size() != grid_.cell_count()) {
    throw std::invalid_argument("grid weight expects " + std::to_string(grid_.cell_count()) +
                                " values, got " + std::to_string(values_.size()));
  }
  bool positive = false;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("grid weight values must be finite and >= 0");
    positive = positive || v > 0.0;
  }
  if (!positive) throw std::invalid_argument("grid weight must not vanish identically");
  const int n = grid_.resolution;
  const double cv = grid_.cell_volume();
  if (grid_.dim() == 1) {
    prefix_.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix_[i + 1] = prefix_[i] + values_[i] * cv;
  } else {
    const std::size_t w = static_cast<std::size_t>(n) + 1;
    prefix_.assign(w * w, 0.0);
    for (int j = 0; j < n; ++j) {
      double row = 0.0;
      for (int i = 0; i < n; ++i) {
        row += values_[grid_.cell_index(i, j)] * cv;
        prefix_[(i + 1) + w * (j + 1)] = prefix_[(i + 1) + w * j] + row;
      }
    }
  }
}

double GridWeight::prefix_at(double x, double y) const {
  // The cumulative integral is linear (1-D) or bilinear (2-D) on each cell.
  const int n = grid_.resolution;
  const double h = grid_.cell_width();
  auto locate = [&](double t, int axis, int& i, double& frac) {
    const double u = std::clamp((t - grid_.box.lo(axis)) / h, 0.0, static_cast<double>(n));
    i = std::min(static_cast<int>(u), n - 1);
    frac = u - i;
  };
  int i = 0;
  double fx = 0.0;
  locate(x, 0, i, fx);
  if (grid_.dim() == 1) return prefix_[i] + fx * (prefix_[i + 1] - prefix_[i]);
  int j = 0;
  double fy = 0.0;
  locate(y, 1, j, fy);
  const std::size_t w = static_cast<std::size_t>(n) + 1;
  const double p00 = prefix_[i + w * j];
  const double p10 = prefix_[(i + 1) + w * j];
  const double p01 = prefix_[i + w * (j + 1)];
  const double p11 = prefix_[(i + 1) + w * (j + 1)];
  return (1 - fx) * (1 - fy) * p00 + fx * (1 - fy) * p10 + (1 - fx) * fy * p01 + fx * fy * p11;
}

double GridWeight::integral(const Box& box) const {
  const Box b = box.intersect(grid_.box.box());
  if (b.empty()) return 0.0;
  double s = 0.0;
  if (grid_.dim() == 1) {
    s = prefix_at(b.hi[0], 0.0) - prefix_at(b.lo[0], 0.0);
  } else {
    s = prefix_at(b.hi[0], b.hi[1]) - prefix_at(b.lo[0], b.hi[1]) - prefix_at(b.hi[0], b.lo[1]) +
        prefix_at(b.lo[0], b.lo[1]);
  }
  return std::max(0.0, s);
}

double GridWeight::density(const Point& x) const {
  const auto idx = grid_.locate(x);
  return idx < 0 ? 0.0 : values_[static_cast<std::size_t>(idx)];
}

WeightPtr GridWeight::pow(double r) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), [r](double x) { return x > 0.0 ? std::pow(x, r) : 0.0; });
  return std::make_shared<GridWeight>(grid_, std::move(v), name_ + "^" + fmt_double(r));
}

WeightPtr GridWeight::scaled(double c) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), [c](double x) { return c * x; });
  return std::make_shared<GridWeight>(grid_, std::move(v), fmt_double(c) + "*" + name_);
}

std::vector<double> GridWeight::breakpoints(double lo, double hi) const {
  std::vector<double> out;
  const double h = grid_.cell_width();
  for (int i = 0; i <= grid_.resolution; ++i) {
    const double x = grid_.box.lo(0) + i * h;
    if (x > lo && x < hi) out.push_back(x);
  }
  return out;
}

// ----------------------------------------------------------------------------

ProductWeight::ProductWeight(PowerWeight base, Grid bump_grid, std::vector<double> bump, std::string name)
    : base_(base), grid_(bump_grid), bump_(std::move(bump)), name_(std::move(name)) {
  if (base_.dim() != grid_.dim()) throw std::invalid_argument("product weight dimension mismatch");
  if (bump_.size() != grid_.cell_count()) throw std::invalid_argument("bump size does not match its grid");
  for (double g : bump_) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("bump values must be finite and >= 0");
  }
  if (grid_.dim() == 1) {
    excess_prefix_.assign(bump_.size() + 1, 0.0);
    for (std::size_t i = 0; i < bump_.size(); ++i) {
      excess_prefix_[i + 1] = excess_prefix_[i] + (bump_[i] - 1.0) * base_.integral(grid_.cell_box(i));
    }
    total_excess_ = excess_prefix_.back();
  } else {
    for (std::size_t i = 0; i < bump_.size(); ++i) total_excess_ += (bump_[i] - 1.0) * base_.integral(grid_.cell_box(i));
  }
}

double ProductWeight::integral(const Box& box) const {
  double s = base_.integral(box);
  const Box b = box.intersect(grid_.box.box());
  if (b.empty()) return s;
  if (box.contains(grid_.box.box())) return std::max(0.0, s + total_excess_);
  const double h = grid_.cell_width();
  const int n = grid_.resolution;
  std::array<int, 2> lo{0, 0}, hi{0, 0};
  for (int a = 0; a < dim(); ++a) {
    lo[a] = std::clamp(static_cast<int>(std::floor((b.lo[a] - grid_.box.lo(a)) / h)), 0, n - 1);
    hi[a] = std::clamp(static_cast<int>(std::ceil((b.hi[a] - grid_.box.lo(a)) / h)) - 1, 0, n - 1);
  }
  auto partial = [&](std::size_t idx) {
    const Box piece = b.intersect(grid_.cell_box(idx));
    return piece.empty() ? 0.0 : (bump_[idx] - 1.0) * base_.integral(piece);
  };
  if (dim() == 1) {
    if (hi[0] - lo[0] >= 2) {
      s += excess_prefix_[hi[0]] - excess_prefix_[lo[0] + 1];
      s += partial(lo[0]) + partial(hi[0]);
    } else {
      for (int i = lo[0]; i <= hi[0]; ++i) s += partial(i);
    }
  } else {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      for (int i = lo[0]; i <= hi[0]; ++i) s += partial(grid_.cell_index(i, j));
    }
  }
  return std::max(0.0, s);
}

double ProductWeight::density(const Point& x) const {
  const auto idx = grid_.locate(x);
  const double g = idx < 0 ? 1.0 : bump_[static_cast<std::size_t>(idx)];
  return g * base_.density(x);
}

WeightPtr ProductWeight::pow(double r) const {
  std::vector<double> g(bump_.size());
  std::transform(bump_.begin(), bump_.end(), g.begin(), [r](double x) { return x > 0.0 ? std::pow(x, r) : 0.0; });
  auto b = std::static_pointer_cast<const PowerWeight>(base_.pow(r));
  return std::make_shared<ProductWeight>(*b, grid_, std::move(g), name_ + "^" + fmt_double(r));
}

WeightPtr ProductWeight::scaled(double c) const {
  auto b = std::static_pointer_cast<const PowerWeight>(base_.scaled(c));
  return std::make_shared<ProductWeight>(*b, grid_, bump_, fmt_double(c) + "*" + name_);
}

std::optional<FarField> ProductWeight::far_field() const {
  return FarField{base_.exponent(), base_.coeff(), grid_.box.center_norm() + grid_.box.half_side()};
}

std::vector<double> ProductWeight::breakpoints(double lo, double hi) const {
  std::vector<double> out = base_.breakpoints(lo, hi);
  const double h = grid_.cell_width();
  for (int i = 0; i <= grid_.resolution; ++i) {
    const double x = grid_.box.lo(0) + i * h;
    if (x > lo && x < hi) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ----------------------------------------------------------------------------

std::vector<std::string> gallery_names() {
  return {"constant", "power_eps", "ap_times_bump", "vanishing_patch"};
}

WeightPtr gallery(const std::string& name, const GalleryParams& params) {
  const int n = params.dim;
  if (name == "constant") return std::make_shared<ConstantWeight>(n, 1.0);
  if (name == "power_eps") {
    if (!(params.p > 1.0)) throw std::invalid_argument("power_eps needs p > 1");
    return std::make_shared<PowerWeight>(n, n * (params.p - 1.0 - params.eps));
  }
  if (name == "ap_times_bump") {
    // |x|^{n(p-1)/2} is an A_p weight; the bump dips to 0.1 near (0.5, 0.5).
    const int res = n == 1 ? std::min(params.resolution, 1024) : std::min(params.resolution, 64);
    Grid g{Cube(n, {0.0, 0.0}, 2.0), res};
    std::vector<double> bump(g.cell_count());
    for (std::size_t c = 0; c < bump.size(); ++c) {
      const Point x = g.cell_center(c);
      double r2 = (x[0] - 0.5) * (x[0] - 0.5);
      if (n == 2) r2 += (x[1] - 0.5) * (x[1] - 0.5);
      bump[c] = 1.0 - 0.9 * std::exp(-r2 / 0.08);
    }
    return std::make_shared<ProductWeight>(PowerWeight(n, 0.5 * n * (params.p - 1.0)), g, std::move(bump),
                                           "ap_times_bump");
  }
  if (name == "vanishing_patch") {
    const int res = n == 1 ? params.resolution : std::min(params.resolution, 256);
    Grid g{Cube(n, {0.0, 0.0}, 1.0), res};
    std::vector<double> v(g.cell_count());
    for (std::size_t c = 0; c < v.size(); ++c) {
      const Point x = g.cell_center(c);
      bool patch = x[0] > 0.25 && x[0] < 0.75;
      double val = 1.0 + 0.5 * std::cos(std::numbers::pi * x[0]);
      if (n == 2) {
        patch = patch && x[1] > 0.25 && x[1] < 0.75;
        val *= 1.0 + 0.5 * std::sin(std::numbers::pi * x[1]);
      }
      v[c] = patch ? 0.0 : val;
    }
    return std::make_shared<GridWeight>(g, std::move(v), "vanishing_patch");
  }
  std::string valid;
  for (const auto& s : gallery_names()) valid += (valid.empty() ? "" : ", ") + s;
  throw std::invalid_argument("unknown gallery weight '" + name + "'; valid names: " + valid);
}

std::shared_ptr<const GridWeight> random_grid_weight(const Grid& grid, std::mt19937_64& rng, const std::string& name) {
  std::uniform_real_distribution<double> factor(0.25, 1.75);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int levels = grid.levels();
  const int dim = grid.dim();
  // Multiplicative cascade over the dyadic tree.
  std::vector<double> v(grid.cell_count(), 1.0);
  for (int k = 0; k <= levels; ++k) {
    const int m = 1 << k;
    const int span = grid.resolution / m;
    std::vector<double> f(static_cast<std::size_t>(dim == 2 ? m * m : m));
    for (auto& x : f) x = factor(rng);
    for (std::size_t c = 0; c < v.size(); ++c) {
      const auto ij = grid.cell_coords(c);
      const int bi = ij[0] / span;
      const int bj = dim == 2 ? ij[1] / span : 0;
      v[c] *= f[static_cast<std::size_t>(bi + m * bj)];
    }
  }
  if (unit(rng) < 0.3) {
    // Vanishing block of positive measure away from the first cell.
    const int side = std::max(1, grid.resolution / 8);
    const int i0 = 1 + static_cast<int>(unit(rng) * (grid.resolution - side - 1));
    const int j0 = dim == 2 ? 1 + static_cast<int>(unit(rng) * (grid.resolution - side - 1)) : 0;
    for (int j = j0; j < (dim == 2 ? j0 + side : 1); ++j) {
      for (int i = i0; i < i0 + side; ++i) v[grid.cell_index(i, j)] = 0.0;
    }
  }
  return std::make_shared<GridWeight>(grid, std::move(v), name);
}

std::vector<double> read_grid_file(const std::string& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file '" + path + "'");
  std::vector<double> v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::istringstream is(line);
    double x = 0.0;
    if (!(is >> x) || !(x >= 0.0) || !std::isfinite(x)) {
      throw std::runtime_error("grid file '" + path + "' line " + std::to_string(line_no) +
                               ": expected a non-negative decimal");
    }
    v.push_back(x);
  }
  if (v.size() != expected) {
    throw std::runtime_error("grid file '" + path + "' has " + std::to_string(v.size()) + " values, expected " +
                             std::to_string(expected));
  }
  return v;
}

namespace {

Grid grid_from_json(const nlohmann::json& j, int dim) {
  const auto box = j.at("box").get<std::vector<double>>();
  if (box.size() != 2 || !(box[1] > box[0])) throw std::invalid_argument("\"box\" must be [lo, hi] with lo < hi");
  const int res = j.at("resolution").get<int>();
  Grid g{Cube(dim, {0.5 * (box[0] + box[1]), 0.5 * (box[0] + box[1])}, 0.5 * (box[1] - box[0])), res};
  if (res <= 0) throw std::invalid_argument("\"resolution\" must be positive");
  return g;
}

std::vector<double> values_from_json(const nlohmann::json& j, const Grid& g, const std::string& base_dir) {
  if (j.contains("values")) {
    auto v = j.at("values").get<std::vector<double>>();
    if (v.size() != g.cell_count()) throw std::invalid_argument("inline \"values\" size does not match the grid");
    return v;
  }
  std::filesystem::path p = j.at("file").get<std::string>();
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  return read_grid_file(p.string(), g.cell_count());
}

}  // namespace

WeightPtr weight_from_spec(const std::string& json_text, const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed weight spec: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    const int dim = j.value("dim", 1);
    if (type == "constant") return std::make_shared<ConstantWeight>(dim, j.value("value", 1.0));
    if (type == "power") return std::make_shared<PowerWeight>(dim, j.at("exponent").get<double>(), j.value("coeff", 1.0));
    if (type == "grid") {
      const Grid g = grid_from_json(j, dim);
      return std::make_shared<GridWeight>(g, values_from_json(j, g, base_dir), j.value("name", std::string("grid")));
    }
    if (type == "product") {
      const auto& bump = j.at("bump");
      const Grid g = grid_from_json(bump, dim);
      return std::make_shared<ProductWeight>(PowerWeight(dim, j.at("exponent").get<double>()), g,
                                             values_from_json(bump, g, base_dir),
                                             j.value("name", std::string("product")));
    }
    if (type == "gallery") {
      GalleryParams gp;
      gp.dim = dim;
      gp.p = j.value("p", gp.p);
      gp.eps = j.value("eps", gp.eps);
      gp.resolution = j.value("resolution", gp.resolution);
      return gallery(j.at("name").get<std::string>(), gp);
    }
    throw std::invalid_argument("unknown weight type '" + type + "'; valid: constant, power, grid, product, gallery");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed weight spec: ") + e.what());
  }
}

}  // namespace weightlab

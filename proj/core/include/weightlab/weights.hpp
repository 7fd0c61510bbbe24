#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "weightlab/geometry.hpp"

namespace weightlab {

/// Outside an L-infinity ball the weight equals coeff * |x|^alpha.
struct FarField {
  double alpha = 0.0;
  double coeff = 1.0;
  double min_radius = 0.0;
};

/// A non-negative locally integrable function, seen only through integrals
/// over boxes. Implementations are immutable.
class Weight {
 public:
  virtual ~Weight() = default;

  virtual int dim() const = 0;
  /// Integral of the weight over an axis-parallel box.
  virtual double integral(const Box& box) const = 0;
  /// Pointwise value; used by quadrature only.
  virtual double density(const Point& x) const = 0;
  /// The weight raised to the power r > 0.
  virtual std::shared_ptr<const Weight> pow(double r) const = 0;
  virtual std::shared_ptr<const Weight> scaled(double c) const = 0;
  virtual std::string id() const = 0;

  /// Bounding box outside which the weight vanishes, if any.
  virtual std::optional<Box> support() const { return std::nullopt; }
  virtual std::optional<FarField> far_field() const { return std::nullopt; }
  /// Value of a constant weight.
  virtual std::optional<double> uniform_density() const { return std::nullopt; }
  /// Points in (lo, hi) where the 1-D density fails to be smooth.
  virtual std::vector<double> breakpoints(double /*lo*/, double /*hi*/) const { return {}; }

  double avg(const Cube& q) const { return integral(q.box()) / q.volume(); }
  double mass(const Cube& q) const { return integral(q.box()); }
  /// Sum over the cells of E; additive by construction.
  double integral_over(const CellSet& cells) const;
  /// Integral over the centered cube [-R, R]^n.
  double centered_mass(double R) const;
};

using WeightPtr = std::shared_ptr<const Weight>;

class ConstantWeight final : public Weight {
 public:
  ConstantWeight(int dim, double value);
  int dim() const override { return dim_; }
  double integral(const Box& box) const override { return value_ * box.volume(); }
  double density(const Point&) const override { return value_; }
  WeightPtr pow(double r) const override;
  WeightPtr scaled(double c) const override;
  std::string id() const override;
  std::optional<FarField> far_field() const override { return FarField{0.0, value_, 0.0}; }
  std::optional<double> uniform_density() const override { return value_; }

 private:
  int dim_;
  double value_;
};

/// coeff * |x|^a with |x| the L-infinity norm; requires a > -n.
class PowerWeight final : public Weight {
 public:
  PowerWeight(int dim, double exponent, double coeff = 1.0);
  int dim() const override { return dim_; }
  double exponent() const { return exponent_; }
  double coeff() const { return coeff_; }
  double integral(const Box& box) const override;
  double density(const Point& x) const override;
  WeightPtr pow(double r) const override;
  WeightPtr scaled(double c) const override;
  std::string id() const override;
  std::optional<FarField> far_field() const override { return FarField{exponent_, coeff_, 0.0}; }
  std::vector<double> breakpoints(double lo, double hi) const override;

 private:
  int dim_;
  double exponent_;
  double coeff_;
};

/// Piecewise constant on the cells of a grid, zero outside the grid box.
class GridWeight final : public Weight {
 public:
  GridWeight(Grid grid, std::vector<double> values, std::string name = "grid");
  int dim() const override { return grid_.dim(); }
  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double integral(const Box& box) const override;
  double density(const Point& x) const override;
  WeightPtr pow(double r) const override;
  WeightPtr scaled(double c) const override;
  std::string id() const override { return name_; }
  std::optional<Box> support() const override { return grid_.box.box(); }
  std::vector<double> breakpoints(double lo, double hi) const override;
  /// Exact integral of the weight against a function with known antiderivative
  /// on each cell (1-D only): sum_i v_i * (F(b_i) - F(a_i)) over [lo, hi].
  template <typename Antiderivative>
  double integrate_against(double lo, double hi, Antiderivative&& F) const;

 private:
  double prefix_at(double x, double y) const;

  Grid grid_;
  std::vector<double> values_;
  std::string name_;
  std::vector<double> prefix_;  // node prefix sums, (N+1)^n entries
};

/// |x|^a times a bounded non-negative multiplier g that is sampled on a grid
/// and equal to 1 outside the grid box.
class ProductWeight final : public Weight {
 public:
  ProductWeight(PowerWeight base, Grid bump_grid, std::vector<double> bump, std::string name = "product");
  int dim() const override { return base_.dim(); }
  const PowerWeight& base() const { return base_; }
  const Grid& bump_grid() const { return grid_; }
  const std::vector<double>& bump() const { return bump_; }
  double integral(const Box& box) const override;
  double density(const Point& x) const override;
  WeightPtr pow(double r) const override;
  WeightPtr scaled(double c) const override;
  std::string id() const override { return name_; }
  std::optional<FarField> far_field() const override;
  std::vector<double> breakpoints(double lo, double hi) const override;

 private:
  PowerWeight base_;
  Grid grid_;
  std::vector<double> bump_;
  std::string name_;
  std::vector<double> excess_prefix_;  // 1-D prefix of (g_i - 1) * base(cell_i)
  double total_excess_ = 0.0;
};

template <typename Antiderivative>
double GridWeight::integrate_against(double lo, double hi, Antiderivative&& F) const {
  const double a = std::max(lo, grid_.box.lo(0));
  const double b = std::min(hi, grid_.box.hi(0));
  if (!(b > a)) return 0.0;
  const double h = grid_.cell_width();
  const double x0 = grid_.box.lo(0);
  int i0 = static_cast<int>((a - x0) / h);
  int i1 = static_cast<int>((b - x0) / h);
  i0 = std::clamp(i0, 0, grid_.resolution - 1);
  i1 = std::clamp(i1, 0, grid_.resolution - 1);
  double sum = 0.0;
  for (int i = i0; i <= i1; ++i) {
    const double v = values_[static_cast<std::size_t>(i)];
    if (v == 0.0) continue;
    const double l = std::max(a, x0 + i * h);
    const double r = std::min(b, x0 + (i + 1) * h);
    if (r > l) sum += v * (F(r) - F(l));
  }
  return sum;
}

struct GalleryParams {
  int dim = 1;
  double p = 2.0;
  double eps = 0.5;
  int resolution = 4096;
};

/// Names accepted by gallery().
std::vector<std::string> gallery_names();

/// Example weights: constant, power_eps (|x|^{n(p-1-eps)}), ap_times_bump
/// (an A_p power weight times a bounded bump) and vanishing_patch (a grid
/// weight with a zero block of positive measure).
WeightPtr gallery(const std::string& name, const GalleryParams& params = {});

/// Seeded rough grid weight: a random multiplicative cascade, sometimes with
/// a vanishing block.
std::shared_ptr<const GridWeight> random_grid_weight(const Grid& grid, std::mt19937_64& rng,
                                                     const std::string& name = "random");

/// Builds a weight from a JSON spec string (see README for the format).
/// Relative grid file paths are resolved against `base_dir`.
WeightPtr weight_from_spec(const std::string& json_text, const std::string& base_dir = ".");

/// Reads a grid file: one non-negative decimal per line, row-major for n = 2.
std::vector<double> read_grid_file(const std::string& path, std::size_t expected);

}  // namespace weightlab

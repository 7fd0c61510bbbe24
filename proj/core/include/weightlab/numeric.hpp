#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace weightlab {

/// Closed interval of reals carrying a certified enclosure.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }

  Interval& operator+=(const Interval& o) {
    lo += o.lo;
    hi += o.hi;
    return *this;
  }
  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator*(double c, const Interval& a) {
    return c >= 0 ? Interval{c * a.lo, c * a.hi} : Interval{c * a.hi, c * a.lo};
  }
};

struct QuadratureResult {
  double value = 0.0;
  /// Sum of the Kronrod-minus-Gauss error estimates over accepted panels.
  double error = 0.0;
  int panels = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_depth = 48;
};

/// Adaptive 7/15-point Gauss-Kronrod quadrature on [a, b]. Panels are bisected
/// until the local error estimate meets the tolerance share of the panel.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

/// Same as integrate_adaptive but first splits [a, b] at the given breakpoints.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breakpoints,
                                     const QuadratureOptions& options = {});

/// Thrown when a C_p-tail (or any dilation series) diverges.
class DivergentTail : public std::runtime_error {
 public:
  explicit DivergentTail(const std::string& what) : std::runtime_error(what) {}
};

/// Antiderivative-based integral of |x|^a over [lo, hi] (a > -1, or any a when
/// 0 is outside [lo, hi]).
double power_integral_1d(double a, double lo, double hi);

/// Integral of x^a over [lo, hi] with 0 <= lo <= hi; handles a = -1 through log.
double monomial_integral(double a, double lo, double hi);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y ~ slope * x + intercept. R^2 is 1 for a perfect
/// fit and for constant y; fewer than two points give an all-zero fit.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace weightlab

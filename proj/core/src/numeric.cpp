#include "weightlab/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace weightlab {

namespace {

// Kronrod 15-point nodes on [0, 1] (symmetric), Gauss 7-point weights on the
// odd-indexed nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double value;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kKronrod[7] * fc;
  double gauss = kGauss[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kNodes[i];
    const double s = f(c - dx) + f(c + dx);
    kron += kKronrod[i] * s;
    if (i % 2 == 1) gauss += kGauss[i / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

void adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
           const QuadratureOptions& options, QuadratureResult& out) {
  const Panel p = gk15(f, a, b);
  const double local_tol = std::max(tol, options.rel_tol * std::abs(p.value));
  if (p.error <= local_tol || depth >= options.max_depth || !(b - a > 0.0)) {
    out.value += p.value;
    out.error += p.error;
    ++out.panels;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth + 1, options, out);
  adapt(f, m, b, 0.5 * tol, depth + 1, options, out);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
  QuadratureResult out;
  if (!(b > a)) return out;
  adapt(f, a, b, options.abs_tol, 0, options, out);
  return out;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breakpoints,
                                     const QuadratureOptions& options) {
  std::vector<double> pts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto r = integrate_adaptive(f, pts[i], pts[i + 1], options);
    out.value += r.value;
    out.error += r.error;
    out.panels += r.panels;
  }
  return out;
}

double monomial_integral(double a, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (a == -1.0) return std::log(hi / lo);
  if (a == 0.0) return hi - lo;
  const double e = a + 1.0;
  const double top = std::pow(hi, e);
  const double bottom = lo > 0.0 ? std::pow(lo, e) : 0.0;
  return (top - bottom) / e;
}

double power_integral_1d(double a, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo >= 0.0) return monomial_integral(a, lo, hi);
  if (hi <= 0.0) return monomial_integral(a, -hi, -lo);
  return monomial_integral(a, 0.0, -lo) + monomial_integral(a, 0.0, hi);
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_linear: size mismatch");
  LinearFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace weightlab

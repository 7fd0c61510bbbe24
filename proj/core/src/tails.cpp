#include "weightlab/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "weightlab/maximal.hpp"
#include "weightlab/parallel.hpp"

namespace weightlab {

std::string to_string(TailKind kind) {
  switch (kind) {
    case TailKind::discrete_2: return "discrete";
    case TailKind::discrete_s: return "discrete_s";
    case TailKind::continuous: return "continuous";
  }
  return "unknown";
}

namespace {

void check_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must satisfy 1 < p < inf");
}

[[noreturn]] void throw_divergent(const Weight& w, double p) {
  throw DivergentTail("tail diverges: " + w.id() + " grows at least like |x|^{n(p-1)} with p = " +
                      std::to_string(p));
}

// Enclosure of w(cube(c, R)) for a non-centered cube through the centered
// cubes of radius R -|c| and R + |c|; mass(R) = E + F R^g for R >= R0.
struct FarMass {
  double E = 0.0;
  double F = 0.0;
  double g = 0.0;
  double R0 = 0.0;
};

FarMass far_mass(const Weight& w, const FarField& ff) {
  const int n = w.dim();
  FarMass m;
  m.g = n + ff.alpha;
  m.R0 = ff.min_radius;
  m.F = ff.coeff * n * std::ldexp(1.0, n) / m.g;
  const double base = m.R0 > 0.0 ? w.centered_mass(m.R0) : 0.0;
  m.E = base - m.F * std::pow(m.R0, m.g);
  return m;
}

}  // namespace

bool has_infinite_tails(const Weight& w, double p) {
  check_exponent(p);
  if (w.support()) return false;
  const auto ff = w.far_field();
  return ff && ff->alpha >= w.dim() * (p - 1.0);
}

std::optional<Interval> dilation_series_remainder(const Weight& w, const Cube& q, double s, double decay,
                                                  int first) {
  const double scale = std::pow(s, first);
  const double geo = std::pow(s, -decay * first) / (1.0 - std::pow(s, -decay));
  if (const auto supp = w.support()) {
    if (q.dilate(scale).box().contains(*supp)) {
      const double total = w.integral(*supp);
      return Interval{total * geo, total * geo};
    }
  }
  if (const auto u = w.uniform_density()) {
    // w(s^k Q) = u |Q| s^{nk}.
    const double d = decay - w.dim();
    if (d <= 0.0) return std::nullopt;
    const double v = *u * q.volume() * std::pow(s, -d * first) / (1.0 - std::pow(s, -d));
    return Interval{v, v};
  }
  const auto ff = w.far_field();
  if (!ff) return std::nullopt;
  const FarMass m = far_mass(w, *ff);
  if (m.g >= decay) return std::nullopt;
  const double c = q.center_norm();
  const double r_in = scale * q.half_side() - c;
  if (!(r_in >= m.R0) || !(r_in > 0.0)) return std::nullopt;
  const double rho = c / (scale * q.half_side());
  // sum_{k >= first} s^{(g - decay) k}
  const double geo_g = std::pow(s, (m.g - decay) * first) / (1.0 - std::pow(s, m.g - decay));
  const double hg = std::pow(q.half_side(), m.g);
  const double lo = m.E * geo + m.F * hg * std::pow(1.0 - rho, m.g) * geo_g;
  const double hi = m.E * geo + m.F * hg * std::pow(1.0 + rho, m.g) * geo_g;
  return Interval{std::max(lo, 0.0), hi};
}

namespace {

TailReport dilation_tail(const Weight& w, const Cube& q, double p, double s, TailKind kind,
                         const TailOptions& options) {
  check_exponent(p);
  if (!(s > 1.0) || !(s <= 2.0)) throw std::invalid_argument("dilation base s must satisfy 1 < s <= 2");
  const int n = w.dim();
  if (q.dim() != n) throw std::invalid_argument("cube and weight dimensions differ");
  const double avg_decay = n * (p - 1.0);
  TailReport r;
  r.kind = kind;
  if (const auto u = w.uniform_density()) {
    r.value = *u / (1.0 - std::pow(s, -avg_decay));
    return r;
  }
  if (has_infinite_tails(w, p)) throw_divergent(w, p);
  const double mass_decay = n * p;
  const double vol = q.volume();
  const int cap = s == 2.0 ? options.max_terms
                           : static_cast<int>(std::ceil(options.max_terms * std::log(2.0) / std::log(s)));
  double partial = 0.0;
  std::optional<Interval> rem;
  for (int k = 0; k < cap; ++k) {
    const Cube qk = q.dilate(std::pow(s, k));
    partial += std::pow(s, -mass_decay * k) * w.mass(qk) / vol;
    r.terms = k + 1;
    rem = dilation_series_remainder(w, q, s, mass_decay, k + 1);
    if (!rem) continue;
    const Interval tail{rem->lo / vol, rem->hi / vol};
    if (tail.width() <= options.tol * std::max(1.0, partial + tail.lo)) break;
  }
  if (!rem || rem->width() / vol > options.tol * std::max(1.0, partial + rem->lo / vol)) {
    throw std::runtime_error("dilation tail of " + w.id() + " did not reach tol within " + std::to_string(cap) +
                             " terms at " + q.to_string());
  }
  r.value = partial + rem->lo / vol;
  r.truncation_bound = rem->width() / vol;
  return r;
}

// Enclosure of int_{|x - c| >= D} (2h / (|x - c| + h))^{np} w(x) dx using the
// far-field power form of w.
std::optional<Interval> far_tail(const Weight& w, const Cube& q, double p, double D) {
  const auto ff = w.far_field();
  if (!ff) return std::nullopt;
  const int n = w.dim();
  const double c = q.center_norm();
  const double h = q.half_side();
  if (!(D - c >= ff->min_radius) || !(D > c)) return std::nullopt;
  const double np = n * p;
  const double g = n + ff->alpha;
  if (g >= np) return std::nullopt;
  const double rho = c / D;
  double mlo = std::pow(1.0 - rho, ff->alpha);
  double mhi = std::pow(1.0 + rho, ff->alpha);
  if (ff->alpha < 0.0) std::swap(mlo, mhi);
  const double k = ff->coeff * n * std::ldexp(1.0, n) * std::pow(2.0 * h, np) * std::pow(D, g - np) / (np - g);
  return Interval{k * mlo * std::pow(1.0 + h / D, -np), k * mhi};
}

TailReport continuous_tail_1d(const Weight& w, const Cube& q, double p, const TailOptions& options) {
  TailReport r;
  r.kind = TailKind::continuous;
  const double c = q.center()[0];
  const double h = q.half_side();
  const double k2h = std::pow(2.0 * h, p);
  if (const auto u = w.uniform_density()) {
    r.value = 2.0 * h * *u * (1.0 + 2.0 / (p - 1.0));
    return r;
  }
  if (const auto* g = dynamic_cast<const GridWeight*>(&w)) {
    const auto right = [&](double x) { return k2h * std::pow(x - c + h, 1.0 - p) / (1.0 - p); };
    const auto left = [&](double x) { return k2h * std::pow(c - x + h, 1.0 - p) / (p - 1.0); };
    const double inf = std::numeric_limits<double>::infinity();
    r.value = w.mass(q) + g->integrate_against(c + h, inf, right) + g->integrate_against(-inf, c - h, left);
    return r;
  }
  if (has_infinite_tails(w, p)) throw_divergent(w, p);
  const auto phi = [&](double d) { return k2h * std::pow(d + h, -p); };
  double near = w.mass(q);
  double qerr = 0.0;
  QuadratureOptions qo;
  qo.rel_tol = std::min(1e-11, options.tol * 1e-2);
  std::optional<Interval> far;
  double d0 = h;
  for (int k = 0; k < 200; ++k) {
    const double d1 = 2.0 * d0;
    const auto bp_r = w.breakpoints(c + d0, c + d1);
    const auto res_r = integrate_piecewise([&](double x) { return phi(x - c) * w.density({x, 0.0}); }, c + d0,
                                           c + d1, bp_r, qo);
    const auto bp_l = w.breakpoints(c - d1, c - d0);
    const auto res_l = integrate_piecewise([&](double x) { return phi(c - x) * w.density({x, 0.0}); }, c - d1,
                                           c - d0, bp_l, qo);
    near += res_r.value + res_l.value;
    qerr += res_r.error + res_l.error;
    r.terms = k + 1;
    d0 = d1;
    far = far_tail(w, q, p, d0);
    if (far && far->width() + 2.0 * qerr <= options.tol * std::max(1.0, near + far->lo)) break;
  }
  if (!far || far->width() + 2.0 * qerr > options.tol * std::max(1.0, near + far->lo)) {
    throw std::runtime_error("continuous tail of " + w.id() + " did not reach tol at " + q.to_string());
  }
  r.value = near - qerr + far->lo;
  r.truncation_bound = far->width() + 2.0 * qerr;
  return r;
}

TailReport continuous_tail_2d(const Weight& w, const Cube& q, double p, const TailOptions& options) {
  TailReport r;
  r.kind = TailKind::continuous;
  const double np = 2.0 * p;
  const double h = q.half_side();
  Interval total{w.mass(q), w.mass(q)};

  // Ring 3Q \ Q with certified cell bounds of M(chi_Q).
  const int m = std::max(1, options.ring_cells);
  const Grid ring{q.dilate(3.0), 3 * m};
  for (int j = 0; j < 3 * m; ++j) {
    for (int i = 0; i < 3 * m; ++i) {
      if (i >= m && i < 2 * m && j >= m && j < 2 * m) continue;
      const Box cell = ring.cell_box(ring.cell_index(i, j));
      const double mass = w.integral(cell);
      if (mass == 0.0) continue;
      const auto [lo, hi] = m_chi_cube_bounds(q, cell);
      total += Interval{std::pow(lo, p) * mass, std::pow(hi, p) * mass};
    }
  }

  // Beyond 3Q, M(chi_Q) = phi(d) exactly with d the distance to the center;
  // Stieltjes sums against W(d) = w(cube(c, d)) over geometric shells.
  const auto phi = [&](double d) { return std::pow(2.0 * h / (d + h), np); };
  const auto W = [&](double d) { return w.mass(Cube(2, q.center(), d)); };
  const auto supp = w.support();
  if (!supp && has_infinite_tails(w, p)) throw_divergent(w, p);
  double D_end = std::numeric_limits<double>::infinity();
  if (supp) {
    // Smallest radius whose cube around c covers the support.
    const auto& c = q.center();
    D_end = 3.0 * h;
    for (int a = 0; a < 2; ++a) {
      D_end = std::max({D_end, std::abs(supp->lo[a] - c[a]), std::abs(supp->hi[a] - c[a])});
    }
  }
  const double ratio = std::max(1.0 + 1e-6, options.shell_ratio);
  double d = 3.0 * h;
  double Wd = W(d);
  Interval shells{0.0, 0.0};
  std::optional<Interval> far;
  int steps = 0;
  while (true) {
    if (supp && d >= D_end) break;
    if (!supp) {
      far = far_tail(w, q, p, d);
      const double spread = total.width() + shells.width();
      if (far && far->width() <= std::max(options.tol * std::max(1.0, total.lo + shells.lo + far->lo),
                                          options.far_share * spread)) {
        break;
      }
    }
    double d1 = d * ratio;
    if (supp) d1 = std::min(d1, D_end);
    const double W1 = W(d1);
    const double dW = std::max(W1 - Wd, 0.0);
    shells += Interval{phi(d1) * dW, phi(d) * dW};
    d = d1;
    Wd = W1;
    if (++steps > 50'000'000) throw std::runtime_error("continuous tail: shell budget exhausted");
  }
  total += shells;
  r.terms = steps;
  r.annulus_width = total.width();
  r.value = total.lo;
  if (far) {
    r.value += far->lo;
    r.truncation_bound = far->width();
  }
  return r;
}

}  // namespace

TailReport discrete_tail(const Weight& w, const Cube& q, double p, const TailOptions& options) {
  return dilation_tail(w, q, p, 2.0, TailKind::discrete_2, options);
}

TailReport discrete_tail_s(const Weight& w, const Cube& q, double p, double s, const TailOptions& options) {
  return dilation_tail(w, q, p, s, TailKind::discrete_s, options);
}

TailReport continuous_tail(const Weight& w, const Cube& q, double p, const TailOptions& options) {
  check_exponent(p);
  if (q.dim() != w.dim()) throw std::invalid_argument("cube and weight dimensions differ");
  return w.dim() == 1 ? continuous_tail_1d(w, q, p, options) : continuous_tail_2d(w, q, p, options);
}

// ----------------------------------------------------------------------------

int numerator_cells_for(const Weight& w, const Cube& q, const EstimatorOptions& options) {
  if (options.numerator_cells > 0) return options.numerator_cells;
  if (w.uniform_density()) return 1;
  const int n = w.dim();
  const int cap = n == 1 ? 4096 : 64;
  const Grid* g = nullptr;
  if (const auto* gw = dynamic_cast<const GridWeight*>(&w)) g = &gw->grid();
  if (const auto* pw = dynamic_cast<const ProductWeight*>(&w)) g = &pw->bump_grid();
  if (g) {
    const int native = static_cast<int>(std::ceil(q.side() / g->cell_width() - 1e-9));
    const int floor_cells = dynamic_cast<const ProductWeight*>(&w) ? (n == 1 ? 64 : 16) : 1;
    return std::clamp(std::max(native, floor_cells), 1, cap);
  }
  return n == 1 ? 256 : 16;
}

std::vector<double> family_numerators(const Weight& w, const CubeFamily& family, const EstimatorOptions& options) {
  std::vector<double> out(family.cubes.size(), 0.0);
  parallel_for(out.size(), [&](std::size_t i) {
    const Cube& q = family.cubes[i];
    if (const auto u = w.uniform_density()) {
      out[i] = *u * q.volume();
      return;
    }
    out[i] = localized_maximal_integral(w, q, numerator_cells_for(w, q, options));
  });
  return out;
}

namespace {

// Fills value/upper/argmax/trace from per-cube lower and upper ratios.
ConstantEstimate summarize(const CubeFamily& family, const std::vector<double>& lo, const std::vector<double>& hi,
                           const std::vector<char>& skip) {
  ConstantEstimate e;
  e.family_size = family.cubes.size();
  e.per_cube = lo;
  bool any = false;
  std::size_t level = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (skip[i]) {
      ++e.skipped;
    } else {
      if (!any || lo[i] > e.value) {
        e.value = lo[i];
        e.argmax = family.cubes[i];
      }
      e.upper = any ? std::max(e.upper, hi[i]) : hi[i];
      any = true;
    }
    while (level < family.level_ends.size() && family.level_ends[level] == i + 1) {
      e.refinement_trace.emplace_back(static_cast<int>(level), e.value);
      ++level;
    }
  }
  if (!family.cubes.empty() && !any) e.argmax = family.cubes.front();
  return e;
}

std::vector<double> numerators_or(const Weight& w, const CubeFamily& family, const EstimatorOptions& options,
                                  const std::vector<double>* numerators) {
  if (numerators) {
    if (numerators->size() != family.cubes.size()) throw std::invalid_argument("numerator cache size mismatch");
    return *numerators;
  }
  return family_numerators(w, family, options);
}

}  // namespace

ConstantEstimate ainfty_constant(const Weight& w, const CubeFamily& family, const EstimatorOptions& options,
                                 const std::vector<double>* numerators) {
  const auto num = numerators_or(w, family, options, numerators);
  const std::size_t count = family.cubes.size();
  std::vector<double> lo(count, 0.0), hi(count, 0.0);
  std::vector<char> skip(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const double mass = w.mass(family.cubes[i]);
    if (!(mass > 0.0)) {
      skip[i] = 1;
      continue;
    }
    lo[i] = hi[i] = num[i] / mass;
  }
  return summarize(family, lo, hi, skip);
}

namespace {

template <typename TailFn>
ConstantEstimate ratio_estimate(const Weight& w, double p, const CubeFamily& family, const EstimatorOptions& options,
                                const std::vector<double>* numerators, TailFn&& tail) {
  ConstantEstimate e;
  if (has_infinite_tails(w, p)) {
    e.family_size = family.cubes.size();
    e.divergent = true;
    if (!family.cubes.empty()) e.argmax = family.cubes.front();
    return e;
  }
  const auto num = numerators_or(w, family, options, numerators);
  const std::size_t count = family.cubes.size();
  std::vector<double> lo(count, 0.0), hi(count, 0.0);
  std::vector<char> skip(count, 0);
  parallel_for(count, [&](std::size_t i) {
    const Interval a = tail(family.cubes[i]);
    if (!(a.lo > 0.0)) {
      skip[i] = 1;
      return;
    }
    lo[i] = num[i] / a.hi;
    hi[i] = num[i] / a.lo;
  });
  return summarize(family, lo, hi, skip);
}

}  // namespace

ConstantEstimate cp_constant(const Weight& w, double p, const CubeFamily& family, const EstimatorOptions& options,
                             const std::vector<double>* numerators) {
  return ratio_estimate(w, p, family, options, numerators,
                        [&](const Cube& q) { return continuous_tail(w, q, p, options.tails).interval(); });
}

ConstantEstimate cps_constant(const Weight& w, double p, double s, const CubeFamily& family,
                              const EstimatorOptions& options, const std::vector<double>* numerators) {
  return ratio_estimate(w, p, family, options, numerators, [&](const Cube& q) {
    const Interval a = discrete_tail_s(w, q, p, s, options.tails).interval();
    return q.volume() * a;
  });
}

ConstantEstimate rh_constant(const Weight& w, double r, const CubeFamily& family) {
  if (!(r > 0.0)) throw std::invalid_argument("reverse Holder exponent must be positive");
  const auto wr = w.pow(r);
  const std::size_t count = family.cubes.size();
  std::vector<double> lo(count, 0.0), hi(count, 0.0);
  std::vector<char> skip(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const Cube& q = family.cubes[i];
    const double a = w.avg(q);
    if (!(a > 0.0)) {
      skip[i] = 1;
      continue;
    }
    lo[i] = hi[i] = std::pow(wr->avg(q), 1.0 / r) / a;
  }
  return summarize(family, lo, hi, skip);
}

TheoremConstants theorem_constants(int n, double p, std::optional<double> s, double v) {
  if (n != 1 && n != 2) throw std::invalid_argument("dimension must be 1 or 2");
  check_exponent(p);
  if (!(v > 0.0)) throw std::invalid_argument("weight constant must be positive");
  TheoremConstants t;
  t.n = n;
  t.p = p;
  t.s = s;
  t.weight_constant = v;
  const double gap = 1.0 - std::pow(2.0, -n * (p - 1.0));
  t.alpha = 1.0 / gap;
  t.beta = 1.0 / (1.0 - std::pow(2.0, -n * p));
  const double twenty_n = std::pow(20.0, n);
  t.B = std::pow(2.0, 1.0 + 4.0 * n * p + 3.0 * n) * twenty_n / gap;
  t.A = twenty_n * std::pow(2.0, 1.0 + 3.0 * n) / gap;
  t.delta_cp = 1.0 / (t.B * std::max(v, 1.0));
  const double denom = std::pow(2.0, n + 1) * v - 1.0;
  t.delta_ainfty = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
  if (s) {
    if (!(*s > 1.0) || !(*s <= 2.0)) throw std::invalid_argument("dilation base s must satisfy 1 < s <= 2");
    t.A_sp = std::pow(5.0, n) * std::pow(2.0, 1.0 + 5.0 * n) / (1.0 - std::pow(*s, -n * (p - 1.0)));
    t.delta_dilation = 1.0 / (t.A_sp * std::max(1.0, v));
  }
  t.epsilon_cp = gap / (std::pow(2.0, 2.0 * n * p + 3.0 * n) * twenty_n) * std::min(1.0, 1.0 / v);
  return t;
}

}  // namespace weightlab

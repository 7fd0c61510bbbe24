#include "weightlab/sawyer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "weightlab/parallel.hpp"

namespace weightlab {

namespace {

// Whitney cubes of a cell set as cubes of R^n plus their cell ranges.
struct PlacedCube {
  Cube cube;
  std::array<int, 2> lo{0, 0};
  int span = 1;
  bool resolution_floor = false;
};

std::vector<PlacedCube> place(const WhitneyResult& res, const Grid& grid) {
  const int levels = grid.levels();
  std::vector<PlacedCube> out;
  out.reserve(res.cubes.size());
  for (const auto& wc : res.cubes) {
    PlacedCube pc;
    pc.cube = wc.cube.to_cube(grid.box);
    pc.span = 1 << (levels - wc.cube.level);
    pc.lo = {static_cast<int>(wc.cube.index[0]) * pc.span, static_cast<int>(wc.cube.index[1]) * pc.span};
    pc.resolution_floor = wc.resolution_floor;
    out.push_back(pc);
  }
  return out;
}

CellSet superlevel(const GridFunction& h, double t) {
  CellSet s(h.grid);
  for (std::size_t c = 0; c < h.values.size(); ++c) s.mask[c] = h.values[c] > t ? 1 : 0;
  return s;
}

// sum over Whitney cubes of {h > t} of (M chi_Q(x))^q at every cell center.
std::vector<double> whitney_potential(const GridFunction& h, double t, double q, const WhitneyOptions& options) {
  std::vector<double> acc(h.values.size(), 0.0);
  const CellSet omega = superlevel(h, t);
  if (omega.empty()) return acc;
  const auto cubes = place(whitney_decompose(omega, options), h.grid);
  parallel_for(acc.size(), [&](std::size_t c) {
    const Point x = h.grid.cell_center(c);
    double s = 0.0;
    for (const auto& pc : cubes) s += std::pow(m_chi_cube(pc.cube, x), q);
    acc[c] = s;
  });
  return acc;
}

}  // namespace

LevelRange required_levels(const GridFunction& h) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (double v : h.values) {
    if (v > 0.0) {
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (!any) return {0, -1};
  return {static_cast<int>(std::floor(std::log2(lo))), static_cast<int>(std::ceil(std::log2(hi)))};
}

GridFunction marcinkiewicz_mpq(const GridFunction& h, double p, double q, LevelRange range,
                               const WhitneyOptions& whitney) {
  if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("M_{p,q} needs p, q > 0");
  for (double v : h.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("M_{p,q} needs a finite non-negative h");
  }
  GridFunction out(h.grid);
  const LevelRange need = required_levels(h);
  if (need.k_max < need.k_min) return out;
  if (range.k_min > need.k_min || range.k_max < need.k_max) {
    throw std::invalid_argument("level range [" + std::to_string(range.k_min) + ", " + std::to_string(range.k_max) +
                                "] does not cover the required range [" + std::to_string(need.k_min) + ", " +
                                std::to_string(need.k_max) + "]");
  }
  if (range.k_max - range.k_min + 1 > 64) throw std::invalid_argument("M_{p,q} is capped at 64 dyadic levels");
  // Below k_min every superlevel set is {h > 0}.
  const auto base = whitney_potential(h, 0.0, q, whitney);
  const double below = std::pow(2.0, range.k_min * p) / (std::pow(2.0, p) - 1.0);
  for (std::size_t c = 0; c < out.values.size(); ++c) out.values[c] = below * base[c];
  for (int k = range.k_min; k < range.k_max; ++k) {
    const auto pot = whitney_potential(h, std::ldexp(1.0, k), q, whitney);
    const double wk = std::pow(2.0, k * p);
    for (std::size_t c = 0; c < out.values.size(); ++c) out.values[c] += wk * pot[c];
  }
  for (auto& v : out.values) v = std::pow(v, 1.0 / p);
  return out;
}

LevelSetProfile fefferman_stein_profile(const Cube& q, const std::vector<Cube>& subcubes, double exponent, double R,
                                        int resolution, int levels) {
  if (!(R >= 1.0)) throw std::invalid_argument("dilation R must be at least 1");
  if (levels < 2) throw std::invalid_argument("profile needs at least two levels");
  for (std::size_t i = 0; i < subcubes.size(); ++i) {
    const Box bi = subcubes[i].box();
    if (!q.box().contains(bi)) throw std::invalid_argument("subcube " + subcubes[i].to_string() + " is not inside Q");
    for (std::size_t j = i + 1; j < subcubes.size(); ++j) {
      if (!bi.intersect(subcubes[j].box()).empty()) {
        throw std::invalid_argument("subcubes " + subcubes[i].to_string() + " and " + subcubes[j].to_string() +
                                    " overlap");
      }
    }
  }
  const Grid grid{q.dilate(R), resolution};
  std::vector<double> s(grid.cell_count(), 0.0);
  parallel_for(s.size(), [&](std::size_t c) {
    const Point x = grid.cell_center(c);
    double v = 0.0;
    for (const auto& qj : subcubes) v += std::pow(m_chi_cube(qj, x), exponent);
    s[c] = v;
  });
  const double top = s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  LevelSetProfile prof;
  std::vector<double> fx, fy;
  for (int i = 0; i < levels; ++i) {
    const double lambda = top * i / levels;
    std::size_t count = 0;
    for (double v : s) count += v > lambda ? 1 : 0;
    const double measure = static_cast<double>(count) * grid.cell_volume();
    prof.lambdas.push_back(lambda);
    prof.measures.push_back(measure);
    if (measure > 0.0) {
      fx.push_back(lambda);
      fy.push_back(std::log(measure));
    }
  }
  prof.fit = fit_linear(fx, fy);
  return prof;
}

GridFunction truncated_hilbert_maximal(const GridFunction& f) {
  if (f.grid.dim() != 1) throw std::invalid_argument("truncated Hilbert maximal operator is one-dimensional");
  const auto n = static_cast<std::ptrdiff_t>(f.values.size());
  GridFunction out(f.grid);
  const double* v = f.values.data();
  parallel_for(f.values.size(), [&](std::size_t idx) {
    const auto i = static_cast<std::ptrdiff_t>(idx);
    const std::ptrdiff_t reach = std::max(i, n - 1 - i);
    double sum = 0.0, best = 0.0;
    // After adding distance d the sum is the truncation at radius (d - 1) cells.
    for (std::ptrdiff_t d = reach; d >= 1; --d) {
      const double left = i - d >= 0 ? v[i - d] : 0.0;
      const double right = i + d < n ? v[i + d] : 0.0;
      sum += (left - right) / static_cast<double>(d);
      best = std::max(best, std::abs(sum));
    }
    out.values[idx] = best;
  });
  return out;
}

Signal make_signal(const std::string& type, const Grid& grid) {
  if (grid.dim() != 1) throw std::invalid_argument("signals are one-dimensional");
  std::function<double(double)> g;
  if (type == "bump") {
    g = [](double x) { return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; };
  } else if (type == "step") {
    g = [](double x) { return x >= -1.0 && x < 0.0 ? 1.0 : (x >= 0.0 && x < 1.0 ? -1.0 : 0.0); };
  } else if (type == "chirp") {
    g = [](double x) { return std::abs(x) < 1.0 ? std::sin(4.0 * std::numbers::pi * (x + 1.0) * (x + 1.0)) : 0.0; };
  } else {
    throw std::invalid_argument("unknown signal type '" + type + "' (expected bump, step or chirp)");
  }
  Signal s{type, GridFunction(grid)};
  for (std::size_t c = 0; c < s.values.values.size(); ++c) s.values.values[c] = g(grid.cell_center(c)[0]);
  return s;
}

Signal signal_from_spec(const std::string& json_text, const Grid& grid) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed signal spec: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw std::invalid_argument("signal spec needs a string field 'type'");
  }
  Signal s = make_signal(j["type"].get<std::string>(), grid);
  if (j.contains("scale")) {
    if (!j["scale"].is_number()) throw std::invalid_argument("signal 'scale' must be a number");
    const double c = j["scale"].get<double>();
    for (auto& v : s.values.values) v *= c;
    s.id += "*" + std::to_string(c);
  }
  return s;
}

GoodLambdaResult good_lambda_measure(const GridFunction& f, const Weight& w, const GoodLambdaConfig& config) {
  if (config.gammas.empty()) throw std::invalid_argument("good-lambda needs at least one gamma");
  for (double g : config.gammas) {
    if (!(g > 0.0)) throw std::invalid_argument("gammas must be positive");
  }
  const GridFunction t = truncated_hilbert_maximal(f);
  const GridFunction m = hl_maximal(f);
  std::vector<double> cell_w(f.values.size());
  for (std::size_t c = 0; c < cell_w.size(); ++c) cell_w[c] = w.integral(f.grid.cell_box(c));
  GoodLambdaResult res;
  res.max_fraction.assign(config.gammas.size(), 0.0);
  const double tmax = t.max();
  if (!(tmax > 0.0)) return res;
  int k_min = config.k_min, k_max = config.k_max;
  if (k_min > k_max) {
    k_max = static_cast<int>(std::ceil(std::log2(tmax))) - 2;
    k_min = k_max - config.automatic_levels + 1;
  }
  WhitneyOptions wo;
  wo.R = config.R;
  for (int k = k_min; k <= k_max; ++k) {
    const double lambda = std::ldexp(1.0, k);
    const CellSet omega = superlevel(t, lambda);
    if (omega.empty()) continue;
    const auto cubes = place(whitney_decompose(omega, wo), f.grid);
    for (std::size_t gi = 0; gi < config.gammas.size(); ++gi) {
      const double gamma = config.gammas[gi];
      GoodLambdaRow row{k, gamma, 0.0, 0.0, cubes.size()};
      for (const auto& pc : cubes) {
        if (pc.resolution_floor && !config.include_floor_cubes) continue;
        std::size_t hit = 0;
        double wq = 0.0, whit = 0.0;
        for (int i = pc.lo[0]; i < pc.lo[0] + pc.span; ++i) {
          const std::size_t c = static_cast<std::size_t>(i);
          wq += cell_w[c];
          if (t.values[c] > 2.0 * lambda && m.values[c] <= gamma * lambda) {
            ++hit;
            whit += cell_w[c];
          }
        }
        row.fraction = std::max(row.fraction, static_cast<double>(hit) / pc.span);
        if (wq > 0.0) row.weighted_fraction = std::max(row.weighted_fraction, whit / wq);
      }
      res.max_fraction[gi] = std::max(res.max_fraction[gi], row.fraction);
      res.rows.push_back(row);
    }
  }
  std::vector<double> x, y;
  for (std::size_t gi = 0; gi < config.gammas.size(); ++gi) {
    if (res.max_fraction[gi] > 0.0) {
      x.push_back(1.0 / config.gammas[gi]);
      y.push_back(std::log(res.max_fraction[gi]));
    }
  }
  res.fit = fit_linear(x, y);
  return res;
}

CfiRow cfi_ratio(const Signal& f, const Weight& w, double p, double q, const CubeFamily& family,
                 const EstimatorOptions& options) {
  if (!(p > 1.0) || !(q > p)) throw std::invalid_argument("CFI ratio requires q > p > 1");
  CfiRow row;
  row.weight_id = w.id();
  row.signal_id = f.id;
  row.p = p;
  row.q = q;
  row.factor = q + q * p * p / (q - p);
  const GridFunction t = truncated_hilbert_maximal(f.values);
  const GridFunction m = hl_maximal(f.values);
  double st = 0.0, sm = 0.0;
  for (std::size_t c = 0; c < t.values.size(); ++c) {
    const double wc = w.integral(f.values.grid.cell_box(c));
    st += std::pow(t.values[c], p) * wc;
    sm += std::pow(m.values[c], p) * wc;
  }
  row.norm_tstar = std::pow(st, 1.0 / p);
  row.norm_maximal = std::pow(sm, 1.0 / p);
  row.degenerate = !(row.norm_maximal > 0.0);
  row.ratio = row.degenerate ? 0.0 : row.norm_tstar / row.norm_maximal;
  const auto num = family_numerators(w, family, options);
  row.cq = cp_constant(w, q, family, options, &num).value;
  row.cp = cp_constant(w, p, family, options, &num).value;
  row.bound_value = phi_cfi(std::max(row.cq, 1.0));
  row.bound_value_p = phi_cfi(std::max(row.cp, 1.0));
  return row;
}

}  // namespace weightlab

#include "weightlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "weightlab/parallel.hpp"

namespace weightlab {

namespace {

struct Test {
  double margin = std::numeric_limits<double>::infinity();
  double lhs = 0.0;
  double rhs = 0.0;
  bool skipped = false;
  bool half_passed = true;
  std::vector<std::pair<std::string, double>> extra;
};

double relative_margin(double lhs, double rhs) {
  if (rhs > 0.0) return (rhs - lhs) / rhs;
  if (lhs <= 0.0) return 0.0;
  return -std::numeric_limits<double>::infinity();
}

// Deterministic min-reduction in family order.
Verdict reduce(const std::string& theorem, const Weight& w, const CubeFamily& family, const std::vector<Test>& tests,
               double slack, std::vector<std::pair<std::string, double>> common) {
  Verdict v;
  v.theorem = theorem;
  v.slack = slack;
  v.worst_margin = std::numeric_limits<double>::infinity();
  v.witness.weight_id = w.id();
  bool any = false;
  bool half_ok = true;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const Test& t = tests[i];
    if (t.skipped) {
      ++v.skipped;
      continue;
    }
    ++v.tests_run;
    half_ok = half_ok && t.half_passed;
    if (!any || t.margin < v.worst_margin) {
      any = true;
      v.worst_margin = t.margin;
      v.witness.cube = family.cubes[i];
      v.witness.params = common;
      v.witness.params.emplace_back("lhs", t.lhs);
      v.witness.params.emplace_back("rhs", t.rhs);
      for (const auto& e : t.extra) v.witness.params.push_back(e);
    }
  }
  if (!any) {
    v.worst_margin = 0.0;
    v.witness.params = common;
    if (!family.cubes.empty()) v.witness.cube = family.cubes.front();
  }
  v.passed = v.worst_margin >= -slack;
  v.only_half_exponent_passed = !v.passed && half_ok && any;
  return v;
}

// Runs an RHI check at delta and, when enabled, delta / 2.
template <typename Rhs>
Verdict rhi_check(const std::string& theorem, const Weight& w, const CubeFamily& family, double delta,
                  double constant, const VerifyOptions& options, std::vector<std::pair<std::string, double>> common,
                  Rhs&& rhs_of) {
  const auto wp = w.pow(1.0 + delta);
  const auto wh = w.pow(1.0 + 0.5 * delta);
  std::vector<Test> tests(family.cubes.size());
  parallel_for(tests.size(), [&](std::size_t i) {
    const Cube& q = family.cubes[i];
    Test& t = tests[i];
    if (!(w.mass(q) > 0.0)) {
      t.skipped = true;
      return;
    }
    t.rhs = rhs_of(q);
    t.lhs = std::pow(wp->avg(q), 1.0 / (1.0 + delta));
    t.margin = relative_margin(t.lhs, t.rhs);
    if (options.half_delta_guard) {
      const double lh = std::pow(wh->avg(q), 1.0 / (1.0 + 0.5 * delta));
      t.half_passed = relative_margin(lh, t.rhs) >= -options.slack;
      t.extra.emplace_back("lhs_half_delta", lh);
    }
  });
  common.emplace_back("delta", delta);
  common.emplace_back("weight_constant", constant);
  Verdict v = reduce(theorem, w, family, tests, options.slack, std::move(common));
  v.delta = delta;
  v.weight_constant = constant;
  if (v.only_half_exponent_passed) v.notes.push_back("only the halved exponent passes");
  return v;
}

Verdict divergent_verdict(const std::string& theorem, const Weight& w, const CubeFamily& family, double p) {
  Verdict v;
  v.theorem = theorem;
  v.witness.weight_id = w.id();
  if (!family.cubes.empty()) v.witness.cube = family.cubes.front();
  v.witness.params = {{"p", p}};
  v.skipped = family.cubes.size();
  v.notes.push_back("infinite C_p-tails; checks skipped");
  return v;
}

}  // namespace

Verdict combine(const std::string& theorem, const std::vector<Verdict>& parts) {
  Verdict v;
  v.theorem = theorem;
  v.worst_margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& p : parts) {
    v.tests_run += p.tests_run;
    v.skipped += p.skipped;
    v.passed = v.passed && p.passed;
    v.only_half_exponent_passed = v.only_half_exponent_passed || p.only_half_exponent_passed;
    v.slack = p.slack;
    for (const auto& n : p.notes) v.notes.push_back(p.witness.weight_id + ": " + n);
    if (p.tests_run > 0 && (!any || p.worst_margin < v.worst_margin)) {
      any = true;
      v.worst_margin = p.worst_margin;
      v.witness = p.witness;
      v.delta = p.delta;
      v.weight_constant = p.weight_constant;
    }
  }
  if (!any) {
    v.worst_margin = 0.0;
    if (!parts.empty()) v.witness = parts.front().witness;
  }
  return v;
}

Verdict check_tail_equivalence(const Weight& w, const CubeFamily& family, double p, const VerifyOptions& options) {
  const std::string theorem = "tail-equivalence";
  if (has_infinite_tails(w, p)) return divergent_verdict(theorem, w, family, p);
  const int n = w.dim();
  const TheoremConstants tc = theorem_constants(n, p, std::nullopt, 1.0);
  const double upper_factor = std::pow(4.0, n * p) / tc.beta;
  std::vector<Test> tests(family.cubes.size());
  parallel_for(tests.size(), [&](std::size_t i) {
    const Cube& q = family.cubes[i];
    const TailReport a = discrete_tail(w, q, p, options.estimator.tails);
    const TailReport t = continuous_tail(w, q, p, options.estimator.tails);
    const double vol = q.volume();
    // Lower: a / beta <= tail / |Q|; upper: tail / |Q| <= 4^{np} a / beta.
    const double low_lhs = a.upper() / tc.beta;
    const double low_rhs = t.value / vol;
    const double up_lhs = t.upper() / vol;
    const double up_rhs = upper_factor * a.value;
    const double m_low = relative_margin(low_lhs, low_rhs);
    const double m_up = relative_margin(up_lhs, up_rhs);
    Test& r = tests[i];
    if (m_low <= m_up) {
      r = {m_low, low_lhs, low_rhs, false, true, {{"side", 0.0}}};
    } else {
      r = {m_up, up_lhs, up_rhs, false, true, {{"side", 1.0}}};
    }
    r.extra.emplace_back("tail_truncation", t.truncation_bound);
    r.extra.emplace_back("tail_annulus_width", t.annulus_width);
    r.extra.emplace_back("discrete_truncation", a.truncation_bound);
  });
  Verdict v = reduce(theorem, w, family, tests, options.slack, {{"p", p}, {"beta", tc.beta}});
  return v;
}

Verdict check_rhi_cp(const Weight& w, const CubeFamily& family, double p, const VerifyOptions& options) {
  const std::string theorem = "rhi-cp";
  if (has_infinite_tails(w, p)) return divergent_verdict(theorem, w, family, p);
  const ConstantEstimate est = cp_constant(w, p, family, options.estimator);
  if (!(est.value > 0.0)) {
    Verdict v = divergent_verdict(theorem, w, family, p);
    v.notes = {"C_p constant estimate is zero; checks skipped"};
    return v;
  }
  const TheoremConstants tc = theorem_constants(w.dim(), p, std::nullopt, est.value);
  return rhi_check(theorem, w, family, tc.delta_cp, est.value, options, {{"p", p}}, [&](const Cube& q) {
    return 4.0 * continuous_tail(w, q, p, options.estimator.tails).value / q.volume();
  });
}

Verdict check_rhi_ainfty(const Weight& w, const CubeFamily& family, const VerifyOptions& options) {
  const std::string theorem = "rhi-ainfty";
  const ConstantEstimate est = ainfty_constant(w, family, options.estimator);
  if (est.skipped == est.family_size) throw std::invalid_argument("every cube of the family has zero mass");
  const TheoremConstants tc = theorem_constants(w.dim(), 2.0, std::nullopt, est.value);
  return rhi_check(theorem, w, family, tc.delta_ainfty, est.value, options, {},
                   [&](const Cube& q) { return 2.0 * w.avg(q); });
}

Verdict check_rhi_dilation(const Weight& w, const CubeFamily& family, double p, double s,
                           const VerifyOptions& options) {
  const std::string theorem = "rhi-dilation";
  if (has_infinite_tails(w, p)) return divergent_verdict(theorem, w, family, p);
  const ConstantEstimate est = cps_constant(w, p, s, family, options.estimator);
  const TheoremConstants tc = theorem_constants(w.dim(), p, s, std::max(est.value, 1e-300));
  const double factor = std::ldexp(1.0, w.dim()) + 1.0;
  return rhi_check(theorem, w, family, tc.delta_dilation, est.value, options, {{"p", p}, {"s", s}},
                   [&](const Cube& q) { return factor * discrete_tail_s(w, q.dilate(s), p, s, options.estimator.tails).value; });
}

std::vector<CellSet> cp_definition_subsets(const Cube& q, int depth, int random_unions, std::mt19937_64& rng) {
  if (depth < 0 || depth > 10) throw std::invalid_argument("subset depth out of range");
  const Grid grid{q, 1 << depth};
  std::vector<CellSet> out;
  for (const DyadicCube& d : dyadic_cubes(q.dim(), depth)) {
    CellSet e(grid);
    const int span = 1 << (depth - d.level);
    for (int j = 0; j < (q.dim() == 2 ? span : 1); ++j) {
      for (int i = 0; i < span; ++i) {
        e.mask[grid.cell_index(static_cast<int>(d.index[0]) * span + i,
                               q.dim() == 2 ? static_cast<int>(d.index[1]) * span + j : 0)] = 1;
      }
    }
    out.push_back(std::move(e));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < random_unions; ++r) {
    CellSet e(grid);
    const double density = unit(rng);
    for (auto& m : e.mask) m = unit(rng) < density ? 1 : 0;
    out.push_back(std::move(e));
  }
  return out;
}

Verdict check_cp_definition(const Weight& w, const Cube& q, double p, double cp_value,
                            const std::vector<CellSet>& subsets, const VerifyOptions& options) {
  const std::string theorem = "cp-definition";
  CubeFamily single{{q}, "single", q, {0}};
  if (has_infinite_tails(w, p)) return divergent_verdict(theorem, w, single, p);
  const TheoremConstants tc = theorem_constants(w.dim(), p, std::nullopt, std::max(cp_value, 1e-300));
  const double eps = tc.epsilon_cp;
  const double tail = continuous_tail(w, q, p, options.estimator.tails).value;
  std::vector<double> cell_mass;
  const Grid* grid = nullptr;
  std::vector<Test> tests(subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    const CellSet& e = subsets[k];
    if (!(e.grid.box == q)) throw std::invalid_argument("subset grid must cover exactly the tested cube");
    if (!grid || grid->resolution != e.grid.resolution) {
      grid = &e.grid;
      cell_mass.assign(grid->cell_count(), 0.0);
      for (std::size_t c = 0; c < cell_mass.size(); ++c) cell_mass[c] = w.integral(grid->cell_box(c));
    }
    double mass = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < e.mask.size(); ++c) {
      if (e.mask[c]) {
        mass += cell_mass[c];
        ++count;
      }
    }
    const double frac = static_cast<double>(count) / static_cast<double>(e.mask.size());
    Test& t = tests[k];
    t.lhs = mass;
    t.rhs = count == 0 ? 0.0 : 2.0 * std::pow(frac, eps) * tail;
    t.margin = relative_margin(t.lhs, t.rhs);
    t.extra = {{"subset", static_cast<double>(k)}, {"measure_fraction", frac}};
  }
  CubeFamily repeated{std::vector<Cube>(subsets.size(), q), "subsets", q, {}};
  Verdict v = reduce(theorem, w, repeated, tests, options.slack, {{"p", p}, {"epsilon", eps}});
  v.weight_constant = cp_value;
  return v;
}

Verdict check_monotonicity(const Weight& w, const CubeFamily& family, double q, double p,
                           const VerifyOptions& options) {
  if (!(q <= p)) throw std::invalid_argument("monotonicity chain needs q <= p");
  const auto num = family_numerators(w, family, options.estimator);
  const ConstantEstimate cq = cp_constant(w, q, family, options.estimator, &num);
  const ConstantEstimate cp = cp_constant(w, p, family, options.estimator, &num);
  const ConstantEstimate ca = ainfty_constant(w, family, options.estimator, &num);
  Verdict v;
  v.theorem = "monotonicity";
  v.slack = options.slack;
  v.witness.weight_id = w.id();
  v.witness.cube = cp.argmax;
  // Adverse ends: lower estimate of the smaller side against the upper
  // estimate of the larger side.
  const double m1 = relative_margin(cq.value, cp.upper);
  const double m2 = relative_margin(cp.value, ca.upper);
  v.worst_margin = std::min(m1, m2);
  if (cq.divergent && cp.divergent) v.worst_margin = m2;
  v.tests_run = 2;
  v.passed = v.worst_margin >= -options.slack;
  v.witness.params = {{"q", q}, {"p", p}, {"cp_q", cq.value}, {"cp_p", cp.value}, {"cp_p_upper", cp.upper},
                      {"ainfty", ca.value}};
  if (cq.divergent) v.notes.push_back("C_q tails infinite: [w]_{C_q} = 0");
  if (cp.divergent) v.notes.push_back("C_p tails infinite: [w]_{C_p} = 0");
  return v;
}

SweepResult sweep_power_weights(double p, const std::vector<double>& eps_list, const CubeFamily& family,
                                const EstimatorOptions& options) {
  SweepResult out;
  out.p = p;
  const int n = family.ambient.dim();
  for (double eps : eps_list) {
    if (!(eps > 0.0) || !(eps <= p - 1.0)) throw std::invalid_argument("sweep needs 0 < eps <= p - 1");
    const PowerWeight w(n, n * (p - 1.0 - eps));
    const ConstantEstimate e = cp_constant(w, p, family, options);
    out.rows.push_back({eps, e.value, e.upper, e.value / eps, e.argmax});
  }
  auto sorted = out.rows;
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow& a, const SweepRow& b) { return a.eps > b.eps; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    // Compare with the adverse ends of the denominator intervals.
    if (!(sorted[i].cp_upper < sorted[i - 1].cp)) out.strictly_decreasing = false;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : out.rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  out.ratio_band = out.rows.empty() || !(lo > 0.0) ? 0.0 : hi / lo;
  return out;
}

}  // namespace weightlab

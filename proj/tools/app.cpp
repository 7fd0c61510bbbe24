#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "weightlab/geometry.hpp"
#include "weightlab/sawyer.hpp"
#include "weightlab/tails.hpp"
#include "weightlab/verify.hpp"
#include "weightlab/weights.hpp"

namespace weightlab::app {

using nlohmann::ordered_json;

namespace {

struct NamedWeight {
  std::string label;
  WeightPtr weight;
};

void validate(const RunConfig& c) {
  if (c.n != 1 && c.n != 2) throw UsageError("--n must be 1 or 2");
  if (c.resolution < 2 || (c.resolution & (c.resolution - 1)) != 0) {
    throw UsageError("--resolution must be a power of two >= 2");
  }
  if (c.depth < 0 || c.depth > kMaxFamilyDepth) {
    throw UsageError("--depth must lie in [0, " + std::to_string(kMaxFamilyDepth) + "]");
  }
  if (!(c.tol > 0.0)) throw UsageError("--tol must be positive");
  if (!(c.box > 0.0)) throw UsageError("--box must be positive");
  for (double p : c.p) {
    if (!(p > 1.0)) throw UsageError("every --p must exceed 1");
  }
  for (double s : c.s) {
    if (!(s > 1.0 && s <= 2.0)) throw UsageError("every --s must lie in (1, 2]");
  }
  if (c.format != "json" && c.format != "csv" && c.format != "both") {
    throw UsageError("--format must be json, csv or both");
  }
  if (c.format != "json" && c.out.empty()) throw UsageError("--format csv/both needs --out");
  if (c.random_weights < 0) throw UsageError("--random must be non-negative");
}

std::string base_dir_of(const std::string& spec) {
  if (!spec.empty() && spec[0] == '@') {
    const auto parent = std::filesystem::path(spec.substr(1)).parent_path();
    return parent.empty() ? "." : parent.string();
  }
  return ".";
}

WeightPtr parse_weight(const std::string& spec, int n) {
  WeightPtr w;
  try {
    w = weight_from_spec(load_spec(spec), base_dir_of(spec));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  if (w->dim() != n) throw UsageError("weight spec dimension " + std::to_string(w->dim()) + " does not match --n");
  return w;
}

Cube ambient(const RunConfig& c) { return Cube(c.n, {0.0, 0.0}, c.box); }

std::vector<NamedWeight> build_weights(const RunConfig& c) {
  std::vector<NamedWeight> out;
  const bool gal = c.weights == "gallery" || c.weights == "all";
  const bool rnd = c.weights == "random" || c.weights == "all";
  if (!gal && !rnd && c.weights != "none") throw UsageError("--weights must be gallery, random, all or none");
  if (gal) {
    GalleryParams gp;
    gp.dim = c.n;
    gp.resolution = c.resolution;
    for (const auto& name : gallery_names()) out.push_back({"gallery:" + name, gallery(name, gp)});
  }
  if (rnd) {
    std::mt19937_64 rng(c.seed);
    const int res = c.n == 1 ? std::min(c.resolution, 1024) : std::min(c.resolution, 64);
    const Grid g{ambient(c), res};
    for (int i = 0; i < c.random_weights; ++i) {
      const std::string name = "random" + std::to_string(i);
      out.push_back({"random:" + std::to_string(i), random_grid_weight(g, rng, name)});
    }
  }
  for (std::size_t i = 0; i < c.weight_specs.size(); ++i) {
    out.push_back({"spec:" + std::to_string(i), parse_weight(c.weight_specs[i], c.n)});
  }
  return out;
}

EstimatorOptions estimator_options(const RunConfig& c) {
  EstimatorOptions o;
  o.tails.tol = c.tol;
  return o;
}

VerifyOptions verify_options(const RunConfig& c) {
  VerifyOptions o;
  o.estimator = estimator_options(c);
  return o;
}

ordered_json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json cube_json(const Cube& q) {
  ordered_json j;
  ordered_json center = ordered_json::array();
  for (int a = 0; a < q.dim(); ++a) center.push_back(q.center()[a]);
  j["center"] = center;
  j["half_side"] = q.half_side();
  j["text"] = q.to_string();
  return j;
}

ordered_json verdict_json(const std::string& label, const Verdict& v) {
  ordered_json j;
  j["theorem"] = v.theorem;
  j["weight"] = label;
  j["weight_id"] = v.witness.weight_id;
  j["passed"] = v.passed;
  j["worst_margin"] = number(v.worst_margin);
  j["slack"] = v.slack;
  j["tests_run"] = v.tests_run;
  j["skipped"] = v.skipped;
  j["only_half_exponent_passed"] = v.only_half_exponent_passed;
  j["weight_constant"] = number(v.weight_constant);
  j["delta"] = number(v.delta);
  ordered_json w;
  w["cube"] = cube_json(v.witness.cube);
  ordered_json params = ordered_json::object();
  for (const auto& [k, x] : v.witness.params) params[k] = number(x);
  w["params"] = params;
  j["witness"] = w;
  j["notes"] = v.notes;
  return j;
}

ordered_json estimate_json(const ConstantEstimate& e) {
  ordered_json j;
  j["value"] = number(e.value);
  j["upper"] = number(e.upper);
  j["divergent"] = e.divergent;
  j["argmax_cube"] = cube_json(e.argmax);
  j["family_size"] = e.family_size;
  j["skipped"] = e.skipped;
  ordered_json trace = ordered_json::array();
  for (const auto& [d, v] : e.refinement_trace) trace.push_back({d, number(v)});
  j["refinement_trace"] = trace;
  return j;
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << csv_field(cells[i]);
    os_ << "\n";
  }
  std::string str() const { return os_.str(); }

 private:
  std::size_t width_;
  std::ostringstream os_;
};

ordered_json config_json(const RunConfig& c, const std::string& command) {
  ordered_json j;
  j["command"] = command;
  j["n"] = c.n;
  j["resolution"] = c.resolution;
  j["depth"] = c.depth;
  j["box"] = c.box;
  j["p"] = c.p;
  j["q"] = c.q;
  j["s"] = c.s;
  j["r"] = c.r;
  j["gammas"] = c.gammas;
  j["eps"] = c.eps;
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["weights"] = c.weights;
  j["weight_specs"] = c.weight_specs;
  j["random_weights"] = c.random_weights;
  j["signal"] = c.signal;
  j["format"] = c.format;
  return j;
}

ordered_json report_header(const RunConfig& c, const std::string& command) {
  ordered_json r;
  r["schema"] = kSchema;
  r["version"] = kVersion;
  r["timestamp"] = c.timestamp;
  r["config"] = config_json(c, command);
  return r;
}

std::string summary_line(const std::string& label, const Verdict& v) {
  std::ostringstream os;
  os << (v.passed ? "[PASS] " : "[FAIL] ") << v.theorem << " " << label;
  for (const auto& [k, x] : v.witness.params) {
    if (k == "p" || k == "q" || k == "s") os << " " << k << "=" << x;
  }
  os << " margin=" << v.worst_margin << " tests=" << v.tests_run << " skipped=" << v.skipped;
  if (!v.passed) os << " witness=" << v.witness.cube.to_string();
  if (v.only_half_exponent_passed) os << " (only delta/2 passes)";
  return os.str();
}

struct Entry {
  std::string suite;
  std::string label;
  Verdict verdict;
};

std::vector<Entry> run_suite(const std::string& suite, const RunConfig& c, const std::vector<NamedWeight>& weights,
                             const CubeFamily& family) {
  const VerifyOptions vo = verify_options(c);
  std::vector<Entry> out;
  if (suite == "tail-equivalence") {
    for (const auto& nw : weights) {
      for (double p : {1.5, 2.0, 3.0}) out.push_back({suite, nw.label, check_tail_equivalence(*nw.weight, family, p, vo)});
    }
  } else if (suite == "rhi-cp") {
    for (const auto& nw : weights) {
      for (double p : c.p) out.push_back({suite, nw.label, check_rhi_cp(*nw.weight, family, p, vo)});
    }
  } else if (suite == "rhi-ainfty") {
    for (const auto& nw : weights) out.push_back({suite, nw.label, check_rhi_ainfty(*nw.weight, family, vo)});
    for (double a : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
      if (!(a > -c.n)) continue;
      const PowerWeight w(c.n, a);
      out.push_back({suite, "power:" + fmt(a), check_rhi_ainfty(w, family, vo)});
    }
  } else if (suite == "rhi-dilation") {
    for (const auto& nw : weights) {
      for (double s : c.s) out.push_back({suite, nw.label, check_rhi_dilation(*nw.weight, family, c.p.front(), s, vo)});
    }
  } else if (suite == "cp-definition") {
    const double p = c.p.front();
    const int sub_depth = c.n == 1 ? 6 : 4;
    const std::size_t cubes = std::min<std::size_t>(family.cubes.size(), c.n == 1 ? 7 : 5);
    std::uint64_t stream = 0;
    for (const auto& nw : weights) {
      const ConstantEstimate est = cp_constant(*nw.weight, p, family, vo.estimator);
      std::vector<Verdict> parts;
      for (std::size_t i = 0; i < cubes; ++i) {
        std::mt19937_64 rng(c.seed * 0x9E3779B97F4A7C15ULL + (++stream));
        const auto subsets = cp_definition_subsets(family.cubes[i], sub_depth, 100, rng);
        parts.push_back(check_cp_definition(*nw.weight, family.cubes[i], p, est.value, subsets, vo));
      }
      Verdict v = combine("cp-definition", parts);
      v.weight_constant = est.value;
      out.push_back({suite, nw.label, v});
    }
  } else if (suite == "monotonicity") {
    for (const auto& nw : weights) {
      for (auto [q, p] : {std::pair{1.5, 2.0}, std::pair{2.0, 3.0}}) {
        out.push_back({suite, nw.label, check_monotonicity(*nw.weight, family, q, p, vo)});
      }
    }
  } else if (suite == "power-sweep") {
    const double p = c.p.front();
    const SweepResult sw = sweep_power_weights(p, c.eps, family, vo.estimator);
    Verdict v;
    v.theorem = "power-sweep";
    v.slack = 0.0;
    v.witness.weight_id = "power_eps";
    v.tests_run = sw.rows.size();
    v.passed = sw.strictly_decreasing;
    v.worst_margin = sw.strictly_decreasing ? 0.0 : -1.0;
    v.witness.params = {{"p", p}, {"ratio_band", sw.ratio_band}};
    for (const auto& row : sw.rows) {
      v.witness.params.emplace_back("cp_eps_" + fmt(row.eps), row.cp);
    }
    if (!sw.rows.empty()) v.witness.cube = sw.rows.back().argmax;
    v.notes.push_back("ratio band max/min of cp/eps = " + fmt(sw.ratio_band) + " (reported, not asserted)");
    out.push_back({suite, "power_eps", v});
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  return out;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> suites{"tail-equivalence", "rhi-cp",       "rhi-ainfty", "rhi-dilation",
                                               "cp-definition",    "monotonicity", "power-sweep"};
  return suites;
}

std::string load_spec(const std::string& spec) {
  if (spec.empty() || spec[0] != '@') return spec;
  std::ifstream in(spec.substr(1));
  if (!in) throw UsageError("cannot read spec file '" + spec.substr(1) + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CommandResult cmd_verify(const std::string& suite, const RunConfig& config) {
  validate(config);
  std::vector<std::string> selected;
  if (suite == "all") {
    selected = verify_suites();
  } else if (std::find(verify_suites().begin(), verify_suites().end(), suite) != verify_suites().end()) {
    selected = {suite};
  } else {
    std::string valid = "all";
    for (const auto& s : verify_suites()) valid += ", " + s;
    throw UsageError("unknown suite '" + suite + "'; valid suites: " + valid);
  }
  const auto weights = build_weights(config);
  const CubeFamily family = enumerate_dyadic(ambient(config), config.depth);
  CommandResult res;
  res.report = report_header(config, "verify " + suite);
  ordered_json verdicts = ordered_json::array();
  Csv csv({"suite", "theorem", "weight", "p", "q", "s", "passed", "worst_margin", "tests_run", "skipped", "delta",
           "weight_constant", "witness_cube"});
  bool all_pass = true;
  for (const auto& name : selected) {
    for (const auto& e : run_suite(name, config, weights, family)) {
      ordered_json j = verdict_json(e.label, e.verdict);
      ordered_json row;
      row["suite"] = e.suite;
      for (auto it = j.begin(); it != j.end(); ++it) row[it.key()] = it.value();
      verdicts.push_back(row);
      auto param = [&](const char* k) {
        for (const auto& [name2, x] : e.verdict.witness.params) {
          if (name2 == k) return fmt(x);
        }
        return std::string();
      };
      csv.row({e.suite, e.verdict.theorem, e.label, param("p"), param("q"), param("s"),
               e.verdict.passed ? "true" : "false", fmt(e.verdict.worst_margin), std::to_string(e.verdict.tests_run),
               std::to_string(e.verdict.skipped), fmt(e.verdict.delta), fmt(e.verdict.weight_constant),
               e.verdict.witness.cube.to_string()});
      res.summary.push_back(summary_line(e.label, e.verdict));
      all_pass = all_pass && e.verdict.passed;
    }
  }
  res.report["family"] = {{"policy", family.policy}, {"size", family.cubes.size()}};
  res.report["verdicts"] = verdicts;
  res.report["passed"] = all_pass;
  res.tables.emplace_back("verdicts", csv.str());
  res.exit_code = all_pass ? 0 : 1;
  return res;
}

CommandResult cmd_constants(const RunConfig& config) {
  validate(config);
  if (config.weight_specs.empty()) throw UsageError("constants needs at least one --weight spec");
  const CubeFamily family = enumerate_dyadic(ambient(config), config.depth);
  const EstimatorOptions eo = estimator_options(config);
  CommandResult res;
  res.report = report_header(config, "constants");
  ordered_json weights_json = ordered_json::array();
  Csv csv({"weight", "constant", "p", "s", "r", "value", "upper", "divergent", "argmax_cube"});
  for (std::size_t i = 0; i < config.weight_specs.size(); ++i) {
    const WeightPtr w = parse_weight(config.weight_specs[i], config.n);
    const auto num = family_numerators(*w, family, eo);
    ordered_json wj;
    wj["weight"] = "spec:" + std::to_string(i);
    wj["weight_id"] = w->id();
    const ConstantEstimate ai = ainfty_constant(*w, family, eo, &num);
    wj["ainfty"] = estimate_json(ai);
    csv.row({w->id(), "ainfty", "", "", "", fmt(ai.value), fmt(ai.upper), "false", ai.argmax.to_string()});
    res.summary.push_back(w->id() + " [w]_Ainf ~ " + fmt(ai.value));
    ordered_json cps = ordered_json::array();
    std::vector<double> ps = config.p;
    for (double q : config.q) {
      if (std::find(ps.begin(), ps.end(), q) == ps.end()) ps.push_back(q);
    }
    for (double p : ps) {
      const ConstantEstimate e = cp_constant(*w, p, family, eo, &num);
      ordered_json ej = estimate_json(e);
      ordered_json row;
      row["p"] = p;
      for (auto it = ej.begin(); it != ej.end(); ++it) row[it.key()] = it.value();
      const TheoremConstants tc = theorem_constants(config.n, p, std::nullopt, e.divergent ? 1.0 : std::max(e.value, 1e-300));
      row["theorem_constants"] = {{"alpha", tc.alpha},       {"beta", tc.beta},
                                  {"B", tc.B},               {"A", tc.A},
                                  {"delta_cp", tc.delta_cp}, {"epsilon_cp", tc.epsilon_cp}};
      cps.push_back(row);
      csv.row({w->id(), "cp", fmt(p), "", "", fmt(e.value), fmt(e.upper), e.divergent ? "true" : "false",
               e.argmax.to_string()});
      res.summary.push_back(w->id() + " [w]_C" + fmt(p) + " ~ " + fmt(e.value) +
                            (e.divergent ? " (infinite tails: constant 0)" : ""));
      for (double s : config.s) {
        const ConstantEstimate es = cps_constant(*w, p, s, family, eo, &num);
        ordered_json sj = estimate_json(es);
        ordered_json srow;
        srow["p"] = p;
        srow["s"] = s;
        for (auto it = sj.begin(); it != sj.end(); ++it) srow[it.key()] = it.value();
        if (!es.divergent) {
          const TheoremConstants ts = theorem_constants(config.n, p, s, std::max(es.value, 1e-300));
          srow["theorem_constants"] = {{"A_sp", ts.A_sp}, {"delta_dilation", ts.delta_dilation}};
        }
        wj["cps"].push_back(srow);
        csv.row({w->id(), "cps", fmt(p), fmt(s), "", fmt(es.value), fmt(es.upper), es.divergent ? "true" : "false",
                 es.argmax.to_string()});
      }
    }
    wj["cp"] = cps;
    for (double r : config.r) {
      const ConstantEstimate er = rh_constant(*w, r, family);
      ordered_json rj = estimate_json(er);
      ordered_json rrow;
      rrow["r"] = r;
      for (auto it = rj.begin(); it != rj.end(); ++it) rrow[it.key()] = it.value();
      wj["rh"].push_back(rrow);
      csv.row({w->id(), "rh", "", "", fmt(r), fmt(er.value), fmt(er.upper), "false", er.argmax.to_string()});
    }
    const TheoremConstants ta = theorem_constants(config.n, config.p.front(), std::nullopt, ai.value);
    wj["delta_ainfty"] = number(ta.delta_ainfty);
    weights_json.push_back(wj);
  }
  res.report["family"] = {{"policy", family.policy}, {"size", family.cubes.size()}};
  res.report["weights"] = weights_json;
  res.tables.emplace_back("constants", csv.str());
  return res;
}

CommandResult cmd_cfi(const RunConfig& config) {
  validate(config);
  if (config.n != 1) throw UsageError("cfi runs in one dimension only");
  const double p = config.p.front();
  const double q = config.q.empty() ? p + 1.0 : config.q.front();
  if (!(q > p && p > 1.0)) throw UsageError("cfi requires q > p > 1");
  for (double g : config.gammas) {
    if (!(g > 0.0)) throw UsageError("--gammas must be positive");
  }
  const Grid grid{ambient(config), config.resolution};
  Signal sig;
  try {
    sig = signal_from_spec(load_spec(config.signal), grid);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<NamedWeight> weights;
  if (config.weight_specs.empty()) {
    weights.push_back({"constant", std::make_shared<ConstantWeight>(1, 1.0)});
  } else {
    for (std::size_t i = 0; i < config.weight_specs.size(); ++i) {
      weights.push_back({"spec:" + std::to_string(i), parse_weight(config.weight_specs[i], 1)});
    }
  }
  const CubeFamily family = enumerate_dyadic(ambient(config), config.depth);
  const EstimatorOptions eo = estimator_options(config);
  GoodLambdaConfig gl;
  gl.gammas = config.gammas;
  CommandResult res;
  res.report = report_header(config, "cfi");
  Csv rows({"weight", "signal", "p", "q", "ratio", "norm_tstar", "norm_maximal", "cq", "cp", "phi_cq", "phi_cp",
            "factor", "degenerate"});
  Csv glcsv({"weight", "k", "gamma", "fraction", "weighted_fraction", "cubes"});
  ordered_json out = ordered_json::array();
  for (const auto& nw : weights) {
    const CfiRow row = cfi_ratio(sig, *nw.weight, p, q, family, eo);
    const GoodLambdaResult g = good_lambda_measure(sig.values, *nw.weight, gl);
    ordered_json j;
    j["weight"] = nw.label;
    j["weight_id"] = row.weight_id;
    j["signal"] = row.signal_id;
    j["p"] = p;
    j["q"] = q;
    j["ratio"] = number(row.ratio);
    j["norm_tstar"] = number(row.norm_tstar);
    j["norm_maximal"] = number(row.norm_maximal);
    j["cq"] = number(row.cq);
    j["cp"] = number(row.cp);
    j["bound_value"] = number(row.bound_value);
    j["bound_value_p"] = number(row.bound_value_p);
    j["factor"] = number(row.factor);
    j["degenerate"] = row.degenerate;
    ordered_json gj;
    gj["max_fraction"] = g.max_fraction;
    gj["fit"] = {{"slope", g.fit.slope}, {"intercept", g.fit.intercept}, {"r2", g.fit.r2}, {"points", g.fit.points}};
    ordered_json table = ordered_json::array();
    for (const auto& r : g.rows) {
      table.push_back({{"k", r.k}, {"gamma", r.gamma}, {"fraction", r.fraction},
                       {"weighted_fraction", r.weighted_fraction}, {"cubes", r.cubes}});
      glcsv.row({nw.label, std::to_string(r.k), fmt(r.gamma), fmt(r.fraction), fmt(r.weighted_fraction),
                 std::to_string(r.cubes)});
    }
    gj["rows"] = table;
    j["good_lambda"] = gj;
    out.push_back(j);
    rows.row({nw.label, row.signal_id, fmt(p), fmt(q), fmt(row.ratio), fmt(row.norm_tstar), fmt(row.norm_maximal),
              fmt(row.cq), fmt(row.cp), fmt(row.bound_value), fmt(row.bound_value_p), fmt(row.factor),
              row.degenerate ? "true" : "false"});
    res.summary.push_back(nw.label + " ratio=" + fmt(row.ratio) + " Phi([w]_Cq)=" + fmt(row.bound_value) +
                          " good-lambda slope=" + fmt(g.fit.slope) + " R2=" + fmt(g.fit.r2));
  }
  res.report["rows"] = out;
  res.tables.emplace_back("cfi", rows.str());
  res.tables.emplace_back("good_lambda", glcsv.str());
  return res;
}

CommandResult cmd_sweep(const RunConfig& config) {
  validate(config);
  const CubeFamily family = enumerate_dyadic(ambient(config), config.depth);
  CommandResult res;
  res.report = report_header(config, "sweep");
  Csv csv({"p", "eps", "cp", "cp_upper", "ratio", "argmax_cube"});
  ordered_json sweeps = ordered_json::array();
  for (double p : config.p) {
    SweepResult sw;
    try {
      sw = sweep_power_weights(p, config.eps, family, estimator_options(config));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    ordered_json sj;
    sj["p"] = p;
    ordered_json rows = ordered_json::array();
    for (const auto& r : sw.rows) {
      rows.push_back({{"eps", r.eps}, {"cp", r.cp}, {"cp_upper", r.cp_upper}, {"ratio", r.ratio},
                      {"argmax_cube", cube_json(r.argmax)}});
      csv.row({fmt(p), fmt(r.eps), fmt(r.cp), fmt(r.cp_upper), fmt(r.ratio), r.argmax.to_string()});
      res.summary.push_back("p=" + fmt(p) + " eps=" + fmt(r.eps) + " cp=" + fmt(r.cp) + " cp/eps=" + fmt(r.ratio));
    }
    sj["rows"] = rows;
    sj["strictly_decreasing"] = sw.strictly_decreasing;
    sj["ratio_band"] = sw.ratio_band;
    sweeps.push_back(sj);
  }
  res.report["sweeps"] = sweeps;
  res.tables.emplace_back("sweep", csv.str());
  return res;
}

void write_outputs(const CommandResult& result, const RunConfig& config, std::ostream& stdout_sink) {
  const std::string text = result.report.dump(2) + "\n";
  if (config.out.empty()) {
    stdout_sink << text;
    return;
  }
  std::filesystem::path out = config.out;
  std::filesystem::path json_path = out;
  if (json_path.extension() != ".json") json_path += ".json";
  std::filesystem::path stem = json_path;
  stem.replace_extension();
  if (json_path.has_parent_path()) std::filesystem::create_directories(json_path.parent_path());
  auto write = [](const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    f << body;
  };
  if (config.format == "json" || config.format == "both") write(json_path, text);
  if (config.format == "csv" || config.format == "both") {
    for (const auto& [name, body] : result.tables) write(stem.string() + "_" + name + ".csv", body);
  }
}

}  // namespace weightlab::app

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "weightlab/maximal.hpp"
#include "weightlab/sawyer.hpp"
#include "weightlab/weights.hpp"

using namespace weightlab;

namespace {

// max over truncation radii r >= 0 of |sum_{|i - j| > r} f_j / (i - j)|.
std::vector<double> brute_tstar(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (std::abs(i - j) > r) s += f[j] / static_cast<double>(i - j);
      }
      out[i] = std::max(out[i], std::abs(s));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("truncated Hilbert maximal operator against brute force") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss;
  const Grid g{Cube::interval(-1.0, 1.0), 64};
  GridFunction f(g);
  for (auto& v : f.values) v = gauss(rng);
  const auto fast = truncated_hilbert_maximal(f);
  const auto slow = brute_tstar(f.values);
  for (std::size_t i = 0; i < slow.size(); ++i) CHECK(fast.values[i] == doctest::Approx(slow[i]).epsilon(1e-12));
  CHECK_THROWS(truncated_hilbert_maximal(GridFunction(Grid{Cube::square(0.0, 0.0, 1.0), 4})));
}

TEST_CASE("T* is odd-symmetric for the step and vanishes for zero input") {
  const Grid g{Cube::interval(-2.0, 2.0), 256};
  const Signal s = make_signal("step", g);
  const auto t = truncated_hilbert_maximal(s.values);
  for (std::size_t i = 0; i < 128; ++i) CHECK(t.values[i] == doctest::Approx(t.values[255 - i]));
  CHECK(truncated_hilbert_maximal(GridFunction(g)).max() == 0.0);
}

TEST_CASE("signals") {
  const Grid g{Cube::interval(-2.0, 2.0), 1024};
  const Signal bump = make_signal("bump", g);
  CHECK(bump.values.max() == doctest::Approx(1.0).epsilon(1e-4));
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const double x = g.cell_center(c)[0];
    if (std::abs(x) >= 1.0) {
      CHECK(bump.values.values[c] == 0.0);
    }
  }
  const Signal step = make_signal("step", g);
  double total = 0.0;
  for (double v : step.values.values) total += v;
  CHECK(total == 0.0);
  const Signal scaled = signal_from_spec(R"({"type":"chirp","scale":2})", g);
  const Signal chirp = make_signal("chirp", g);
  CHECK(scaled.values.values[300] == doctest::Approx(2.0 * chirp.values.values[300]));
  CHECK_THROWS_AS(make_signal("noise", g), std::invalid_argument);
  CHECK_THROWS_AS(signal_from_spec("{}", g), std::invalid_argument);
}

TEST_CASE("phi and the CFI factor") {
  CHECK(phi_cfi(0.0) == 0.0);
  CHECK(phi_cfi(1.0) == doctest::Approx(std::log(std::exp(1.0) + 1.0)));
  const Grid g{Cube::interval(-2.0, 2.0), 256};
  const Signal s = make_signal("bump", g);
  const CubeFamily fam = enumerate_dyadic(g.box, 3);
  const CfiRow row = cfi_ratio(s, ConstantWeight(1, 1.0), 2.0, 3.0, fam);
  CHECK(row.factor == doctest::Approx(3.0 + 3.0 * 4.0 / 1.0));
  CHECK(row.ratio > 0.0);
  CHECK(row.bound_value == doctest::Approx(phi_cfi(1.0)));
  CHECK_THROWS_AS(cfi_ratio(s, ConstantWeight(1, 1.0), 2.0, 2.0, fam), std::invalid_argument);
}

TEST_CASE("required levels") {
  const Grid g{Cube::interval(0.0, 1.0), 4};
  const LevelRange r = required_levels(GridFunction(g, {0.0, 0.3, 5.0, 1.0}));
  CHECK(r.k_min == -2);
  CHECK(r.k_max == 3);
  const LevelRange e = required_levels(GridFunction(g));
  CHECK(e.k_max < e.k_min);
}

TEST_CASE("M_{p,q} for a single-level indicator") {
  const Grid g{Cube::interval(0.0, 1.0), 256};
  GridFunction h(g);
  const double c = 3.0;
  for (std::size_t i = 96; i < 160; ++i) h.values[i] = c;
  const double p = 2.0, q = 1.5;
  const auto out = marcinkiewicz_mpq(h, p, q, required_levels(h));
  // Every level 2^k < c sees the same set, whose Whitney cubes are fixed.
  CellSet omega(g);
  for (std::size_t i = 96; i < 160; ++i) omega.mask[i] = 1;
  const WhitneyResult wr = whitney_decompose(omega);
  double weight = 0.0;
  for (int k = -80; std::ldexp(1.0, k) < c; ++k) weight += std::pow(2.0, k * p);
  for (std::size_t i = 0; i < g.cell_count(); i += 17) {
    const Point x = g.cell_center(i);
    double pot = 0.0;
    for (const auto& wc : wr.cubes) pot += std::pow(m_chi_cube(wc.cube.to_cube(g.box), x), q);
    CHECK(std::pow(out.values[i], p) == doctest::Approx(weight * pot).epsilon(1e-10));
  }
  CHECK_THROWS_AS(marcinkiewicz_mpq(h, p, q, LevelRange{2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(marcinkiewicz_mpq(h, p, q, LevelRange{-100, 3}), std::invalid_argument);
}

TEST_CASE("M_{p,q} dominates h on its support") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  const Grid g{Cube::interval(0.0, 1.0), 128};
  GridFunction h(g);
  for (std::size_t i = 20; i < 100; ++i) h.values[i] = u(rng);
  const auto out = marcinkiewicz_mpq(h, 2.0, 2.0, required_levels(h));
  // M chi_Q = 1 on a Whitney cube of every level 2^k < h(x), so the sum
  // exceeds sum_{2^k < h(x)} 2^{kp} >= (h(x) / 2)^p.
  for (std::size_t i = 20; i < 100; ++i) CHECK(out.values[i] >= 0.5 * h.values[i] - 1e-12);
}

TEST_CASE("Fefferman-Stein profile decreases") {
  const Cube q = Cube::interval(0.0, 1.0);
  const std::vector<Cube> subs{Cube::interval(0.0, 0.25), Cube::interval(0.5, 0.625), Cube::interval(0.75, 1.0)};
  const LevelSetProfile prof = fefferman_stein_profile(q, subs, 2.0, 2.0, 1024, 16);
  REQUIRE(prof.measures.size() == 16);
  for (std::size_t i = 1; i < prof.measures.size(); ++i) CHECK(prof.measures[i] <= prof.measures[i - 1]);
  CHECK(prof.measures[0] == doctest::Approx(2.0));
  CHECK(prof.fit.slope < 0.0);
  CHECK_THROWS(fefferman_stein_profile(q, {Cube::interval(0.0, 0.5), Cube::interval(0.25, 0.75)}, 2.0, 1.0));
  CHECK_THROWS(fefferman_stein_profile(q, {Cube::interval(0.5, 1.5)}, 2.0, 1.0));
}

TEST_CASE("good-lambda measurement") {
  const Grid g{Cube::interval(-2.0, 2.0), 1024};
  const Signal s = make_signal("step", g);
  GoodLambdaConfig cfg;
  const GoodLambdaResult r = good_lambda_measure(s.values, ConstantWeight(1, 1.0), cfg);
  CHECK(r.max_fraction.size() == cfg.gammas.size());
  for (const auto& row : r.rows) {
    CHECK(row.fraction >= 0.0);
    CHECK(row.fraction <= 1.0);
  }
  // Smaller gamma is a stricter condition.
  for (std::size_t i = 1; i < r.max_fraction.size(); ++i) CHECK(r.max_fraction[i] <= r.max_fraction[i - 1]);
  GoodLambdaConfig high;
  high.k_min = 40;
  high.k_max = 41;
  CHECK(good_lambda_measure(s.values, ConstantWeight(1, 1.0), high).rows.empty());
  GoodLambdaConfig bad;
  bad.gammas = {0.5, -1.0};
  CHECK_THROWS_AS(good_lambda_measure(s.values, ConstantWeight(1, 1.0), bad), std::invalid_argument);
}

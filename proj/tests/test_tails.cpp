#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "weightlab/maximal.hpp"
#include "weightlab/numeric.hpp"
#include "weightlab/tails.hpp"
#include "weightlab/weights.hpp"

using namespace weightlab;

namespace {

// int (M chi_Q)^p w for a 1-D grid weight, integrating the closed-form M chi_Q
// against each cell with adaptive quadrature.
double grid_tail_oracle(const GridWeight& w, const Cube& q, double p) {
  const Grid& g = w.grid();
  const auto mchi = [&](double x) { return std::pow(m_chi_cube(q, {x, 0.0}), p); };
  double total = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Box b = g.cell_box(c);
    const std::vector<double> kinks{q.lo(0), q.hi(0)};
    total += w.values()[c] * integrate_piecewise(mchi, b.lo[0], b.hi[0], kinks).value;
  }
  return total;
}

}  // namespace

TEST_CASE("constant weight tails in closed form") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double c : {1.0, 2.5}) {
      const ConstantWeight w(1, c);
      const Cube q = Cube::interval(-0.75, 0.25);
      const double h = q.half_side();
      const TailReport t = continuous_tail(w, q, p);
      CHECK(t.value == doctest::Approx(2.0 * h * c * (1.0 + 2.0 / (p - 1.0))).epsilon(1e-12));
      const TailReport a = discrete_tail(w, q, p);
      CHECK(a.value == doctest::Approx(c / (1.0 - std::pow(2.0, 1.0 - p))).epsilon(1e-9));
      const TailReport as = discrete_tail_s(w, q, p, 1.5);
      CHECK(as.value == doctest::Approx(c / (1.0 - std::pow(1.5, 1.0 - p))).epsilon(1e-9));
    }
  }
  const ConstantWeight w2(2, 1.0);
  CHECK(discrete_tail(w2, Cube::square(0.0, 0.0, 1.0), 2.0).value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("2-D constant weight tail against a Riemann sum") {
  const ConstantWeight w(2, 1.0);
  const Cube q = Cube::square(-0.5, -0.5, 1.0);
  const double p = 3.0;
  const TailReport t = continuous_tail(w, q, p);
  // Quadrant symmetry: sum over x, y >= 0 up to L, times 4.
  const double L = 24.0, h = 0.04;
  double sum = 0.0;
  for (double x = 0.5 * h; x < L; x += h) {
    for (double y = 0.5 * h; y < L; y += h) sum += std::pow(m_chi_cube(q, {x, y}), p);
  }
  sum *= 4.0 * h * h;
  // Beyond the L-infinity ball of radius L, (M chi_Q)^p <= (1 / (L - 0.5))^{2p} and
  // the ring measure is 8 r dr, so the remainder is below 8 L^{2 - 2p} / (2p - 2).
  const double remainder = 8.0 * std::pow(L - 0.5, 2.0 - 2.0 * p) / (2.0 * p - 2.0);
  // The 2-D tail is a certified enclosure [value, upper()].
  CHECK(t.value <= (sum + remainder) * (1.0 + 2e-3));
  CHECK(t.upper() >= sum * (1.0 - 2e-3));
  CHECK(t.annulus_width <= 0.15 * t.value);
}

TEST_CASE("1-D grid weight tails against cellwise quadrature") {
  std::mt19937_64 rng(21);
  const Grid g{Cube::interval(-2.0, 2.0), 32};
  for (int t = 0; t < 4; ++t) {
    const auto w = random_grid_weight(g, rng);
    for (const Cube& q : {Cube::interval(-0.5, 0.0), Cube::interval(1.0, 2.0), Cube::interval(-2.0, 2.0)}) {
      for (double p : {1.5, 3.0}) {
        const TailReport r = continuous_tail(*w, q, p);
        CHECK(r.value == doctest::Approx(grid_tail_oracle(*w, q, p)).epsilon(1e-9));
        CHECK(r.truncation_bound <= 1e-9);
      }
    }
  }
}

TEST_CASE("1-D power weight tail against quadrature with an analytic remainder") {
  const double a = 0.5, p = 3.0;
  const PowerWeight w(1, a);
  const Cube q = Cube::interval(0.5, 1.5);
  const auto f = [&](double x) { return std::pow(m_chi_cube(q, {x, 0.0}), p) * w.density({x, 0.0}); };
  const double R = 1e4;
  const std::vector<double> kinks{-1.0, 0.0, 0.5, 1.5, 10.0, 100.0, 1000.0};
  const double body = integrate_piecewise(f, -R, R, std::vector<double>{-1000.0, -100.0, -10.0, -1.0, 0.0, 0.5, 1.5,
                                                                          10.0, 100.0, 1000.0})
                          .value;
  (void)kinks;
  // Beyond R: (1 / (|x| - 1.5))^p |x|^a on each side, bounded above and below.
  const double lo_tail = 2.0 * std::pow(R + 1.5, a - p + 1.0) / (p - a - 1.0) * std::pow(R / (R + 1.5), a);
  const double hi_tail = 2.0 * std::pow(R - 1.5, a - p + 1.0) / (p - a - 1.0) * std::pow((R + 1.5) / R, a) * 1.01;
  const TailReport t = continuous_tail(w, q, p);
  CHECK(t.value >= (body + lo_tail) * (1.0 - 1e-7));
  CHECK(t.value <= (body + hi_tail) * (1.0 + 1e-7));
}

TEST_CASE("tails scale linearly and decrease in p") {
  std::mt19937_64 rng(3);
  const auto w = random_grid_weight(Grid{Cube::interval(-1.0, 1.0), 64}, rng);
  const auto w3 = w->scaled(3.0);
  const Cube q = Cube::interval(0.0, 0.25);
  CHECK(continuous_tail(*w3, q, 2.0).value == doctest::Approx(3.0 * continuous_tail(*w, q, 2.0).value));
  CHECK(discrete_tail(*w3, q, 2.0).value == doctest::Approx(3.0 * discrete_tail(*w, q, 2.0).value));
  double prev = INFINITY;
  for (double p : {1.25, 1.5, 2.0, 3.0, 5.0}) {
    const double v = continuous_tail(*w, q, p).value;
    CHECK(v <= prev);
    CHECK(v >= w->mass(q));
    prev = v;
  }
}

TEST_CASE("divergent tails") {
  const PowerWeight w(1, 1.0);
  CHECK(has_infinite_tails(w, 2.0));
  CHECK_FALSE(has_infinite_tails(w, 3.0));
  CHECK_THROWS_AS(discrete_tail(w, Cube::interval(0.0, 1.0), 2.0), DivergentTail);
  CHECK_THROWS_AS(continuous_tail(w, Cube::interval(0.0, 1.0), 1.5), DivergentTail);
  const ConstantEstimate e = cp_constant(w, 2.0, enumerate_dyadic(Cube::interval(-1.0, 1.0), 3));
  CHECK(e.divergent);
  CHECK(e.value == 0.0);
}

TEST_CASE("dilation remainder is exact for compact support") {
  const GridWeight w(Grid{Cube::interval(-1.0, 1.0), 4}, {1.0, 2.0, 3.0, 4.0});
  const Cube q = Cube::interval(-0.5, 0.5);
  const auto r = dilation_series_remainder(w, q, 2.0, 1.0, 2);
  REQUIRE(r.has_value());
  // 4Q already covers the support: sum_{k >= 2} 2^{-k} w(R) with w(R) = 5.
  CHECK(r->lo == doctest::Approx(2.5));
  CHECK(r->hi == doctest::Approx(2.5));
}

TEST_CASE("constants of the constant weight") {
  const ConstantWeight w(1, 1.0);
  const CubeFamily fam = enumerate_dyadic(Cube::interval(-1.0, 1.0), 5);
  CHECK(ainfty_constant(w, fam).value == doctest::Approx(1.0));
  CHECK(rh_constant(w, 2.0, fam).value == doctest::Approx(1.0));
  for (double p : {1.5, 2.0, 3.0}) {
    const ConstantEstimate e = cp_constant(w, p, fam);
    CHECK(e.value == doctest::Approx((p - 1.0) / (p + 1.0)).epsilon(1e-9));
    CHECK(e.upper >= e.value);
    CHECK(e.refinement_trace.size() == 6);
  }
  // Average normalization: M chi_Q w = 1 on Q, so the ratio is 1 / a_{C_p,s}.
  const double s = 1.5, p = 2.0;
  CHECK(cps_constant(w, p, s, fam).value == doctest::Approx(1.0 - std::pow(s, 1.0 - p)).epsilon(1e-9));
}

TEST_CASE("estimates are invariant under scaling the weight") {
  GalleryParams gp;
  gp.resolution = 512;
  const WeightPtr w = gallery("ap_times_bump", gp);
  const WeightPtr w5 = w->scaled(5.0);
  const CubeFamily fam = enumerate_dyadic(Cube::interval(-2.0, 2.0), 4);
  CHECK(cp_constant(*w5, 2.0, fam).value == doctest::Approx(cp_constant(*w, 2.0, fam).value).epsilon(1e-9));
  CHECK(ainfty_constant(*w5, fam).value == doctest::Approx(ainfty_constant(*w, fam).value).epsilon(1e-9));
}

TEST_CASE("refinement trace is non-decreasing") {
  std::mt19937_64 rng(17);
  const auto w = random_grid_weight(Grid{Cube::interval(-2.0, 2.0), 256}, rng);
  const ConstantEstimate e = cp_constant(*w, 2.0, enumerate_dyadic(Cube::interval(-2.0, 2.0), 6));
  REQUIRE(e.refinement_trace.size() == 7);
  for (std::size_t i = 1; i < e.refinement_trace.size(); ++i) {
    CHECK(e.refinement_trace[i].second >= e.refinement_trace[i - 1].second);
  }
  CHECK(e.refinement_trace.back().second == e.value);
}

TEST_CASE("explicit theorem constants") {
  const TheoremConstants t = theorem_constants(1, 2.0, 2.0, 1.0);
  CHECK(t.beta == doctest::Approx(4.0 / 3.0));
  CHECK(t.alpha == doctest::Approx(2.0));
  CHECK(t.B == doctest::Approx(std::pow(2.0, 12) * 20.0 * 2.0));
  CHECK(t.A == doctest::Approx(20.0 * 16.0 * 2.0));
  CHECK(t.A_sp == doctest::Approx(5.0 * 64.0 * 2.0));
  CHECK(t.delta_cp == doctest::Approx(1.0 / t.B));
  CHECK(t.delta_ainfty == doctest::Approx(1.0 / 3.0));
  CHECK(t.epsilon_cp == doctest::Approx(0.5 / (std::pow(2.0, 7) * 20.0)));
  const TheoremConstants t2 = theorem_constants(2, 3.0, std::nullopt, 4.0);
  CHECK(t2.delta_cp == doctest::Approx(1.0 / (t2.B * 4.0)));
  CHECK(t2.delta_ainfty == doctest::Approx(1.0 / 31.0));
  CHECK_THROWS(theorem_constants(3, 2.0, std::nullopt, 1.0));
  CHECK_THROWS(theorem_constants(1, 2.0, 2.5, 1.0));
  CHECK_THROWS(theorem_constants(1, 1.0, std::nullopt, 1.0));
}

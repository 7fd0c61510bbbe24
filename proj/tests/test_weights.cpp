#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "weightlab/numeric.hpp"
#include "weightlab/weights.hpp"

using namespace weightlab;

TEST_CASE("power weight averages") {
  const PowerWeight w(1, 1.0);
  CHECK(w.avg(Cube::interval(0.0, 1.0)) == doctest::Approx(0.5));
  CHECK(w.avg(Cube::interval(-1.0, 1.0)) == doctest::Approx(0.5));
  CHECK(w.mass(Cube::interval(1.0, 2.0)) == doctest::Approx(1.5));
  CHECK_THROWS(PowerWeight(1, -1.0));
  CHECK_THROWS(PowerWeight(2, -2.5));
}

TEST_CASE("power weight agrees with quadrature") {
  for (double a : {-0.5, 0.3, 1.7}) {
    const PowerWeight w(1, a);
    const std::vector<double> kinks{0.0};
    const auto q = integrate_piecewise([&](double x) { return w.density({x, 0.0}); }, -0.7, 1.3, kinks);
    CHECK(w.integral(Cube::interval(-0.7, 1.3).box()) == doctest::Approx(q.value).epsilon(1e-8));
  }
}

TEST_CASE("2-D power weight agrees with a midpoint sum") {
  const PowerWeight w(2, 1.0);
  const Cube q = Cube::square(-0.5, 0.25, 1.0);
  const int n = 400;
  double sum = 0.0;
  const double h = q.side() / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sum += w.density({q.lo(0) + (i + 0.5) * h, q.lo(1) + (j + 0.5) * h}) * h * h;
  }
  CHECK(w.mass(q) == doctest::Approx(sum).epsilon(1e-4));
}

TEST_CASE("grid weight integrals are exact and additive") {
  const Grid g{Cube::interval(0.0, 4.0), 4};
  const GridWeight w(g, {1.0, 2.0, 3.0, 4.0});
  CHECK(w.integral(Cube::interval(0.0, 4.0).box()) == doctest::Approx(10.0));
  CHECK(w.integral(Box{1, {0.5, 0.0}, {1.5, 0.0}}) == doctest::Approx(1.5));
  CHECK(w.integral(Box{1, {-3.0, 0.0}, {-1.0, 0.0}}) == 0.0);
  CellSet e(g);
  CHECK(w.integral_over(e) == 0.0);
  e.mask = {1, 0, 1, 0};
  CHECK(w.integral_over(e) == doctest::Approx(4.0));
  CHECK(w.pow(2.0)->integral(g.box.box()) == doctest::Approx(30.0));
  CHECK(w.scaled(3.0)->integral(g.box.box()) == doctest::Approx(30.0));
  CHECK_THROWS(GridWeight(g, {1.0, -1.0, 0.0, 0.0}));
  CHECK_THROWS(GridWeight(g, {0.0, 0.0, 0.0, 0.0}));
}

TEST_CASE("2-D grid weight partial boxes") {
  const Grid g{Cube::square(0.0, 0.0, 2.0), 2};
  const GridWeight w(g, {1.0, 2.0, 3.0, 4.0});
  CHECK(w.integral(g.box.box()) == doctest::Approx(10.0));
  CHECK(w.integral(Box{2, {0.5, 0.5}, {1.5, 1.5}}) == doctest::Approx(2.5));
}

TEST_CASE("product weight agrees with quadrature") {
  GalleryParams gp;
  gp.resolution = 256;
  const WeightPtr w = gallery("ap_times_bump", gp);
  for (const Cube& q : {Cube::interval(0.1, 0.9), Cube::interval(-3.0, 5.0), Cube::interval(-0.25, 0.25)}) {
    const auto kinks = w->breakpoints(q.lo(0), q.hi(0));
    const auto r = integrate_piecewise([&](double x) { return w->density({x, 0.0}); }, q.lo(0), q.hi(0), kinks);
    CHECK(w->mass(q) == doctest::Approx(r.value).epsilon(1e-7));
  }
}

TEST_CASE("gallery") {
  CHECK(gallery_names().size() == 4);
  for (int n : {1, 2}) {
    GalleryParams gp;
    gp.dim = n;
    gp.resolution = n == 1 ? 256 : 32;
    for (const auto& name : gallery_names()) {
      const WeightPtr w = gallery(name, gp);
      CHECK(w->dim() == n);
      CHECK(w->avg(Cube(n, {0.3, 0.2}, 0.7)) > 0.0);
    }
  }
  CHECK_THROWS_AS(gallery("nope"), std::invalid_argument);
  GalleryParams gp;
  gp.p = 3.0;
  gp.eps = 0.2;
  const auto pe = std::dynamic_pointer_cast<const PowerWeight>(gallery("power_eps", gp));
  REQUIRE(pe);
  CHECK(pe->exponent() == doctest::Approx(1.8));
  // The vanishing patch has a block of positive measure where it is zero.
  const WeightPtr vp = gallery("vanishing_patch", GalleryParams{1, 2.0, 0.5, 256});
  const auto gw = std::dynamic_pointer_cast<const GridWeight>(vp);
  REQUIRE(gw);
  int zeros = 0;
  for (double v : gw->values()) zeros += v == 0.0;
  CHECK(zeros > 0);
}

TEST_CASE("random grid weights are seeded") {
  const Grid g{Cube::interval(-1.0, 1.0), 64};
  std::mt19937_64 a(3), b(3);
  const auto wa = random_grid_weight(g, a);
  const auto wb = random_grid_weight(g, b);
  CHECK(wa->values() == wb->values());
  for (double v : wa->values()) CHECK(v >= 0.0);
}

TEST_CASE("weight specs") {
  const WeightPtr p = weight_from_spec(R"({"type":"power","dim":1,"exponent":1.0})");
  CHECK(p->avg(Cube::interval(0.0, 1.0)) == doctest::Approx(0.5));
  const WeightPtr c = weight_from_spec(R"({"type":"constant","dim":2,"value":3})");
  CHECK(c->avg(Cube::square(0.0, 0.0, 1.0)) == doctest::Approx(3.0));
  const WeightPtr g = weight_from_spec(R"({"type":"grid","box":[0,2],"resolution":2,"values":[1,3]})");
  CHECK(g->mass(Cube::interval(0.0, 2.0)) == doctest::Approx(4.0));
  CHECK_THROWS_AS(weight_from_spec("{"), std::invalid_argument);
  CHECK_THROWS_AS(weight_from_spec(R"({"type":"mystery"})"), std::invalid_argument);
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lightray/error.hpp"
#include "lightray/parallel.hpp"
#include "lightray/transform.hpp"
#include "oracles.hpp"

using namespace lightray;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const WeightPtr kOne = make_weight("one");

// Random smooth field: a few Gaussians with random centres, widths, signs.
ScalarField random_bumps(std::mt19937_64& rng, const GridSpec& g, double extent) {
  ScalarField f(g);
  std::uniform_real_distribution<double> u(-extent, extent), w(0.4, 0.8), a(-1, 1);
  for (int b = 0; b < 3; ++b) {
    Vec c(g.ndim());
    for (int i = 0; i < g.ndim(); ++i) c[i] = u(rng);
    const double s = w(rng), amp = a(rng);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] += amp * std::exp(-(f.point(i) - c).squaredNorm() / (s * s));
    }
  }
  return f;
}

}  // namespace

TEST_CASE("forward on minkowski lines") {
  auto m = make_metric("minkowski", 2);
  auto gauss = make_phantom("gaussian", 2);
  SUBCASE("closed form for the unit gaussian through the origin") {
    const double ref = std::sqrt(std::numbers::pi / 2);
    for (double a : {0.0, 0.4, 1.9, 3.0}) {
      const double v = forward(*m, *gauss, *kOne, {Vec::Zero(2), vec({std::cos(a), std::sin(a)})});
      CHECK(std::abs(v - ref) < 1e-6);
    }
  }
  SUBCASE("zero and disjoint") {
    CHECK(forward(*m, *make_phantom("zero", 2), *kOne, {Vec::Zero(2), vec({1, 0})}) == 0.0);
    CHECK(forward(*m, *gauss, *kOne, {vec({40, 0}), vec({0, 1})}) == 0.0);
  }
  SUBCASE("matches an adaptive oracle with a weight") {
    auto sine = make_weight("sine");
    const Vec x = vec({0.3, -0.5});
    const Vec th = vec({0.6, 0.8});
    const double got = forward(*m, *gauss, *sine, {x, th});
    const double ref = oracle::adaptive_simpson(
        [&](double s) {
          const Vec z = vec({s, x[0] + s * th[0], x[1] + s * th[1]});
          return (*sine)(z, vec({1, th[0], th[1]})) * (*gauss)(z);
        },
        -8, 8, 1e-13);
    CHECK(std::abs(got - ref) < 1e-9);
  }
}

TEST_CASE("time translation of the phantom shifts the sinogram") {
  auto m = make_metric("minkowski", 2);
  const double t0 = 0.4;
  const Vec x0 = vec({0.3, -0.2});
  auto base = make_phantom("gaussian", 2, std::vector<double>{0.7});
  auto moved = make_phantom("gaussian", 2, std::vector<double>{0.7, t0, x0[0], x0[1]});
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vec x = oracle::random_vec(rng, 2, -1, 1);
    const double a = std::uniform_real_distribution<double>(0, 6.28)(rng);
    const Vec th = vec({std::cos(a), std::sin(a)});
    const double lhs = forward(*m, *moved, *kOne, {x, th});
    const double rhs = forward(*m, *base, *kOne, {Vec(x + t0 * th - x0), th});
    CHECK(std::abs(lhs - rhs) < 1e-4);
  }
}

TEST_CASE("sinogram properties") {
  auto m = make_metric("minkowski", 2);
  const GridSpec xg = GridSpec::cube(2, -2, 2, 9);
  const SinogramSpec spec{xg, DirectionGrid::circle(12), 1e-2};
  SUBCASE("zero field") {
    const Sinogram s = sinogram(*m, Integrand::of(*make_phantom("zero", 2)), *kOne, spec);
    for (double v : s.values) CHECK(v == 0.0);
  }
  SUBCASE("rotation symmetry at x = 0") {
    auto p = make_phantom("gaussian", 2, std::vector<double>{0.8});
    const Sinogram s = sinogram(*m, Integrand::of(*p), *kOne, spec);
    const std::size_t centre = 4 * 9 + 4;
    for (std::size_t it = 1; it < s.num_theta(); ++it) {
      CHECK(s.at(it, centre) == doctest::Approx(s.at(0, centre)).epsilon(1e-10));
    }
  }
  SUBCASE("linearity and positivity") {
    std::mt19937_64 rng(8);
    const GridSpec g = GridSpec::cube(3, -1.5, 1.5, 13);
    const ScalarField f = random_bumps(rng, g, 1.0);
    const ScalarField h = random_bumps(rng, g, 1.0);
    ScalarField c(g);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2 * f[i] - 3 * h[i];
    const Sinogram sf = sinogram(*m, Integrand::of(f), *kOne, spec);
    const Sinogram sh = sinogram(*m, Integrand::of(h), *kOne, spec);
    const Sinogram sc = sinogram(*m, Integrand::of(c), *kOne, spec);
    for (std::size_t i = 0; i < sc.values.size(); ++i) {
      CHECK(std::abs(sc.values[i] - (2 * sf.values[i] - 3 * sh.values[i])) < 1e-12);
    }
    auto ball = make_phantom("ball", 2);
    const Sinogram sb = sinogram(*m, Integrand::of(*ball), *make_weight("sine"), spec);
    for (double v : sb.values) CHECK(v >= 0.0);
  }
  SUBCASE("thread count does not change values") {
    auto p = make_phantom("ball", 2, std::vector<double>{0.8});
    set_thread_count(1);
    const Sinogram a = sinogram(*m, Integrand::of(*p), *kOne, spec);
    set_thread_count(3);
    const Sinogram b = sinogram(*m, Integrand::of(*p), *kOne, spec);
    set_thread_count(1);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("simpson self-convergence on interpolated fields") {
  auto m = make_metric("minkowski", 2);
  const GridSpec g = GridSpec::cube(3, -2, 2, 41);
  // Narrow enough that the field is ~1e-11 on the box faces.
  ScalarField f = sample(*make_phantom("gaussian", 2, std::vector<double>{0.4}), g);
  LightGeodesic geo{vec({0.13, -0.07}), vec({0.6, 0.8})};
  geo.step = 1e-5;
  const double ref = forward(*m, f, *kOne, geo);
  std::vector<double> logh, loge;
  // Steps below the spacing of cell crossings along the line (~0.04).
  for (double h : {0.01, 0.005, 0.0025}) {
    geo.step = h;
    logh.push_back(std::log(h));
    loge.push_back(std::log(std::abs(forward(*m, f, *kOne, geo) - ref)));
  }
  // Least-squares slope of log error against log step.
  double mh = 0, me = 0;
  for (std::size_t i = 0; i < logh.size(); ++i) {
    mh += logh[i] / 3;
    me += loge[i] / 3;
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < logh.size(); ++i) {
    num += (logh[i] - mh) * (loge[i] - me);
    den += (logh[i] - mh) * (logh[i] - mh);
  }
  CHECK(num / den >= 1.7);
}

TEST_CASE("curved metrics") {
  auto m = make_metric("perturbed", 2);
  auto p = make_phantom("gaussian", 2, std::vector<double>{0.5});
  const LightGeodesic geo{vec({0.1, 0.2}), vec({1, 0.3}), -6, 6, 1e-3};
  SUBCASE("agrees with a finer trace") {
    LightGeodesic fine = geo;
    fine.step = 5e-4;
    const double a = forward(*m, *p, *make_weight("sine"), geo);
    const double b = forward(*m, *p, *make_weight("sine"), fine);
    CHECK(std::abs(a - b) < 1e-8);
    CHECK(a > 0.1);
  }
  SUBCASE("a window that does not exit the support is trapped") {
    LightGeodesic short_geo = geo;
    short_geo.s_min = -0.5;
    short_geo.s_max = 0.5;
    CHECK_THROWS_AS(forward(*m, *p, *kOne, short_geo), NumericalFailure);
  }
  SUBCASE("zero metric perturbation reduces to the flat transform") {
    auto flat_like = make_metric("perturbed", 2, std::vector<double>{0.0});
    auto mink = make_metric("minkowski", 2);
    const double a = forward(*flat_like, *p, *kOne, geo);
    const double b = forward(*mink, *p, *kOne, geo);
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("backprojection") {
  auto m = make_metric("minkowski", 2);
  SUBCASE("constant sinograms integrate the sphere") {
    for (int n : {2, 3}) {
      Sinogram s;
      s.x_grid = GridSpec::cube(n, -3, 3, 13);
      s.directions = DirectionGrid::standard(n, n == 2 ? 64 : 400);
      s.values.assign(s.num_x() * s.num_theta(), 1.0);
      const ScalarField b = backproject(s, GridSpec::cube(n + 1, -1, 1, 5));
      const double area = n == 2 ? 2 * std::numbers::pi : 4 * std::numbers::pi;
      for (double v : b.data()) CHECK(std::abs(v - area) < 1e-3);
    }
  }
  SUBCASE("zero sinogram") {
    Sinogram s;
    s.x_grid = GridSpec::cube(2, -3, 3, 13);
    s.directions = DirectionGrid::circle(16);
    s.values.assign(s.num_x() * s.num_theta(), 0.0);
    const ScalarField b = backproject(s, GridSpec::cube(3, -1, 1, 5));
    for (double v : b.data()) CHECK(v == 0.0);
  }
  SUBCASE("coverage violation is reported") {
    Sinogram s;
    s.x_grid = GridSpec::cube(2, -1, 1, 5);
    s.directions = DirectionGrid::circle(8);
    s.values.assign(s.num_x() * s.num_theta(), 1.0);
    CHECK_THROWS_AS(backproject(s, GridSpec::cube(3, -1, 1, 5)), InvalidArgument);
  }
  SUBCASE("discrete adjointness") {
    std::mt19937_64 rng(21);
    const GridSpec g = GridSpec::cube(3, -2, 2, 33);
    const SinogramSpec spec{GridSpec::cube(2, -4.5, 4.5, 61), DirectionGrid::circle(48), 0.02};
    for (int trial = 0; trial < 3; ++trial) {
      const ScalarField f = random_bumps(rng, g, 0.8);
      Sinogram gs = sinogram(*m, Integrand::of(random_bumps(rng, g, 0.8)), *kOne, spec);
      const Sinogram lf = sinogram(*m, Integrand::of(f), *kOne, spec);
      double lhs = 0, nlf = 0, ng = 0;
      const double dx = spec.x_grid.cell_volume();
      for (std::size_t it = 0; it < lf.num_theta(); ++it) {
        const double w = lf.directions.weights[it] * dx;
        for (std::size_t ix = 0; ix < lf.num_x(); ++ix) {
          lhs += w * lf.at(it, ix) * gs.at(it, ix);
          nlf += w * lf.at(it, ix) * lf.at(it, ix);
          ng += w * gs.at(it, ix) * gs.at(it, ix);
        }
      }
      const double rhs = f.inner(backproject(gs, g));
      CHECK(std::abs(lhs - rhs) / std::sqrt(nlf * ng) < 1e-2);
    }
  }
}

TEST_CASE("general backprojection matches the closed form in flat space") {
  auto m = make_metric("minkowski", 2);
  auto flat_like = make_metric("perturbed", 2, std::vector<double>{0.0});
  auto p = make_phantom("gaussian", 2, std::vector<double>{0.6});
  const SinogramSpec spec{GridSpec::cube(2, -3, 3, 31), DirectionGrid::circle(16), 0.02};
  const Sinogram s = sinogram(*m, Integrand::of(*p), *kOne, spec);
  const GridSpec out = GridSpec::cube(3, -0.6, 0.6, 4);
  const ScalarField a = backproject(s, out);
  const ScalarField b = backproject_general(*flat_like, s, out);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-7);
  const ScalarField nz = normal(*m, Integrand::of(*make_phantom("zero", 2)), *kOne, spec, out);
  for (double v : nz.data()) CHECK(v == 0.0);
}

TEST_CASE("batched normal operator equals one-pass backprojection") {
  auto m = make_metric("minkowski", 2);
  auto p = make_phantom("gaussian", 2, std::vector<double>{0.6});
  const SinogramSpec spec{GridSpec::cube(2, -4, 4, 41), DirectionGrid::circle(23), 0.02};
  const GridSpec out = GridSpec::cube(3, -1.5, 1.5, 13);
  const ScalarField whole = backproject(sinogram(*m, Integrand::of(*p), *kOne, spec), out);
  double scale = 0.0;
  for (double v : whole.data()) scale = std::max(scale, std::abs(v));
  REQUIRE(scale > 0.0);
  for (const std::size_t values : std::vector<std::size_t>{1, 41 * 41 * 5, 41 * 41 * 22}) {
    const ScalarField batched = normal(*m, Integrand::of(*p), *kOne, spec, out, values);
    for (std::size_t i = 0; i < whole.size(); ++i) {
      CHECK(std::abs(batched[i] - whole[i]) <= 1e-13 * scale);
    }
  }
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "lightray/error.hpp"
#include "lightray/geodesic.hpp"
#include "lightray/theta_family.hpp"
#include "oracles.hpp"

using namespace lightray;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double null_residual(const Metric& m, const Vec& z, const Vec& v) { return v.dot(m.g(z) * v); }

}  // namespace

TEST_CASE("initial data") {
  auto mink = make_metric("minkowski", 3);
  SUBCASE("minkowski through the origin") {
    auto [z, p] = initial_data(*mink, Vec::Zero(3), vec({0, 0, 3}));
    CHECK(z.coords.norm() == 0.0);
    const Vec v = raise(*mink, z, p).components;
    CHECK((v - vec({1, 0, 0, 1})).norm() < 1e-15);
  }
  SUBCASE("product metric normalises in h") {
    auto m = make_metric("product-stretch", 2);
    const Vec x = vec({0.8, -0.3});
    auto [z, p] = initial_data(*m, x, vec({1.0, 0.5}));
    const Vec v = raise(*m, z, p).components;
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(std::abs(null_residual(*m, z.coords, v)) < 1e-12);
    const Mat h = m->g(z.coords).bottomRightCorner(2, 2);
    CHECK(std::abs(v.tail(2).dot(h * v.tail(2)) - 1.0) < 1e-12);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(initial_data(*mink, Vec::Zero(3), Vec::Zero(3)), InvalidArgument);
  }
}

TEST_CASE("minkowski lines are exact") {
  auto m = make_metric("minkowski", 3);
  const GeodesicPath path = trace(*m, {Vec::Zero(3), vec({0, 0, 1}), -2, 2, 1e-3});
  CHECK(path.size() == 4001);
  for (std::size_t k = 0; k < path.size(); k += 97) {
    const Vec z = path.point(k);
    const double s = path.s[k];
    CHECK((z - vec({s, 0, 0, s})).norm() < 1e-12);
  }
  CHECK(path.max_drift() <= 1e-14);
}

TEST_CASE("time translation covariance in minkowski") {
  auto m = make_metric("minkowski", 2);
  const Vec x = vec({0.3, -0.2});
  const Vec th = vec({0.6, 0.8});
  const double t0 = 0.7;
  const GeodesicPath a = trace(*m, {x, th, -1, 1, 1e-2});
  const Vec z0 = vec({t0, x[0] + t0 * th[0], x[1] + t0 * th[1]});
  const Vec p0 = vec({-1, th[0], th[1]});
  const GeodesicPath b = trace_from(*m, z0, p0, -1, 1, 1e-2);
  for (std::size_t k = 0; k < a.size(); ++k) {
    Vec shifted = a.point(k);
    shifted[0] += t0;
    shifted.tail(2) += t0 * th;
    CHECK((shifted - b.point(k)).norm() < 1e-12);
  }
}

TEST_CASE("product metric: spatial projection is an h-geodesic") {
  auto m = make_metric("product-lens", 2);
  const Vec x = vec({-0.4, 0.2});
  const Vec th_raw = vec({1.0, 0.3});
  const GeodesicPath path = trace(*m, {x, th_raw, 0, 1.5, 1e-3});
  auto [z0, p0] = initial_data(*m, x, th_raw);
  const Vec v0 = raise(*m, z0, p0).components.tail(2);
  auto h = [&](const Vec& y) {
    Vec z(3);
    z << 0, y;
    return Mat(m->g(z).bottomRightCorner(2, 2));
  };
  const Vec ref = oracle::riemannian_geodesic(h, x, v0, 1.5, 1e-3);
  const Vec got = path.point(path.size() - 1).tail(2);
  CHECK((got - ref).norm() < 1e-6);
  // dt/ds = 1 along the whole path for a product metric.
  CHECK(path.point(path.size() - 1)[0] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("perturbed metric: drift and fourth-order convergence") {
  auto m = make_metric("perturbed", 2);
  const Vec x = vec({0.2, -0.1});
  const Vec th = vec({0.6, 0.8});
  const GeodesicPath fine = trace(*m, {x, th, -10, 10, 1e-3});
  CHECK(fine.max_drift() <= 1e-8);
  // Endpoint self-convergence under step halving.
  std::vector<Vec> ends;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const GeodesicPath p = trace(*m, {x, th, 0, 3, h});
    ends.push_back(p.point(p.size() - 1));
  }
  for (std::size_t i = 0; i + 2 < ends.size(); ++i) {
    const double r = (ends[i] - ends[i + 1]).norm() / (ends[i + 1] - ends[i + 2]).norm();
    const double order = std::log2(r);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
  }
  // Drift shrinks by about 2^4 per halving.
  const double d1 = trace(*m, {x, th, 0, 3, 0.1}).max_drift();
  const double d2 = trace(*m, {x, th, 0, 3, 0.05}).max_drift();
  CHECK(d1 / d2 > 8.0);
}

TEST_CASE("drift abort and renormalisation") {
  auto m = make_metric("perturbed", 2, std::vector<double>{0.5, 0.5});
  TraceOptions strict;
  strict.drift_abort = 1e-14;
  CHECK_THROWS_AS(trace(*m, {vec({0.1, 0.1}), vec({1, 0}), 0, 2, 0.2}, strict),
                  NumericalFailure);
  TraceOptions renorm;
  renorm.renormalize = true;
  renorm.renormalize_every = 1;
  const GeodesicPath p = trace(*m, {vec({0.1, 0.1}), vec({1, 0}), 0, 2, 0.05}, renorm);
  CHECK(p.max_drift() < 1e-12);
}

TEST_CASE("exit interval") {
  auto m = make_metric("minkowski", 2);
  SUBCASE("chord of the unit ball") {
    const GeodesicPath p = trace(*m, {Vec::Zero(2), vec({1, 0}), -3, 3, 1e-3});
    const ExitWindow w = exit_interval(p, [](const Vec& z) { return z.norm() <= 1.0; });
    // |(s, s, 0)| = sqrt(2)|s|
    CHECK(w.s_minus == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(2e-3));
    CHECK(w.s_plus == doctest::Approx(1 / std::sqrt(2.0)).epsilon(2e-3));
    CHECK(!w.trapped);
  }
  SUBCASE("missing the box") {
    const GeodesicPath p = trace(*m, {vec({5, 5}), vec({1, 0}), -1, 1, 1e-2});
    Box box{Vec::Constant(3, -1), Vec::Constant(3, 1)};
    const ExitWindow w = exit_interval(p, box);
    CHECK(w.empty());
  }
  SUBCASE("trapped when inside at an endpoint") {
    const GeodesicPath p = trace(*m, {Vec::Zero(2), vec({1, 0}), -0.5, 0.5, 1e-2});
    Box box{Vec::Constant(3, -1), Vec::Constant(3, 1)};
    CHECK(exit_interval(p, box).trapped);
  }
  SUBCASE("slow support: exit by (R + |x|) / (1 - c)") {
    const double c = 0.5, R = 1.0;
    std::mt19937_64 rng(5);
    auto inside = [&](const Vec& z) { return z.tail(2).norm() <= c * std::abs(z[0]) + R; };
    for (int i = 0; i < 40; ++i) {
      Vec x = oracle::random_vec(rng, 2, -2.1, 2.1);
      const Vec th = oracle::random_vec(rng, 2);
      const double bound = (R + x.norm()) / (1 - c);
      const GeodesicPath p = trace(*m, {x, th, -bound - 1, bound + 1, 1e-2});
      const ExitWindow w = exit_interval(p, inside);
      CHECK(!w.trapped);
      if (w.empty()) continue;
      CHECK(w.s_minus >= -bound - 0.02);
      CHECK(w.s_plus <= bound + 0.02);
    }
  }
}

TEST_CASE("invert_exp") {
  SUBCASE("minkowski closed form") {
    auto m = make_metric("minkowski", 3);
    const double q = 0.2;
    const SpacetimePoint z(vec({0.4, 0.1, -0.3, 0.2}));
    const InverseExp inv = invert_exp(*m, q, z);
    const Vec th = ThetaFamily{3}(q);
    CHECK(inv.s == doctest::Approx(0.4).epsilon(1e-12));
    CHECK((inv.x - (z.x() - 0.4 * th)).norm() < 1e-12);
  }
  SUBCASE("slice points map to themselves") {
    for (const auto& id : metric_ids()) {
      auto m = make_metric(id, 2);
      const SpacetimePoint z(vec({0.0, 0.3, -0.2}));
      const InverseExp inv = invert_exp(*m, 0.1, z);
      CHECK(std::abs(inv.s) < 1e-10);
      CHECK((inv.x - z.x()).norm() < 1e-10);
    }
  }
  SUBCASE("perturbed round trip") {
    auto m = make_metric("perturbed", 2);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 10; ++i) {
      const Vec x0 = oracle::random_vec(rng, 2, -0.5, 0.5);
      const double q = std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
      const double s = std::uniform_real_distribution<double>(-0.4, 0.4)(rng);
      auto [z0, p0] = initial_data(*m, x0, ThetaFamily{2}(q));
      const PhasePoint end = shoot(*m, z0.coords, p0.components, s);
      const InverseExp inv = invert_exp(*m, q, SpacetimePoint(end.z));
      CHECK(std::abs(inv.s - s) <= 1e-9);
      CHECK((inv.x - x0).norm() <= 1e-9);
    }
  }
  SUBCASE("failure outside the neighbourhood") {
    auto m = make_metric("perturbed", 2, std::vector<double>{0.05, 1.0});
    InvertOptions opts;
    opts.max_iterations = 1;
    opts.tolerance = 1e-30;
    CHECK_THROWS_AS(invert_exp(*m, 0.0, SpacetimePoint(vec({0.8, 0.5, 0.5})), opts),
                    NumericalFailure);
  }
}

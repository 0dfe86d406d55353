#include <cmath>
#include <random>

#include "doctest.h"
#include "lightray/error.hpp"
#include "lightray/radon_reduction.hpp"
#include "oracles.hpp"

using namespace lightray;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Unit covector near e^{n-1} in R^{n+1}.
Vec near_e(std::mt19937_64& rng, int n, double spread) {
  Vec z = oracle::random_vec(rng, n + 1, -spread, spread);
  z[n - 1] += 1.0;
  return z / z.norm();
}

}  // namespace

TEST_CASE("theta family") {
  for (int n : {2, 3}) {
    const ThetaFamily th{n};
    for (double q : {-0.7, 0.0, 0.3}) CHECK(th(q).norm() == doctest::Approx(1.0));
    Vec e = Vec::Zero(n);
    e[n - 1] = 1;
    CHECK(th(0.0) == e);
  }
}

TEST_CASE("planes") {
  SUBCASE("the reference plane") {
    const TimelikePlane pl = plane_from_rays(0.0, vec({0, 1, 0}), 0.0);
    CHECK(pl.zeta() == vec({0, 0, 1, 0}));
    CHECK(pl.contains(vec({3.0, -2.0, 0.0, 7.0})));
    CHECK(!pl.contains(vec({0.0, 0.0, 0.1, 0.0})));
  }
  SUBCASE("both representations agree") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 5; ++trial) {
      for (int n : {2, 3}) {
        const Vec xi = oracle::random_vec(rng, n) + 2.0 * Vec::Unit(n, n - 2);
        const double q = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
        const double p = std::uniform_real_distribution<double>(-1, 1)(rng);
        const TimelikePlane pl = plane_from_rays(p, xi, q);
        // Points built from the ray picture lie on the plane.
        const Mat frame = pl.base_frame();
        for (int k = 0; k < 100; ++k) {
          const Vec u = oracle::random_vec(rng, n - 1, -3, 3);
          const double t = std::uniform_real_distribution<double>(-3, 3)(rng);
          const Vec x = pl.base_point() + frame * u;
          CHECK(std::abs(x.dot(xi) - p) < 1e-12);
          Vec z(n + 1);
          z[0] = t;
          z.tail(n) = x + t * pl.theta();
          CHECK(pl.contains(z, 1e-11));
          CHECK(pl.contains_by_rays(z, 1e-11));
        }
        // Random points: both predicates agree.
        for (int k = 0; k < 10000; ++k) {
          const Vec z = oracle::random_vec(rng, n + 1, -1, 1);
          const double d = z.dot(pl.zeta()) - p;
          if (std::abs(d) < 1e-9) continue;
          CHECK(pl.contains(z, 1e-3) == pl.contains_by_rays(z, 1e-3));
        }
      }
    }
  }
  CHECK_THROWS_AS(plane_from_rays(0.0, Vec::Zero(3), 0.0), InvalidArgument);
  CHECK_THROWS_AS(plane_from_rays(0.0, vec({0, 0, 2}), 0.0), InvalidArgument);
}

TEST_CASE("solve_q") {
  CHECK(solve_q(vec({0, 0, 1, 0})) == 0.0);
  CHECK(solve_q(vec({-std::sin(0.1), 0, 1, 0})) == doctest::Approx(0.1).epsilon(1e-14));
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    for (int n : {2, 3}) {
      const Vec zeta = near_e(rng, n, 0.12);
      const double q = solve_q(zeta);
      CHECK(solve_q_residual(zeta, q) < 1e-12);
      // zeta(q, zeta') reproduces zeta.
      const Vec back = zeta_of(q, zeta.tail(n));
      CHECK((back - zeta).norm() < 1e-10);
    }
  }
  for (int k = 0; k < 100; ++k) {
    const double q = std::uniform_real_distribution<double>(-0.15, 0.15)(rng);
    Vec xi = vec({0.05, 1.0, 0.02}) + oracle::random_vec(rng, 3, -0.03, 0.03);
    CHECK(std::abs(solve_q(zeta_of(q, xi)) - q) < 1e-10);
  }
  CHECK_THROWS(solve_q(vec({0, 0, 0, 1})));
  CHECK_THROWS(solve_q(Vec::Zero(4)));
}

TEST_CASE("diffeomorphism jacobian") {
  const Vec e = vec({0, 1, 0});
  CHECK(std::abs(diffeo_jacobian(0.0, e)) >= 1e-6);
  CHECK(diffeo_jacobian(0.0, e) == doctest::Approx(-1.0));
  // theta'(0) = e_{n-1}: xi orthogonal to it makes the map degenerate.
  CHECK(diffeo_jacobian(0.0, vec({1, 0, 0.5})) == 0.0);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vec xi = oracle::random_vec(rng, 3);
    const double q = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    const Mat j = diffeo_jacobian_matrix(q, xi);
    CHECK(std::abs(j.determinant() - diffeo_jacobian(q, xi)) < 1e-12);
    const double h = 1e-6;
    Mat fd(4, 4);
    fd.col(0) = (zeta_of(q + h, xi) - zeta_of(q - h, xi)) / (2 * h);
    for (int a = 0; a < 3; ++a) {
      Vec xp = xi, xm = xi;
      xp[a] += h;
      xm[a] -= h;
      fd.col(a + 1) = (zeta_of(q, xp) - zeta_of(q, xm)) / (2 * h);
    }
    CHECK((fd - j).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("radon transform through fubini") {
  auto m = make_metric("minkowski", 2);
  auto one = make_weight("one");
  auto gauss = make_phantom("gaussian", 2, std::vector<double>{0.8});
  const TimelikePlane pl = plane_from_rays(0.0, vec({1, 0}), 0.0);
  auto sino_at = [&](const Phantom& f, double q) {
    const SinogramSpec spec{GridSpec::cube(2, -8, 8, 161),
                            DirectionGrid::list({ThetaFamily{2}(q)}), 0.01};
    return sinogram(*m, Integrand::of(f), *one, spec);
  };
  SUBCASE("zero") {
    CHECK(radon_via_fubini(sino_at(*make_phantom("zero", 2), 0.0), pl).value == 0.0);
  }
  SUBCASE("reference plane against the oracle") {
    const Sinogram s = sino_at(*gauss, 0.0);
    const RadonResult r = radon_via_fubini(s, pl);
    CHECK(r.theta_mismatch == 0.0);
    // int int exp(-(t^2 + (x2 + t)^2) / sigma^2) dx2 dt = pi sigma^2.
    const double exact = M_PI * 0.64;
    CHECK(std::abs(plane_integral(*gauss, *one, pl) - exact) < 1e-10);
    CHECK(std::abs(r.value - exact) < 1e-3 * exact);
  }
  SUBCASE("linearity") {
    auto ball = make_phantom("ball", 2, std::vector<double>{0.7, 0.3, 0.1, 0.2, -0.1});
    const Sinogram a = sino_at(*gauss, 0.1);
    const Sinogram b = sino_at(*ball, 0.1);
    Sinogram c = a;
    for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] = 2 * a.values[i] - b.values[i];
    std::mt19937_64 rng(4);
    for (int k = 0; k < 10; ++k) {
      const TimelikePlane p = plane_from_rays(std::uniform_real_distribution<double>(-1, 1)(rng),
                                              vec({1.0, 0.2}) + oracle::random_vec(rng, 2, -0.3, 0.3), 0.1);
      const double lhs = radon_via_fubini(c, p).value;
      const double rhs = 2 * radon_via_fubini(a, p).value - radon_via_fubini(b, p).value;
      CHECK(std::abs(lhs - rhs) < 1e-12 * (1 + std::abs(lhs)));
    }
  }
  SUBCASE("vanishing rays give vanishing planes") {
    Sinogram s = sino_at(*gauss, 0.0);
    // Zero the sinogram on a slab of base points around the plane x1 = 0.5.
    for (std::size_t ix = 0; ix < s.num_x(); ++ix) {
      if (std::abs(s.x_point(ix)[0] - 0.5) < 0.3) s.values[ix] = 0.0;
    }
    for (double p : {0.45, 0.5, 0.6}) {
      CHECK(radon_via_fubini(s, plane_from_rays(p, vec({1, 0}), 0.0)).value == 0.0);
    }
  }
}

TEST_CASE("phase function") {
  auto mink = make_metric("minkowski", 3);
  SUBCASE("minkowski closed form and homogeneity") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
      const Vec z = oracle::random_vec(rng, 4, -0.5, 0.5);
      Vec zeta = near_e(rng, 3, 0.2);
      const Vec th = ThetaFamily{3}(zeta[0]);
      const double ref = (z.tail(3) - z[0] * th).dot(zeta.tail(3));
      const double got = phase(*mink, SpacetimePoint(z), zeta);
      CHECK(std::abs(got - ref) < 1e-12);
      Vec scaled = zeta;
      scaled.tail(3) *= 2.5;
      CHECK(std::abs(phase(*mink, SpacetimePoint(z), scaled) - 2.5 * got) < 1e-12);
    }
  }
  SUBCASE("slice points for every metric") {
    for (const auto& id : metric_ids()) {
      auto m = make_metric(id, 2);
      const Vec x = vec({0.2, -0.1});
      Vec z(3);
      z << 0, x;
      const Vec zeta = vec({0.1, 0.3, 1.0});
      CHECK(std::abs(phase(*m, SpacetimePoint(z), zeta) - x.dot(zeta.tail(2))) < 1e-10);
      CHECK(phase_slice_derivative_error(*m, x) < 1e-6);
    }
  }
  SUBCASE("mixed hessian determinant") {
    CHECK(std::abs(phase_det_check(*mink).det + 1.0) < 1e-8);
    auto pert = make_metric("perturbed", 2);
    CHECK(std::abs(phase_det_check(*pert).det + 1.0) < 1e-3);
  }
}

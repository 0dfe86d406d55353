#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lightray/error.hpp"
#include "lightray/field_io.hpp"
#include "lightray/fields.hpp"
#include "lightray/geometry.hpp"
#include "oracles.hpp"

using namespace lightray;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("grid spec") {
  const GridSpec g = GridSpec::cube(3, -1.0, 1.0, 5);
  CHECK(g.size() == 125);
  CHECK(g.spacing[0] == doctest::Approx(0.5));
  CHECK(g.cell_volume() == doctest::Approx(0.125));
  CHECK(g.upper()[2] == doctest::Approx(1.0));
  GridSpec bad = g;
  bad.spacing[1] = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = g;
  bad.dims.pop_back();
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("sampling") {
  const GridSpec g = GridSpec::cube(3, -2.0, 2.0, 21);
  SUBCASE("zero phantom") {
    const ScalarField f = sample(*make_phantom("zero", 2), g);
    for (double v : f.data()) CHECK(v == 0.0);
  }
  SUBCASE("gaussian peak") {
    const ScalarField f = sample(*make_phantom("gaussian", 2, std::vector<double>{0.5, 0.2, 0.0, -0.4}), g);
    const Vec z0 = vec({0.2, 0.0, -0.4});
    std::size_t best = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if ((f.point(i) - z0).norm() < (f.point(best) - z0).norm()) best = i;
    }
    CHECK(f[best] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("spacelike slab is constant along t and x^n on its plateau") {
    auto p = make_phantom("slab-spacelike", 2, std::vector<double>{0.2, 2.0, 1.0});
    for (double y : {-0.3, -0.05, 0.0, 0.07, 0.5}) {
      const double ref = (*p)(vec({0, y, 0}));
      for (double t : {-1.5, 0.3, 1.9}) {
        for (double x2 : {-1.2, 0.0, 2.0}) CHECK((*p)(vec({t, y, x2})) == ref);
      }
    }
  }
}

TEST_CASE("interpolation") {
  const GridSpec g = GridSpec::cube(3, -1.0, 1.0, 17);
  std::mt19937_64 rng(1);
  SUBCASE("nodes are reproduced exactly") {
    ScalarField f(g);
    for (auto& v : f.data()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    for (std::size_t i = 0; i < f.size(); i += 37) CHECK(f.interpolate(f.point(i)) == f[i]);
  }
  SUBCASE("linear functions are exact") {
    const Vec a = vec({0.3, -1.2, 0.7});
    ScalarField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.5 + a.dot(f.point(i));
    for (int k = 0; k < 100; ++k) {
      const Vec z = oracle::random_vec(rng, 3, -1.0, 1.0);
      CHECK(std::abs(f.interpolate(z) - (0.5 + a.dot(z))) < 1e-12);
    }
  }
  SUBCASE("gaussian within C h^2") {
    auto p = make_phantom("gaussian", 2, std::vector<double>{0.5});
    const ScalarField f = sample(*p, g);
    const double h = g.spacing[0];
    // |f''| <= 2 / sigma^2 per axis; multilinear error <= d h^2 max|f''| / 8.
    const double bound = 3 * h * h * (2 / 0.25) / 8;
    for (int k = 0; k < 200; ++k) {
      const Vec z = oracle::random_vec(rng, 3, -0.9, 0.9);
      CHECK(std::abs(f.interpolate(z) - (*p)(z)) <= bound);
    }
  }
  SUBCASE("outside is zero and interpolation is linear in the field") {
    ScalarField f(g), h(g), c(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
      h[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
      c[i] = 2.5 * f[i] - 0.75 * h[i];
    }
    CHECK(f.interpolate(vec({1.01, 0, 0})) == 0.0);
    for (int k = 0; k < 100; ++k) {
      const Vec z = oracle::random_vec(rng, 3, -1.0, 1.0);
      CHECK(std::abs(c.interpolate(z) - (2.5 * f.interpolate(z) - 0.75 * h.interpolate(z))) <
            1e-14);
    }
  }
}

TEST_CASE("phantom registry") {
  auto mink = make_metric("minkowski", 3);
  SUBCASE("edge conormals") {
    auto s = make_phantom("slab-spacelike", 3)->singular_support();
    auto t = make_phantom("slab-timelike", 3)->singular_support();
    REQUIRE(s.has_value());
    REQUIRE(t.has_value());
    CHECK((s->conormal - vec({0, 0, 1, 0})).norm() == 0.0);
    const SpacetimePoint o(Vec::Zero(4));
    CHECK(classify_covector(*mink, o, {s->conormal}).kind == Causal::Spacelike);
    CHECK(classify_covector(*mink, o, {t->conormal}).kind == Causal::Timelike);
  }
  SUBCASE("expanding support") {
    auto p = make_phantom("expanding", 2, std::vector<double>{0.5, 1.0});
    CHECK((*p)(vec({2.0, 2.5, 0.0})) == 0.0);
    CHECK((*p)(vec({0.0, 0.0, 0.0})) == 1.0);
    CHECK(p->support().c == 0.5);
  }
  SUBCASE("every phantom vanishes outside its declared cone") {
    std::mt19937_64 rng(2);
    for (const auto& id : phantom_ids()) {
      for (int n : {2, 3}) {
        auto p = make_phantom(id, n);
        const SupportCone cone = p->support();
        CHECK(cone.c > 0);
        CHECK(cone.c < 1);
        int outside = 0;
        for (int k = 0; k < 4000; ++k) {
          const Vec z = oracle::random_vec(rng, n + 1, -12, 12);
          if (cone.contains(z)) continue;
          ++outside;
          CHECK((*p)(z) == 0.0);
        }
        CHECK(outside > 100);
      }
    }
  }
  CHECK_THROWS_AS(make_phantom("unknown", 2), InvalidArgument);
  CHECK_THROWS_AS(make_phantom("gaussian", 2, std::vector<double>{-1.0}), InvalidArgument);
}

TEST_CASE("weights") {
  std::mt19937_64 rng(4);
  auto one = make_weight("one");
  auto sine = make_weight("sine");
  CHECK(one->is_unit());
  CHECK(sine->kappa_min() > 0);
  for (int k = 0; k < 200; ++k) {
    const Vec z = oracle::random_vec(rng, 3, -3, 3);
    const Vec v = oracle::random_vec(rng, 3);
    const double ref = (*sine)(z, v);
    CHECK(std::abs(ref) >= sine->kappa_min());
    CHECK((*one)(z, v) == 1.0);
    for (double lam : {-1e3, -2.0, -1e-3, 1e-3, 0.5, 7.0, 1e3}) {
      CHECK((*sine)(z, lam * v) == doctest::Approx(ref).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(make_weight("nope"), InvalidArgument);
}

TEST_CASE("LRTF round trip") {
  GridSpec g = GridSpec::cube(3, -1.0, 2.0, 4);
  g.dims[2] = 5;
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.37 * static_cast<double>(i));
  std::stringstream ss;
  write_field(ss, f);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "LRTF");
  CHECK(bytes.size() == 4 + 4 + 1 + 3 * 24 + 8 * f.size());
  const ScalarField back = read_field(ss);
  CHECK(back.grid().dims == f.grid().dims);
  CHECK(back.grid().origin == f.grid().origin);
  CHECK(back.grid().spacing == f.grid().spacing);
  CHECK(back.data() == f.data());
  std::stringstream bad("LRTX");
  CHECK_THROWS(read_field(bad));
}

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "lightray/error.hpp"
#include "lightray/fields.hpp"

namespace lightray {
namespace {

// Gaussians are cut where the exponent exceeds this, exp(-36) ~ 2e-16.
constexpr double kGaussCut = 36.0;

struct Spec {
  std::string id;
  std::vector<double> params;
  int n = 0;
  SupportCone cone;
  Box box;
  std::optional<SingularSupport> singular;
  std::function<double(const Vec&)> eval;
};

class ClosedForm : public Phantom {
 public:
  explicit ClosedForm(Spec s) : s_(std::move(s)) {}
  [[nodiscard]] std::string id() const override { return s_.id; }
  [[nodiscard]] std::vector<double> params() const override { return s_.params; }
  [[nodiscard]] int spatial_dim() const override { return s_.n; }
  [[nodiscard]] double operator()(const Vec& z) const override {
    if (!s_.box.contains(z)) return 0.0;
    return s_.eval(z);
  }
  [[nodiscard]] SupportCone support() const override { return s_.cone; }
  [[nodiscard]] Box bounding_box() const override { return s_.box; }
  [[nodiscard]] std::optional<SingularSupport> singular_support() const override {
    return s_.singular;
  }

 private:
  Spec s_;
};

std::vector<double> with_defaults(std::span<const double> given, std::vector<double> defaults,
                                  std::string_view id) {
  if (given.size() > defaults.size()) {
    throw InvalidArgument("phantom '" + std::string(id) + "': too many parameters");
  }
  for (std::size_t i = 0; i < given.size(); ++i) defaults[i] = given[i];
  return defaults;
}

void require_positive(double v, const char* name, std::string_view id) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw InvalidArgument("phantom '" + std::string(id) + "': " + name + " must be positive");
  }
}

Box centred_box(const Vec& centre, const Vec& half) { return Box{centre - half, centre + half}; }

Vec unit_axis(int d, int k) {
  Vec e = Vec::Zero(d);
  e[k] = 1.0;
  return e;
}

// 1 on |u| <= plateau, smooth fall to 0 at plateau + taper.
double window1(double u, double plateau, double taper) {
  return 1.0 - smoothstep((std::abs(u) - plateau) / taper);
}

Spec gaussian(int n, std::span<const double> given) {
  std::vector<double> defaults(n + 2, 0.0);
  defaults[0] = 1.0;
  auto p = with_defaults(given, defaults, "gaussian");
  const double sigma = p[0];
  require_positive(sigma, "sigma", "gaussian");
  Vec z0(n + 1);
  for (int i = 0; i <= n; ++i) z0[i] = p[1 + i];
  const double cut = std::sqrt(kGaussCut) * sigma;
  Spec s;
  s.id = "gaussian";
  s.params = p;
  s.n = n;
  s.cone = {0.5, z0.tail(n).norm() + cut};
  s.box = centred_box(z0, Vec::Constant(n + 1, cut));
  s.eval = [z0, sigma](const Vec& z) {
    const double r2 = (z - z0).squaredNorm() / (sigma * sigma);
    return r2 > kGaussCut ? 0.0 : std::exp(-r2);
  };
  return s;
}

Spec ball(int n, std::span<const double> given) {
  std::vector<double> defaults(n + 3, 0.0);
  defaults[0] = 1.0;
  defaults[1] = 0.2;
  auto p = with_defaults(given, defaults, "ball");
  const double radius = p[0];
  const double width = p[1];
  require_positive(radius, "radius", "ball");
  require_positive(width, "width", "ball");
  Vec z0(n + 1);
  for (int i = 0; i <= n; ++i) z0[i] = p[2 + i];
  const double outer = radius + 0.5 * width;
  Spec s;
  s.id = "ball";
  s.params = p;
  s.n = n;
  s.cone = {0.5, z0.tail(n).norm() + outer};
  s.box = centred_box(z0, Vec::Constant(n + 1, outer));
  s.eval = [z0, radius, width](const Vec& z) {
    return smoothstep((radius - (z - z0).norm()) / width + 0.5);
  };
  return s;
}

Spec slab(int n, std::span<const double> given, bool spacelike) {
  const char* id = spacelike ? "slab-spacelike" : "slab-timelike";
  auto p = with_defaults(given, {0.2, 1.0, 1.0}, id);
  const double width = p[0];
  const double plateau = p[1];
  const double taper = p[2];
  require_positive(width, "width", id);
  require_positive(plateau, "plateau", id);
  require_positive(taper, "taper", id);
  const double extent = plateau + taper;
  const int axis = spacelike ? n - 1 : 0;
  Spec s;
  s.id = id;
  s.params = p;
  s.n = n;
  s.cone = {0.5, std::sqrt(static_cast<double>(n)) * extent};
  s.box = centred_box(Vec::Zero(n + 1), Vec::Constant(n + 1, extent));
  s.singular = SingularSupport{Vec::Zero(n + 1), unit_axis(n + 1, axis)};
  s.eval = [=](const Vec& z) {
    double w = smoothstep(z[axis] / width + 0.5);
    for (int a = 0; a <= n && w != 0.0; ++a) w *= window1(z[a], plateau, taper);
    return w;
  };
  return s;
}

Spec expanding(int n, std::span<const double> given) {
  auto p = with_defaults(given, {0.5, 1.0, 0.2, 3.0}, "expanding");
  const double c = p[0];
  const double R = p[1];
  const double width = p[2];
  const double duration = p[3];
  if (!(c > 0 && c < 1)) throw InvalidArgument("phantom 'expanding': c must lie in (0, 1)");
  require_positive(R, "R", "expanding");
  require_positive(width, "width", "expanding");
  require_positive(duration, "duration", "expanding");
  if (width >= R) throw InvalidArgument("phantom 'expanding': width must be below R");
  const double t_max = duration + 1.0;
  const double r_max = R + c * (std::sqrt(t_max * t_max + 1.0) - 1.0);
  Vec half = Vec::Constant(n + 1, r_max);
  half[0] = t_max;
  Spec s;
  s.id = "expanding";
  s.params = p;
  s.n = n;
  s.cone = {c, R};
  s.box = centred_box(Vec::Zero(n + 1), half);
  // sqrt(t^2 + 1) - 1 <= |t| keeps the front inside |x| <= c|t| + R - width.
  s.eval = [=](const Vec& z) {
    const double t = z[0];
    const double front = R + c * (std::sqrt(t * t + 1.0) - 1.0) - width;
    return smoothstep((front - z.tail(n).norm()) / width) * window1(t, duration, 1.0);
  };
  return s;
}

Spec modulated(int n, std::span<const double> given, bool in_time) {
  const char* id = in_time ? "time-oscillation" : "wavepacket";
  const double cut_default = std::sqrt(kGaussCut);
  auto p = with_defaults(given, in_time ? std::vector<double>{8.0, 1.5, 1.0, cut_default}
                                        : std::vector<double>{3.0, 1.5, 1.5, cut_default},
                         id);
  const double k = p[0];
  const double st = p[1];
  const double sx = p[2];
  const double cut = p[3];
  require_positive(st, "sigma_t", id);
  require_positive(sx, "sigma_x", id);
  require_positive(cut, "cutoff", id);
  Vec half = Vec::Constant(n + 1, cut * sx);
  half[0] = cut * st;
  const int axis = in_time ? 0 : n - 1;
  Spec s;
  s.id = id;
  s.params = p;
  s.n = n;
  s.cone = {0.5, cut * sx};
  s.box = centred_box(Vec::Zero(n + 1), half);
  s.eval = [=](const Vec& z) {
    const double e = z[0] * z[0] / (st * st) + z.tail(n).squaredNorm() / (sx * sx);
    return e > cut * cut ? 0.0 : std::cos(k * z[axis]) * std::exp(-e);
  };
  return s;
}

Spec zero(int n) {
  Spec s;
  s.id = "zero";
  s.n = n;
  s.cone = {0.5, 0.0};
  s.box = Box{Vec::Zero(n + 1), Vec::Zero(n + 1)};
  s.eval = [](const Vec&) { return 0.0; };
  return s;
}

}  // namespace

PhantomPtr make_phantom(std::string_view id, int n, std::span<const double> params) {
  if (n < 2 || n + 1 > kMaxDim) throw InvalidArgument("phantom: unsupported dimension");
  Spec s;
  if (id == "zero") {
    if (!params.empty()) throw InvalidArgument("phantom 'zero' takes no parameters");
    s = zero(n);
  } else if (id == "gaussian") {
    s = gaussian(n, params);
  } else if (id == "ball") {
    s = ball(n, params);
  } else if (id == "slab-spacelike") {
    s = slab(n, params, true);
  } else if (id == "slab-timelike") {
    s = slab(n, params, false);
  } else if (id == "expanding") {
    s = expanding(n, params);
  } else if (id == "time-oscillation") {
    s = modulated(n, params, true);
  } else if (id == "wavepacket") {
    s = modulated(n, params, false);
  } else {
    throw InvalidArgument("unknown phantom '" + std::string(id) + "'");
  }
  return std::make_shared<ClosedForm>(std::move(s));
}

std::vector<std::string> phantom_ids() {
  return {"zero",      "gaussian",         "ball",      "slab-spacelike",
          "slab-timelike", "expanding", "time-oscillation", "wavepacket"};
}

}  // namespace lightray

#include "lightray/cli/stages.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "lightray/cli/output.hpp"
#include "lightray/error.hpp"
#include "lightray/field_io.hpp"
#include "lightray/geodesic.hpp"
#include "lightray/normal_op.hpp"
#include "lightray/radon_reduction.hpp"
#include "lightray/theta_family.hpp"

namespace lightray::cli {

namespace fs = std::filesystem;

GridSpec shadow_grid(const Box& box, double hx) {
  const int n = box.dim() - 1;
  const double t = std::max(std::abs(box.lo[0]), std::abs(box.hi[0]));
  double r = 0.0;
  for (int a = 1; a <= n; ++a) r = std::max({r, std::abs(box.lo[a]), std::abs(box.hi[a])});
  const auto count = static_cast<std::size_t>(std::ceil(2.0 * (r + t) / hx)) + 3;
  GridSpec g;
  g.dims.assign(n, count);
  g.origin.assign(n, -0.5 * hx * static_cast<double>(count - 1));
  g.spacing.assign(n, hx);
  return g;
}

std::vector<double> surface_params(const Settings& settings) {
  static const std::map<std::string, std::vector<std::string>> named{
      {"cylinder", {"R"}},
      {"double-cone", {"c", "t_min"}},
      {"hyperboloid", {"c", "C"}},
      {"plane", {"axis", "offset"}},
      {"quadric", {"c_tilde", "a_min", "a_max"}},
  };
  static const std::vector<std::string> all_named{"R",      "c",       "C",     "t_min",
                                                  "axis",   "offset",  "c_tilde", "a_min",
                                                  "a_max"};
  const std::string& id = settings.str("surface.id");
  const int n = static_cast<int>(settings.integer("model.n"));
  std::vector<double> params = make_surface(id, n)->params();
  const std::vector<double> given = settings.reals("surface.params");
  if (given.size() > params.size()) {
    throw UsageError("surface.params: " + id + " takes at most " +
                     std::to_string(params.size()) + " parameters");
  }
  std::copy(given.begin(), given.end(), params.begin());
  const auto it = named.find(id);
  for (const auto& key : all_named) {
    if (!settings.has("surface." + key)) continue;
    const auto& keys = it == named.end() ? std::vector<std::string>{} : it->second;
    const auto pos = std::find(keys.begin(), keys.end(), key);
    if (pos == keys.end()) throw UsageError("surface." + key + " does not apply to " + id);
    params[static_cast<std::size_t>(pos - keys.begin())] = settings.real("surface." + key);
  }
  return params;
}

Context::Context(Settings settings, fs::path output_dir)
    : settings_(std::move(settings)), dir_(std::move(output_dir)) {}

int Context::n() const {
  const long n = settings_.integer("model.n");
  if (n < 2 || n > 3) throw UsageError("model.n must be 2 or 3");
  return static_cast<int>(n);
}

MetricPtr Context::metric() const {
  return make_metric(settings_.str("metric.id"), n(), settings_.reals("metric.params"));
}

PhantomPtr Context::phantom() const {
  return make_phantom(settings_.str("phantom.id"), n(), settings_.reals("phantom.params"));
}

WeightPtr Context::weight() const { return make_weight(settings_.str("weight.id")); }

SurfacePtr Context::surface() const {
  return make_surface(settings_.str("surface.id"), n(), surface_params(settings_));
}

GridSpec Context::grid() const {
  return GridSpec::cube(n() + 1, settings_.real("grid.lo"), settings_.real("grid.hi"),
                        settings_.count("grid.samples"));
}

const ScalarField& Context::field() {
  if (!field_) field_ = sample(*phantom(), grid());
  return *field_;
}

const Sinogram& Context::sino() {
  if (sino_) return *sino_;
  const std::string& source = settings_.str("sinogram.source");
  Integrand in;
  if (source == "field") {
    in = Integrand::of(field());
  } else if (source == "phantom") {
    in = Integrand::of(*phantom());
  } else {
    throw UsageError("sinogram.source must be field or phantom");
  }
  const double h = grid().spacing[0];
  const SinogramSpec spec{shadow_grid(in.support, h / settings_.real("sinogram.x_refine")),
                          DirectionGrid::standard(n(), settings_.count("sinogram.directions")),
                          h / settings_.real("sinogram.step_refine")};
  sino_ = sinogram(*metric(), in, *weight(), spec);
  return *sino_;
}

const ScalarField& Context::normal_field() {
  if (normal_) return *normal_;
  const auto m = metric();
  normal_ = m->is_flat() ? backproject(sino(), grid())
                         : backproject_general(*m, sino(), grid());
  return *normal_;
}

fs::path Context::output(const std::string& name) {
  fs::path p = dir_ / name;
  if (std::find(outputs_.begin(), outputs_.end(), p) == outputs_.end()) outputs_.push_back(p);
  return p;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void emit_field(Context& ctx, const std::string& stem, const ScalarField& f) {
  write_field(ctx.output(stem + ".lrtf"), f);
  write_pgm(ctx.output(stem + ".pgm"), middle_slice(f));
  ctx.output(stem + ".pgm.txt");
}

double relative_l2(const ScalarField& a, const ScalarField& ref) {
  double num2 = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num2 += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num2 / den);
}

void require_flat(const Metric& m, const char* stage) {
  if (!m.is_flat()) throw InvalidArgument(std::string(stage) + " needs the minkowski metric");
}

std::vector<std::string> indexed(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

StageOutcome stage_phantom(Context& ctx) {
  const ScalarField& f = ctx.field();
  emit_field(ctx, "field", f);
  const auto [lo, hi] = std::minmax_element(f.data().begin(), f.data().end());
  StageOutcome o;
  o.summary = ctx.settings().str("phantom.id") + " on " + std::to_string(f.size()) +
              " samples, range [" + num(*lo) + ", " + num(*hi) + "]";
  o.metrics = {{"l2_norm", f.l2_norm()}, {"min", *lo}, {"max", *hi}};
  return o;
}

StageOutcome stage_sinogram(Context& ctx) {
  const Sinogram& s = ctx.sino();
  const int n = ctx.n();
  CsvWriter csv(ctx.output("sinogram.csv"),
                concat(concat({"itheta", "weight"}, indexed("theta", n)),
                       concat(indexed("x", n), {"value"})));
  double peak = 0.0;
  for (std::size_t it = 0; it < s.num_theta(); ++it) {
    for (std::size_t ix = 0; ix < s.num_x(); ++ix) {
      csv.cell(it).cell(s.directions.weights[it]);
      for (int a = 0; a < n; ++a) csv.cell(s.directions.directions[it][a]);
      const Vec x = s.x_point(ix);
      for (int a = 0; a < n; ++a) csv.cell(x[a]);
      csv.cell(s.at(it, ix));
      csv.end_row();
      peak = std::max(peak, std::abs(s.at(it, ix)));
    }
  }
  csv.close();
  StageOutcome o;
  o.summary = std::to_string(s.num_theta()) + " directions x " + std::to_string(s.num_x()) +
              " positions, max |Lf| " + num(peak) +
              (s.covers_shadow ? ", covers the shadow" : ", does not cover the shadow");
  o.metrics = {{"directions", static_cast<double>(s.num_theta())},
               {"positions", static_cast<double>(s.num_x())},
               {"max_abs", peak},
               {"covers_shadow", s.covers_shadow ? 1.0 : 0.0}};
  return o;
}

StageOutcome stage_normal(Context& ctx) {
  const ScalarField& nf = ctx.normal_field();
  emit_field(ctx, "normal", nf);
  StageOutcome o;
  o.summary = "L'L f on " + std::to_string(nf.size()) + " samples, L2 norm " + num(nf.l2_norm());
  o.metrics = {{"l2_norm", nf.l2_norm()}};
  return o;
}

FilterOptions filter_options(const Settings& s) {
  FilterOptions opts;
  opts.eps_lc = s.real("tolerances.eps_lc");
  opts.pad_factor = static_cast<int>(s.count("filter.pad"));
  const std::string& v = s.str("filter.variant");
  if (v == "abs-xi") {
    opts.variant = FilterVariant::AbsXi;
  } else if (v == "abs-zeta") {
    opts.variant = FilterVariant::AbsZeta;
  } else {
    throw UsageError("filter.variant must be abs-xi or abs-zeta");
  }
  return opts;
}

StageOutcome stage_reconstruct(Context& ctx) {
  const FilterOptions opts = filter_options(ctx.settings());
  const ScalarField rec = reconstruct_spacelike(ctx.normal_field(), ctx.n(), opts);
  const ScalarField proj = spacelike_project(ctx.field(), ctx.settings().real("tolerances.eps_band"),
                                             opts.pad_factor);
  emit_field(ctx, "reconstruction", rec);
  emit_field(ctx, "spacelike_projection", proj);
  const double err = relative_l2(rec, proj);
  const double kept = proj.inner(proj) / ctx.field().inner(ctx.field());
  CsvWriter csv(ctx.output("reconstruct.csv"), {"quantity", "value"});
  csv.cell("relative_l2_error").cell(err).end_row();
  csv.cell("band_energy_fraction").cell(kept).end_row();
  csv.close();
  StageOutcome o;
  o.summary = "relative L2 distance to the spacelike projection " + num(err) +
              " (band holds " + num(kept) + " of the energy)";
  o.metrics = {{"relative_l2_error", err}, {"band_energy_fraction", kept}};
  return o;
}

Vec random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vec v(n);
  do {
    for (int a = 0; a < n; ++a) v[a] = g(rng);
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

StageOutcome stage_slice_check(Context& ctx) {
  const Settings& s = ctx.settings();
  require_flat(*ctx.metric(), "slice-check");
  if (!ctx.weight()->is_unit()) throw InvalidArgument("slice-check needs the weight one");
  const int n = ctx.n();
  const ScalarField& f = ctx.field();
  const Sinogram& sino = ctx.sino();
  if (!sino.covers_shadow) throw NumericalFailure("slice-check: sinogram misses the shadow");

  std::mt19937_64 rng(static_cast<std::uint64_t>(s.integer("experiment.seed")));
  std::uniform_int_distribution<std::size_t> pick(0, sino.num_theta() - 1);
  std::uniform_real_distribution<double> radius(s.real("slice_check.xi_min"),
                                                s.real("slice_check.xi_max"));
  CsvWriter csv(ctx.output("slice_check.csv"),
                concat(concat({"sample", "itheta"}, indexed("xi", n)),
                       {"tau", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "relative_error"}));
  double worst = 0.0;
  const std::size_t samples = s.count("slice_check.samples");
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = radius(rng);
    const std::size_t it = pick(rng);
    const Vec xi = r * random_direction(rng, n);
    const SliceCheck c = fourier_slice_check(f, sino, it, xi);
    const double rel = c.abs_err / std::abs(c.lhs);
    worst = std::max(worst, rel);
    csv.cell(k).cell(it);
    for (int a = 0; a < n; ++a) csv.cell(xi[a]);
    csv.cell(c.tau).cell(c.lhs.real()).cell(c.lhs.imag()).cell(c.rhs.real()).cell(c.rhs.imag());
    csv.cell(rel).end_row();
  }
  csv.close();
  const double tol = s.real("slice_check.tolerance");
  StageOutcome o;
  o.pass = worst < tol;
  o.summary = "max relative error " + num(worst) + " over " + std::to_string(samples) +
              " (theta, xi), limit " + num(tol);
  o.metrics = {{"max_relative_error", worst}};
  return o;
}

StageOutcome stage_radon_check(Context& ctx) {
  const Settings& s = ctx.settings();
  const auto m = ctx.metric();
  require_flat(*m, "radon-check");
  const int n = ctx.n();
  const auto phantom = ctx.phantom();
  const auto ps = s.reals("radon.p");
  const auto qs = s.reals("radon.q");
  const auto rotations = s.reals("radon.rotation");
  if (ps.empty() || qs.empty() || rotations.empty()) throw UsageError("radon: empty sweep");
  const ThetaFamily family{n};
  std::vector<Vec> dirs;
  for (double q : qs) dirs.push_back(family(q));
  const SinogramSpec spec{shadow_grid(phantom->bounding_box(), s.real("radon.x_spacing")),
                          DirectionGrid::list(dirs), s.real("radon.step")};

  CsvWriter csv(ctx.output("radon.csv"),
                {"weight", "p", "q", "rotation", "value", "oracle", "relative_error",
                 "theta_mismatch", "q_solved", "residual"});
  double worst_rel = 0.0, worst_res = 0.0, worst_q = 0.0;
  std::size_t planes = 0;
  for (const auto& w : s.words("radon.weights")) {
    const auto kappa = make_weight(w);
    const Sinogram sino = sinogram(*m, Integrand::of(*phantom), *kappa, spec);
    for (double p : ps) {
      for (double q : qs) {
        for (double rot : rotations) {
          // xi turns from e_{n-1} towards e_n.
          Vec xi = Vec::Zero(n);
          xi[n - 2] = std::cos(rot);
          xi[n - 1] = std::sin(rot);
          const TimelikePlane plane = plane_from_rays(p, xi, q);
          const double oracle = plane_integral(*phantom, *kappa, plane);
          const RadonResult r = radon_via_fubini(sino, plane);
          const double rel = std::abs(r.value - oracle) / std::abs(oracle);
          const Vec zeta = zeta_of(q, xi);
          const double q_back = solve_q(zeta);
          const double res = solve_q_residual(zeta, q_back);
          worst_rel = std::max(worst_rel, rel);
          worst_res = std::max(worst_res, res);
          worst_q = std::max(worst_q, std::abs(q_back - q));
          ++planes;
          csv.cell(w).cell(p).cell(q).cell(rot).cell(r.value).cell(oracle).cell(rel);
          csv.cell(r.theta_mismatch).cell(q_back).cell(res).end_row();
        }
      }
    }
  }
  csv.close();
  const double tol = s.real("radon.tolerance");
  StageOutcome o;
  o.pass = planes > 0 && worst_rel < tol && worst_res < 1e-12 && worst_q < 1e-10;
  o.summary = std::to_string(planes) + " planes: max relative error " + num(worst_rel) +
              " (limit " + num(tol) + "), solve_q residual " + num(worst_res) +
              " (1e-12), q round trip " + num(worst_q) + " (1e-10)";
  o.metrics = {{"max_relative_error", worst_rel},
               {"max_solve_q_residual", worst_res},
               {"max_q_round_trip", worst_q}};
  return o;
}

StageOutcome stage_phase_check(Context& ctx) {
  const Settings& s = ctx.settings();
  const auto m = ctx.metric();
  const int n = ctx.n();
  const double h = s.real("phase.h");
  const PhaseHessian ph = phase_det_check(*m, h);
  std::mt19937_64 rng(static_cast<std::uint64_t>(s.integer("experiment.seed")));
  std::uniform_real_distribution<double> coord(-0.5, 0.5);

  CsvWriter csv(ctx.output("phase.csv"), concat({"quantity", "value"}, indexed("x", n)));
  csv.cell("det").cell(ph.det);
  for (int a = 0; a < n; ++a) csv.cell("");
  csv.end_row();
  double worst = 0.0;
  for (std::size_t k = 0; k < s.count("phase.points"); ++k) {
    Vec x(n);
    for (int a = 0; a < n; ++a) x[a] = coord(rng);
    const double e = phase_slice_derivative_error(*m, x, h);
    worst = std::max(worst, e);
    csv.cell("slice_derivative_error").cell(e);
    for (int a = 0; a < n; ++a) csv.cell(x[a]);
    csv.end_row();
  }
  csv.close();
  const double det_tol = s.real("phase.det_tolerance");
  const double deriv_tol = s.real("phase.deriv_tolerance");
  StageOutcome o;
  o.pass = std::abs(ph.det + 1.0) < det_tol && worst < deriv_tol;
  o.summary = "det = " + format_double(ph.det) + ", |det + 1| " + num(std::abs(ph.det + 1.0)) +
              " (limit " + num(det_tol) + "), slice derivative error " + num(worst) +
              " (limit " + num(deriv_tol) + ")";
  o.metrics = {{"det", ph.det}, {"slice_derivative_error", worst}};
  return o;
}

Box centred_box(int dim, double half) {
  return Box{Vec::Constant(dim, -half), Vec::Constant(dim, half)};
}

// Random points of the level set {F = 0}: uniform draws in the box pushed
// onto the surface by Newton steps along the Euclidean gradient.
std::vector<Vec> points_on_surface(const SurfaceFamily& s, const Box& box, std::size_t count,
                                   std::mt19937_64& rng) {
  std::vector<Vec> out;
  const int dim = box.dim();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t tries = 0; out.size() < count && tries < 200 * count; ++tries) {
    Vec z(dim);
    for (int a = 0; a < dim; ++a) z[a] = box.lo[a] + u(rng) * (box.hi[a] - box.lo[a]);
    bool ok = false;
    for (int it = 0; it < 50 && !ok; ++it) {
      Vec grad(dim);
      const double f = s.eval(z, &grad, nullptr) - s.level(0.0);
      if (std::abs(f) < 1e-12) {
        ok = true;
        break;
      }
      const double g2 = grad.squaredNorm();
      if (g2 < 1e-20) break;
      z -= (f / g2) * grad;
    }
    if (ok && box.contains(z) && s.smooth_at(z)) out.push_back(z);
  }
  return out;
}

StageOutcome stage_foliation_check(Context& ctx) {
  const Settings& s = ctx.settings();
  const auto m = ctx.metric();
  const auto surface = ctx.surface();
  const int n = ctx.n();
  StageOutcome o;
  ConvexityOptions conv;
  conv.tol_conv = s.real("tolerances.tol_conv");

  if (!std::isnan(surface->sigma_of_level(surface->level(0.0)))) {
    // A family: conditions (i)-(iii) against the phantom's support.
    const auto phantom = ctx.phantom();
    const std::size_t levels = s.count("foliation.levels");
    std::vector<double> sigmas;
    for (std::size_t k = 0; k < levels; ++k) {
      sigmas.push_back(levels == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(levels - 1));
    }
    ScanOptions opts;
    opts.seed = static_cast<std::uint64_t>(s.integer("experiment.seed"));
    opts.convexity.tol_conv = conv.tol_conv;
    const FoliationReport r =
        foliation_scan(*m, *surface, sigmas, phantom->bounding_box(), phantom->support(), opts);
    CsvWriter csv(ctx.output("foliation.csv"),
                  {"sigma", "points", "nondegenerate", "timelike", "convex", "min_q"});
    double min_q = 1e300;
    for (const auto& l : r.levels) {
      csv.cell(l.sigma).cell(l.points).cell(l.nondegenerate ? 1 : 0).cell(l.timelike ? 1 : 0);
      csv.cell(l.convex ? 1 : 0).cell(l.min_q).end_row();
      min_q = std::min(min_q, l.min_q);
    }
    csv.close();
    o.pass = r.pass();
    o.summary = surface->id() + " family: " + (o.pass ? "PASS" : "FAIL") + " (disjoint " +
                (r.disjoint ? "yes" : "no") + ", " + std::to_string(r.levels.size()) +
                " levels, min Q " + num(min_q) + ")";
    o.metrics = {{"disjoint", r.disjoint ? 1.0 : 0.0}, {"min_q", min_q}};
    return o;
  }

  const Box box = centred_box(n + 1, s.real("foliation.box"));
  std::mt19937_64 rng(static_cast<std::uint64_t>(s.integer("experiment.seed")));
  const std::vector<Vec> points = points_on_surface(*surface, box, s.count("foliation.points"), rng);
  if (points.empty()) throw NumericalFailure("foliation-check: no surface points in the box");
  CsvWriter csv(ctx.output("foliation.csv"),
                concat(indexed("z", n + 1), {"timelike", "min_q", "strict", "escapes"}));
  std::size_t timelike = 0, strict = 0, escapes = 0;
  double min_q = 1e300;
  for (const Vec& z : points) {
    const bool tl = is_timelike_surface(*m, *surface, z);
    double q = std::nan("");
    bool st = false, esc = false;
    if (tl) {
      const ConvexityResult c = strict_convexity_check(*m, *surface, z, conv);
      q = c.min_value;
      st = c.strict;
      esc = tangent_escape_check(*m, *surface, z, box).escapes;
      min_q = std::min(min_q, q);
    }
    timelike += tl;
    strict += st;
    escapes += esc;
    for (int a = 0; a <= n; ++a) csv.cell(z[a]);
    csv.cell(tl ? 1 : 0).cell(q).cell(st ? 1 : 0).cell(esc ? 1 : 0).end_row();
  }
  csv.close();
  const std::size_t total = points.size();
  o.pass = timelike == total && strict == total && escapes == total;
  std::ostringstream d;
  d << surface->id() << ": " << (o.pass ? "PASS" : "FAIL") << " (" << total
    << " points; timelike " << timelike << "/" << total << ", strict " << strict << "/" << total
    << ", escape " << escapes << "/" << total;
  if (timelike > 0) d << ", min Q " << num(min_q);
  d << ")";
  o.summary = d.str();
  o.metrics = {{"points", static_cast<double>(total)},
               {"timelike", static_cast<double>(timelike)},
               {"strict", static_cast<double>(strict)},
               {"escapes", static_cast<double>(escapes)}};
  if (timelike > 0) o.metrics.emplace_back("min_q", min_q);
  return o;
}

StageOutcome stage_shrink_check(Context& ctx) {
  const Settings& s = ctx.settings();
  const auto m = ctx.metric();
  require_flat(*m, "shrink-check");
  const int n = ctx.n();
  const double half = s.real("shrink.region");
  const SinogramSpec spec{GridSpec::cube(n, -half, half, s.count("shrink.x_samples")),
                          DirectionGrid::standard(n, s.count("shrink.directions")),
                          s.real("shrink.step")};
  const Sinogram sino = sinogram(*m, Integrand::of(*ctx.phantom()), *ctx.weight(), spec);
  const ShrinkReport r = support_shrink_experiment(*ctx.surface(), sino, centred_box(n + 1, half),
                                                   s.real("shrink.step"),
                                                   s.real("shrink.noise_floor"));
  CsvWriter csv(ctx.output("shrink.csv"),
                {"theta_index", "x_index", "s", "sigma", "value", "violating"});
  for (const auto& t : r.tangent) {
    const bool bad = std::abs(t.value) > r.noise_floor;
    csv.cell(t.theta_index).cell(t.x_index).cell(t.s).cell(t.sigma).cell(t.value);
    csv.cell(bad ? 1 : 0).end_row();
  }
  csv.close();
  const std::string& expect = s.str("shrink.expect");
  StageOutcome o;
  if (expect == "consistent") {
    o.pass = !r.tangent.empty() && r.consistent();
  } else if (expect == "violating") {
    o.pass = !r.violating.empty();
  } else if (expect == "any") {
    o.pass = true;
  } else {
    throw UsageError("shrink.expect must be consistent, violating or any");
  }
  o.summary = std::to_string(r.rays_checked) + " rays, " + std::to_string(r.tangent.size()) +
              " tangent, " + std::to_string(r.violating.size()) + " violating, max |Lf| on tangent rays " +
              num(r.max_abs_tangent) + " (expected " + expect + ")";
  o.metrics = {{"rays_checked", static_cast<double>(r.rays_checked)},
               {"tangent", static_cast<double>(r.tangent.size())},
               {"violating", static_cast<double>(r.violating.size())},
               {"max_abs_tangent", r.max_abs_tangent}};
  return o;
}

StageOutcome stage_visibility(Context& ctx) {
  const Settings& s = ctx.settings();
  VisibilityConfig cfg;
  cfg.n = ctx.n();
  cfg.grid_points = s.count("visibility.grid_points");
  cfg.half_extent = s.real("visibility.half_extent");
  cfg.directions = s.count("visibility.directions");
  cfg.x_refine = s.real("visibility.x_refine");
  cfg.step_refine = s.real("visibility.step_refine");
  cfg.edge_cells = s.real("visibility.edge_cells");
  cfg.eps_lc = s.real("tolerances.eps_lc");
  cfg.region = s.real("visibility.region");
  const VisibilityReport r = visibility_experiment(cfg);

  CsvWriter csv(ctx.output("visibility.csv"),
                {"phantom", "recon_energy", "true_energy", "ratio"});
  for (const VisibilityRun* run : {&r.spacelike, &r.timelike}) {
    csv.cell(run->phantom).cell(run->recon_energy).cell(run->true_energy).cell(run->ratio);
    csv.end_row();
  }
  csv.close();
  for (const auto& [run, tag] : {std::pair{&r.spacelike, "spacelike"}, {&r.timelike, "timelike"}}) {
    const std::string stem = std::string("visibility_") + tag;
    write_pgm(ctx.output(stem + "_truth.pgm"), middle_slice(run->truth));
    ctx.output(stem + "_truth.pgm.txt");
    write_pgm(ctx.output(stem + "_reconstruction.pgm"), middle_slice(run->reconstruction));
    ctx.output(stem + "_reconstruction.pgm.txt");
  }
  const double min_order = s.real("visibility.min_ordering");
  const double max_tl = s.real("visibility.max_timelike");
  StageOutcome o;
  o.pass = r.ordering() >= min_order && r.timelike.ratio <= max_tl;
  o.summary = "edge-energy ratio spacelike " + num(r.spacelike.ratio) + ", timelike " +
              num(r.timelike.ratio) + ", ordering " + num(r.ordering()) + " (need >= " +
              num(min_order) + ", timelike <= " + num(max_tl) + ")";
  o.metrics = {{"spacelike_ratio", r.spacelike.ratio},
               {"timelike_ratio", r.timelike.ratio},
               {"ordering", r.ordering()}};
  return o;
}

}  // namespace

const std::vector<StageDef>& stage_table() {
  static const std::vector<StageDef> table{
      {"phantom", "sample the phantom and write the field", kModel | kGrid, stage_phantom},
      {"sinogram", "write the light-ray transform of the phantom as CSV",
       kModel | kGrid | kSinogram, stage_sinogram},
      {"normal", "write the normal operator L'L f", kModel | kGrid | kSinogram, stage_normal},
      {"reconstruct", "filter L'L f back to the spacelike part of f",
       kModel | kGrid | kSinogram | kFilter, stage_reconstruct},
      {"slice-check", "Fourier slice identity at random (theta, xi)",
       kModel | kGrid | kSinogram | kSlice, stage_slice_check},
      {"radon-check", "plane integrals from the sinogram against the direct oracle",
       kModel | kRadon, stage_radon_check},
      {"phase-check", "nondegeneracy of the phase function", kModel | kPhase, stage_phase_check},
      {"foliation-check", "timelike, convexity and escape verdicts for a surface or family",
       kModel | kSurface | kFoliation, stage_foliation_check},
      {"shrink-check", "rays tangent to a foliation against the sinogram",
       kModel | kSurface | kShrink, stage_shrink_check},
      {"visibility", "edge visibility of spacelike and timelike slabs", kModel | kVisibility,
       stage_visibility},
  };
  return table;
}

const StageDef* find_stage(const std::string& name) {
  for (const auto& s : stage_table()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace lightray::cli

#include "lightray/normal_op.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lightray/error.hpp"

namespace lightray {

double sphere_area(int k) {
  if (k < 0) throw InvalidArgument("sphere_area: negative dimension");
  const double m = 0.5 * static_cast<double>(k + 1);
  return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

double normal_constant(int n) { return 2.0 * std::numbers::pi * sphere_area(n - 2); }

namespace {

void require_n(int n) {
  if (n != 2 && n != 3) throw InvalidArgument("normal operator analysis supports n = 2, 3");
}

}  // namespace

MultiplierValue multiplier_eval(int n, double tau, const Vec& xi, double eps_lc) {
  require_n(n);
  MultiplierValue out;
  const double xi2 = xi.squaredNorm();
  if (xi2 == 0.0) {
    out.singular = true;
    return out;
  }
  double s = xi2 - tau * tau;
  if (s <= 0.0) return out;
  const double exponent = 0.5 * (n - 3);
  if (exponent < 0.0) {
    const double floor = eps_lc * (xi2 + tau * tau);
    if (s < floor) {
      s = floor;
      out.clamped = true;
    }
  }
  out.value = normal_constant(n) * std::pow(s, exponent) / std::pow(std::sqrt(xi2), n - 2);
  return out;
}

MultiplierValue filter_eval(int n, double tau, const Vec& xi, double eps_lc,
                            FilterVariant variant) {
  require_n(n);
  MultiplierValue out;
  const double xi2 = xi.squaredNorm();
  if (xi2 == 0.0) {
    out.singular = true;
    return out;
  }
  const double s = xi2 - tau * tau;
  if (s <= 0.0) return out;
  const double exponent = 0.5 * (3 - n);
  // Flag the same band the forward symbol clamps.
  if (n == 2 && s < eps_lc * (xi2 + tau * tau)) out.clamped = true;
  const double base = variant == FilterVariant::AbsXi ? xi2 : xi2 + tau * tau;
  out.value = std::pow(std::sqrt(base), n - 2) * std::pow(s, exponent) / normal_constant(n);
  return out;
}

double spacelike_weight(double tau, const Vec& xi, double eps_band) {
  const double r = xi.norm();
  if (r == 0.0) return 0.0;
  const double ratio = std::abs(tau) / r;
  const double lo = 1.0 - eps_band;
  const double width = 0.5 * eps_band;
  if (width <= 0.0) return ratio < 1.0 ? 1.0 : 0.0;
  return 1.0 - smoothstep((ratio - lo) / width);
}

ScalarField apply_multiplier(const ScalarField& field, const FrequencyFunction& m) {
  return apply_frequency_multiplier(field, m);
}

FrequencyFunction normal_multiplier(int n, double eps_lc) {
  require_n(n);
  return [n, eps_lc](const Vec& zeta) {
    return multiplier_eval(n, zeta[0], zeta.tail(zeta.size() - 1), eps_lc).value;
  };
}

namespace {

ScalarField padded_apply(const ScalarField& field, const FrequencyFunction& m, int pad) {
  if (pad <= 1) return apply_multiplier(field, m);
  return crop(apply_multiplier(zero_pad(field, pad), m), field.grid());
}

}  // namespace

ScalarField reconstruct_spacelike(const ScalarField& nf, int n, const FilterOptions& opts) {
  require_n(n);
  if (nf.ndim() != n + 1) throw InvalidArgument("reconstruct_spacelike: field rank is not n + 1");
  return padded_apply(
      nf,
      [&](const Vec& zeta) {
        return filter_eval(n, zeta[0], zeta.tail(n), opts.eps_lc, opts.variant).value;
      },
      opts.pad_factor);
}

ScalarField spacelike_project(const ScalarField& field, double eps_band, int pad_factor) {
  if (!(eps_band >= 0.0 && eps_band < 1.0)) {
    throw InvalidArgument("spacelike_project: eps_band must lie in [0, 1)");
  }
  const int n = field.ndim() - 1;
  return padded_apply(
      field, [&](const Vec& zeta) { return spacelike_weight(zeta[0], zeta.tail(n), eps_band); },
      pad_factor);
}

SliceCheck fourier_slice_check(const ScalarField& field, const Sinogram& sino,
                               std::size_t itheta, const Vec& xi) {
  const int n = field.ndim() - 1;
  if (sino.x_grid.ndim() != n || xi.size() != n) {
    throw InvalidArgument("slice check: dimension mismatch");
  }
  if (itheta >= sino.num_theta()) throw InvalidArgument("slice check: direction out of range");
  const Integrand support = Integrand::of(field);
  DirectionGrid one = DirectionGrid::list({sino.directions.directions[itheta]});
  if (!covers_shadow(sino.x_grid, one, support.support)) {
    throw InvalidArgument("slice check: coverage violation, the sinogram x-grid misses part of "
                          "the field's shadow");
  }
  const Vec& theta = sino.directions.directions[itheta];
  SliceCheck out;
  out.tau = -theta.dot(xi);
  Vec zeta(n + 1);
  zeta[0] = out.tau;
  zeta.tail(n) = xi;
  out.lhs = dtft(field, zeta);

  const auto row = sino.row(itheta);
  std::complex<double> acc = 0.0;
  for (std::size_t ix = 0; ix < sino.num_x(); ++ix) {
    if (row[ix] == 0.0) continue;
    acc += row[ix] * std::polar(1.0, -sino.x_point(ix).dot(xi));
  }
  out.rhs = acc * sino.x_grid.cell_volume();
  out.abs_err = std::abs(out.lhs - out.rhs);

  const GridSpec& g = field.grid();
  const double dtau = 2.0 * std::numbers::pi / (static_cast<double>(g.dims[0]) * g.spacing[0]);
  const double bins = out.tau / dtau;
  out.bin_offset = std::abs(bins - std::round(bins));
  return out;
}

double edge_energy(const ScalarField& field, int axis, const Box& region) {
  const GridSpec& g = field.grid();
  if (axis < 0 || axis >= g.ndim()) throw InvalidArgument("edge_energy: bad axis");
  const std::size_t stride = field.stride(axis);
  std::size_t idx[kMaxDim];
  double acc = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    field.unravel(i, idx);
    if (idx[axis] + 1 >= g.dims[axis]) continue;
    const Vec z = field.point(i);
    if (!region.contains(z)) continue;
    Vec z1 = z;
    z1[axis] += g.spacing[axis];
    if (!region.contains(z1)) continue;
    const double d = field[i + stride] - field[i];
    acc += d * d;
  }
  return acc;
}

VisibilityRun visibility_run(const VisibilityConfig& cfg, bool spacelike_edge) {
  const int n = cfg.n;
  require_n(n);
  const GridSpec grid =
      GridSpec::cube(n + 1, -cfg.half_extent, cfg.half_extent, cfg.grid_points);
  const double h = grid.spacing[0];
  const std::vector<double> params{cfg.edge_cells * h, cfg.plateau, cfg.taper};
  const PhantomPtr phantom = make_phantom(spacelike_edge ? "slab-spacelike" : "slab-timelike", n, params);

  VisibilityRun run;
  run.phantom = phantom->id();
  run.truth = sample(*phantom, grid);

  // The x-grid covers the shadow of the phantom's box for every direction.
  const Box box = phantom->bounding_box();
  double reach = 0.0;
  for (int a = 0; a <= n; ++a) reach = std::max({reach, std::abs(box.lo[a]), std::abs(box.hi[a])});
  const double hx = h / cfg.x_refine;
  const auto nx = static_cast<std::size_t>(std::ceil(4.0 * reach / hx)) + 3;
  const double x0 = -0.5 * hx * static_cast<double>(nx - 1);
  GridSpec xg;
  xg.dims.assign(n, nx);
  xg.origin.assign(n, x0);
  xg.spacing.assign(n, hx);

  SinogramSpec spec{xg, DirectionGrid::standard(n, cfg.directions), h / cfg.step_refine};
  const auto minkowski = make_metric("minkowski", n);
  const auto one = make_weight("one");
  const ScalarField nf = normal(*minkowski, Integrand::of(*phantom), *one, spec, grid);
  run.reconstruction = reconstruct_spacelike(nf, n, FilterOptions{cfg.eps_lc});

  const int axis = spacelike_edge ? n - 1 : 0;
  const Box region{Vec::Constant(n + 1, -cfg.region), Vec::Constant(n + 1, cfg.region)};
  run.true_energy = edge_energy(run.truth, axis, region);
  run.recon_energy = edge_energy(run.reconstruction, axis, region);
  run.ratio = run.true_energy > 0 ? run.recon_energy / run.true_energy : 0.0;
  return run;
}

VisibilityReport visibility_experiment(const VisibilityConfig& cfg) {
  VisibilityReport r;
  r.spacelike = visibility_run(cfg, true);
  r.timelike = visibility_run(cfg, false);
  return r;
}

}  // namespace lightray

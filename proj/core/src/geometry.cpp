#include "lightray/geometry.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "lightray/error.hpp"

namespace lightray {

std::string_view to_string(Causal c) {
  switch (c) {
    case Causal::Spacelike: return "spacelike";
    case Causal::Timelike: return "timelike";
    case Causal::Lightlike: return "lightlike";
  }
  return "unknown";
}

Mat Metric::g_inv(const Vec& z) const { return g(z).inverse(); }

void Metric::inverse_partials(const Vec& z, MetricPartials& d) const {
  // d_k g^{-1} = -g^{-1} (d_k g) g^{-1}
  const Mat gi = g_inv(z);
  MetricPartials dg;
  partials(z, dg);
  for (int k = 0; k < dim(); ++k) d[k] = -gi * dg[k] * gi;
}

void Metric::hamiltonian_rhs(const Vec& z, const Vec& p, Vec& dz, Vec& dp) const {
  const int d = dim();
  dz = g_inv(z) * p;
  MetricPartials dgi;
  inverse_partials(z, dgi);
  dp.resize(d);
  for (int k = 0; k < d; ++k) dp[k] = -0.5 * p.dot(dgi[k] * p);
}

Cotangent lower(const Metric& metric, const SpacetimePoint& z, const TangentVector& v) {
  return Cotangent{metric.g(z.coords) * v.components};
}

TangentVector raise(const Metric& metric, const SpacetimePoint& z, const Cotangent& w) {
  return TangentVector{metric.g_inv(z.coords) * w.components};
}

namespace {

CausalClass classify_quadratic(double q, double norm2, double tol) {
  if (q > tol * norm2) return {Causal::Spacelike, q};
  if (q < -tol * norm2) return {Causal::Timelike, q};
  return {Causal::Lightlike, q};
}

}  // namespace

CausalClass classify_vector(const Metric& metric, const SpacetimePoint& z,
                            const TangentVector& v, double tol) {
  const double norm2 = v.components.squaredNorm();
  if (norm2 == 0.0) throw InvalidArgument("undefined causal class for the zero vector");
  const double q = v.components.dot(metric.g(z.coords) * v.components);
  return classify_quadratic(q, norm2, tol);
}

CausalClass classify_covector(const Metric& metric, const SpacetimePoint& z,
                              const Cotangent& w, double tol) {
  const double norm2 = w.components.squaredNorm();
  if (norm2 == 0.0) throw InvalidArgument("undefined causal class for the zero covector");
  const double q = w.components.dot(metric.g_inv(z.coords) * w.components);
  return classify_quadratic(q, norm2, tol);
}

SignatureInfo signature(const Metric& metric, const SpacetimePoint& z) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(metric.g(z.coords), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  SignatureInfo info;
  double lo = INFINITY;
  double hi = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0) ++info.negative;
    if (ev[i] > 0) ++info.positive;
    lo = std::min(lo, std::abs(ev[i]));
    hi = std::max(hi, std::abs(ev[i]));
  }
  info.condition = lo > 0 ? hi / lo : INFINITY;
  return info;
}

Christoffel christoffel(const Metric& metric, const SpacetimePoint& z) {
  const int d = metric.dim();
  const SignatureInfo sig = signature(metric, z);
  if (!(sig.condition <= 1e12)) {
    throw NumericalFailure("degenerate metric: condition number " +
                           std::to_string(sig.condition));
  }
  const Mat gi = metric.g_inv(z.coords);
  MetricPartials dg;
  metric.partials(z.coords, dg);

  // First kind: [ij, l] = 1/2 (d_i g_lj + d_j g_li - d_l g_ij), symmetric in i, j.
  Christoffel gamma;
  for (int k = 0; k < d; ++k) gamma[k] = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Vec first(d);
      for (int l = 0; l < d; ++l) {
        first[l] = 0.5 * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
      }
      const Vec second = gi * first;
      for (int k = 0; k < d; ++k) {
        gamma[k](i, j) = second[k];
        gamma[k](j, i) = second[k];
      }
    }
  }
  return gamma;
}

}  // namespace lightray

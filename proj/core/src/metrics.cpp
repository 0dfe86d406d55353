#include <cmath>
#include <string>

#include "lightray/error.hpp"
#include "lightray/geometry.hpp"

namespace lightray {
namespace {

// -dt^2 + sum_a h_a(z) (dx^a)^2, the only chart form the registry uses.
// Subclasses supply the diagonal h_a and its gradient.
class DiagonalNormalForm : public Metric {
 public:
  explicit DiagonalNormalForm(int n) : n_(n) {
    if (n < 2 || n + 1 > kMaxDim) {
      throw InvalidArgument("spatial dimension must be in [2, " +
                            std::to_string(kMaxDim - 1) + "]");
    }
  }

  [[nodiscard]] int spatial_dim() const override { return n_; }

  [[nodiscard]] Mat g(const Vec& z) const override {
    Vec h(n_);
    spatial_diagonal(z, h, nullptr);
    Mat m = Mat::Zero(n_ + 1, n_ + 1);
    m(0, 0) = -1.0;
    for (int a = 0; a < n_; ++a) m(a + 1, a + 1) = h[a];
    return m;
  }

  [[nodiscard]] Mat g_inv(const Vec& z) const override {
    Vec h(n_);
    spatial_diagonal(z, h, nullptr);
    Mat m = Mat::Zero(n_ + 1, n_ + 1);
    m(0, 0) = -1.0;
    for (int a = 0; a < n_; ++a) m(a + 1, a + 1) = 1.0 / h[a];
    return m;
  }

  void partials(const Vec& z, MetricPartials& d) const override {
    Vec h(n_);
    Mat grad(n_, n_ + 1);
    spatial_diagonal(z, h, &grad);
    for (int k = 0; k <= n_; ++k) {
      d[k] = Mat::Zero(n_ + 1, n_ + 1);
      for (int a = 0; a < n_; ++a) d[k](a + 1, a + 1) = grad(a, k);
    }
  }

  void inverse_partials(const Vec& z, MetricPartials& d) const override {
    Vec h(n_);
    Mat grad(n_, n_ + 1);
    spatial_diagonal(z, h, &grad);
    for (int k = 0; k <= n_; ++k) {
      d[k] = Mat::Zero(n_ + 1, n_ + 1);
      for (int a = 0; a < n_; ++a) d[k](a + 1, a + 1) = -grad(a, k) / (h[a] * h[a]);
    }
  }

  void hamiltonian_rhs(const Vec& z, const Vec& p, Vec& dz, Vec& dp) const override {
    Vec h(n_);
    Mat grad(n_, n_ + 1);
    spatial_diagonal(z, h, &grad);
    dz.resize(n_ + 1);
    dp.resize(n_ + 1);
    dz[0] = -p[0];
    Vec w(n_);
    for (int a = 0; a < n_; ++a) {
      dz[a + 1] = p[a + 1] / h[a];
      w[a] = dz[a + 1] * dz[a + 1];  // p_a^2 / h_a^2
    }
    // dp_k = -1/2 d_k(1/h_a) p_a^2 = 1/2 d_k h_a p_a^2 / h_a^2
    for (int k = 0; k <= n_; ++k) dp[k] = 0.5 * grad.col(k).dot(w);
  }

 protected:
  // h[a] = h_a(z); if grad is non-null, grad(a, k) = d_k h_a(z).
  virtual void spatial_diagonal(const Vec& z, Vec& h, Mat* grad) const = 0;

  int n_;
};

class Minkowski final : public DiagonalNormalForm {
 public:
  using DiagonalNormalForm::DiagonalNormalForm;
  [[nodiscard]] std::string id() const override { return "minkowski"; }
  [[nodiscard]] std::vector<double> params() const override { return {}; }
  [[nodiscard]] bool is_flat() const override { return true; }

 protected:
  void spatial_diagonal(const Vec&, Vec& h, Mat* grad) const override {
    h.setOnes();
    if (grad) grad->setZero();
  }
};

class ProductStretch final : public DiagonalNormalForm {
 public:
  ProductStretch(int n, double a) : DiagonalNormalForm(n), a_(a) {
    if (a_ < 0) throw InvalidArgument("product-stretch requires a >= 0");
  }
  [[nodiscard]] std::string id() const override { return "product-stretch"; }
  [[nodiscard]] std::vector<double> params() const override { return {a_}; }

 protected:
  void spatial_diagonal(const Vec& z, Vec& h, Mat* grad) const override {
    h.setOnes();
    h[0] = 1.0 + a_ * z[1] * z[1];
    if (grad) {
      grad->setZero();
      (*grad)(0, 1) = 2.0 * a_ * z[1];
    }
  }

 private:
  double a_;
};

class ProductLens final : public DiagonalNormalForm {
 public:
  ProductLens(int n, double amp, double width)
      : DiagonalNormalForm(n), amp_(amp), width_(width) {
    if (!(width_ > 0)) throw InvalidArgument("product-lens requires width > 0");
    if (!(amp_ > -1)) throw InvalidArgument("product-lens requires amp > -1");
  }
  [[nodiscard]] std::string id() const override { return "product-lens"; }
  [[nodiscard]] std::vector<double> params() const override { return {amp_, width_}; }

 protected:
  void spatial_diagonal(const Vec& z, Vec& h, Mat* grad) const override {
    const double w2 = width_ * width_;
    const double r2 = z.tail(n_).squaredNorm();
    const double e = amp_ * std::exp(-r2 / w2);
    h.setConstant(1.0 + e);
    if (grad) {
      grad->setZero();
      for (int a = 0; a < n_; ++a) {
        for (int k = 1; k <= n_; ++k) (*grad)(a, k) = -2.0 * z[k] / w2 * e;
      }
    }
  }

 private:
  double amp_;
  double width_;
};

class Perturbed final : public DiagonalNormalForm {
 public:
  Perturbed(int n, double eps, double width)
      : DiagonalNormalForm(n), eps_(eps), width_(width) {
    if (!(width_ > 0)) throw InvalidArgument("perturbed requires width > 0");
    // sup |b| = width / sqrt(2e) keeps h positive for |eps| below this bound.
    if (std::abs(eps_) * width_ / std::sqrt(2.0 * std::exp(1.0)) >= 0.5) {
      throw InvalidArgument("perturbed: |eps| too large for a Lorentzian metric");
    }
  }
  [[nodiscard]] std::string id() const override { return "perturbed"; }
  [[nodiscard]] std::vector<double> params() const override { return {eps_, width_}; }

 protected:
  void spatial_diagonal(const Vec& z, Vec& h, Mat* grad) const override {
    const int d = n_ + 1;
    const double u = 1.0 / std::sqrt(static_cast<double>(d));
    const double w2 = width_ * width_;
    const double lin = u * z.sum();
    const double gauss = std::exp(-z.squaredNorm() / w2);
    h.setConstant(1.0 + eps_ * lin * gauss);
    if (grad) {
      for (int k = 0; k < d; ++k) {
        const double db = (u - 2.0 * z[k] / w2 * lin) * gauss;
        for (int a = 0; a < n_; ++a) (*grad)(a, k) = eps_ * db;
      }
    }
  }

 private:
  double eps_;
  double width_;
};

double param_or(std::span<const double> params, std::size_t i, double fallback) {
  return i < params.size() ? params[i] : fallback;
}

}  // namespace

MetricPtr make_metric(std::string_view id, int spatial_dim, std::span<const double> params) {
  if (id == "minkowski") return std::make_shared<Minkowski>(spatial_dim);
  if (id == "product-stretch") {
    return std::make_shared<ProductStretch>(spatial_dim, param_or(params, 0, 1.0));
  }
  if (id == "product-lens") {
    return std::make_shared<ProductLens>(spatial_dim, param_or(params, 0, 0.3),
                                         param_or(params, 1, 1.0));
  }
  if (id == "perturbed") {
    return std::make_shared<Perturbed>(spatial_dim, param_or(params, 0, 0.05),
                                       param_or(params, 1, 1.0));
  }
  throw InvalidArgument("unknown metric id '" + std::string(id) + "'");
}

std::vector<std::string> metric_ids() {
  return {"minkowski", "product-stretch", "product-lens", "perturbed"};
}

}  // namespace lightray

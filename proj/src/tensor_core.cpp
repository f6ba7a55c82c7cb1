#include "schur/tensor_core.hpp"

#include <cmath>
#include <string>

namespace schur {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

void require_order(int r, int n) {
  if (r < 0 || r > n) {
    throw DomainError("order r=" + std::to_string(r) + " outside 0.." + std::to_string(n));
  }
}

}  // namespace

MetricAtPoint::MetricAtPoint(Matrix metric) : g(std::move(metric)) {
  if (g.rows() != g.cols() || g.rows() < 1) throw DimensionError("metric must be square");
  if (asymmetry(g) > 1e-12) throw DomainError("metric is not symmetric");
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite");
  g_inv = llt.solve(Matrix::Identity(g.rows(), g.cols()));
  g_inv = symmetrized(g_inv);
}

MetricAtPoint MetricAtPoint::euclidean(int n) {
  MetricAtPoint m;
  m.g = Matrix::Identity(n, n);
  m.g_inv = Matrix::Identity(n, n);
  return m;
}

double MetricAtPoint::sqrt_det() const { return std::sqrt(g.determinant()); }

double elementary_symmetric(std::span<const double> values, int r) {
  const int n = static_cast<int>(values.size());
  require_order(r, n);
  // e[j] holds sigma_j of the values processed so far.
  std::vector<double> e(static_cast<size_t>(r) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::min(i + 1, r); j >= 1; --j) e[j] += values[i] * e[j - 1];
  }
  return e[r];
}

std::vector<double> sigmas_of(const SymEndomorphism& a) {
  const int n = a.dim();
  std::vector<double> s(static_cast<size_t>(n) + 1, 0.0);
  s[0] = 1.0;
  Matrix p = Matrix::Identity(n, n);
  for (int r = 1; r <= n; ++r) {
    Matrix ap = a.m * p;
    s[r] = ap.trace() / r;
    p = s[r] * Matrix::Identity(n, n) - ap;
  }
  return s;
}

double sigma_of(const SymEndomorphism& a, int r) {
  require_order(r, a.dim());
  return sigmas_of(a)[r];
}

SymEndomorphism newton_transform(const SymEndomorphism& a, int r) {
  const int n = a.dim();
  require_order(r, n);
  if (r == n) return SymEndomorphism::zero(n);
  Matrix p = Matrix::Identity(n, n);
  for (int j = 1; j <= r; ++j) {
    Matrix ap = a.m * p;
    const double sj = ap.trace() / j;
    p = sj * Matrix::Identity(n, n) - ap;
  }
  return SymEndomorphism(std::move(p));
}

SymEndomorphism raise_index(const SymTensorSample& t, const MetricAtPoint& g) {
  require_same_dim(t.dim(), g.dim(), "raise_index");
  return SymEndomorphism(g.g_inv * t.t);
}

SymTensorSample lower_index(const SymEndomorphism& a, const MetricAtPoint& g) {
  require_same_dim(a.dim(), g.dim(), "lower_index");
  return SymTensorSample(symmetrized(g.g * a.m));
}

double trace(const SymTensorSample& t, const MetricAtPoint& g) {
  require_same_dim(t.dim(), g.dim(), "trace");
  return (g.g_inv.array() * t.t.array()).sum();
}

SymTensorSample traceless_part(const SymTensorSample& t, const MetricAtPoint& g) {
  const double b = trace(t, g);
  return SymTensorSample(t.t - (b / t.dim()) * g.g);
}

double norm_sq(const SymTensorSample& t, const MetricAtPoint& g) {
  require_same_dim(t.dim(), g.dim(), "norm_sq");
  // |T|^2 = tr(g^-1 T g^-1 T)
  const Matrix a = g.g_inv * t.t;
  return (a.array() * a.transpose().array()).sum();
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double asymmetry(const Matrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace schur

#pragma once

// Pointwise algebra of symmetric endomorphisms: elementary symmetric
// functions, Newton transformations, traces and metric-weighted norms.
//
// Two representations are used throughout the project:
//  * SymEndomorphism: a (1,1)-tensor A^i_j in some frame. In an orthonormal
//    frame it is a symmetric matrix; in a coordinate frame it is g^{-1} T for
//    a symmetric (2,0) tensor T and is only g-self-adjoint.
//  * SymTensorSample: covariant components T_ij, always symmetric, paired
//    with the MetricAtPoint of the same frame.
// Conversions between the two are explicit (raise_index / lower_index).

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace schur {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SymEndomorphism {
  Matrix m;

  SymEndomorphism() = default;
  explicit SymEndomorphism(Matrix entries) : m(std::move(entries)) {}

  static SymEndomorphism identity(int n) { return SymEndomorphism(Matrix::Identity(n, n)); }
  static SymEndomorphism zero(int n) { return SymEndomorphism(Matrix::Zero(n, n)); }

  int dim() const { return static_cast<int>(m.rows()); }
  double trace() const { return m.trace(); }
};

struct MetricAtPoint {
  Matrix g;
  Matrix g_inv;

  MetricAtPoint() = default;
  // Throws DomainError unless g is symmetric positive definite.
  explicit MetricAtPoint(Matrix metric);

  static MetricAtPoint euclidean(int n);

  int dim() const { return static_cast<int>(g.rows()); }
  double sqrt_det() const;
};

struct SymTensorSample {
  Matrix t;

  SymTensorSample() = default;
  explicit SymTensorSample(Matrix components) : t(std::move(components)) {}

  int dim() const { return static_cast<int>(t.rows()); }
};

// sigma_r(values) by the product recurrence on the coefficients of
// prod_i (1 + x_i s); sigma_0 = 1.
double elementary_symmetric(std::span<const double> values, int r);

// sigma_r of the spectrum of A from characteristic coefficients
// (Faddeev-LeVerrier: sigma_r = tr(A P_{r-1}) / r). No eigendecomposition.
double sigma_of(const SymEndomorphism& a, int r);

// All of sigma_0 .. sigma_n at once.
std::vector<double> sigmas_of(const SymEndomorphism& a);

// P_r(A) via P_0 = I, P_r = sigma_r I - A P_{r-1}. P_n is the zero map.
SymEndomorphism newton_transform(const SymEndomorphism& a, int r);

// A^i_j = g^{ik} T_kj and back.
SymEndomorphism raise_index(const SymTensorSample& t, const MetricAtPoint& g);
SymTensorSample lower_index(const SymEndomorphism& a, const MetricAtPoint& g);

// B = g^{ij} T_ij.
double trace(const SymTensorSample& t, const MetricAtPoint& g);

// T - (B/n) g.
SymTensorSample traceless_part(const SymTensorSample& t, const MetricAtPoint& g);

// g^{ik} g^{jl} T_ij T_kl.
double norm_sq(const SymTensorSample& t, const MetricAtPoint& g);

// Symmetrize in place: (M + M^T) / 2.
Matrix symmetrized(const Matrix& m);

// max |m - m^T| relative to max |m|; 0 for the zero matrix.
double asymmetry(const Matrix& m);

}  // namespace schur

#pragma once

// Reference values for grid geometries whose data depend on a single
// periodic coordinate s in [0, P): pointwise quantities come from closed
// forms in s, integrals from composite Gauss-Legendre quadrature, and
// lambda1 from a periodic P1 finite element problem per Fourier mode of
// the remaining coordinates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "revolution_oracle.hpp"

namespace oracle {

struct Slab {
  double period = 1.0;
  double transverse = 1.0;  // measure of the remaining coordinates
  // Volume density per ds, after integrating out nothing.
  std::function<double(double)> density;
  // Coefficient of f'^2 and of f^2 for transverse mode m in the weak form
  // int (a f'^2 + b_m f^2) = lambda int density f^2.
  std::function<double(double)> a;
  std::function<double(double, int)> b;
  int modes = 0;  // number of transverse modes to scan (mode 0 is constant)
};

inline double integrate_slab(const Slab& sl, const std::function<double(double)>& f, int panels = 400) {
  std::vector<double> xs, ws;
  gauss(8, xs, ws);
  const double h = sl.period / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (size_t q = 0; q < xs.size(); ++q) {
      const double s = (p + 0.5 + 0.5 * xs[q]) * h;
      sum += ws[q] * 0.5 * h * sl.density(s) * f(s);
    }
  }
  return sum * sl.transverse;
}

inline double slab_mode(const Slab& sl, int mode, int elements) {
  const int N = elements;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N), M = K;
  std::vector<double> xs, ws;
  gauss(6, xs, ws);
  const double h = sl.period / N;
  for (int e = 0; e < N; ++e) {
    const int idx[2] = {e, (e + 1) % N};
    for (size_t q = 0; q < xs.size(); ++q) {
      const double t = 0.5 + 0.5 * xs[q];
      const double s = (e + t) * h;
      const double w = 0.5 * ws[q] * h;
      const double phi[2] = {1.0 - t, t};
      const double dphi[2] = {-1.0 / h, 1.0 / h};
      const double a = sl.a(s), b = sl.b(s, mode), rho = sl.density(s);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          K(idx[i], idx[j]) += w * (a * dphi[i] * dphi[j] + b * phi[i] * phi[j]);
          M(idx[i], idx[j]) += w * rho * phi[i] * phi[j];
        }
      }
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  return mode == 0 ? es.eigenvalues()(1) : es.eigenvalues()(0);
}

inline double slab_lambda1(const Slab& sl, int elements = 200) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < sl.modes; ++m) {
    const double coarse = slab_mode(sl, m, elements);
    const double fine = slab_mode(sl, m, 2 * elements);
    best = std::min(best, fine + (fine - coarse) / 3.0);
  }
  return best;
}

// Eigenvalues of a tensor field that is diagonal in the coordinate frame,
// given as the endomorphism g^{-1} T; the metric norm is the sum of squares.
using Spectrum = std::function<std::vector<double>(double)>;

struct TensorValues {
  double volume, mean_trace, osc, traceless, full;
};

inline TensorValues tensor_values(const Slab& sl, const Spectrum& t) {
  TensorValues v{};
  v.volume = integrate_slab(sl, [](double) { return 1.0; });
  auto tr = [&](double s) {
    double b = 0.0;
    for (double e : t(s)) b += e;
    return b;
  };
  v.mean_trace = integrate_slab(sl, tr) / v.volume;
  const double bb = v.mean_trace;
  v.osc = integrate_slab(sl, [&](double s) { return std::pow(tr(s) - bb, 2); });
  v.traceless = integrate_slab(sl, [&](double s) {
    const auto e = t(s);
    const double b = tr(s) / e.size();
    double sum = 0.0;
    for (double x : e) sum += (x - b) * (x - b);
    return sum;
  });
  v.full = integrate_slab(sl, [&](double s) {
    const auto e = t(s);
    const double b = bb / e.size();
    double sum = 0.0;
    for (double x : e) sum += (x - b) * (x - b);
    return sum;
  });
  return v;
}

inline double min_over(const Slab& sl, const Spectrum& ric, int samples = 200000) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    for (double e : ric(sl.period * i / samples)) m = std::min(m, e);
  }
  return m;
}

inline std::vector<double> sigma2_newton(const std::vector<double>& k) {
  // P_2 eigenvalue i is sigma_2 of the other entries.
  std::vector<double> out;
  for (size_t i = 0; i < k.size(); ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (size_t j = 0; j < k.size(); ++j) {
      if (j == i) continue;
      s2 += s1 * k[j];
      s1 += k[j];
    }
    out.push_back(s2);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spun torus (rho cos u, rho sin u, c3 cos w, c3 sin w), rho = R1 + r cos v,
// c3 = d + r sin v: metric diag(rho^2, r^2, c3^2), s = v.

struct SpunTorus {
  double R1, r, d;

  Slab slab() const {
    Slab sl;
    sl.period = 2.0 * std::numbers::pi;
    sl.transverse = 4.0 * std::numbers::pi * std::numbers::pi;
    const double R1_ = R1, r_ = r, d_ = d;
    sl.density = [=](double v) { return (R1_ + r_ * std::cos(v)) * r_ * (d_ + r_ * std::sin(v)); };
    sl.a = [=](double v) { return (R1_ + r_ * std::cos(v)) * (d_ + r_ * std::sin(v)) / r_; };
    // Mode index m = 4 k + j for exp(i (k u + j w)), k, j in 0..3.
    sl.b = [=](double v, int m) {
      const double rho = R1_ + r_ * std::cos(v), c3 = d_ + r_ * std::sin(v);
      const int k = m / 4, j = m % 4;
      return (k * k / (rho * rho) + j * j / (c3 * c3)) * rho * r_ * c3;
    };
    sl.modes = 16;
    return sl;
  }
  std::vector<double> principal(double v) const {
    return {std::cos(v) / (R1 + r * std::cos(v)), 1.0 / r, std::sin(v) / (d + r * std::sin(v))};
  }
  // Gauss equation in R^4: Ric_i = k_i (H - k_i).
  std::vector<double> ricci(double v) const {
    const auto k = principal(v);
    const double H = k[0] + k[1] + k[2];
    return {k[0] * (H - k[0]), k[1] * (H - k[1]), k[2] * (H - k[2])};
  }
};

// ---------------------------------------------------------------------------
// g = exp(2 phi) delta on the unit 3-torus, phi = eps sin(2 pi x), s = x.

struct ConformalSine {
  double eps;

  double phi(double x, int order) const {
    const double w = 2.0 * std::numbers::pi;
    switch (order) {
      case 0: return eps * std::sin(w * x);
      case 1: return eps * w * std::cos(w * x);
      default: return -eps * w * w * std::sin(w * x);
    }
  }
  Slab slab() const {
    Slab sl;
    sl.period = 1.0;
    sl.transverse = 1.0;
    const ConformalSine self = *this;
    sl.density = [self](double x) { return std::exp(3.0 * self.phi(x, 0)); };
    sl.a = [self](double x) { return std::exp(self.phi(x, 0)); };
    // Mode m = 3 k + j for exp(2 pi i (k y + j z)), k, j in 0..2.
    sl.b = [self](double x, int m) {
      const int k = m / 3, j = m % 3;
      return std::exp(self.phi(x, 0)) * 4.0 * std::numbers::pi * std::numbers::pi * (k * k + j * j);
    };
    sl.modes = 9;
    return sl;
  }
  // Endomorphism eigenvalues of Ric for g = exp(2 phi) delta, n = 3:
  // Ric = -(n-2)(Hess phi - dphi dphi) - (Lap phi + (n-2)|dphi|^2) delta.
  std::vector<double> ricci(double x) const {
    const double p1 = phi(x, 1), p2 = phi(x, 2);
    const double common = -(p2 + p1 * p1);
    const double e = std::exp(-2.0 * phi(x, 0));
    return {e * (-(p2 - p1 * p1) + common), e * common, e * common};
  }
  // Schouten endomorphism (Ric - R/(2(n-1)) g)/(n-2), n = 3.
  std::vector<double> schouten(double x) const {
    const auto ric = ricci(x);
    const double R = ric[0] + ric[1] + ric[2];
    return {ric[0] - R / 4.0, ric[1] - R / 4.0, ric[2] - R / 4.0};
  }
};

}  // namespace oracle

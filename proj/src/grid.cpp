#include "schur/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace schur {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double trig(const TrigFactor& f, double x, double period) {
  switch (f.kind) {
    case TrigFactor::Kind::sin:
      return std::sin(kTwoPi * f.k * x / period);
    case TrigFactor::Kind::cos:
      return std::cos(kTwoPi * f.k * x / period);
    case TrigFactor::Kind::one:
      break;
  }
  return 1.0;
}

void require_dim(int n) {
  if (n < 2 || n > 4) throw DomainError("grid dimension must be 2, 3 or 4");
}

void require_resolution(int res) {
  if (res < 8) throw DomainError("grid resolution below 8 per axis is refused (stencil support)");
}

std::string factor_name(const TrigFactor& f) {
  switch (f.kind) {
    case TrigFactor::Kind::sin:
      return "sin" + std::to_string(f.k);
    case TrigFactor::Kind::cos:
      return "cos" + std::to_string(f.k);
    case TrigFactor::Kind::one:
      break;
  }
  return "1";
}

}  // namespace

std::string describe(const GridSpec& spec) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FlatGridSpec>) {
          os << "flat(" << s.n << "," << s.period << ")";
        } else if constexpr (std::is_same_v<S, ConformalGridSpec>) {
          os << "conformal(" << s.n << "," << s.period << ",";
          for (size_t i = 0; i < s.factors.size(); ++i) os << (i ? "*" : "") << factor_name(s.factors[i]);
          os << "," << s.eps << ")";
        } else if constexpr (std::is_same_v<S, ProductGridSpec>) {
          os << "product(" << s.n << "," << s.period << "," << s.eps << ")";
        } else if constexpr (std::is_same_v<S, Torus3Spec>) {
          os << "torus3(" << s.major << "," << s.minor << ")";
        } else {
          os << "spun_torus4(" << s.major << "," << s.minor << "," << s.offset << ")";
        }
      },
      spec);
  return os.str();
}

GridManifold::GridManifold(int dim, int resolution, std::vector<double> periods,
                           std::vector<MetricAtPoint> metric, std::string tag, bool conformally_flat)
    : n_(dim),
      res_(resolution),
      periods_(std::move(periods)),
      metric_(std::move(metric)),
      tag_(std::move(tag)),
      conformally_flat_(conformally_flat) {
  require_dim(n_);
  require_resolution(res_);
  strides_.resize(n_);
  size_t s = 1;
  for (int a = n_ - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<size_t>(res_);
  }
  if (metric_.size() != s) throw DimensionError("grid: metric sample count mismatch");
  for (const MetricAtPoint& g : metric_) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g.g, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 1e-10)) throw DomainError("grid: metric is not positive definite");
  }
}

double GridManifold::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < n_; ++a) v *= spacing(a);
  return v;
}

std::vector<int> GridManifold::multi_index(size_t p) const {
  std::vector<int> idx(n_);
  for (int a = 0; a < n_; ++a) idx[a] = static_cast<int>((p / strides_[a]) % res_);
  return idx;
}

std::vector<double> GridManifold::coordinates(size_t p) const {
  std::vector<double> x(n_);
  for (int a = 0; a < n_; ++a) x[a] = spacing(a) * static_cast<double>((p / strides_[a]) % res_);
  return x;
}

size_t GridManifold::neighbor(size_t p, int axis, int shift) const {
  const long i = static_cast<long>((p / strides_[axis]) % res_);
  long j = (i + shift) % res_;
  if (j < 0) j += res_;
  return p + static_cast<size_t>(j - i) * strides_[axis];
}

double GridManifold::d(const ScalarField& f, size_t p, int axis) const {
  return (f[neighbor(p, axis, -2)] - 8.0 * f[neighbor(p, axis, -1)] + 8.0 * f[neighbor(p, axis, 1)] -
          f[neighbor(p, axis, 2)]) /
         (12.0 * spacing(axis));
}

double GridManifold::d2(const ScalarField& f, size_t p, int axis) const {
  const double h = spacing(axis);
  return (-f[neighbor(p, axis, -2)] + 16.0 * f[neighbor(p, axis, -1)] - 30.0 * f[p] +
          16.0 * f[neighbor(p, axis, 1)] - f[neighbor(p, axis, 2)]) /
         (12.0 * h * h);
}

ScalarField GridManifold::derivative(const ScalarField& f, int axis) const {
  ScalarField out(f.size());
  for (size_t p = 0; p < f.size(); ++p) out[p] = d(f, p, axis);
  return out;
}

TensorField GridManifold::derivative(const TensorField& f, int axis) const {
  TensorField out(f.size());
  const double inv = 1.0 / (12.0 * spacing(axis));
  for (size_t p = 0; p < f.size(); ++p) {
    out[p] = (f[neighbor(p, axis, -2)] - 8.0 * f[neighbor(p, axis, -1)] + 8.0 * f[neighbor(p, axis, 1)] -
              f[neighbor(p, axis, 2)]) *
             inv;
  }
  return out;
}

ScalarField GridManifold::sample(const std::function<double(const std::vector<double>&)>& fn) const {
  ScalarField out(size());
  for (size_t p = 0; p < size(); ++p) out[p] = fn(coordinates(p));
  return out;
}

// ---------------------------------------------------------------------------
// Builders.

namespace {

std::vector<std::vector<double>> lattice(int n, int res, const std::vector<double>& periods) {
  size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<size_t>(res);
  std::vector<std::vector<double>> pts(total, std::vector<double>(n));
  for (size_t p = 0; p < total; ++p) {
    size_t rem = p;
    for (int a = n - 1; a >= 0; --a) {
      pts[p][a] = periods[a] * static_cast<double>(rem % res) / res;
      rem /= res;
    }
  }
  return pts;
}

GridManifold from_metric_fn(int n, int res, double period, const std::string& tag, bool conformal,
                            const std::function<Matrix(const std::vector<double>&)>& fn) {
  require_dim(n);
  require_resolution(res);
  const std::vector<double> periods(n, period);
  const auto pts = lattice(n, res, periods);
  std::vector<MetricAtPoint> g;
  g.reserve(pts.size());
  for (const auto& x : pts) g.emplace_back(fn(x));
  return GridManifold(n, res, periods, std::move(g), tag + "@" + std::to_string(res), conformal);
}

struct IntrinsicVisitor {
  int res;
  GridManifold operator()(const FlatGridSpec& s) const {
    return from_metric_fn(s.n, res, s.period, describe(GridSpec{s}), true,
                          [&](const std::vector<double>&) { return Matrix::Identity(s.n, s.n); });
  }
  GridManifold operator()(const ConformalGridSpec& s) const {
    if (s.factors.size() > static_cast<size_t>(s.n)) throw DomainError("conformal: more factors than axes");
    return from_metric_fn(s.n, res, s.period, describe(GridSpec{s}), true, [&](const std::vector<double>& x) {
      double phi = s.eps;
      for (size_t i = 0; i < s.factors.size(); ++i) phi *= trig(s.factors[i], x[i], s.period);
      return Matrix(std::exp(2.0 * phi) * Matrix::Identity(s.n, s.n));
    });
  }
  GridManifold operator()(const ProductGridSpec& s) const {
    return from_metric_fn(s.n, res, s.period, describe(GridSpec{s}), s.n == 2, [&](const std::vector<double>& x) {
      const double L = s.period;
      Matrix g = Matrix::Identity(s.n, s.n);
      g(0, 0) = std::exp(2.0 * s.eps * std::sin(kTwoPi * x[0] / L));
      g(1, 1) = std::exp(2.0 * s.eps * std::cos(kTwoPi * x[1] / L));
      g(0, 1) = g(1, 0) = 0.5 * s.eps * std::sin(kTwoPi * (x[0] + x[1]) / L);
      for (int k = 2; k < s.n; ++k) g(k, k) = std::exp(2.0 * s.eps * std::cos(kTwoPi * x[k] / L));
      return g;
    });
  }
  template <class S>
  GridManifold operator()(const S&) const {
    throw DomainError("build_intrinsic: not an intrinsic geometry spec");
  }
};

// Closed-form embedding data at one parameter point.
struct EmbeddingSample {
  Vector phi;
  Matrix jac;                       // (n+1) x n, columns d_i Phi
  std::vector<std::vector<Vector>> hess;  // d_i d_j Phi
  Vector normal;
};

EmbeddingSample torus3_sample(const Torus3Spec& s, const std::vector<double>& x) {
  const double u = x[0], v = x[1];
  const double R = s.major, r = s.minor;
  const double rho = R + r * std::cos(v);
  EmbeddingSample e;
  e.phi = Eigen::Vector3d(rho * std::cos(u), rho * std::sin(u), r * std::sin(v));
  e.jac.resize(3, 2);
  e.jac.col(0) = Eigen::Vector3d(-rho * std::sin(u), rho * std::cos(u), 0.0);
  e.jac.col(1) = Eigen::Vector3d(-r * std::sin(v) * std::cos(u), -r * std::sin(v) * std::sin(u), r * std::cos(v));
  e.hess.assign(2, std::vector<Vector>(2));
  e.hess[0][0] = Eigen::Vector3d(-rho * std::cos(u), -rho * std::sin(u), 0.0);
  e.hess[0][1] = e.hess[1][0] = Eigen::Vector3d(r * std::sin(v) * std::sin(u), -r * std::sin(v) * std::cos(u), 0.0);
  e.hess[1][1] = Eigen::Vector3d(-r * std::cos(v) * std::cos(u), -r * std::cos(v) * std::sin(u), -r * std::sin(v));
  e.normal = Eigen::Vector3d(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
  return e;
}

EmbeddingSample spun_sample(const SpunTorus4Spec& s, const std::vector<double>& x) {
  const double u = x[0], v = x[1], w = x[2];
  const double R = s.major, r = s.minor, d = s.offset;
  const double rho = R + r * std::cos(v);
  const double c3 = d + r * std::sin(v);
  const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v), cw = std::cos(w),
               sw = std::sin(w);
  EmbeddingSample e;
  e.phi = Eigen::Vector4d(rho * cu, rho * su, c3 * cw, c3 * sw);
  e.jac.resize(4, 3);
  e.jac.col(0) = Eigen::Vector4d(-rho * su, rho * cu, 0, 0);
  e.jac.col(1) = Eigen::Vector4d(-r * sv * cu, -r * sv * su, r * cv * cw, r * cv * sw);
  e.jac.col(2) = Eigen::Vector4d(0, 0, -c3 * sw, c3 * cw);
  e.hess.assign(3, std::vector<Vector>(3));
  e.hess[0][0] = Eigen::Vector4d(-rho * cu, -rho * su, 0, 0);
  e.hess[0][1] = e.hess[1][0] = Eigen::Vector4d(r * sv * su, -r * sv * cu, 0, 0);
  e.hess[0][2] = e.hess[2][0] = Eigen::Vector4d::Zero();
  e.hess[1][1] = Eigen::Vector4d(-r * cv * cu, -r * cv * su, -r * sv * cw, -r * sv * sw);
  e.hess[1][2] = e.hess[2][1] = Eigen::Vector4d(0, 0, -r * cv * sw, r * cv * cw);
  e.hess[2][2] = Eigen::Vector4d(0, 0, -c3 * cw, -c3 * sw);
  e.normal = Eigen::Vector4d(cv * cu, cv * su, sv * cw, sv * sw);
  return e;
}

GridManifold from_embedding(int n, int res, const std::string& tag,
                            const std::function<EmbeddingSample(const std::vector<double>&)>& fn) {
  require_resolution(res);
  const std::vector<double> periods(n, kTwoPi);
  const auto pts = lattice(n, res, periods);
  std::vector<MetricAtPoint> g;
  Embedding emb;
  g.reserve(pts.size());
  for (const auto& x : pts) {
    const EmbeddingSample e = fn(x);
    g.emplace_back(symmetrized(e.jac.transpose() * e.jac));
    Matrix h(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) h(i, j) = -e.hess[i][j].dot(e.normal);
    }
    emb.position.push_back(e.phi);
    emb.normal.push_back(e.normal);
    emb.second_form.push_back(symmetrized(h));
  }
  GridManifold gm(n, res, periods, std::move(g), tag + "@" + std::to_string(res), n == 2);
  gm.set_embedding(std::move(emb));
  return gm;
}

struct EmbeddedVisitor {
  int res;
  GridManifold operator()(const Torus3Spec& s) const {
    if (!(s.major > s.minor && s.minor > 0)) throw DomainError("torus3 requires R1 > r > 0");
    return from_embedding(2, res, describe(GridSpec{s}), [&](const auto& x) { return torus3_sample(s, x); });
  }
  GridManifold operator()(const SpunTorus4Spec& s) const {
    if (!(s.minor > 0 && s.major > s.minor)) throw DomainError("spun_torus4 requires R1 > r > 0");
    if (!(s.offset > s.minor)) throw DomainError("spun_torus4 requires d > r (otherwise the spin self-intersects)");
    return from_embedding(3, res, describe(GridSpec{s}), [&](const auto& x) { return spun_sample(s, x); });
  }
  template <class S>
  GridManifold operator()(const S&) const {
    throw DomainError("build_embedded: not an embedded geometry spec");
  }
};

}  // namespace

GridManifold build_intrinsic(const GridSpec& spec, int resolution) {
  return std::visit(IntrinsicVisitor{resolution}, spec);
}

GridManifold build_embedded(const GridSpec& spec, int resolution) {
  return std::visit(EmbeddedVisitor{resolution}, spec);
}

GridManifold build_grid(const GridSpec& spec, int resolution) {
  if (std::holds_alternative<Torus3Spec>(spec) || std::holds_alternative<SpunTorus4Spec>(spec)) {
    return build_embedded(spec, resolution);
  }
  return build_intrinsic(spec, resolution);
}

// ---------------------------------------------------------------------------
// Curvature.

CurvaturePack curvature(const GridManifold& gm) {
  const int n = gm.dim();
  const size_t N = gm.size();
  CurvaturePack pack;
  pack.n = n;

  TensorField g(N);
  for (size_t p = 0; p < N; ++p) g[p] = gm.metric()[p].g;
  std::vector<TensorField> dg(n);
  for (int a = 0; a < n; ++a) dg[a] = gm.derivative(g, a);

  const size_t n3 = static_cast<size_t>(n) * n * n;
  pack.christoffel.assign(N * n3, 0.0);
  // Contracted Gamma^k_ik.
  std::vector<double> contracted(N * n, 0.0);
  for (size_t p = 0; p < N; ++p) {
    const Matrix& gi = gm.metric()[p].g_inv;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += gi(k, l) * (dg[i][p](l, j) + dg[j][p](l, i) - dg[l][p](i, j));
          s *= 0.5;
          pack.christoffel[((p * n + k) * n + i) * n + j] = s;
          pack.christoffel[((p * n + k) * n + j) * n + i] = s;
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += pack.gamma(p, k, k, i);
      contracted[p * n + i] = s;
    }
  }

  auto stencil = [&](const std::vector<double>& arr, size_t stride, size_t offset, size_t p, int axis) {
    return (arr[gm.neighbor(p, axis, -2) * stride + offset] - 8.0 * arr[gm.neighbor(p, axis, -1) * stride + offset] +
            8.0 * arr[gm.neighbor(p, axis, 1) * stride + offset] - arr[gm.neighbor(p, axis, 2) * stride + offset]) /
           (12.0 * gm.spacing(axis));
  };

  pack.ricci.resize(N);
  pack.scalar.resize(N);
  if (n >= 3) pack.schouten.resize(N);
  pack.min_ricci_eigenvalue = std::numeric_limits<double>::infinity();
  pack.max_ricci_eigenvalue = -std::numeric_limits<double>::infinity();
  for (size_t p = 0; p < N; ++p) {
    Matrix ric(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += stencil(pack.christoffel, n3, (static_cast<size_t>(k) * n + i) * n + j, p, k);
        s -= stencil(contracted, n, i, p, j);
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            s += pack.gamma(p, k, k, l) * pack.gamma(p, l, i, j) - pack.gamma(p, k, j, l) * pack.gamma(p, l, i, k);
          }
        }
        ric(i, j) = s;
      }
    }
    ric = symmetrized(ric);
    const MetricAtPoint& gp = gm.metric()[p];
    const double r = (gp.g_inv.array() * ric.array()).sum();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(ric, gp.g, Eigen::EigenvaluesOnly);
    pack.min_ricci_eigenvalue = std::min(pack.min_ricci_eigenvalue, es.eigenvalues()(0));
    pack.max_ricci_eigenvalue = std::max(pack.max_ricci_eigenvalue, es.eigenvalues()(n - 1));
    if (n >= 3) {
      const Matrix s = (ric - r / (2.0 * (n - 1)) * gp.g) / (n - 2.0);
      pack.schouten[p] = gp.g_inv * s;
    }
    pack.ricci[p] = std::move(ric);
    pack.scalar[p] = r;
  }
  return pack;
}

KScalarFields schouten_sigma_k(const GridManifold& gm, const CurvaturePack& pack, int k) {
  const int n = gm.dim();
  if (n < 3) throw DomainError("Schouten tensor requires n >= 3");
  if (k < 1 || k > n) throw DomainError("k must satisfy 1 <= k <= n");
  KScalarFields out;
  out.sigma.resize(gm.size());
  out.newton.resize(gm.size());
  for (size_t p = 0; p < gm.size(); ++p) {
    const SymEndomorphism s(pack.schouten[p]);
    out.sigma[p] = sigma_of(s, k);
    out.newton[p] = symmetrized(gm.metric()[p].g * newton_transform(s, k).m);
  }
  return out;
}

const TensorField& second_fundamental_form(const GridManifold& gm) {
  if (!gm.embedding()) throw DomainError("geometry has no embedding (hypersurface quantities unavailable)");
  return gm.embedding()->second_form;
}

TensorField hypersurface_P_r(const GridManifold& gm, int r) {
  const TensorField& h = second_fundamental_form(gm);
  const int n = gm.dim();
  if (r < 0 || r > n) throw DomainError("r must satisfy 0 <= r <= n");
  TensorField out(gm.size());
  for (size_t p = 0; p < gm.size(); ++p) {
    const MetricAtPoint& g = gm.metric()[p];
    const SymEndomorphism a(g.g_inv * h[p]);
    out[p] = symmetrized(g.g * newton_transform(a, r).m);
  }
  return out;
}

CovectorField covariant_divergence(const GridManifold& gm, const CurvaturePack& pack, const TensorField& t) {
  const int n = gm.dim();
  std::vector<TensorField> dt(n);
  for (int a = 0; a < n; ++a) dt[a] = gm.derivative(t, a);
  CovectorField out(gm.size(), Vector::Zero(n));
  for (size_t p = 0; p < gm.size(); ++p) {
    const Matrix& gi = gm.metric()[p].g_inv;
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double nab = dt[i][p](j, k);
          for (int l = 0; l < n; ++l) {
            nab -= pack.gamma(p, l, i, j) * t[p](l, k) + pack.gamma(p, l, i, k) * t[p](j, l);
          }
          s += gi(i, j) * nab;
        }
      }
      out[p](k) = s;
    }
  }
  return out;
}

CovectorField gradient(const GridManifold& gm, const ScalarField& f) {
  const int n = gm.dim();
  CovectorField out(gm.size(), Vector::Zero(n));
  for (size_t p = 0; p < gm.size(); ++p) {
    for (int a = 0; a < n; ++a) out[p](a) = gm.d(f, p, a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weak-form Laplace-Beltrami.
//
// f^T L f = sum_i sum_faces w G^ii (D_i f)^2 + sum_{i != j} sum_cells w G^ij (D~_i f)(D~_j f)
// with G^ij = sqrt(det g) g^ij. D_i is the 4th-order staggered difference
// at face centres x + h/2 e_i; D~_i evaluates the same difference at cell
// centres x + h/2 (1,...,1), interpolating to 4th order across the other
// axes. The pure terms alone have only the constants in their kernel.

namespace {

constexpr double kDiff[4] = {1.0 / 24.0, -27.0 / 24.0, 27.0 / 24.0, -1.0 / 24.0};  // offsets -1..2
constexpr double kInterp[4] = {-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0};  // offsets -1..2

}  // namespace

DiscreteOperator laplace_beltrami(const GridManifold& gm) {
  const int n = gm.dim();
  const size_t N = gm.size();
  const Eigen::Index NN = static_cast<Eigen::Index>(N);
  const double vol = gm.cell_volume();

  TensorField coef(N);
  bool mixed = false;
  for (size_t p = 0; p < N; ++p) {
    const MetricAtPoint& g = gm.metric()[p];
    coef[p] = g.sqrt_det() * g.g_inv;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // Pullback metrics carry round-off off the diagonal; below 1e-13
        // relative the mixed terms are negligible and only widen the stencil.
        if (i != j && std::abs(g.g(i, j)) > 1e-13 * std::sqrt(g.g(i, i) * g.g(j, j))) mixed = true;
      }
    }
  }

  SparseMatrix stiff(NN, NN);
  for (int i = 0; i < n; ++i) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(N * 4);
    Vector w(NN);
    const double h = gm.spacing(i);
    for (size_t p = 0; p < N; ++p) {
      double gface = 0.0;
      for (int o = 0; o < 4; ++o) {
        const size_t q = gm.neighbor(p, i, o - 1);
        trip.emplace_back(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q), kDiff[o] / h);
        gface += kInterp[o] * coef[q](i, i);
      }
      w(static_cast<Eigen::Index>(p)) = vol * gface;
    }
    SparseMatrix d(NN, NN);
    d.setFromTriplets(trip.begin(), trip.end());
    const SparseMatrix dt = d.transpose();
    stiff += SparseMatrix(dt * w.asDiagonal() * d);
  }

  if (mixed) {
    // Tensor-product stencil over offsets {-1,0,1,2}^n.
    int combos = 1;
    for (int a = 0; a < n; ++a) combos *= 4;
    std::vector<SparseMatrix> dcell(n, SparseMatrix(NN, NN));
    TensorField cell_coef(N, Matrix::Zero(n, n));
    for (int i = 0; i < n; ++i) {
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(N * combos);
      for (size_t p = 0; p < N; ++p) {
        for (int c = 0; c < combos; ++c) {
          int rem = c;
          size_t q = p;
          double weight = 1.0;
          for (int a = 0; a < n; ++a) {
            const int o = rem % 4;
            rem /= 4;
            q = gm.neighbor(q, a, o - 1);
            weight *= (a == i) ? kDiff[o] / gm.spacing(a) : kInterp[o];
          }
          trip.emplace_back(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q), weight);
        }
      }
      dcell[i].setFromTriplets(trip.begin(), trip.end());
    }
    for (size_t p = 0; p < N; ++p) {
      for (int c = 0; c < combos; ++c) {
        int rem = c;
        size_t q = p;
        double weight = 1.0;
        for (int a = 0; a < n; ++a) {
          const int o = rem % 4;
          rem /= 4;
          q = gm.neighbor(q, a, o - 1);
          weight *= kInterp[o];
        }
        cell_coef[p] += weight * coef[q];
      }
    }
    for (int i = 0; i < n; ++i) {
      const SparseMatrix dit = dcell[i].transpose();
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Vector w(NN);
        for (size_t p = 0; p < N; ++p) w(static_cast<Eigen::Index>(p)) = vol * cell_coef[p](i, j);
        stiff += SparseMatrix(dit * w.asDiagonal() * dcell[j]);
      }
    }
  }
  stiff.prune(0.0);
  // Exact symmetry.
  const SparseMatrix st = stiff.transpose();
  stiff = 0.5 * (stiff + st);

  DiscreteOperator op;
  op.stiffness = std::move(stiff);
  op.weights.resize(NN);
  for (size_t p = 0; p < N; ++p) op.weights(static_cast<Eigen::Index>(p)) = gm.metric()[p].sqrt_det() * vol;
  return op;
}

// ---------------------------------------------------------------------------

double integrate(const GridManifold& gm, const ScalarField& f) {
  if (f.size() != gm.size()) throw DimensionError("integrate: field size mismatch");
  double s = 0.0;
  for (size_t p = 0; p < f.size(); ++p) s += f[p] * gm.metric()[p].sqrt_det();
  return s * gm.cell_volume();
}

ScalarField trace_field(const GridManifold& gm, const TensorField& t) {
  ScalarField out(gm.size());
  for (size_t p = 0; p < gm.size(); ++p) out[p] = trace(SymTensorSample(t[p]), gm.metric()[p]);
  return out;
}

ScalarField norm_sq_field(const GridManifold& gm, const TensorField& t) {
  ScalarField out(gm.size());
  for (size_t p = 0; p < gm.size(); ++p) out[p] = norm_sq(SymTensorSample(t[p]), gm.metric()[p]);
  return out;
}

ScalarField covector_norm_sq_field(const GridManifold& gm, const CovectorField& w) {
  ScalarField out(gm.size());
  for (size_t p = 0; p < gm.size(); ++p) out[p] = w[p].dot(gm.metric()[p].g_inv * w[p]);
  return out;
}

double covector_l2(const GridManifold& gm, const CovectorField& w) {
  return std::sqrt(integrate(gm, covector_norm_sq_field(gm, w)));
}

double max_covector_norm(const GridManifold& gm, const CovectorField& w) {
  double m = 0.0;
  for (double v : covector_norm_sq_field(gm, w)) m = std::max(m, v);
  return std::sqrt(m);
}

double grid_diameter(const GridManifold& gm, int sources) {
  const int n = gm.dim();
  const size_t N = gm.size();
  std::vector<std::vector<int>> offsets;
  int combos = 1;
  for (int a = 0; a < n; ++a) combos *= 3;
  for (int c = 0; c < combos; ++c) {
    std::vector<int> o(n);
    int rem = c;
    bool zero = true;
    for (int a = 0; a < n; ++a) {
      o[a] = rem % 3 - 1;
      rem /= 3;
      zero = zero && o[a] == 0;
    }
    if (!zero) offsets.push_back(o);
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> nearest(N, inf);
  double diameter = 0.0;
  size_t source = 0;
  Vector step(n);
  for (int s = 0; s < sources; ++s) {
    std::vector<double> dist(N, inf);
    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
      const auto [d, p] = pq.top();
      pq.pop();
      if (d > dist[p]) continue;
      for (const auto& o : offsets) {
        size_t q = p;
        for (int a = 0; a < n; ++a) {
          if (o[a] != 0) q = gm.neighbor(q, a, o[a]);
          step(a) = o[a] * gm.spacing(a);
        }
        const Matrix gbar = 0.5 * (gm.metric()[p].g + gm.metric()[q].g);
        const double nd = d + std::sqrt(step.dot(gbar * step));
        if (nd < dist[q]) {
          dist[q] = nd;
          pq.emplace(nd, q);
        }
      }
    }
    size_t far = 0;
    double far_d = -1.0;
    for (size_t p = 0; p < N; ++p) {
      diameter = std::max(diameter, dist[p]);
      nearest[p] = std::min(nearest[p], dist[p]);
      if (nearest[p] > far_d) {
        far_d = nearest[p];
        far = p;
      }
    }
    source = far;
  }
  return diameter;
}

void write_curvature_csv(const GridManifold& gm, const CurvaturePack& pack, std::ostream& out) {
  const int n = gm.dim();
  out << "index";
  for (int a = 0; a < n; ++a) out << ",x" << a;
  out << ",R";
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out << ",Ric" << i << j;
  }
  out << "\n";
  out.precision(17);
  for (size_t p = 0; p < gm.size(); ++p) {
    out << p;
    for (double x : gm.coordinates(p)) out << "," << x;
    out << "," << pack.scalar[p];
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) out << "," << pack.ricci[p](i, j);
    }
    out << "\n";
  }
}

}  // namespace schur

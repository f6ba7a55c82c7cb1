#pragma once

// Periodic structured grids on T^n (n = 2, 3, 4) carrying a smooth metric:
// either an intrinsic closed form (flat, conformally flat, product) or the
// pullback of a periodic hypersurface embedding into R^{n+1}.
//
// All derivatives are 4th-order central periodic differences,
//   D f = (f[-2] - 8 f[-1] + 8 f[+1] - f[+2]) / (12 h).
// Tensors are stored as coordinate components: covariant (2,0) fields as
// symmetric matrices T_ij, endomorphism fields as g^{-1} T.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "schur/elliptic.hpp"
#include "schur/tensor_core.hpp"

namespace schur {

using ScalarField = std::vector<double>;
using TensorField = std::vector<Matrix>;
using CovectorField = std::vector<Vector>;

// One factor trig(2 pi k x_i / L) of a conformal exponent.
struct TrigFactor {
  enum class Kind { one, sin, cos };
  Kind kind = Kind::one;
  int k = 1;
};

struct FlatGridSpec {
  int n = 3;
  double period = 1.0;
};
// g = exp(2 phi) delta, phi = eps * prod_i factor_i(x_i). Locally
// conformally flat by construction.
struct ConformalGridSpec {
  int n = 3;
  double period = 1.0;
  double eps = 0.1;
  std::vector<TrigFactor> factors;  // one per axis; missing axes are "one"
};
// (T^2, h) x S^1 x ... with
//   h = [[exp(2a), b], [b, exp(2c)]], a = eps sin(2 pi x/L),
//   c = eps cos(2 pi y/L), b = eps/2 sin(2 pi (x + y)/L),
// and each further axis carrying exp(2 eps cos(2 pi x_k/L)) dx_k^2.
// Not conformally flat for n >= 3.
struct ProductGridSpec {
  int n = 3;
  double period = 1.0;
  double eps = 0.1;
};
// Torus of revolution in R^3 (n = 2), coordinates (u, v) in [0, 2 pi)^2.
struct Torus3Spec {
  double major = 2.0, minor = 0.5;
};
// Spun torus in R^4 (n = 3): (rho cos u, rho sin u, c3 cos w, c3 sin w)
// with rho = R1 + r cos v, c3 = d + r sin v; requires d > r.
struct SpunTorus4Spec {
  double major = 3.0, minor = 0.5, offset = 1.5;
};

using GridSpec = std::variant<FlatGridSpec, ConformalGridSpec, ProductGridSpec, Torus3Spec, SpunTorus4Spec>;

std::string describe(const GridSpec& spec);

struct Embedding {
  std::vector<Vector> position;  // in R^{n+1}
  std::vector<Vector> normal;    // outward unit normal
  TensorField second_form;       // h_ij = <D_i nu, d_j Phi>, analytic
  double ambient_curvature = 0.0;  // a; Euclidean ambient only
};

class GridManifold {
 public:
  GridManifold(int dim, int resolution, std::vector<double> periods, std::vector<MetricAtPoint> metric,
               std::string tag, bool conformally_flat);

  int dim() const { return n_; }
  int resolution() const { return res_; }
  size_t size() const { return metric_.size(); }
  double spacing(int axis) const { return periods_[axis] / res_; }
  double cell_volume() const;
  const std::vector<double>& periods() const { return periods_; }
  const std::vector<MetricAtPoint>& metric() const { return metric_; }
  const std::string& tag() const { return tag_; }
  bool conformally_flat() const { return conformally_flat_; }

  const std::optional<Embedding>& embedding() const { return embedding_; }
  void set_embedding(Embedding e) { embedding_ = std::move(e); }

  std::vector<int> multi_index(size_t p) const;
  std::vector<double> coordinates(size_t p) const;
  size_t neighbor(size_t p, int axis, int shift) const;

  // 4th-order central first derivative of a scalar/tensor field.
  double d(const ScalarField& f, size_t p, int axis) const;
  ScalarField derivative(const ScalarField& f, int axis) const;
  TensorField derivative(const TensorField& f, int axis) const;
  // 4th-order second derivative along one axis (5-point stencil).
  double d2(const ScalarField& f, size_t p, int axis) const;

  ScalarField sample(const std::function<double(const std::vector<double>&)>& fn) const;

 private:
  int n_;
  int res_;
  std::vector<double> periods_;
  std::vector<size_t> strides_;
  std::vector<MetricAtPoint> metric_;
  std::string tag_;
  bool conformally_flat_;
  std::optional<Embedding> embedding_;
};

GridManifold build_intrinsic(const GridSpec& spec, int resolution);
GridManifold build_embedded(const GridSpec& spec, int resolution);
// Dispatches on the spec kind.
GridManifold build_grid(const GridSpec& spec, int resolution);

struct CurvaturePack {
  int n = 0;
  std::vector<double> christoffel;  // Gamma^k_ij at [(p * n + k) * n + i) * n + j]
  TensorField ricci;                // covariant
  ScalarField scalar;
  TensorField schouten;             // endomorphism g^{-1} S; empty for n < 3
  double min_ricci_eigenvalue = 0.0;  // min over samples of lambda_min(g^{-1} Ric)
  double max_ricci_eigenvalue = 0.0;

  double gamma(size_t p, int k, int i, int j) const {
    return christoffel[((p * n + k) * n + i) * n + j];
  }
};

CurvaturePack curvature(const GridManifold& gm);

struct KScalarFields {
  ScalarField sigma;       // sigma_k(S_g)
  TensorField newton;      // T_k as covariant (2,0)
};
KScalarFields schouten_sigma_k(const GridManifold& gm, const CurvaturePack& pack, int k);

// P_r(A) lowered to a covariant field.
TensorField hypersurface_P_r(const GridManifold& gm, int r);
// Shape operator A = g^{-1} h as covariant h_ij.
const TensorField& second_fundamental_form(const GridManifold& gm);

CovectorField covariant_divergence(const GridManifold& gm, const CurvaturePack& pack, const TensorField& t);
CovectorField gradient(const GridManifold& gm, const ScalarField& f);

DiscreteOperator laplace_beltrami(const GridManifold& gm);

double integrate(const GridManifold& gm, const ScalarField& f);
ScalarField trace_field(const GridManifold& gm, const TensorField& t);
ScalarField norm_sq_field(const GridManifold& gm, const TensorField& t);
ScalarField covector_norm_sq_field(const GridManifold& gm, const CovectorField& w);
// sqrt(int g^{kl} w_k w_l)
double covector_l2(const GridManifold& gm, const CovectorField& w);
double max_covector_norm(const GridManifold& gm, const CovectorField& w);

// Dijkstra over the 3^n - 1 neighbourhood with edge length
// sqrt(d^T gbar d), gbar the endpoint-averaged metric; max over
// farthest-point-sampled sources.
double grid_diameter(const GridManifold& gm, int sources = 8);

void write_curvature_csv(const GridManifold& gm, const CurvaturePack& pack, std::ostream& out);

}  // namespace schur

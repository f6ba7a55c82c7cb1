#pragma once

// Theorem-level verification. Each report carries the integrals it was
// built from, so lhs/rhs can be recomputed from the report alone.
//
// Integrals over a geometry always use the weights of its Laplacian
// (lumped mass on meshes, sqrt(det g) h^n on grids), so the Poisson and
// eigenvalue diagnostics see exactly the same inner product.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "schur/elliptic.hpp"
#include "schur/grid.hpp"
#include "schur/mesh.hpp"
#include "schur/tensor_core.hpp"

namespace schur {

class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// How a lower Ricci bound is turned into K.
//   tensor_thm:       Ric >= -(n-1) K, so K = max(0, -m / (n-1))
//   hypersurface_thm: Ric >= -K,       so K = max(0, -m)
// with m the minimum eigenvalue of the Ricci endomorphism over all samples.
enum class Convention { tensor_thm, hypersurface_thm };

std::string convention_name(Convention c);
std::string convention_statement(Convention c);
Convention parse_convention(const std::string& name);

struct VerifyOptions {
  SolverOptions solver;
  double c_fit_tolerance = 0.05;
  double equality_scale = 1e-8;
  double cross_identity_tolerance = 1e-10;
  double disc_tolerance = 0.05;
  double poincare_slack = 1e-6;
};

// Sampled geometry shared by both backends.
struct Geometry {
  std::string tag;
  int resolution = 0;
  int n = 0;
  std::vector<MetricAtPoint> metric;
  DiscreteOperator op;
  double min_ricci = 0.0;
  double max_ricci = 0.0;
  EigenPair eigen;

  size_t size() const { return metric.size(); }
  double volume() const { return op.total_weight(); }
  double integrate(const Vector& f) const { return op.weights.dot(f); }
  double ricci_tolerance() const;
  bool ricci_positive() const { return min_ricci > ricci_tolerance(); }
  bool ricci_nonnegative() const { return min_ricci >= -ricci_tolerance(); }
};

double ricci_bound_K(const Geometry& geo, Convention convention);

struct MeshGeometry {
  TriMesh mesh;
  ShapeField shape;
  MeshField<double> gauss;  // angle defect
  Geometry geo;
};

struct GridGeometry {
  GridManifold gm;
  CurvaturePack pack;
  Geometry geo;
};

MeshGeometry make_mesh_geometry(TriMesh mesh, const std::string& tag, int resolution,
                                const SolverOptions& opts = {});
GridGeometry make_grid_geometry(GridManifold gm, const SolverOptions& opts = {});

// Tangent tensors on meshes live in orthonormal frames.
TensorField mesh_shape_tensor(const MeshGeometry& mg);
TensorField mesh_newton_tensor(const MeshGeometry& mg, int r);
TensorField metric_tensor(const Geometry& geo);

struct CFit {
  double c = 0.0;
  // ||div T - c grad B|| / ||grad B||; NaN when not computable.
  double residual = 0.0;
  bool indeterminate = false;
  bool prescribed = false;
};

// Least-squares c = <div T, grad B> / <grad B, grad B>.
CFit estimate_c(const GridGeometry& g, const TensorField& t);
// Residual of a known c (grid only).
CFit check_c(const GridGeometry& g, const TensorField& t, double c);
CFit prescribed_c(double c);

// Which printed inequality a report instantiates.
enum class Form {
  trace,              // (nc-1)^2 int (B - Bbar)^2 <= n(n-1)(1 + nK/l1) int |T0|^2
  tensor,             // (nc-1)^2 int |T - Bbar g/n|^2 <= [(nc-1)^2 + (n-1)(1 + nK/l1)] int |T0|^2
  tensor_collapsed,   // int |T - Bbar g/n|^2 <= n [1 + (n-1) K/l1] int |T0|^2   (c = 0)
  mean_curvature,     // int (H - Hbar)^2 <= n/(n-1) (1 + nK/l1) int |A0|^2
  eigenvalue_bound,   // alpha(n, K, d) <= lambda1
};

struct InequalityReport {
  std::string theorem;   // e.g. "thm-1.7"
  std::string equation;  // e.g. "ine-r1"
  Form form = Form::trace;
  std::string geometry;
  int resolution = 0;
  int n = 0;
  double c = 0.0;
  bool c_prescribed = false;
  Convention convention = Convention::tensor_thm;
  double K = 0.0;
  double lambda1 = 0.0;
  double mean_trace = 0.0;  // Bbar
  double int_oscillation = 0.0;  // int (B - Bbar)^2
  double int_traceless = 0.0;    // int |T - B g/n|^2
  double int_full = 0.0;         // int |T - Bbar g/n|^2
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<double> ratio;
  double eps_eq = 0.0;
  bool equality = false;
  bool trivial = false;
  bool hypothesis_ok = true;
  bool gates_ok = true;
  std::vector<std::string> flags;
  std::map<std::string, double> diagnostics;
  std::optional<double> wall_ms;

  std::string id() const { return theorem + ":" + equation; }
  // Holds within the discretization allowance (trivial and equality reports pass).
  bool passes(double disc_tolerance) const;
};

// lhs, rhs from the report's own stored inputs.
std::pair<double, double> recompute(const InequalityReport& r);
std::string form_name(Form f);

enum class Variant {
  general,             // K from the Ricci lower bound
  ricci_nonnegative,   // K forced to 0; requires Ric >= 0
};

// Trace form and full-tensor form for div T = c grad B.
std::vector<InequalityReport> verify_general_tensor(const Geometry& geo, const TensorField& t, const CFit& c,
                                                    Convention convention, const VerifyOptions& opts = {},
                                                    Variant variant = Variant::general);

// s_r oscillation of an embedded hypersurface, 2 <= r <= n (T = P_r, c = 0).
std::vector<InequalityReport> verify_hypersurface_r(const GridGeometry& g, int r, const VerifyOptions& opts = {},
                                                    Variant variant = Variant::general);
std::vector<InequalityReport> verify_hypersurface_r(const MeshGeometry& m, int r, const VerifyOptions& opts = {},
                                                    Variant variant = Variant::general);

// Mean-curvature inequality on a surface mesh; derived both through
// T = A (c = 1) and T = P_1 (c = 0), which must agree to 1e-12.
InequalityReport verify_perez_r1(const MeshGeometry& m, const VerifyOptions& opts = {},
                                 Variant variant = Variant::general);

// sigma_k of the Schouten tensor on a locally conformally flat grid,
// 2 <= k <= n (T = T_k, c = 0). Throws HypothesisError otherwise.
std::vector<InequalityReport> verify_k_scalar(const GridGeometry& g, int k, const VerifyOptions& opts = {},
                                              Variant variant = Variant::general);

// |int |Hess f|^2 - int (Lap f)^2 + int Ric(grad f, grad f)| / int (Lap f)^2,
// with the Hessian built from composed first differences.
struct BochnerResult {
  double hessian_sq = 0.0;
  double laplacian_sq = 0.0;
  double ricci_term = 0.0;
  double residual = 0.0;
};
BochnerResult bochner_residual(const GridGeometry& g, const ScalarField& f);

// Lower eigenvalue bound alpha(n, K, d) and the constant C as printed
// (4n(n-1)/(n-2)^2 (1 + n(n-1) K d^2 e^{...}), undefined for n = 2).
struct LiYau {
  double alpha = 0.0;
  std::optional<double> c_printed;
};
LiYau li_yau_constants(int n, double K, double d);
// The same bound for general c != 1/n: the oscillation constant
// n(n-1)/(nc-1)^2 (1 + nK/alpha) and the full-tensor constant
// 1 + (n-1)(1 + nK/alpha)/(nc-1)^2.
std::pair<double, double> li_yau_general_constants(int n, double c, double K, double d);

struct LiYauCheck {
  double alpha = 0.0;
  double lambda1 = 0.0;
  double K = 0.0;
  double diameter = 0.0;
  bool holds = false;
};
LiYauCheck li_yau_check(const Geometry& geo, double diameter);
// The same check as a report row: lhs = alpha, rhs = lambda1; the
// diameter is kept in diagnostics["diameter"].
InequalityReport li_yau_report(const Geometry& geo, double diameter);

// Per-resolution measurements and successive convergence orders.
// Quantities named "err:*" are errors against zero, order log(e_k/e_{k+1}) /
// log(r_{k+1}/r_k). Other quantities use successive differences.
struct ConvergenceTable {
  std::vector<int> resolutions;
  std::vector<std::map<std::string, double>> values;
  std::map<std::string, std::vector<double>> orders;
  // Relative change of each non-error quantity between the two finest levels.
  std::map<std::string, double> final_change;
};
ConvergenceTable convergence_study(const std::vector<int>& resolutions,
                                   const std::function<std::map<std::string, double>(int)>& measure);

}  // namespace schur

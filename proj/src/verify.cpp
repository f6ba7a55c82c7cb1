#include "schur/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace schur {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

double rel_diff(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace

std::string convention_name(Convention c) {
  return c == Convention::tensor_thm ? "tensor-thm" : "hypersurface-thm";
}

std::string convention_statement(Convention c) {
  return c == Convention::tensor_thm ? "Ric >= -(n-1)K" : "Ric >= -K";
}

Convention parse_convention(const std::string& name) {
  if (name == "tensor-thm") return Convention::tensor_thm;
  if (name == "hypersurface-thm") return Convention::hypersurface_thm;
  throw DomainError("unknown K convention '" + name + "'");
}

std::string form_name(Form f) {
  switch (f) {
    case Form::trace: return "trace";
    case Form::tensor: return "tensor";
    case Form::tensor_collapsed: return "tensor-collapsed";
    case Form::mean_curvature: return "mean-curvature";
    case Form::eigenvalue_bound: return "eigenvalue-bound";
  }
  return "?";
}

double Geometry::ricci_tolerance() const {
  return 1e-8 * std::max({1.0, std::abs(min_ricci), std::abs(max_ricci)});
}

double ricci_bound_K(const Geometry& geo, Convention convention) {
  const double m = geo.min_ricci;
  if (convention == Convention::tensor_thm) return std::max(0.0, -m / (geo.n - 1));
  return std::max(0.0, -m);
}

// ---------------------------------------------------------------------------

MeshGeometry make_mesh_geometry(TriMesh mesh, const std::string& tag, int resolution, const SolverOptions& opts) {
  MeshGeometry out{std::move(mesh), {}, {}, {}};
  out.shape = shape_operator(out.mesh);
  out.gauss = gauss_curvature_angle_defect(out.mesh);
  Geometry& geo = out.geo;
  geo.tag = tag;
  geo.resolution = resolution;
  geo.n = 2;
  geo.metric.assign(out.mesh.num_vertices(), MetricAtPoint::euclidean(2));
  geo.op = cotan_operator(out.mesh);
  geo.op.validate();
  // Ric = K_G g on a surface.
  geo.min_ricci = *std::min_element(out.gauss.begin(), out.gauss.end());
  geo.max_ricci = *std::max_element(out.gauss.begin(), out.gauss.end());
  geo.eigen = lambda_1(geo.op, opts);
  return out;
}

GridGeometry make_grid_geometry(GridManifold gm, const SolverOptions& opts) {
  GridGeometry out{std::move(gm), {}, {}};
  out.pack = curvature(out.gm);
  Geometry& geo = out.geo;
  geo.tag = out.gm.tag();
  geo.resolution = out.gm.resolution();
  geo.n = out.gm.dim();
  geo.metric = out.gm.metric();
  geo.op = laplace_beltrami(out.gm);
  geo.op.validate();
  geo.min_ricci = out.pack.min_ricci_eigenvalue;
  geo.max_ricci = out.pack.max_ricci_eigenvalue;
  geo.eigen = lambda_1(geo.op, opts);
  return out;
}

TensorField mesh_shape_tensor(const MeshGeometry& mg) {
  TensorField t(mg.shape.shape.size());
  for (size_t v = 0; v < t.size(); ++v) t[v] = mg.shape.shape[v].m;
  return t;
}

TensorField mesh_newton_tensor(const MeshGeometry& mg, int r) {
  TensorField t(mg.shape.shape.size());
  for (size_t v = 0; v < t.size(); ++v) t[v] = symmetrized(newton_transform(mg.shape.shape[v], r).m);
  return t;
}

TensorField metric_tensor(const Geometry& geo) {
  TensorField t(geo.size());
  for (size_t p = 0; p < t.size(); ++p) t[p] = geo.metric[p].g;
  return t;
}

// ---------------------------------------------------------------------------

namespace {

double inner_covector(const GridManifold& gm, const CovectorField& a, const CovectorField& b) {
  ScalarField f(gm.size());
  for (size_t p = 0; p < gm.size(); ++p) f[p] = a[p].dot(gm.metric()[p].g_inv * b[p]);
  return integrate(gm, f);
}

struct DivData {
  CovectorField div;
  CovectorField grad;
  double grad_sq = 0.0;
  bool indeterminate = false;
};

DivData div_data(const GridGeometry& g, const TensorField& t) {
  DivData d;
  d.div = covariant_divergence(g.gm, g.pack, t);
  const ScalarField b = trace_field(g.gm, t);
  d.grad = gradient(g.gm, b);
  d.grad_sq = inner_covector(g.gm, d.grad, d.grad);
  double b_sq = 0.0;
  for (size_t p = 0; p < b.size(); ++p) b_sq += b[p] * b[p] * g.geo.op.weights(static_cast<Eigen::Index>(p));
  const double length = std::pow(g.geo.volume(), 1.0 / g.geo.n);
  d.indeterminate = std::sqrt(d.grad_sq) <= 1e-12 * std::sqrt(b_sq) / length || d.grad_sq == 0.0;
  return d;
}

double fit_residual(const GridGeometry& g, const DivData& d, double c) {
  CovectorField r(d.div.size());
  for (size_t p = 0; p < r.size(); ++p) r[p] = d.div[p] - c * d.grad[p];
  return std::sqrt(std::max(0.0, inner_covector(g.gm, r, r)) / d.grad_sq);
}

}  // namespace

CFit estimate_c(const GridGeometry& g, const TensorField& t) {
  const DivData d = div_data(g, t);
  CFit fit;
  if (d.indeterminate) {
    fit.indeterminate = true;
    fit.residual = 0.0;
    return fit;
  }
  fit.c = inner_covector(g.gm, d.div, d.grad) / d.grad_sq;
  fit.residual = fit_residual(g, d, fit.c);
  return fit;
}

CFit check_c(const GridGeometry& g, const TensorField& t, double c) {
  const DivData d = div_data(g, t);
  CFit fit;
  fit.c = c;
  fit.prescribed = true;
  fit.indeterminate = d.indeterminate;
  fit.residual = d.indeterminate ? 0.0 : fit_residual(g, d, c);
  return fit;
}

CFit prescribed_c(double c) {
  CFit fit;
  fit.c = c;
  fit.prescribed = true;
  fit.residual = kNaN;
  return fit;
}

// ---------------------------------------------------------------------------

std::pair<double, double> recompute(const InequalityReport& r) {
  if (r.trivial) return {0.0, 0.0};
  const double n = r.n;
  const double p = (n * r.c - 1.0) * (n * r.c - 1.0);
  const double spectral = 1.0 + n * r.K / r.lambda1;
  switch (r.form) {
    case Form::trace:
      return {p * r.int_oscillation, n * (n - 1.0) * spectral * r.int_traceless};
    case Form::tensor:
      return {p * r.int_full, (p + (n - 1.0) * spectral) * r.int_traceless};
    case Form::tensor_collapsed:
      return {r.int_full, n * (1.0 + (n - 1.0) * r.K / r.lambda1) * r.int_traceless};
    case Form::mean_curvature:
      return {r.int_oscillation, n / (n - 1.0) * spectral * r.int_traceless};
    case Form::eigenvalue_bound:
      return {li_yau_constants(r.n, r.K, r.diagnostics.at("diameter")).alpha, r.lambda1};
  }
  return {kNaN, kNaN};
}

bool InequalityReport::passes(double disc_tolerance) const {
  if (!hypothesis_ok || !gates_ok) return false;
  if (trivial || equality) return true;
  return ratio.has_value() && *ratio <= 1.0 + disc_tolerance;
}

namespace {

void finalize(InequalityReport& r) {
  const auto [lhs, rhs] = recompute(r);
  r.lhs = lhs;
  r.rhs = rhs;
  r.equality = lhs <= r.eps_eq && rhs <= r.eps_eq;
  if (rhs > r.eps_eq) {
    r.ratio = lhs / rhs;
  } else if (lhs > r.eps_eq) {
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio.reset();
  }
}

void add_flag(InequalityReport& r, const std::string& flag) {
  if (std::find(r.flags.begin(), r.flags.end(), flag) == r.flags.end()) r.flags.push_back(flag);
}

// Everything shared by the two forms of one tensor instance.
InequalityReport assemble(const Geometry& geo, const TensorField& t, const CFit& cfit, Convention convention,
                          const VerifyOptions& opts, Variant variant) {
  if (t.size() != geo.size()) throw DimensionError("tensor field size does not match the geometry");
  const int n = geo.n;
  const Eigen::Index N = static_cast<Eigen::Index>(geo.size());

  InequalityReport r;
  r.geometry = geo.tag;
  r.resolution = geo.resolution;
  r.n = n;
  r.convention = convention;
  r.lambda1 = geo.eigen.lambda1;

  Vector b(N);
  double scale = 0.0;
  for (Eigen::Index p = 0; p < N; ++p) {
    const SymTensorSample sample(t[p]);
    b(p) = trace(sample, geo.metric[p]);
    scale = std::max(scale, std::sqrt(norm_sq(sample, geo.metric[p])));
  }
  if (scale == 0.0) scale = 1.0;
  const double vol = geo.volume();
  r.mean_trace = geo.integrate(b) / vol;
  r.eps_eq = opts.equality_scale * scale * scale * vol;

  Vector osc(N), tl(N), full(N);
  for (Eigen::Index p = 0; p < N; ++p) {
    const MetricAtPoint& g = geo.metric[p];
    osc(p) = (b(p) - r.mean_trace) * (b(p) - r.mean_trace);
    tl(p) = norm_sq(SymTensorSample(t[p] - (b(p) / n) * g.g), g);
    full(p) = norm_sq(SymTensorSample(t[p] - (r.mean_trace / n) * g.g), g);
  }
  r.int_oscillation = geo.integrate(osc);
  r.int_traceless = geo.integrate(tl);
  r.int_full = geo.integrate(full);

  // |T - Bbar g/n|^2 = |T - B g/n|^2 + (B - Bbar)^2 / n, pointwise.
  const double split = r.int_traceless + r.int_oscillation / n;
  const double cross = std::abs(r.int_full - split) / std::max({r.int_full, split, r.eps_eq});
  r.diagnostics["cross_identity_error"] = cross;
  if (cross > opts.cross_identity_tolerance) {
    r.gates_ok = false;
    add_flag(r, "gate-failed:cross-identity");
  }

  // c.
  r.c = cfit.indeterminate && !cfit.prescribed ? 0.0 : cfit.c;
  r.c_prescribed = cfit.prescribed;
  if (!std::isnan(cfit.residual)) r.diagnostics["c_fit_residual"] = cfit.residual;
  if (cfit.indeterminate) add_flag(r, "c-indeterminate");
  if (!cfit.prescribed && !cfit.indeterminate) {
    add_flag(r, "c-fit=" + sci(cfit.residual));
    if (!(cfit.residual <= opts.c_fit_tolerance)) {
      r.hypothesis_ok = false;
      add_flag(r, "hypothesis-violated:div T != c grad B");
    }
  }

  // Curvature hypotheses.
  if (geo.ricci_positive()) add_flag(r, "ric>0");
  if (geo.ricci_nonnegative()) add_flag(r, "ric>=0");
  const Convention other =
      convention == Convention::tensor_thm ? Convention::hypersurface_thm : Convention::tensor_thm;
  if (variant == Variant::ricci_nonnegative) {
    r.K = 0.0;
    if (!geo.ricci_nonnegative()) {
      r.hypothesis_ok = false;
      add_flag(r, "hypothesis-violated:Ric >= 0");
    }
  } else {
    r.K = ricci_bound_K(geo, convention);
    r.diagnostics["K_" + convention_name(other)] = ricci_bound_K(geo, other);
  }
  r.diagnostics["min_ricci"] = geo.min_ricci;
  r.diagnostics["lambda1_outer_iterations"] = geo.eigen.outer_iterations;

  // Poisson equation Delta f = B - Bbar and the Poincare bound for it.
  double energy = 0.0;
  if (r.int_oscillation > r.eps_eq) {
    const Vector rhs = b.array() - r.mean_trace;
    const PoissonSolution sol = solve_poisson(geo.op, rhs, opts.solver);
    energy = geo.op.energy(sol.f);
    r.diagnostics["poisson_residual"] = sol.relative_residual;
    r.diagnostics["poisson_iterations"] = sol.iterations;
  } else {
    add_flag(r, "poisson:f=0");
  }
  const double bound = r.int_oscillation / r.lambda1;
  r.diagnostics["poincare_energy"] = energy;
  r.diagnostics["poincare_bound"] = bound;
  if (energy > bound * (1.0 + opts.poincare_slack) + std::numeric_limits<double>::min()) {
    r.gates_ok = false;
    add_flag(r, "gate-failed:poincare");
  }
  r.diagnostics["eps_eq"] = r.eps_eq;
  return r;
}

InequalityReport make_form(InequalityReport base, Form form, const std::string& theorem, const std::string& eq,
                           const Geometry& geo) {
  base.form = form;
  base.theorem = theorem;
  base.equation = eq;
  finalize(base);
  if (base.equality) {
    // Equality conclusions are only asserted under positive Ricci curvature.
    add_flag(base, geo.ricci_positive() ? "rigidity:T=(B/n)g" : "rigidity-not-asserted:Ric>0 fails");
  }
  return base;
}

InequalityReport trivial_report(const Geometry& geo, Convention convention, const VerifyOptions& opts,
                                Variant variant, Form form, const std::string& theorem, const std::string& eq) {
  InequalityReport r;
  r.theorem = theorem;
  r.equation = eq;
  r.form = form;
  r.geometry = geo.tag;
  r.resolution = geo.resolution;
  r.n = geo.n;
  r.c = 0.0;
  r.c_prescribed = true;
  r.convention = convention;
  r.K = variant == Variant::general ? ricci_bound_K(geo, convention) : 0.0;
  r.lambda1 = geo.eigen.lambda1;
  r.trivial = true;
  r.eps_eq = opts.equality_scale * geo.volume();
  add_flag(r, "trivial");
  finalize(r);
  return r;
}

void check_collapse(InequalityReport& r) {
  const double n = r.n;
  const double printed = n * (1.0 + (n - 1.0) * r.K / r.lambda1);
  const double general = 1.0 + (n - 1.0) * (1.0 + n * r.K / r.lambda1);
  const double err = std::abs(printed - general) / printed;
  r.diagnostics["constant_collapse_error"] = err;
  if (err > 1e-12) {
    r.gates_ok = false;
    add_flag(r, "gate-failed:constant-collapse");
  }
}

}  // namespace

std::vector<InequalityReport> verify_general_tensor(const Geometry& geo, const TensorField& t, const CFit& c,
                                                    Convention convention, const VerifyOptions& opts,
                                                    Variant variant) {
  const InequalityReport base = assemble(geo, t, c, convention, opts, variant);
  const bool k0 = variant == Variant::ricci_nonnegative;
  return {make_form(base, Form::trace, k0 ? "thm-1.8" : "thm-1.7", k0 ? "ine-r3" : "ine-r1", geo),
          make_form(base, Form::tensor, k0 ? "thm-1.8" : "thm-1.7", k0 ? "ine-r4" : "ine-r2", geo)};
}

namespace {

std::vector<InequalityReport> collapsed_pair(const Geometry& geo, const TensorField& t, const CFit& fit,
                                             const VerifyOptions& opts, Variant variant, const std::string& theorem,
                                             const std::string& eq1, const std::string& eq2) {
  InequalityReport base = assemble(geo, t, fit, Convention::hypersurface_thm, opts, variant);
  check_collapse(base);
  return {make_form(base, Form::trace, theorem, eq1, geo),
          make_form(base, Form::tensor_collapsed, theorem, eq2, geo)};
}

}  // namespace

std::vector<InequalityReport> verify_hypersurface_r(const GridGeometry& g, int r, const VerifyOptions& opts,
                                                    Variant variant) {
  const int n = g.geo.n;
  if (r < 2 || r > n) throw DomainError("r must satisfy 2 <= r <= n");
  const bool k0 = variant == Variant::ricci_nonnegative;
  const std::string theorem = k0 ? "thm-1.10" : "thm-1.9";
  const std::string eq1 = k0 ? "ine-rm03" : "ine-rm1";
  const std::string eq2 = k0 ? "ine-rm4" : "ine-rm2";
  if (r == n) {
    return {trivial_report(g.geo, Convention::hypersurface_thm, opts, variant, Form::trace, theorem, eq1),
            trivial_report(g.geo, Convention::hypersurface_thm, opts, variant, Form::tensor_collapsed, theorem, eq2)};
  }
  const TensorField pr = hypersurface_P_r(g.gm, r);
  const CFit fit = check_c(g, pr, 0.0);
  auto reports = collapsed_pair(g.geo, pr, fit, opts, variant, theorem, eq1, eq2);
  const double div_max = max_covector_norm(g.gm, covariant_divergence(g.gm, g.pack, pr));
  for (auto& rep : reports) {
    rep.diagnostics["div_residual_max"] = div_max;
    add_flag(rep, "r=" + std::to_string(r));
  }
  return reports;
}

std::vector<InequalityReport> verify_hypersurface_r(const MeshGeometry& m, int r, const VerifyOptions& opts,
                                                    Variant variant) {
  const int n = m.geo.n;
  if (r < 2 || r > n) throw DomainError("r must satisfy 2 <= r <= n");
  const bool k0 = variant == Variant::ricci_nonnegative;
  const std::string theorem = k0 ? "thm-1.10" : "thm-1.9";
  // On a surface every admissible r equals n.
  return {trivial_report(m.geo, Convention::hypersurface_thm, opts, variant, Form::trace, theorem,
                         k0 ? "ine-rm03" : "ine-rm1"),
          trivial_report(m.geo, Convention::hypersurface_thm, opts, variant, Form::tensor_collapsed, theorem,
                         k0 ? "ine-rm4" : "ine-rm2")};
}

InequalityReport verify_perez_r1(const MeshGeometry& m, const VerifyOptions& opts, Variant variant) {
  const auto via_a = verify_general_tensor(m.geo, mesh_shape_tensor(m), prescribed_c(1.0),
                                           Convention::hypersurface_thm, opts, variant);
  const auto via_p1 = verify_general_tensor(m.geo, mesh_newton_tensor(m, 1), prescribed_c(0.0),
                                            Convention::hypersurface_thm, opts, variant);
  double err = 0.0;
  for (size_t i = 0; i < via_a.size(); ++i) {
    const double floor = std::max(via_a[i].eps_eq, via_p1[i].eps_eq);
    err = std::max(err, rel_diff(via_a[i].lhs, via_p1[i].lhs, floor));
    err = std::max(err, rel_diff(via_a[i].rhs, via_p1[i].rhs, floor));
  }
  InequalityReport r = via_a.front();
  r.flags.erase(std::remove_if(r.flags.begin(), r.flags.end(),
                               [](const std::string& f) { return f.rfind("rigidity", 0) == 0; }),
                r.flags.end());
  r.diagnostics["reduction_error"] = err;
  if (err > 1e-12) {
    r.gates_ok = false;
    add_flag(r, "gate-failed:reduction");
  }
  const bool k0 = variant == Variant::ricci_nonnegative;
  return make_form(r, Form::mean_curvature, "rem-4.3", k0 ? "ine-rm6" : "ine-rm5", m.geo);
}

std::vector<InequalityReport> verify_k_scalar(const GridGeometry& g, int k, const VerifyOptions& opts,
                                              Variant variant) {
  const int n = g.geo.n;
  if (n < 3) throw DomainError("k-scalar curvature requires n >= 3");
  if (k < 2 || k > n) throw DomainError("k must satisfy 2 <= k <= n");
  if (!g.gm.conformally_flat()) {
    throw HypothesisError("geometry " + g.geo.tag + " is not locally conformally flat; div T_k = 0 is not certified");
  }
  const bool k0 = variant == Variant::ricci_nonnegative;
  const std::string theorem = k0 ? "thm-1.12" : "thm-1.11";
  if (k == n) {
    return {trivial_report(g.geo, Convention::hypersurface_thm, opts, variant, Form::trace, theorem, "ine-ks1"),
            trivial_report(g.geo, Convention::hypersurface_thm, opts, variant, Form::tensor_collapsed, theorem,
                           "ine-ks2")};
  }
  const KScalarFields ks = schouten_sigma_k(g.gm, g.pack, k);
  const CFit fit = check_c(g, ks.newton, 0.0);
  auto reports = collapsed_pair(g.geo, ks.newton, fit, opts, variant, theorem, "ine-ks1", "ine-ks2");
  const double div_max = max_covector_norm(g.gm, covariant_divergence(g.gm, g.pack, ks.newton));
  for (auto& rep : reports) {
    rep.diagnostics["div_residual_max"] = div_max;
    add_flag(rep, "k=" + std::to_string(k));
  }
  return reports;
}

// ---------------------------------------------------------------------------

BochnerResult bochner_residual(const GridGeometry& g, const ScalarField& f) {
  const GridManifold& gm = g.gm;
  const int n = gm.dim();
  const size_t N = gm.size();
  if (f.size() != N) throw DimensionError("bochner_residual: field size mismatch");
  std::vector<ScalarField> df(n);
  for (int a = 0; a < n; ++a) df[a] = gm.derivative(f, a);
  std::vector<std::vector<ScalarField>> ddf(n, std::vector<ScalarField>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) ddf[a][b] = gm.derivative(df[b], a);
  }
  ScalarField hess(N), lap(N), ric(N);
  Matrix h(n, n);
  Vector grad(n);
  for (size_t p = 0; p < N; ++p) {
    for (int a = 0; a < n; ++a) grad(a) = df[a][p];
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double s = 0.5 * (ddf[a][b][p] + ddf[b][a][p]);
        for (int k = 0; k < n; ++k) s -= g.pack.gamma(p, k, a, b) * grad(k);
        h(a, b) = s;
      }
    }
    const Matrix& gi = gm.metric()[p].g_inv;
    const Matrix up = gi * h;
    hess[p] = (up * up).trace();
    lap[p] = up.trace() * up.trace();
    const Vector v = gi * grad;
    ric[p] = v.dot(g.pack.ricci[p] * v);
  }
  BochnerResult out;
  out.hessian_sq = integrate(gm, hess);
  out.laplacian_sq = integrate(gm, lap);
  out.ricci_term = integrate(gm, ric);
  const double defect = std::abs(out.hessian_sq - out.laplacian_sq + out.ricci_term);
  out.residual = out.laplacian_sq > 0.0 ? defect / out.laplacian_sq : defect;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double li_yau_exponential(int n, double K, double d) {
  return std::exp(1.0 + std::sqrt(1.0 + 4.0 * (n - 1.0) * (n - 1.0) * K * d * d));
}

void require_li_yau(int n, double K, double d) {
  if (n < 2) throw DomainError("Li-Yau bound requires n >= 2");
  if (!(K >= 0.0)) throw DomainError("Li-Yau bound requires K >= 0");
  if (!(d > 0.0)) throw DomainError("Li-Yau bound requires d > 0");
}

}  // namespace

LiYau li_yau_constants(int n, double K, double d) {
  require_li_yau(n, K, d);
  const double e = li_yau_exponential(n, K, d);
  LiYau out;
  out.alpha = 1.0 / ((n - 1.0) * d * d * e);
  if (n != 2) {
    out.c_printed = 4.0 * n * (n - 1.0) / ((n - 2.0) * (n - 2.0)) * (1.0 + n * (n - 1.0) * K * d * d * e);
  }
  return out;
}

std::pair<double, double> li_yau_general_constants(int n, double c, double K, double d) {
  require_li_yau(n, K, d);
  const double p = (n * c - 1.0) * (n * c - 1.0);
  if (p == 0.0) throw DomainError("Li-Yau constants require c != 1/n");
  const double spectral = 1.0 + n * (n - 1.0) * K * d * d * li_yau_exponential(n, K, d);
  return {n * (n - 1.0) / p * spectral, 1.0 + (n - 1.0) * spectral / p};
}

LiYauCheck li_yau_check(const Geometry& geo, double diameter) {
  LiYauCheck out;
  out.K = ricci_bound_K(geo, Convention::tensor_thm);
  out.diameter = diameter;
  out.alpha = li_yau_constants(geo.n, out.K, diameter).alpha;
  out.lambda1 = geo.eigen.lambda1;
  out.holds = out.alpha <= out.lambda1;
  return out;
}

InequalityReport li_yau_report(const Geometry& geo, double diameter) {
  const LiYauCheck check = li_yau_check(geo, diameter);
  InequalityReport r;
  r.theorem = "cor-2.3";
  r.equation = "li-yau";
  r.form = Form::eigenvalue_bound;
  r.geometry = geo.tag;
  r.resolution = geo.resolution;
  r.n = geo.n;
  r.c_prescribed = true;
  r.convention = Convention::tensor_thm;
  r.K = check.K;
  r.lambda1 = check.lambda1;
  r.diagnostics["diameter"] = diameter;
  if (geo.n != 2) r.diagnostics["C_printed"] = *li_yau_constants(geo.n, r.K, diameter).c_printed;
  r.flags.push_back("d=" + sci(diameter));
  const auto [lhs, rhs] = recompute(r);
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = lhs / rhs;
  if (!check.holds) {
    r.gates_ok = false;
    r.flags.push_back("alpha>lambda1");
  }
  return r;
}

// ---------------------------------------------------------------------------

ConvergenceTable convergence_study(const std::vector<int>& resolutions,
                                   const std::function<std::map<std::string, double>(int)>& measure) {
  if (resolutions.size() < 3) throw DomainError("convergence study needs at least 3 resolutions");
  for (size_t i = 1; i < resolutions.size(); ++i) {
    if (resolutions[i] <= resolutions[i - 1]) throw DomainError("resolutions must be strictly increasing");
  }
  ConvergenceTable table;
  table.resolutions = resolutions;
  for (int res : resolutions) table.values.push_back(measure(res));
  const size_t L = resolutions.size();
  for (const auto& [name, first] : table.values.front()) {
    (void)first;
    std::vector<double> v(L);
    for (size_t i = 0; i < L; ++i) v[i] = table.values[i].at(name);
    std::vector<double>& orders = table.orders[name];
    if (name.rfind("err:", 0) == 0) {
      for (size_t i = 0; i + 1 < L; ++i) {
        orders.push_back(std::log(v[i] / v[i + 1]) / std::log(double(resolutions[i + 1]) / resolutions[i]));
      }
    } else {
      for (size_t i = 0; i + 2 < L; ++i) {
        const double d0 = std::abs(v[i + 1] - v[i]);
        const double d1 = std::abs(v[i + 2] - v[i + 1]);
        orders.push_back(std::log(d0 / d1) / std::log(double(resolutions[i + 2]) / resolutions[i + 1]));
      }
      table.final_change[name] = std::abs(v[L - 1] - v[L - 2]) / std::max(std::abs(v[L - 1]), 1e-300);
    }
  }
  return table;
}

}  // namespace schur

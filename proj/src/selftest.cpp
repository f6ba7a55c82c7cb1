#include "schur/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "schur/elliptic.hpp"
#include "schur/grid.hpp"
#include "schur/mesh.hpp"

namespace schur {

namespace {

constexpr double kIdentityTolerance = 1e-10;

struct Sample {
  SymEndomorphism a;
  Vector eig;
  Matrix vecs;
};

std::vector<Sample> random_samples(int count) {
  std::mt19937_64 rng(0x5e1f7e57);
  std::normal_distribution<double> entry(0.0, 1.0);
  std::uniform_int_distribution<int> dim(2, 8);
  std::vector<Sample> out;
  for (int s = 0; s < count; ++s) {
    const int n = dim(rng);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = entry(rng);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    out.push_back({SymEndomorphism(m), es.eigenvalues(), es.eigenvectors()});
  }
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// sigma_r of the eigenvalues and of their absolute values (the scale
// against which a rounding error in sigma_r is judged).
double sigma(const Vector& eig, int r) { return elementary_symmetric(to_std(eig), r); }
double sigma_scale(const Vector& eig, int r) {
  return std::max(1.0, elementary_symmetric(to_std(eig.cwiseAbs()), r));
}

SelftestCase identity_case(const std::string& name, double worst) {
  return {"newton", name, worst <= kIdentityTolerance, worst, kIdentityTolerance};
}

std::vector<SelftestCase> newton_cases(const SelftestOptions& opts) {
  const std::function<SymEndomorphism(const SymEndomorphism&, int)> newton =
      opts.newton ? opts.newton : newton_transform;
  const auto samples = random_samples(opts.samples);
  double e_sigma = 0, e_trace = 0, e_trace_a = 0, e_top = 0, e_vec = 0;
  for (const Sample& s : samples) {
    const int n = s.a.dim();
    const double norm = std::max(1.0, s.eig.cwiseAbs().maxCoeff());
    for (int r = 0; r <= n; ++r) {
      const double sr = sigma(s.eig, r);
      e_sigma = std::max(e_sigma, std::abs(sigma_of(s.a, r) - sr) / sigma_scale(s.eig, r));
      const Matrix p = newton(s.a, r).m;
      // A P_r has eigenvalues lambda_i sigma_r(lambda without i), bounded by
      // (r+1) times the absolute-value sigma_{r+1}; P_r by (n-r) sigma_r.
      e_trace = std::max(e_trace, std::abs(p.trace() - (n - r) * sr) / ((n - r + 1) * sigma_scale(s.eig, r)));
      if (r < n) {
        const double next = sigma(s.eig, r + 1);
        e_trace_a = std::max(e_trace_a, std::abs((s.a.m * p).trace() - (r + 1) * next) /
                                            ((r + 1) * sigma_scale(s.eig, r + 1)));
      } else {
        e_top = std::max(e_top, p.cwiseAbs().maxCoeff() / std::pow(norm, n));
      }
      for (int i = 0; i < n; ++i) {
        Vector rest(n - 1);
        for (int j = 0, k = 0; j < n; ++j) {
          if (j != i) rest(k++) = s.eig(j);
        }
        const double expect = r <= n - 1 ? sigma(rest, r) : 0.0;
        const double scale = r <= n - 1 ? sigma_scale(rest, r) : 1.0;
        const Vector v = s.vecs.col(i);
        e_vec = std::max(e_vec, (p * v - expect * v).norm() / scale);
      }
    }
  }
  return {identity_case("sigma_r: recurrence=characteristic coefficients", e_sigma),
          identity_case("tr(P_r)=(n−r)σ_r", e_trace),
          identity_case("tr(AP_r)=(r+1)σ_{r+1}", e_trace_a),
          identity_case("P_n=0", e_top),
          identity_case("P_r e_i=σ_r(A_i) e_i", e_vec)};
}

SelftestCase relative_case(const std::string& name, double value, double expected, double tolerance) {
  const double err = std::abs(value - expected) / std::abs(expected);
  return {"oracle", name, err <= tolerance, err, tolerance};
}

std::vector<SelftestCase> oracle_cases() {
  std::vector<SelftestCase> out;
  {
    const TriMesh sphere = generate_mesh(IcosphereSpec{1.0, 4});
    const double l1 = lambda_1(cotan_operator(sphere)).lambda1;
    out.push_back(relative_case("unit sphere lambda1=2", l1, 2.0, 0.01));
  }
  {
    const TriMesh torus = generate_mesh(TorusSpec{2.0, 0.5, 96, 48});
    out.push_back(relative_case("torus area=4 pi^2 R r", torus.total_area(), 4.0 * std::numbers::pi * std::numbers::pi,
                                0.005));
  }
  {
    const GridManifold flat = build_grid(FlatGridSpec{3, 1.0}, 12);
    const CurvaturePack pack = curvature(flat);
    double worst = 0.0;
    for (const Matrix& ric : pack.ricci) worst = std::max(worst, ric.cwiseAbs().maxCoeff());
    out.push_back({"oracle", "flat grid Ric=0", worst <= 1e-12, worst, 1e-12});
  }
  return out;
}

bool selected(const std::string& filter, const std::string& group, const std::string& name) {
  return filter.empty() || group.find(filter) != std::string::npos || name.find(filter) != std::string::npos;
}

}  // namespace

std::vector<SelftestCase> run_selftest(const SelftestOptions& opts) {
  std::vector<SelftestCase> all;
  // Group-level filters skip the expensive group entirely.
  if (opts.filter.empty() || opts.filter != "oracle") {
    for (auto& c : newton_cases(opts)) {
      if (selected(opts.filter, c.group, c.name)) all.push_back(std::move(c));
    }
  }
  if (opts.filter.empty() || opts.filter != "newton") {
    for (auto& c : oracle_cases()) {
      if (selected(opts.filter, c.group, c.name)) all.push_back(std::move(c));
    }
  }
  return all;
}

int report_selftest(const std::vector<SelftestCase>& cases, std::ostream& out) {
  if (cases.empty()) {
    out << "no property matches the filter\n";
    return 1;
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-8s %-50s %12s %10s\n", "result", "group", "property", "error", "tol");
  out << line;
  int failed = 0;
  for (const auto& c : cases) {
    std::snprintf(line, sizeof line, "%-6s %-8s %-50s %12.3e %10.1e\n", c.passed ? "PASS" : "FAIL", c.group.c_str(),
                  c.name.c_str(), c.error, c.tolerance);
    out << line;
    if (!c.passed) ++failed;
  }
  if (failed) {
    out << failed << " failing:";
    for (const auto& c : cases) {
      if (!c.passed) out << " \"" << c.name << "\"";
    }
    out << "\n";
    return 1;
  }
  out << "all " << cases.size() << " properties pass\n";
  return 0;
}

}  // namespace schur

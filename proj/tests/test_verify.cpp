#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/rational.hpp>

#include "schur/verify.hpp"

using namespace schur;
constexpr double kPi = std::numbers::pi;

namespace {

bool has_flag(const InequalityReport& r, const std::string& prefix) {
  return std::any_of(r.flags.begin(), r.flags.end(), [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
}

MeshGeometry mesh(const MeshSpec& spec) { return make_mesh_geometry(generate_mesh(spec), describe(spec), 0); }
GridGeometry grid(const GridSpec& spec, int res) { return make_grid_geometry(build_grid(spec, res)); }

ConformalGridSpec conformal_sine(int n) {
  return ConformalGridSpec{n, 1.0, 0.1, {TrigFactor{TrigFactor::Kind::sin, 1}}};
}

}  // namespace

TEST(Reports, StoredSidesAreRecomputable) {
  const MeshGeometry m = mesh(EllipsoidSpec{1.0, 1.0, 1.2, 3});
  for (Convention conv : {Convention::tensor_thm, Convention::hypersurface_thm}) {
    for (const auto& r : verify_general_tensor(m.geo, mesh_shape_tensor(m), prescribed_c(1.0), conv)) {
      const auto [lhs, rhs] = recompute(r);
      EXPECT_EQ(lhs, r.lhs);
      EXPECT_EQ(rhs, r.rhs);
      ASSERT_TRUE(r.ratio.has_value());
      EXPECT_EQ(*r.ratio, r.lhs / r.rhs);
      EXPECT_TRUE(r.gates_ok);
    }
  }
}

TEST(Reports, ConstantCollapseOnRationals) {
  // For c = 0, 1 + (n-1)(1 + nK/l) = n [1 + (n-1) K/l] exactly.
  using Q = boost::rational<long long>;
  for (long long n = 2; n <= 8; ++n) {
    for (long long kn = 0; kn <= 7; ++kn) {
      for (long long ln = 1; ln <= 9; ++ln) {
        const Q K(kn, 3), l(ln, 2);
        const Q general = Q(1) + Q(n - 1) * (Q(1) + Q(n) * K / l);
        const Q printed = Q(n) * (Q(1) + Q(n - 1) * K / l);
        EXPECT_EQ(general, printed) << "n=" << n << " K=" << K << " l=" << l;
      }
    }
  }
}

TEST(Reports, MetricTensorGivesEquality) {
  const MeshGeometry m = mesh(EllipsoidSpec{1.0, 1.0, 1.2, 3});
  const GridGeometry g = grid(conformal_sine(3), 12);
  for (const Geometry* geo : {&m.geo, &g.geo}) {
    CFit none;
    none.indeterminate = true;
    none.residual = std::nan("");
    for (const auto& r : verify_general_tensor(*geo, metric_tensor(*geo), none, Convention::tensor_thm)) {
      EXPECT_TRUE(r.equality) << r.id();
      EXPECT_FALSE(r.ratio.has_value());
      EXPECT_LE(r.lhs, r.eps_eq);
      EXPECT_LE(r.rhs, r.eps_eq);
      EXPECT_NEAR(r.eps_eq, 1e-8 * geo->n * geo->volume(), 1e-12 * r.eps_eq);
      EXPECT_TRUE(has_flag(r, "c-indeterminate"));
    }
  }
  EXPECT_TRUE(estimate_c(g, metric_tensor(g.geo)).indeterminate);
}

TEST(Reports, RicciOnSurfaceHasVanishingPrefactor) {
  const MeshGeometry m = mesh(PerturbedSphereSpec{1.0, 0.2, 3, 3});
  TensorField ric(m.geo.size());
  for (size_t v = 0; v < ric.size(); ++v) ric[v] = m.gauss[v] * Matrix::Identity(2, 2);
  const auto reps = verify_general_tensor(m.geo, ric, prescribed_c(0.5), Convention::tensor_thm);
  EXPECT_EQ(reps[0].lhs, 0.0);
  EXPECT_EQ(reps[1].lhs, 0.0);
}

TEST(CFit, RicciAndNewton) {
  const GridGeometry conf = grid(conformal_sine(3), 16);
  const CFit ric = estimate_c(conf, conf.pack.ricci);
  EXPECT_NEAR(ric.c, 0.5, 1e-3);
  EXPECT_LT(ric.residual, 0.05);
  const GridGeometry spun = grid(SpunTorus4Spec{3.0, 0.5, 1.5}, 16);
  EXPECT_LT(check_c(spun, hypersurface_P_r(spun.gm, 2), 0.0).residual, 0.05);
}

TEST(CFit, ViolationIsFlagged) {
  // T = f(x) dx dx + f(z) dy dy: div T = f'(x) dx, grad tr T = f'(x) dx + f'(z) dz,
  // so the best c is 1/2 and leaves half of grad B unexplained.
  const GridGeometry flat = grid(FlatGridSpec{3, 1.0}, 12);
  TensorField t(flat.geo.size(), Matrix::Zero(3, 3));
  for (size_t p = 0; p < t.size(); ++p) {
    const auto x = flat.gm.coordinates(p);
    t[p](0, 0) = std::sin(2 * kPi * x[0]);
    t[p](1, 1) = std::sin(2 * kPi * x[2]);
  }
  const CFit fit = estimate_c(flat, t);
  EXPECT_NEAR(fit.c, 0.5, 1e-12);
  EXPECT_NEAR(fit.residual, 0.5, 1e-12);
  const auto reps = verify_general_tensor(flat.geo, t, fit, Convention::tensor_thm);
  EXPECT_FALSE(reps[0].hypothesis_ok);
  EXPECT_TRUE(has_flag(reps[0], "hypothesis-violated"));
}

TEST(RicciBound, Conventions) {
  const MeshGeometry sphere = mesh(IcosphereSpec{1.0, 3});
  EXPECT_EQ(ricci_bound_K(sphere.geo, Convention::tensor_thm), 0.0);
  EXPECT_EQ(ricci_bound_K(sphere.geo, Convention::hypersurface_thm), 0.0);
  const GridGeometry flat = grid(FlatGridSpec{3, 1.0}, 8);
  EXPECT_EQ(ricci_bound_K(flat.geo, Convention::tensor_thm), 0.0);
  const GridGeometry torus = grid(Torus3Spec{2.0, 0.5}, 32);
  EXPECT_NEAR(ricci_bound_K(torus.geo, Convention::hypersurface_thm), 1.0 / 0.75, 1e-3);
  const GridGeometry conf = grid(conformal_sine(3), 16);
  EXPECT_DOUBLE_EQ(ricci_bound_K(conf.geo, Convention::hypersurface_thm),
                   2.0 * ricci_bound_K(conf.geo, Convention::tensor_thm));
}

TEST(Hypersurface, TrivialWhenOrderEqualsDimension) {
  const GridGeometry spun = grid(SpunTorus4Spec{3.0, 0.5, 1.5}, 8);
  for (const auto& r : verify_hypersurface_r(spun, 3)) {
    EXPECT_TRUE(r.trivial);
    EXPECT_TRUE(r.passes(0.05));
  }
  const GridGeometry torus = grid(Torus3Spec{2.0, 0.5}, 8);
  for (const auto& r : verify_hypersurface_r(torus, 2)) EXPECT_TRUE(r.trivial);
  EXPECT_THROW(verify_hypersurface_r(spun, 1), DomainError);
}

TEST(Hypersurface, SpunTorusInequalityHolds) {
  const GridGeometry spun = grid(SpunTorus4Spec{3.0, 0.5, 1.5}, 16);
  const auto reps = verify_hypersurface_r(spun, 2);
  ASSERT_EQ(reps.size(), 2u);
  for (const auto& r : reps) {
    EXPECT_GT(r.K, 0.0);
    EXPECT_LT(*r.ratio, 1.0);
    EXPECT_TRUE(r.gates_ok);
    EXPECT_LE(r.diagnostics.at("constant_collapse_error"), 1e-12);
  }
}

TEST(KScalar, RefusedWithoutConformalFlatness) {
  const GridGeometry prod = grid(ProductGridSpec{3, 1.0, 0.1}, 8);
  EXPECT_THROW(verify_k_scalar(prod, 2), HypothesisError);
  const GridGeometry conf4 = grid(conformal_sine(4), 8);
  for (const auto& r : verify_k_scalar(conf4, 4)) EXPECT_TRUE(r.trivial);
}

TEST(KScalar, FlatEqualityWithoutRigidity) {
  const GridGeometry flat = grid(FlatGridSpec{3, 1.0}, 8);
  for (const auto& r : verify_k_scalar(flat, 2)) {
    EXPECT_TRUE(r.equality);
    EXPECT_TRUE(has_flag(r, "rigidity-not-asserted"));
  }
}

TEST(Perez, SphereEqualityAndReduction) {
  const MeshGeometry sphere = mesh(IcosphereSpec{1.0, 3});
  const InequalityReport r = verify_perez_r1(sphere);
  EXPECT_TRUE(r.equality);
  EXPECT_TRUE(has_flag(r, "rigidity:"));
  const MeshGeometry ell = mesh(EllipsoidSpec{1.0, 1.0, 1.2, 3});
  const InequalityReport e = verify_perez_r1(ell);
  EXPECT_LE(e.diagnostics.at("reduction_error"), 1e-12);
  EXPECT_LT(*e.ratio, 1.0);
  EXPECT_EQ(e.theorem, "rem-4.3");
}

TEST(Perez, NonnegativeVariantNeedsNonnegativeCurvature) {
  const MeshGeometry m = mesh(PerturbedSphereSpec{1.0, 0.3, 3, 3});
  const InequalityReport r = verify_perez_r1(m, {}, Variant::ricci_nonnegative);
  EXPECT_FALSE(r.hypothesis_ok);
  EXPECT_EQ(r.K, 0.0);
  EXPECT_EQ(r.equation, "ine-rm6");
}

TEST(Bochner, FlatFourierMode) {
  const GridGeometry flat = grid(FlatGridSpec{3, 1.0}, 32);
  const ScalarField f = flat.gm.sample([](const std::vector<double>& x) { return std::sin(2 * kPi * x[0]); });
  const BochnerResult b = bochner_residual(flat, f);
  EXPECT_LT(b.residual, 1e-6);
  EXPECT_NEAR(b.laplacian_sq, 8 * std::pow(kPi, 4), 1e-3 * 8 * std::pow(kPi, 4));
  const BochnerResult c = bochner_residual(flat, ScalarField(flat.geo.size(), 2.0));
  EXPECT_EQ(c.hessian_sq, 0.0);
  EXPECT_EQ(c.laplacian_sq, 0.0);
  EXPECT_EQ(c.residual, 0.0);
}

TEST(LiYau, PrintedConstants) {
  const LiYau l = li_yau_constants(3, 0.0, kPi);
  EXPECT_NEAR(l.alpha, 1.0 / (2 * kPi * kPi * std::exp(2.0)), 1e-15);
  ASSERT_TRUE(l.c_printed.has_value());
  EXPECT_EQ(*l.c_printed, 24.0);
  EXPECT_EQ(*li_yau_constants(3, 0.0, 7.0).c_printed, 24.0);
  EXPECT_FALSE(li_yau_constants(2, 0.5, 1.0).c_printed.has_value());
  EXPECT_THROW(li_yau_constants(3, -1.0, 1.0), DomainError);
  // At c = 1/2 the general oscillation constant is the printed one.
  const LiYau k = li_yau_constants(3, 0.3, 1.4);
  EXPECT_NEAR(li_yau_general_constants(3, 0.5, 0.3, 1.4).first, *k.c_printed, 1e-12 * *k.c_printed);
  EXPECT_THROW(li_yau_general_constants(3, 1.0 / 3.0, 0.0, 1.0), DomainError);
}

TEST(LiYau, BoundBelowLambda1) {
  const MeshGeometry sphere = mesh(IcosphereSpec{1.0, 3});
  const InequalityReport r = li_yau_report(sphere.geo, mesh_diameter(sphere.mesh));
  EXPECT_LT(r.lhs, r.rhs);
  EXPECT_TRUE(r.gates_ok);
  EXPECT_EQ(r.id(), "cor-2.3:li-yau");
}

TEST(Convergence, OrdersAndPreconditions) {
  const auto t = convergence_study({8, 16, 32}, [](int r) {
    return std::map<std::string, double>{{"err:h2", 1.0 / (r * r)}, {"value", 1.0 + 1.0 / (r * r * r * r)}};
  });
  for (double o : t.orders.at("err:h2")) EXPECT_NEAR(o, 2.0, 1e-12);
  EXPECT_NEAR(t.orders.at("value")[0], 4.0, 1e-9);
  EXPECT_LT(t.final_change.at("value"), 1e-4);
  EXPECT_THROW(convergence_study({8, 16}, [](int) { return std::map<std::string, double>{}; }), DomainError);
  EXPECT_THROW(convergence_study({8, 32, 16}, [](int) { return std::map<std::string, double>{}; }), DomainError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "schur/elliptic.hpp"
#include "schur/grid.hpp"
#include "schur/mesh.hpp"

using namespace schur;
constexpr double kPi = std::numbers::pi;

TEST(Poisson, ZeroRightHandSide) {
  const DiscreteOperator op = cotan_operator(generate_mesh(IcosphereSpec{1.0, 2}));
  const PoissonSolution s = solve_poisson(op, Vector::Zero(op.size()));
  EXPECT_EQ(s.f.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Poisson, RejectsNonzeroMean) {
  const DiscreteOperator op = cotan_operator(generate_mesh(IcosphereSpec{1.0, 2}));
  EXPECT_THROW(solve_poisson(op, Vector::Ones(op.size())), PreconditionError);
}

TEST(Poisson, SphereDegreeOneHarmonic) {
  const TriMesh m = generate_mesh(IcosphereSpec{1.0, 4});
  const DiscreteOperator op = cotan_operator(m);
  Vector y(op.size());
  for (int v = 0; v < m.num_vertices(); ++v) y(v) = m.vertices()[v].z();
  y.array() -= op.weighted_mean(y);
  const PoissonSolution s = solve_poisson(op, y);
  EXPECT_LT((s.f + y / 2.0).cwiseAbs().maxCoeff(), 1e-2 * y.cwiseAbs().maxCoeff());
  EXPECT_LT(s.relative_residual, 1e-10);
}

TEST(Poisson, FlatGridFourierMode) {
  const GridManifold gm = build_grid(FlatGridSpec{3, 1.0}, 16);
  const DiscreteOperator op = laplace_beltrami(gm);
  const ScalarField rhs = gm.sample([](const std::vector<double>& x) { return std::sin(2 * kPi * x[0]); });
  const Vector b = Eigen::Map<const Vector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const PoissonSolution s = solve_poisson(op, b);
  const Vector expect = -b / (4 * kPi * kPi);
  EXPECT_LT((s.f - expect).cwiseAbs().maxCoeff(), 1e-3 * expect.cwiseAbs().maxCoeff());
}

TEST(Lambda1, FlatTorusFourierMode) {
  const GridManifold gm3 = build_grid(FlatGridSpec{3, 1.0}, 32);
  const EigenPair e3 = lambda_1(laplace_beltrami(gm3));
  EXPECT_NEAR(e3.lambda1, 4 * kPi * kPi, 1e-3 * 4 * kPi * kPi);
  const GridManifold gm2 = build_grid(FlatGridSpec{2, 1.0}, 64);
  EXPECT_NEAR(lambda_1(laplace_beltrami(gm2)).lambda1, 4 * kPi * kPi, 1e-3 * 4 * kPi * kPi);
}

TEST(Lambda1, SphereScaling) {
  for (double rho : {1.0, 2.0}) {
    const double l1 = lambda_1(cotan_operator(generate_mesh(IcosphereSpec{rho, 4}))).lambda1;
    EXPECT_NEAR(l1 * rho * rho, 2.0, 0.02);
  }
}

TEST(Lambda1, EigenfunctionIsNormalizedAndDeterministic) {
  const DiscreteOperator op = cotan_operator(generate_mesh(EllipsoidSpec{1.0, 1.0, 1.2, 3}));
  const EigenPair a = lambda_1(op);
  const EigenPair b = lambda_1(op);
  EXPECT_EQ(a.lambda1, b.lambda1);
  EXPECT_NEAR(op.inner(a.eigenfunction, a.eigenfunction), 1.0, 1e-12);
  EXPECT_NEAR(op.weighted_mean(a.eigenfunction), 0.0, 1e-12);
  EXPECT_NEAR(rayleigh_quotient(op, a.eigenfunction), a.lambda1, 1e-12 * a.lambda1);
}

TEST(Lambda1, RayleighQuotientOfFourierMode) {
  const GridManifold gm = build_grid(FlatGridSpec{3, 1.0}, 16);
  const ScalarField f = gm.sample([](const std::vector<double>& x) { return std::sin(2 * kPi * x[0]); });
  const Vector v = Eigen::Map<const Vector>(f.data(), static_cast<Eigen::Index>(f.size()));
  EXPECT_NEAR(rayleigh_quotient(laplace_beltrami(gm), v), 4 * kPi * kPi, 1e-3 * 4 * kPi * kPi);
}

TEST(Solver, NonConvergenceRaises) {
  const DiscreteOperator op = cotan_operator(generate_mesh(IcosphereSpec{1.0, 3}));
  SolverOptions opts;
  opts.cg_tolerance = 1e-30;
  Vector rhs = Vector::LinSpaced(op.size(), -1.0, 1.0);
  rhs.array() -= op.weighted_mean(rhs);
  try {
    solve_poisson(op, rhs, opts);
    FAIL() << "expected a solver error";
  } catch (const SolverError& e) {
    EXPECT_FALSE(e.residual_history.empty());
  }
}

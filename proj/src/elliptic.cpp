#include "schur/elliptic.hpp"

#include <exception>
#include <thread>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace schur {

void DiscreteOperator::validate() const {
  if (stiffness.rows() != weights.size() || stiffness.cols() != weights.size()) {
    throw DimensionError("operator: stiffness and weights sizes differ");
  }
  if (weights.size() == 0) throw DomainError("operator: empty");
  if ((weights.array() <= 0.0).any()) throw DomainError("operator: non-positive weight");
  const SparseMatrix lt = stiffness.transpose();
  const double scale = stiffness.coeffs().cwiseAbs().maxCoeff();
  const SparseMatrix diff = stiffness - lt;
  const double asym = diff.nonZeros() ? diff.coeffs().cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-12 * scale) throw DomainError("operator: stiffness not symmetric");
  const Vector rows = stiffness * Vector::Ones(size());
  if (rows.cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("operator: constants are not in the kernel");
  }
}

double DiscreteOperator::energy(const Vector& f) const { return f.dot(stiffness * f); }

double DiscreteOperator::inner(const Vector& a, const Vector& b) const {
  return (weights.array() * a.array() * b.array()).sum();
}

double DiscreteOperator::weighted_mean(const Vector& f) const {
  return weights.dot(f) / weights.sum();
}

double rayleigh_quotient(const DiscreteOperator& op, const Vector& f) {
  return op.energy(f) / op.inner(f, f);
}

namespace {

void remove_plain_mean(Vector& v) { v.array() -= v.mean(); }

void remove_weighted_mean(const DiscreteOperator& op, Vector& v) {
  v.array() -= op.weighted_mean(v);
}

struct CgResult {
  Vector x;
  double relative_residual = 0.0;
  int iterations = 0;
};

// CG on the singular system L x = b with b orthogonal to constants. The
// residual is re-projected onto sum-zero vectors every iteration so that
// round-off cannot feed the kernel.
CgResult conjugate_gradient(const DiscreteOperator& op, const Vector& b, const Vector& x0,
                            const SolverOptions& opts) {
  const Eigen::Index n = op.size();
  const int max_iter =
      static_cast<int>(std::ceil(opts.cg_iteration_factor * std::sqrt(static_cast<double>(n))));
  CgResult out;
  out.x = x0;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x.setZero();
    return out;
  }
  Vector inv_diag;
  if (opts.jacobi) inv_diag = op.stiffness.diagonal().cwiseInverse();

  Vector r = b - op.stiffness * out.x;
  remove_plain_mean(r);
  Vector z = opts.jacobi ? Vector(inv_diag.cwiseProduct(r)) : r;
  Vector p = z;
  double rz = r.dot(z);
  std::vector<double> history;
  double rel = r.norm() / bnorm;
  history.push_back(rel);
  int it = 0;
  for (;;) {
    if (rel <= opts.cg_tolerance) {
      // The recursive residual drifts from b - Lx; accept only the true one
      // and restart from it otherwise.
      Vector true_r = b - op.stiffness * out.x;
      remove_plain_mean(true_r);
      const double true_rel = true_r.norm() / bnorm;
      if (true_rel <= opts.cg_tolerance) {
        rel = true_rel;
        break;
      }
      r = std::move(true_r);
      z = opts.jacobi ? Vector(inv_diag.cwiseProduct(r)) : r;
      p = z;
      rz = r.dot(z);
      rel = true_rel;
    }
    if (it >= max_iter) {
      throw SolverError("conjugate gradient did not converge in " + std::to_string(max_iter) +
                            " iterations (relative residual " + std::to_string(rel) + ")",
                        std::move(history));
    }
    const Vector lp = op.stiffness * p;
    const double plp = p.dot(lp);
    if (!(plp > 0.0)) {
      throw SolverError("conjugate gradient breakdown (non-positive curvature)",
                        std::move(history));
    }
    const double alpha = rz / plp;
    out.x += alpha * p;
    r -= alpha * lp;
    remove_plain_mean(r);
    if (opts.jacobi) {
      z = inv_diag.cwiseProduct(r);
    } else {
      z = r;
    }
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    ++it;
    rel = r.norm() / bnorm;
    history.push_back(rel);
  }
  out.iterations = it;
  out.relative_residual = rel;
  return out;
}

PoissonSolution solve_poisson_from(const DiscreteOperator& op, const Vector& rhs,
                                   const Vector& x0, const SolverOptions& opts) {
  if (rhs.size() != op.size()) throw DimensionError("solve_poisson: rhs size mismatch");
  const double scale = rhs.cwiseAbs().maxCoeff();
  const double mean = op.weighted_mean(rhs);
  if (std::abs(mean) > opts.rhs_mean_tolerance * std::max(scale, 1e-300) && scale > 0.0) {
    throw PreconditionError("solve_poisson: right-hand side has non-zero weighted mean " +
                            std::to_string(mean));
  }
  // Exactly consistent right-hand side for the singular system.
  Vector b = -(op.weights.array() * rhs.array()).matrix();
  remove_plain_mean(b);
  CgResult cg = conjugate_gradient(op, b, x0, opts);
  PoissonSolution sol;
  sol.f = std::move(cg.x);
  remove_weighted_mean(op, sol.f);
  sol.relative_residual = cg.relative_residual;
  sol.iterations = cg.iterations;
  return sol;
}

// Deterministic start block, independent of the standard library's
// distribution implementations.
Matrix start_block(Eigen::Index n, int k) {
  std::mt19937_64 gen(0x5eed5c4u);
  Matrix x(n, k);
  for (int j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i, j) = static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
  }
  return x;
}

// M-orthonormalize the columns of x (two Gram-Schmidt passes), after
// removing the constant mode.
void m_orthonormalize(const DiscreteOperator& op, Matrix& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Vector v = x.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      remove_weighted_mean(op, v);
      for (Eigen::Index i = 0; i < j; ++i) {
        const Vector xi = x.col(i);
        v -= op.inner(xi, v) * xi;
      }
    }
    const double nrm = std::sqrt(op.inner(v, v));
    if (!(nrm > 0.0)) throw SolverError("eigen iteration: block lost rank", {});
    x.col(j) = v / nrm;
  }
}

}  // namespace

PoissonSolution solve_poisson(const DiscreteOperator& op, const Vector& rhs,
                              const SolverOptions& opts) {
  return solve_poisson_from(op, rhs, Vector::Zero(op.size()), opts);
}

EigenPair lambda_1(const DiscreteOperator& op, const SolverOptions& opts) {
  const Eigen::Index n = op.size();
  const int k = static_cast<int>(std::min<Eigen::Index>(opts.eig_block, n - 1));
  if (k < 1) throw DomainError("lambda_1: operator too small");

  Matrix x = start_block(n, k);
  m_orthonormalize(op, x);
  Vector ritz = Vector::Zero(k);

  EigenPair out;
  double theta_prev = 0.0;
  for (int outer = 1; outer <= opts.eig_max_outer; ++outer) {
    // Shift-invert step on the constant-free subspace: L y = M x.
    // The k solves are independent; each runs on its own thread, so the
    // result does not depend on scheduling.
    Matrix y(n, k);
    std::vector<int> iterations(k, 0);
    std::vector<std::exception_ptr> failures(k);
    auto solve_column = [&](int j) {
      try {
        // Once Ritz values exist, x_j / theta_j is close to the solution.
        const Vector guess = ritz(j) > 0.0 ? Vector(x.col(j) / ritz(j)) : Vector::Zero(n);
        PoissonSolution s = solve_poisson_from(op, -x.col(j), guess, opts);
        y.col(j) = s.f;
        iterations[j] = s.iterations;
      } catch (...) {
        failures[j] = std::current_exception();
      }
    };
    std::vector<std::thread> workers;
    for (int j = 1; j < k; ++j) workers.emplace_back(solve_column, j);
    solve_column(0);
    for (auto& w : workers) w.join();
    for (int j = 0; j < k; ++j) {
      if (failures[j]) std::rethrow_exception(failures[j]);
      out.inner_iterations += iterations[j];
    }
    m_orthonormalize(op, y);

    // Rayleigh-Ritz on span(y); y is M-orthonormal so the projected mass is I.
    Matrix ly(n, k);
    for (int j = 0; j < k; ++j) ly.col(j) = op.stiffness * y.col(j);
    const Matrix small = symmetrized(y.transpose() * ly);
    Eigen::SelfAdjointEigenSolver<Matrix> es(small);
    x = y * es.eigenvectors();
    ritz = es.eigenvalues();
    const double theta = es.eigenvalues()(0);
    out.outer_iterations = outer;
    if (outer > 1 && std::abs(theta - theta_prev) <= opts.eig_tolerance * std::abs(theta)) break;
    theta_prev = theta;
  }
  Vector f = x.col(0);
  remove_weighted_mean(op, f);
  f /= std::sqrt(op.inner(f, f));
  out.eigenfunction = std::move(f);
  out.lambda1 = rayleigh_quotient(op, out.eigenfunction);
  if (!(out.lambda1 > 1e-10)) {
    throw SolverError("lambda_1: near-zero eigenvalue (disconnected or degenerate discretization)",
                      {out.lambda1});
  }
  return out;
}

}  // namespace schur

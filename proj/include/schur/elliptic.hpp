#pragma once

// Solvers over a weak-form Laplacian pair (L, M).
//
// Sign convention, shared by every backend and report: Delta = div grad, so
// Delta is negative semidefinite and the stiffness matrix L is its positive
// weak form, f^T L f ~ int |grad f|^2 = -int f Delta f. A strong equation
// Delta f = h is therefore solved as L f = -M h.

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "schur/tensor_core.hpp"

namespace schur {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct DiscreteOperator {
  SparseMatrix stiffness;
  Vector weights;  // lumped mass / volume weights, all > 0
  std::vector<std::string> warnings;

  Eigen::Index size() const { return weights.size(); }
  double total_weight() const { return weights.sum(); }

  // Throws DomainError if L is not symmetric (1e-12 relative), L*1 != 0
  // (1e-10 relative) or some weight is not positive.
  void validate() const;

  // f^T L f.
  double energy(const Vector& f) const;
  // sum_i M_i a_i b_i
  double inner(const Vector& a, const Vector& b) const;
  double weighted_mean(const Vector& f) const;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverOptions {
  double cg_tolerance = 1e-10;
  // Max CG iterations is cg_iteration_factor * sqrt(N).
  double cg_iteration_factor = 50.0;
  bool jacobi = false;
  double eig_tolerance = 1e-10;
  int eig_max_outer = 200;
  int eig_block = 4;
  double rhs_mean_tolerance = 1e-8;
};

struct PoissonSolution {
  Vector f;
  double relative_residual = 0.0;
  int iterations = 0;
};

// Solves Delta f = rhs with M-weighted mean of f equal to zero.
PoissonSolution solve_poisson(const DiscreteOperator& op, const Vector& rhs,
                              const SolverOptions& opts = {});

struct EigenPair {
  double lambda1 = 0.0;
  Vector eigenfunction;  // M-mean zero, M-normalized
  int outer_iterations = 0;
  int inner_iterations = 0;
};

// Smallest nonzero generalized eigenvalue of L f = lambda M f.
EigenPair lambda_1(const DiscreteOperator& op, const SolverOptions& opts = {});

// Energy-to-mass ratio f^T L f / f^T M f.
double rayleigh_quotient(const DiscreteOperator& op, const Vector& f);

}  // namespace schur

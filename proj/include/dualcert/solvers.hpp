#pragma once

#include "dualcert/ensembles.hpp"
#include "dualcert/models.hpp"
#include "dualcert/types.hpp"

namespace dualcert {

struct SolverOptions {
  double rho = 1.0;  // splitting penalty
  int max_iterations = 10000;
  double eps_abs = 1e-9;
  double eps_rel = 1e-9;
};

struct Solution {
  VectorXd x_hat;
  int iterations = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double objective = 0;  // primal_norm(x_hat)
  bool converged = false;
};

/// Proximal operator argmin_z (1/2)||z - v||^2 + kappa * ||z|| of the given
/// norm: entrywise soft-threshold, blockwise shrink, or singular-value
/// soft-threshold. Requires kappa > 0.
VectorXd prox(const NormSpec& spec, const VectorXd& v, double kappa);

/// Solves min ||x|| subject to Phi x = b by two-block operator splitting:
/// alternating projection onto the affine feasible set (via a precomputed
/// Cholesky factorization of Phi Phi*) and the norm prox, with a scaled dual
/// update. Non-convergence is reported through Solution::converged, not an
/// exception; a singular Phi Phi* throws StructuralError.
Solution solve_min_norm(const MeasurementMap& map, const VectorXd& b,
                        const NormSpec& spec, const SolverOptions& opts = {});

/// True iff ||x_hat - x0|| / ||x0|| <= threshold. x0 must be nonzero.
bool recovery_success(const VectorXd& x_hat, const VectorXd& x0,
                      double threshold = 1e-4);

}  // namespace dualcert

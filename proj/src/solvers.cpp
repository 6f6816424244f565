#include "dualcert/solvers.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace dualcert {

namespace {

VectorXd prox_l1(const VectorXd& v, double kappa) {
  return v.unaryExpr([kappa](double t) {
    const double mag = std::abs(t) - kappa;
    return mag > 0.0 ? (t > 0.0 ? mag : -mag) : 0.0;
  });
}

VectorXd prox_block(const VectorXd& v, double kappa, Index block_size) {
  VectorXd out(v.size());
  for (Index b = 0; b < v.size(); b += block_size) {
    const auto blk = v.segment(b, block_size);
    const double nrm = blk.norm();
    const double scale = nrm > kappa ? 1.0 - kappa / nrm : 0.0;
    out.segment(b, block_size) = scale * blk;
  }
  return out;
}

VectorXd prox_nuclear(const VectorXd& v, double kappa,
                      const AmbientShape& shape) {
  const auto Z =
      Eigen::Map<const MatrixXd>(v.data(), shape.rows(), shape.cols());
  Eigen::JacobiSVD<MatrixXd> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXd sv = svd.singularValues();
  for (Index i = 0; i < sv.size(); ++i) sv(i) = std::max(sv(i) - kappa, 0.0);
  const MatrixXd out = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
  return Eigen::Map<const VectorXd>(out.data(), out.size());
}

}  // namespace

VectorXd prox(const NormSpec& spec, const VectorXd& v, double kappa) {
  if (!(kappa > 0.0)) throw std::domain_error("prox step kappa must be positive");
  if (v.size() != spec.shape.size())
    throw std::invalid_argument("element does not match the norm's shape");
  switch (spec.kind) {
    case ModelKind::sparse:
      return prox_l1(v, kappa);
    case ModelKind::block:
      if (spec.block_size < 1 || v.size() % spec.block_size != 0)
        throw std::invalid_argument("block size must divide the dimension");
      return prox_block(v, kappa, spec.block_size);
    case ModelKind::lowrank:
      return prox_nuclear(v, kappa, spec.shape);
  }
  throw std::logic_error("unreachable");
}

Solution solve_min_norm(const MeasurementMap& map, const VectorXd& b,
                        const NormSpec& spec, const SolverOptions& opts) {
  if (b.size() != map.rows())
    throw std::invalid_argument("b length must equal the row count m");
  if (spec.shape != map.shape())
    throw std::invalid_argument("norm and map ambient shapes differ");
  if (!(opts.rho > 0.0)) throw std::domain_error("rho must be positive");
  if (opts.max_iterations < 1)
    throw std::domain_error("max_iterations must be positive");
  if (!(opts.eps_abs > 0.0) || !(opts.eps_rel > 0.0))
    throw std::domain_error("tolerances must be positive");

  const auto& A = map.entries();
  const Index m = map.rows();
  const Index N = map.shape().size();

  const MatrixXd AAt = A * A.transpose();
  Eigen::LLT<MatrixXd> llt(AAt);
  if (llt.info() != Eigen::Success)
    throw StructuralError("Phi Phi* is singular to working precision");
  {
    const VectorXd diag = llt.matrixLLT().diagonal();
    if (diag.minCoeff() <= 1e-13 * diag.maxCoeff())
      throw StructuralError("Phi Phi* is singular to working precision");
  }

  // Projection onto {x : Phi x = b}.
  const auto project_affine = [&](const VectorXd& v) -> VectorXd {
    return v - A.transpose() * llt.solve(A * v - b);
  };

  const double kappa = 1.0 / opts.rho;
  const double sqrt_N = std::sqrt(static_cast<double>(N));
  VectorXd z = VectorXd::Zero(N);
  VectorXd u = VectorXd::Zero(N);
  VectorXd x = VectorXd::Zero(N);

  Solution sol;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    x = project_affine(z - u);
    const VectorXd z_prev = z;
    z = prox(spec, x + u, kappa);
    u += x - z;

    sol.iterations = it;
    sol.primal_residual = (x - z).norm();
    sol.dual_residual = opts.rho * (z - z_prev).norm();
    const double tol =
        opts.eps_abs * sqrt_N + opts.eps_rel * std::max(x.norm(), z.norm());
    if (sol.primal_residual <= tol && sol.dual_residual <= tol) {
      sol.converged = true;
      break;
    }
  }

  sol.x_hat = x;  // the affine-projected iterate is feasible by construction
  sol.objective = primal_norm(spec, x);
  return sol;
}

bool recovery_success(const VectorXd& x_hat, const VectorXd& x0,
                      double threshold) {
  if (x_hat.size() != x0.size())
    throw std::invalid_argument("shapes differ");
  const double ref = x0.norm();
  if (ref == 0.0) throw std::domain_error("x0 must be nonzero");
  return (x_hat - x0).norm() / ref <= threshold;
}

}  // namespace dualcert

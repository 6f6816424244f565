#include "dualcert/certificate.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dualcert/rng.hpp"

namespace dualcert {

namespace {

constexpr double kInjectivityRel = 1e-8;
constexpr double kCgRelResidual = 1e-12;

using LinearOp = std::function<VectorXd(const VectorXd&)>;

// Conjugate gradients for a symmetric positive definite operator. Returns
// the solution of op(w) = rhs to relative residual tol.
VectorXd conjugate_gradient(const LinearOp& op, const VectorXd& rhs,
                            double tol, Index max_iters) {
  VectorXd w = rhs;  // the Gram operator is close to the identity on T
  VectorXd residual = rhs - op(w);
  VectorXd direction = residual;
  double rho = residual.squaredNorm();
  const double stop = tol * rhs.norm();
  for (Index it = 0; it < max_iters; ++it) {
    if (std::sqrt(rho) <= stop) return w;
    const VectorXd opd = op(direction);
    const double alpha = rho / direction.dot(opd);
    w += alpha * direction;
    residual -= alpha * opd;
    const double rho_next = residual.squaredNorm();
    direction = residual + (rho_next / rho) * direction;
    rho = rho_next;
  }
  if (std::sqrt(rho) <= stop) return w;
  throw IllConditionedError(
      "Gram system did not reach the target residual; the restricted map is "
      "numerically singular",
      0.0, 1.0);
}

// Lanczos with full reorthogonalization; returns the extreme eigenvalues of
// the symmetric operator restricted to the subspace containing the start
// vector. Extreme Ritz values converge long before the subspace is exhausted.
std::pair<double, double> lanczos_extremes(const LinearOp& op,
                                           const VectorXd& start,
                                           Index max_steps) {
  std::vector<VectorXd> basis;
  std::vector<double> alpha, beta;
  VectorXd v = start / start.norm();
  basis.push_back(v);
  double lo_prev = 0, hi_prev = 0;
  Index stable = 0;

  for (Index k = 0; k < max_steps; ++k) {
    VectorXd w = op(basis[k]);
    const double a = basis[k].dot(w);
    alpha.push_back(a);
    w -= a * basis[k];
    if (k > 0) w -= beta[k - 1] * basis[k - 1];
    for (const auto& b : basis) w -= b.dot(w) * b;  // reorthogonalize
    const double bnorm = w.norm();

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (Index i = 0; i <= k; ++i) tri(i, i) = alpha[i];
    for (Index i = 0; i + 1 <= k; ++i) {
      tri(i, i + 1) = beta[i];
      tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(k);

    if (k > 0) {
      const double scale = std::max(std::abs(hi), 1e-300);
      if (std::abs(lo - lo_prev) <= 1e-10 * scale &&
          std::abs(hi - hi_prev) <= 1e-10 * scale) {
        if (++stable >= 3) return {lo, hi};
      } else {
        stable = 0;
      }
    }
    lo_prev = lo;
    hi_prev = hi;

    if (bnorm <= 1e-13 * std::abs(hi)) return {lo, hi};  // subspace exhausted
    beta.push_back(bnorm);
    basis.push_back(w / bnorm);
  }
  return {lo_prev, hi_prev};
}

DualCertificate build_coordinate_path(const MeasurementMap& map,
                                      const ModelStructure& model) {
  const auto& coords = model.coordinates_T();
  const Index d_T = model.dim_T();
  MatrixXd phi_T(map.rows(), d_T);
  VectorXd e_T(d_T);
  for (Index j = 0; j < d_T; ++j) {
    phi_T.col(j) = map.entries().col(coords[static_cast<size_t>(j)]);
    e_T(j) = model.e()(coords[static_cast<size_t>(j)]);
  }

  const MatrixXd gram = phi_T.transpose() * phi_T;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  const double lo = std::max(es.eigenvalues()(0), 0.0);
  const double hi = std::max(es.eigenvalues()(d_T - 1), 0.0);
  const double sigma_min = std::sqrt(lo);
  const double sigma_max = std::sqrt(hi);
  if (!(sigma_min > kInjectivityRel * sigma_max))
    throw IllConditionedError(
        "restricted map is numerically singular on T", sigma_min, sigma_max);

  const VectorXd w = gram.llt().solve(e_T);
  DualCertificate cert;
  cert.q = phi_T * w;
  cert.sigma_min_T = sigma_min;
  cert.sigma_max_T = sigma_max;
  return cert;
}

DualCertificate build_operator_path(const MeasurementMap& map,
                                    const ModelStructure& model) {
  // Phi_T realized as apply-then-project; Gram = P_T Phi* Phi restricted to T.
  const LinearOp gram_op = [&](const VectorXd& w) {
    return model.project_T(map.adjoint(map.apply(w)));
  };
  const Index d_T = model.dim_T();

  rng::Stream stream(rng::mix(map.seed(), 0x4C414E43ULL));
  VectorXd start(model.ambient().size());
  for (Index i = 0; i < start.size(); ++i) start(i) = stream.next_normal();
  start = model.project_T(start);
  const auto [lo, hi] =
      lanczos_extremes(gram_op, start, std::min<Index>(d_T, 120));
  const double sigma_min = std::sqrt(std::max(lo, 0.0));
  const double sigma_max = std::sqrt(std::max(hi, 0.0));
  if (!(sigma_min > kInjectivityRel * sigma_max))
    throw IllConditionedError(
        "restricted map is numerically singular on T", sigma_min, sigma_max);

  const VectorXd w = conjugate_gradient(gram_op, model.e(), kCgRelResidual,
                                        10 * d_T + 100);
  DualCertificate cert;
  cert.q = map.apply(w);
  cert.sigma_min_T = sigma_min;
  cert.sigma_max_T = sigma_max;
  return cert;
}

}  // namespace

DualCertificate construct_multiplier(const MeasurementMap& map,
                                     const ModelStructure& model) {
  if (map.shape() != model.ambient())
    throw std::invalid_argument("map and model ambient shapes differ");
  if (map.rows() < model.dim_T())
    throw StructuralError("m < dim(T): certificate impossible");

  DualCertificate cert = model.kind() == ModelKind::lowrank
                             ? build_operator_path(map, model)
                             : build_coordinate_path(map, model);
  cert.dim_T = model.dim_T();
  cert.q_norm = cert.q.norm();
  cert.y = map.adjoint(cert.q);
  cert.residual_T = (model.project_T(cert.y) - model.e()).norm();
  cert.offT_dual_norm = model.dual_norm_offT(cert.y);
  return cert;
}

Verdict certify(const DualCertificate& cert, const CertifyTolerances& tol) {
  Verdict v;
  v.margin = 1.0 - cert.offT_dual_norm;
  if (!(cert.sigma_min_T > tol.injectivity_rel * cert.sigma_max_T) ||
      !(cert.sigma_min_T > 0)) {
    v.reason = CertReason::not_injective;
    return v;
  }
  if (!(cert.offT_dual_norm < 1.0)) {  // strict, no epsilon slack
    v.reason = CertReason::dual_norm_ge_one;
    return v;
  }
  const double residual_tol =
      tol.residual_scale * std::sqrt(static_cast<double>(cert.dim_T));
  if (!(cert.residual_T <= residual_tol)) {
    v.reason = CertReason::ill_conditioned;
    return v;
  }
  v.certified = true;
  v.reason = CertReason::ok;
  return v;
}

std::vector<double> q_squared_distribution_probe(Index m, Index d_T,
                                                 Index trials,
                                                 std::uint64_t seed) {
  if (d_T < 1) throw std::invalid_argument("d_T must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (m < d_T) throw StructuralError("m < dim(T): certificate impossible");

  // A full support in dimension d_T makes ||q||^2/||e||^2 depend only on
  // (m, d_T), matching the inverse chi-square law.
  const ModelStructure model = ModelStructure::sparse(VectorXd::Ones(d_T));
  std::vector<double> samples;
  samples.reserve(static_cast<size_t>(trials));
  for (Index t = 0; t < trials; ++t) {
    const MeasurementMap map(MeasurementMap::Kind::gaussian,
                             AmbientShape::vector(d_T), m,
                             rng::mix(seed, static_cast<std::uint64_t>(t)));
    const DualCertificate cert = construct_multiplier(map, model);
    samples.push_back(cert.q_norm * cert.q_norm /
                      static_cast<double>(d_T));
  }
  return samples;
}

}  // namespace dualcert

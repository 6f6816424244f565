#pragma once

#include <cstdint>
#include <vector>

#include "dualcert/ensembles.hpp"
#include "dualcert/models.hpp"
#include "dualcert/types.hpp"

namespace dualcert {

/// The least-squares dual multiplier q = Phi_T (Phi_T* Phi_T)^-1 e together
/// with y = Phi* q and its diagnostics.
struct DualCertificate {
  VectorXd q;             // length m
  VectorXd y;             // ambient, = adjoint(map, q)
  double residual_T = 0;  // || project_T(y) - e ||_2
  double offT_dual_norm = 0;
  double sigma_min_T = 0;  // extreme singular values of Phi restricted to T
  double sigma_max_T = 0;
  double q_norm = 0;
  Index dim_T = 0;
};

enum class CertReason { ok, not_injective, dual_norm_ge_one, ill_conditioned };

inline const char* to_string(CertReason r) {
  switch (r) {
    case CertReason::ok: return "ok";
    case CertReason::not_injective: return "not_injective";
    case CertReason::dual_norm_ge_one: return "dual_norm_ge_one";
    case CertReason::ill_conditioned: return "ill_conditioned";
  }
  return "?";
}

struct Verdict {
  bool certified = false;
  CertReason reason = CertReason::ok;
  double margin = 0;  // 1 - offT_dual_norm
};

struct CertifyTolerances {
  double injectivity_rel = 1e-8;  // require sigma_min > rel * sigma_max
  double residual_scale = 1e-8;   // require residual_T <= scale * sqrt(d_T)
};

/// Builds the least-squares multiplier for (map, model).
///
/// Sparse and block models restrict the map to the coordinates of T and
/// solve the d_T x d_T Gram system by Cholesky. Lowrank models keep Phi_T
/// operator-style (apply, then project onto T) and solve the Gram system by
/// conjugate gradients to relative residual 1e-12; the extreme singular
/// values are then Lanczos estimates.
///
/// Throws StructuralError if m < d_T and IllConditionedError if
/// sigma_min <= 1e-8 * sigma_max.
DualCertificate construct_multiplier(const MeasurementMap& map,
                                     const ModelStructure& model);

/// Applies the uniqueness test to a constructed certificate. The dual-norm
/// condition is strict: offT_dual_norm = 1 - 1e-12 certifies, 1.0 does not.
Verdict certify(const DualCertificate& cert, const CertifyTolerances& tol = {});

/// Draws `trials` independent samples of ||q||^2 / ||e||^2 from fresh
/// Gaussian maps with a full d_T-dimensional support, for comparison against
/// the m / chi^2_(m - d_T + 1) law. Deterministic in (seed, trial index).
std::vector<double> q_squared_distribution_probe(Index m, Index d_T,
                                                 Index trials,
                                                 std::uint64_t seed);

}  // namespace dualcert

#pragma once

#include <limits>
#include <string>

#include "dualcert/types.hpp"

// Closed-form sample thresholds and success-probability lower bounds for the
// three model classes, plus the supporting tail inequalities. All logarithms
// are natural; the tail algebra only closes in base e.

namespace dualcert::bounds {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// A theorem's sample threshold and success-probability lower bound at the
/// given parameters. Vacuous bounds (<= 0) are reported as-is and flagged.
struct BoundReport {
  ModelKind model = ModelKind::sparse;
  bool sign_ensemble = false;
  double beta = kNaN;
  Index m_threshold = 0;
  double success_prob_lower = kNaN;
  bool vacuous = false;
  bool degenerate = false;  // threshold at or above the ambient dimension
  bool gate_ok = true;      // sign-ensemble size gate n >= exp(c0/eps^2)
  double t = kNaN;          // equalizing tail split point, where defined
  double tau = kNaN;        // q-norm conditioning radius at m_threshold
  std::string notes;
};

/// Tail exponent f(beta, s) of the sparse Gaussian bound; increasing in s,
/// with limit beta - 1 as s -> infinity. Requires beta > 1, s >= 1.
double f_exponent(double beta, double s);

/// The split point t that equalizes the union-bound and q-norm tail terms of
/// the sparse chain. Requires beta > 1, s >= 1, n >= 1.
double sparse_t_choice(double beta, double s, double n);

/// Sparse Gaussian: m >= ceil(2 beta s ln n + s), success prob at least
/// 1 - 2 n^(-f(beta, s)).
BoundReport sparse_gaussian_bound(double beta, Index s, Index n);

/// Union-bound term n exp(-m / (2 tau^2)), clipped at 1.
double sparse_conditional_term(Index n, Index s, double m, double tau);

struct QNormTail {
  double probability;    // exp(-t^2 / (4 (m - d_T + 1)))
  double radius_factor;  // sqrt(m / (m - d_T + 1 - t)); times ||e|| = radius
};

/// Tail bound on ||q||: P[||q|| >= radius_factor * ||e||] <= probability.
/// Requires m >= d_T and 0 < t < m - d_T + 1.
QNormTail q_norm_tail(double m, double d_T, double t);

/// Success lower bound 1 - conditional_term - q_norm_tail(m, d_T, t).
double generic_failure(double m, double d_T, double t, double conditional_term);

/// The sparse derivation audit: at the real-valued m = 2 beta s ln n + s and
/// the equalizing t, the union-bound term and the q-norm tail coincide with
/// n^(-f(beta, s)) exactly. The terms here use m - s degrees of freedom (the
/// convention under which the equalization is an identity; the reporting
/// forms above keep the +1 and are conservative upper bounds).
struct SparseDerivationTerms {
  double m_real;
  double t;
  double union_term;
  double q_tail_term;
  double target;  // n^(-f(beta, s))
};
SparseDerivationTerms sparse_derivation_terms(double beta, double s, double n);

/// Block Gaussian: m >= ceil((1+beta) k (sqrt(B) + sqrt(2 ln M))^2 + k B),
/// success prob at least 1 - M^(-beta/4) - M^(-beta^2/(8+8 beta)).
/// The note records that the failure sum is reported as a success complement
/// and that the threshold uses >= with ceiling.
BoundReport block_gaussian_bound(double beta, Index k, Index B, Index M);

/// The split point t = (beta/2) k (sqrt(B) + sqrt(2 ln M))^2.
double block_t_choice(double beta, Index k, Index B, Index M);

struct BlockFailureTerms {
  double union_term;  // M exp(-[sqrt((m-kB+1-t)/k) - sqrt(B)]^2 / 2)
  double q_tail;      // exp(-t^2 / (4 (m - kB + 1)))
  double total;
  bool bracket_valid;  // union term requires sqrt((m-kB+1-t)/k) >= sqrt(B)
};

/// Raw two-term failure expression at arbitrary (m, t); the union term is
/// clipped to 1 when its bracket is negative (the inequality needs a
/// nonnegative deviation).
BlockFailureTerms block_failure_terms(double m, double t, Index k, Index B,
                                      Index M);

/// Lowrank Gaussian: m >= ceil(beta r (3 n1 + 3 n2 - 5 r)), success prob at
/// least 1 - 2 exp((1 - beta) max(n1, n2) / 8).
BoundReport lowrank_gaussian_bound(double beta, Index r, Index n1, Index n2);

/// The split point t = (sqrt(2r+1) - 1)(beta - 1)(3 n1 + 3 n2 - 5 r).
double lowrank_t_choice(double beta, Index r, Index n1, Index n2);

/// Spectral-norm conditional term
/// exp(-(sqrt(m)/tau - sqrt(n1-r) - sqrt(n2-r))^2 / 2), clipped to 1 when
/// the deviation is negative.
double lowrank_conditional_term(double m, double tau, Index r, Index n1,
                                Index n2);

/// Sign-ensemble sparse: m >= ceil(2 beta (1-eps)^-2 s ln n + s), success
/// prob at least 1 - n^(1-beta) - n^(-c1 beta eps^2). The constants c0, c1
/// are caller-supplied (the theory asserts existence, not values); the
/// report flags whether the size gate n >= exp(c0 / eps^2) holds.
BoundReport bernoulli_sparse_bound(double beta, double eps, Index s, Index n,
                                   double c0, double c1);

/// Sign-ensemble block: m >= ceil(4 k beta (1-eps)^-2 ln M + 2 k B), success
/// prob at least 1 - M^(1-beta) - M^(-c1 beta eps^2), gate M >= exp(c0/eps^2).
BoundReport bernoulli_block_bound(double beta, double eps, Index k, Index B,
                                  Index M, double c0, double c1);

// Supporting tail inequalities, exposed as standalone evaluators.

struct TailBound {
  double threshold;    // the deviation level the event compares against
  double probability;  // the bound's right-hand side
};

/// P(sqrt(chi^2_B) >= sqrt(B) + t) <= exp(-t^2/2), t >= 0.
TailBound borell_sqrt_chi_tail(double B, double t);

/// P(sigma_min(Phi_T) <= 1 - theta sqrt(d_T/m) - t) <= exp(-gamma m t^2).
/// theta, gamma are caller-supplied; illustrative defaults are theta = 1,
/// gamma = 1/16.
TailBound vershynin_sigma_min_tail(double theta, double gamma, double d_T,
                                   double m, double t);

/// P(||M v|| >= 1) <= exp(-(||v||^-2 - d1) / 4) for a d1 x d2 sign matrix,
/// valid when ||v|| <= sqrt(d1).
double achlioptas_tail(double v_norm, double d1);

}  // namespace dualcert::bounds

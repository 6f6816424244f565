#include "dualcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dualcert::bounds {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

Index ceil_to_index(double x) {
  return static_cast<Index>(std::ceil(x - 1e-12));
}

}  // namespace

double f_exponent(double beta, double s) {
  require(beta > 1.0, "beta must exceed 1");
  require(s >= 1.0, "s must be at least 1");
  const double base = beta / (2.0 * s);
  const double d = std::sqrt(base + beta - 1.0) - std::sqrt(base);
  return d * d;
}

double sparse_t_choice(double beta, double s, double n) {
  require(beta > 1.0, "beta must exceed 1");
  require(s >= 1.0, "s must be at least 1");
  require(n >= 1.0, "n must be at least 1");
  return 2.0 * beta * std::log(n) *
         (std::sqrt(1.0 + 2.0 * s * (beta - 1.0) / beta) - 1.0);
}

BoundReport sparse_gaussian_bound(double beta, Index s, Index n) {
  require(s >= 1 && s <= n, "need 1 <= s <= n");
  const double f = f_exponent(beta, static_cast<double>(s));
  const double logn = std::log(static_cast<double>(n));

  BoundReport r;
  r.model = ModelKind::sparse;
  r.beta = beta;
  r.m_threshold = ceil_to_index(2.0 * beta * s * logn + s);
  r.success_prob_lower = 1.0 - 2.0 * std::pow(static_cast<double>(n), -f);
  r.vacuous = r.success_prob_lower <= 0.0;
  r.t = sparse_t_choice(beta, static_cast<double>(s), static_cast<double>(n));
  r.tau = std::sqrt(static_cast<double>(r.m_threshold) * s /
                    (r.m_threshold - s + 1 - r.t));
  r.notes = "l1/gaussian: m >= ceil(2 beta s ln n + s), success >= 1 - 2 n^-f";
  if (r.m_threshold >= n) {
    r.degenerate = true;
    r.notes += "; degenerate: threshold at or above the ambient dimension";
  }
  if (r.vacuous) r.notes += "; vacuous at these parameters";
  return r;
}

double sparse_conditional_term(Index n, Index s, double m, double tau) {
  require(n >= 1 && s >= 1 && s <= n, "need 1 <= s <= n");
  require(m > 0.0, "m must be positive");
  require(tau > 0.0, "tau must be positive");
  const double term =
      static_cast<double>(n) * std::exp(-m / (2.0 * tau * tau));
  return std::min(term, 1.0);
}

QNormTail q_norm_tail(double m, double d_T, double t) {
  require(d_T >= 1.0, "d_T must be at least 1");
  require(m >= d_T, "need m >= d_T");
  require(t > 0.0, "t must be positive");
  require(t < m - d_T + 1.0, "conditioning radius undefined: need t < m - d_T + 1");
  QNormTail out;
  out.probability = std::exp(-t * t / (4.0 * (m - d_T + 1.0)));
  out.radius_factor = std::sqrt(m / (m - d_T + 1.0 - t));
  return out;
}

double generic_failure(double m, double d_T, double t,
                       double conditional_term) {
  require(conditional_term >= 0.0 && conditional_term <= 1.0,
          "conditional term must lie in [0, 1]");
  return 1.0 - conditional_term - q_norm_tail(m, d_T, t).probability;
}

SparseDerivationTerms sparse_derivation_terms(double beta, double s,
                                              double n) {
  require(n >= 2.0, "n must be at least 2");
  SparseDerivationTerms out;
  out.m_real = 2.0 * beta * s * std::log(n) + s;
  out.t = sparse_t_choice(beta, s, n);
  // Equalized convention: m - s degrees of freedom, real-valued m.
  const double df = out.m_real - s;
  out.union_term = n * std::exp(-(df - out.t) / (2.0 * s));
  out.q_tail_term = std::exp(-out.t * out.t / (4.0 * df));
  out.target = std::pow(n, -f_exponent(beta, s));
  return out;
}

double block_t_choice(double beta, Index k, Index B, Index M) {
  require(beta > 0.0, "beta must be positive");
  require(k >= 1 && k <= M && B >= 1, "need 1 <= k <= M and B >= 1");
  const double w = std::sqrt(static_cast<double>(B)) +
                   std::sqrt(2.0 * std::log(static_cast<double>(M)));
  return (beta / 2.0) * k * w * w;
}

BlockFailureTerms block_failure_terms(double m, double t, Index k, Index B,
                                      Index M) {
  require(k >= 1 && k <= M && B >= 1, "need 1 <= k <= M and B >= 1");
  require(t > 0.0, "t must be positive");
  const double d_T = static_cast<double>(k * B);
  require(m >= d_T, "need m >= k B");
  require(t < m - d_T + 1.0, "conditioning radius undefined: need t < m - kB + 1");

  BlockFailureTerms out;
  const double dev =
      std::sqrt((m - d_T + 1.0 - t) / k) - std::sqrt(static_cast<double>(B));
  out.bracket_valid = dev >= 0.0;
  out.union_term =
      out.bracket_valid
          ? std::min(1.0, M * std::exp(-0.5 * dev * dev))
          : 1.0;  // the deviation bound needs a nonnegative level
  out.q_tail = std::exp(-t * t / (4.0 * (m - d_T + 1.0)));
  out.total = out.union_term + out.q_tail;
  return out;
}

BoundReport block_gaussian_bound(double beta, Index k, Index B, Index M) {
  require(beta > 0.0, "beta must be positive");
  require(k >= 1 && k <= M && B >= 1, "need 1 <= k <= M and B >= 1");
  const double w = std::sqrt(static_cast<double>(B)) +
                   std::sqrt(2.0 * std::log(static_cast<double>(M)));

  BoundReport r;
  r.model = ModelKind::block;
  r.beta = beta;
  r.m_threshold =
      ceil_to_index((1.0 + beta) * k * w * w + static_cast<double>(k * B));
  const double mm = static_cast<double>(M);
  r.success_prob_lower = 1.0 - std::pow(mm, -beta / 4.0) -
                         std::pow(mm, -beta * beta / (8.0 + 8.0 * beta));
  r.vacuous = r.success_prob_lower <= 0.0;
  r.t = block_t_choice(beta, k, B, M);
  r.tau = std::sqrt(static_cast<double>(r.m_threshold) * k /
                    (r.m_threshold - k * B + 1 - r.t));
  r.notes =
      "l1l2/gaussian: m >= ceil((1+beta) k (sqrt(B)+sqrt(2 ln M))^2 + kB); "
      "success reported as the complement of the two-term failure sum; "
      "threshold uses >= with ceiling";
  if (r.vacuous) r.notes += "; vacuous at these parameters";
  return r;
}

double lowrank_t_choice(double beta, Index r, Index n1, Index n2) {
  require(beta > 1.0, "beta must exceed 1");
  require(r >= 1 && r <= std::min(n1, n2), "need 1 <= r <= min(n1, n2)");
  return (std::sqrt(2.0 * r + 1.0) - 1.0) * (beta - 1.0) *
         (3.0 * n1 + 3.0 * n2 - 5.0 * r);
}

double lowrank_conditional_term(double m, double tau, Index r, Index n1,
                                Index n2) {
  require(r >= 1 && r <= std::min(n1, n2), "need 1 <= r <= min(n1, n2)");
  require(m > 0.0 && tau > 0.0, "m and tau must be positive");
  const double dev = std::sqrt(m) / tau - std::sqrt(static_cast<double>(n1 - r)) -
                     std::sqrt(static_cast<double>(n2 - r));
  if (dev < 0.0) return 1.0;
  return std::exp(-0.5 * dev * dev);
}

BoundReport lowrank_gaussian_bound(double beta, Index r, Index n1, Index n2) {
  require(beta > 1.0, "beta must exceed 1");
  require(r >= 1 && r <= std::min(n1, n2), "need 1 <= r <= min(n1, n2)");

  BoundReport out;
  out.model = ModelKind::lowrank;
  out.beta = beta;
  out.m_threshold = ceil_to_index(beta * r * (3.0 * n1 + 3.0 * n2 - 5.0 * r));
  const double n = static_cast<double>(std::max(n1, n2));
  out.success_prob_lower = 1.0 - 2.0 * std::exp((1.0 - beta) * n / 8.0);
  out.vacuous = out.success_prob_lower <= 0.0;
  out.t = lowrank_t_choice(beta, r, n1, n2);
  const double d_T = static_cast<double>(r * (n1 + n2 - r));
  out.tau = std::sqrt(static_cast<double>(out.m_threshold) * r /
                      (out.m_threshold - d_T + 1 - out.t));
  out.notes =
      "nuclear/gaussian: m >= ceil(beta r (3 n1 + 3 n2 - 5 r)), success >= "
      "1 - 2 exp((1-beta) max(n1,n2) / 8)";
  if (out.vacuous) out.notes += "; vacuous at these parameters";
  return out;
}

namespace {

BoundReport bernoulli_common(ModelKind model, double beta, double eps,
                             double c0, double c1, Index gate_size,
                             double m_real) {
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  require(c0 > 0.0 && c1 > 0.0, "c0 and c1 must be positive");
  require(beta > 0.0, "beta must be positive");

  BoundReport r;
  r.model = model;
  r.sign_ensemble = true;
  r.beta = beta;
  r.m_threshold = ceil_to_index(m_real);
  const double base = static_cast<double>(gate_size);
  r.success_prob_lower = 1.0 - std::pow(base, 1.0 - beta) -
                         std::pow(base, -c1 * beta * eps * eps);
  r.vacuous = r.success_prob_lower <= 0.0;
  r.gate_ok = base >= std::exp(c0 / (eps * eps));
  r.notes = "sign ensemble; constants c0, c1 are caller-supplied";
  if (!r.gate_ok)
    r.notes += "; size gate n >= exp(c0/eps^2) FAILS at these parameters";
  if (r.vacuous) r.notes += "; vacuous at these parameters";
  return r;
}

}  // namespace

BoundReport bernoulli_sparse_bound(double beta, double eps, Index s, Index n,
                                   double c0, double c1) {
  require(s >= 1 && s <= n, "need 1 <= s <= n");
  const double m_real = 2.0 * beta / ((1.0 - eps) * (1.0 - eps)) * s *
                            std::log(static_cast<double>(n)) +
                        s;
  return bernoulli_common(ModelKind::sparse, beta, eps, c0, c1, n, m_real);
}

BoundReport bernoulli_block_bound(double beta, double eps, Index k, Index B,
                                  Index M, double c0, double c1) {
  require(k >= 1 && k <= M && B >= 1, "need 1 <= k <= M and B >= 1");
  const double m_real = 4.0 * k * beta / ((1.0 - eps) * (1.0 - eps)) *
                            std::log(static_cast<double>(M)) +
                        2.0 * k * B;
  BoundReport r =
      bernoulli_common(ModelKind::block, beta, eps, c0, c1, M, m_real);
  return r;
}

TailBound borell_sqrt_chi_tail(double B, double t) {
  require(B > 0.0, "B must be positive");
  require(t >= 0.0, "t must be nonnegative");
  return {std::sqrt(B) + t, std::exp(-t * t / 2.0)};
}

TailBound vershynin_sigma_min_tail(double theta, double gamma, double d_T,
                                   double m, double t) {
  require(theta > 0.0 && gamma > 0.0, "theta and gamma must be positive");
  require(d_T >= 1.0 && m >= 1.0, "d_T and m must be at least 1");
  require(t >= 0.0, "t must be nonnegative");
  return {1.0 - theta * std::sqrt(d_T / m) - t, std::exp(-gamma * m * t * t)};
}

double achlioptas_tail(double v_norm, double d1) {
  require(v_norm > 0.0, "vector norm must be positive");
  require(d1 >= 1.0, "d1 must be at least 1");
  require(v_norm <= std::sqrt(d1), "valid only when ||v|| <= sqrt(d1)");
  return std::exp(-(1.0 / (v_norm * v_norm) - d1) / 4.0);
}

}  // namespace dualcert::bounds

#pragma once

#include <vector>

#include "dualcert/types.hpp"

namespace dualcert {

/// Identifies one of the three structured norms together with the layout
/// data needed to evaluate it: the ambient shape, and the block size for the
/// group norm. Used by the solver's prox and the norm evaluators.
struct NormSpec {
  ModelKind kind = ModelKind::sparse;
  AmbientShape shape = AmbientShape::vector(1);
  Index block_size = 1;  // only meaningful for ModelKind::block
};

/// The structured norm itself: l1, sum of block l2 norms, or nuclear.
double primal_norm(const NormSpec& spec, const VectorXd& x);

/// Its dual: l-infinity, max block l2 norm, or spectral.
double dual_norm(const NormSpec& spec, const VectorXd& x);

/// A simple object x0 with its decomposability data: the subspace T, the
/// fixed subgradient component e in T, orthogonal projections onto T and
/// T-perp, and the dual norm restricted to T-perp.
///
/// Instances are immutable; all operations are pure and thread-safe.
class ModelStructure {
 public:
  /// x0 nonzero; T is the set of nonzero coordinates, e the sign pattern.
  static ModelStructure sparse(const VectorXd& x0);

  /// x0 in R^(num_blocks * block_size), partitioned into contiguous equal
  /// blocks; T is the span of the blocks with nonzero energy and e the sum
  /// of normalized active blocks.
  static ModelStructure block(const VectorXd& x0, Index num_blocks,
                              Index block_size);

  /// X0 nonzero; rank r counts singular values above rank_rel_tol * sigma_max.
  /// T = {U Y* + X V*}, e = U V*, d_T = r (n1 + n2 - r).
  static ModelStructure lowrank(const MatrixXd& X0,
                                double rank_rel_tol = 1e-9);

  /// Column-major vectorized variant of lowrank().
  static ModelStructure lowrank_vec(const VectorXd& x0, Index n1, Index n2,
                                    double rank_rel_tol = 1e-9);

  ModelKind kind() const { return kind_; }
  const AmbientShape& ambient() const { return ambient_; }
  const VectorXd& x0() const { return x0_; }
  Index dim_T() const { return d_T_; }
  const VectorXd& e() const { return e_; }

  VectorXd project_T(const VectorXd& z) const;
  VectorXd project_Tperp(const VectorXd& z) const;

  /// Dual norm of project_Tperp(z): max off-support magnitude, max inactive
  /// block l2 norm, or the largest singular value of (I-P_U) Z (I-P_V).
  double dual_norm_offT(const VectorXd& z) const;

  /// The model's own structured norm of x (self-describing NormSpec).
  double primal_norm(const VectorXd& x) const;

  NormSpec norm_spec() const;

  /// Sparse/block: the sorted ambient coordinates spanning T.
  const std::vector<Index>& coordinates_T() const;
  /// Block only: indices of the active blocks.
  const std::vector<Index>& active_blocks() const;
  Index block_size() const { return block_size_; }
  Index num_blocks() const { return num_blocks_; }
  /// Lowrank only: orthonormal factors of the SVD of x0.
  const MatrixXd& factor_U() const;
  const MatrixXd& factor_V() const;
  Index rank() const { return rank_; }

 private:
  ModelStructure(ModelKind kind, AmbientShape ambient)
      : kind_(kind), ambient_(ambient) {}

  void check_shape(const VectorXd& z) const;

  ModelKind kind_;
  AmbientShape ambient_;
  VectorXd x0_;
  VectorXd e_;
  Index d_T_ = 0;

  // sparse / block
  std::vector<Index> coords_T_;
  std::vector<Index> active_blocks_;
  Index block_size_ = 1;
  Index num_blocks_ = 0;

  // lowrank
  MatrixXd U_, V_;       // n1 x r, n2 x r orthonormal
  MatrixXd proj_U_, proj_V_;  // cached U U*, V V*
  Index rank_ = 0;
};

}  // namespace dualcert

#include "dualcert/models.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace dualcert {

namespace {

void check_norm_shape(const NormSpec& spec, const VectorXd& x) {
  if (x.size() != spec.shape.size())
    throw std::invalid_argument("element does not match the norm's shape");
  if (spec.kind == ModelKind::block) {
    if (spec.block_size < 1 || spec.shape.size() % spec.block_size != 0)
      throw std::invalid_argument("block size must divide the dimension");
  }
}

Eigen::Map<const MatrixXd> as_matrix(const VectorXd& x,
                                     const AmbientShape& shape) {
  return Eigen::Map<const MatrixXd>(x.data(), shape.rows(), shape.cols());
}

}  // namespace

double primal_norm(const NormSpec& spec, const VectorXd& x) {
  check_norm_shape(spec, x);
  switch (spec.kind) {
    case ModelKind::sparse:
      return x.lpNorm<1>();
    case ModelKind::block: {
      double sum = 0;
      for (Index b = 0; b < x.size(); b += spec.block_size)
        sum += x.segment(b, spec.block_size).norm();
      return sum;
    }
    case ModelKind::lowrank: {
      Eigen::JacobiSVD<MatrixXd> svd(as_matrix(x, spec.shape));
      return svd.singularValues().sum();
    }
  }
  return 0;
}

double dual_norm(const NormSpec& spec, const VectorXd& x) {
  check_norm_shape(spec, x);
  switch (spec.kind) {
    case ModelKind::sparse:
      return x.lpNorm<Eigen::Infinity>();
    case ModelKind::block: {
      double best = 0;
      for (Index b = 0; b < x.size(); b += spec.block_size)
        best = std::max(best, x.segment(b, spec.block_size).norm());
      return best;
    }
    case ModelKind::lowrank: {
      Eigen::JacobiSVD<MatrixXd> svd(as_matrix(x, spec.shape));
      return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    }
  }
  return 0;
}

ModelStructure ModelStructure::sparse(const VectorXd& x0) {
  if (x0.size() < 1) throw std::invalid_argument("x0 must be nonempty");
  ModelStructure m(ModelKind::sparse, AmbientShape::vector(x0.size()));
  m.x0_ = x0;
  m.e_ = VectorXd::Zero(x0.size());
  for (Index i = 0; i < x0.size(); ++i) {
    if (x0(i) != 0.0) {
      m.coords_T_.push_back(i);
      m.e_(i) = x0(i) > 0 ? 1.0 : -1.0;
    }
  }
  if (m.coords_T_.empty()) throw std::invalid_argument("x0 must be nonzero");
  m.d_T_ = static_cast<Index>(m.coords_T_.size());
  return m;
}

ModelStructure ModelStructure::block(const VectorXd& x0, Index num_blocks,
                                     Index block_size) {
  if (num_blocks < 1 || block_size < 1)
    throw std::invalid_argument("block layout must be positive");
  if (x0.size() != num_blocks * block_size)
    throw std::invalid_argument("x0 length must equal num_blocks * block_size");
  ModelStructure m(ModelKind::block, AmbientShape::vector(x0.size()));
  m.x0_ = x0;
  m.block_size_ = block_size;
  m.num_blocks_ = num_blocks;
  m.e_ = VectorXd::Zero(x0.size());
  for (Index b = 0; b < num_blocks; ++b) {
    const auto blk = x0.segment(b * block_size, block_size);
    const double nrm = blk.norm();
    if (nrm > 0.0) {
      m.active_blocks_.push_back(b);
      m.e_.segment(b * block_size, block_size) = blk / nrm;
      for (Index i = 0; i < block_size; ++i)
        m.coords_T_.push_back(b * block_size + i);
    }
  }
  if (m.active_blocks_.empty()) throw std::invalid_argument("x0 must be nonzero");
  m.d_T_ = static_cast<Index>(m.coords_T_.size());
  return m;
}

ModelStructure ModelStructure::lowrank(const MatrixXd& X0,
                                       double rank_rel_tol) {
  if (X0.size() < 1) throw std::invalid_argument("X0 must be nonempty");
  ModelStructure m(ModelKind::lowrank,
                   AmbientShape::matrix(X0.rows(), X0.cols()));
  Eigen::JacobiSVD<MatrixXd> svd(X0,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0)
    throw std::invalid_argument("X0 must be nonzero");
  Index r = 0;
  while (r < sv.size() && sv(r) > rank_rel_tol * sv(0)) ++r;

  m.U_ = svd.matrixU().leftCols(r);
  m.V_ = svd.matrixV().leftCols(r);
  // The discarded tail must be numerically negligible for the model to be
  // exactly rank r.
  const MatrixXd recon =
      m.U_ * sv.head(r).asDiagonal() * m.V_.transpose();
  if ((recon - X0).norm() > 1e-10 * X0.norm())
    throw std::invalid_argument("X0 is not numerically low-rank at the tolerance");

  m.rank_ = r;
  const Index n1 = X0.rows(), n2 = X0.cols();
  m.d_T_ = r * (n1 + n2 - r);
  m.proj_U_ = m.U_ * m.U_.transpose();
  m.proj_V_ = m.V_ * m.V_.transpose();
  m.x0_ = Eigen::Map<const VectorXd>(X0.data(), X0.size());
  const MatrixXd E = m.U_ * m.V_.transpose();
  m.e_ = Eigen::Map<const VectorXd>(E.data(), E.size());
  return m;
}

ModelStructure ModelStructure::lowrank_vec(const VectorXd& x0, Index n1,
                                           Index n2, double rank_rel_tol) {
  if (x0.size() != n1 * n2)
    throw std::invalid_argument("x0 length must equal n1 * n2");
  return lowrank(Eigen::Map<const MatrixXd>(x0.data(), n1, n2), rank_rel_tol);
}

void ModelStructure::check_shape(const VectorXd& z) const {
  if (z.size() != ambient_.size())
    throw std::invalid_argument("element does not match the model's ambient");
}

VectorXd ModelStructure::project_T(const VectorXd& z) const {
  check_shape(z);
  if (kind_ != ModelKind::lowrank) {
    VectorXd out = VectorXd::Zero(z.size());
    for (Index i : coords_T_) out(i) = z(i);
    return out;
  }
  return z - project_Tperp(z);
}

VectorXd ModelStructure::project_Tperp(const VectorXd& z) const {
  check_shape(z);
  if (kind_ != ModelKind::lowrank) {
    VectorXd out = z;
    for (Index i : coords_T_) out(i) = 0.0;
    return out;
  }
  const auto Z = Eigen::Map<const MatrixXd>(z.data(), ambient_.rows(),
                                            ambient_.cols());
  // (I - P_U) Z (I - P_V)
  const MatrixXd left = Z - proj_U_ * Z;
  const MatrixXd out = left - left * proj_V_;
  return Eigen::Map<const VectorXd>(out.data(), out.size());
}

double ModelStructure::dual_norm_offT(const VectorXd& z) const {
  return dualcert::dual_norm(norm_spec(), project_Tperp(z));
}

double ModelStructure::primal_norm(const VectorXd& x) const {
  return dualcert::primal_norm(norm_spec(), x);
}

NormSpec ModelStructure::norm_spec() const {
  return NormSpec{kind_, ambient_,
                  kind_ == ModelKind::block ? block_size_ : Index{1}};
}

const std::vector<Index>& ModelStructure::coordinates_T() const {
  if (kind_ == ModelKind::lowrank)
    throw std::logic_error("lowrank T is not coordinate-aligned");
  return coords_T_;
}

const std::vector<Index>& ModelStructure::active_blocks() const {
  if (kind_ != ModelKind::block)
    throw std::logic_error("active blocks exist only for block models");
  return active_blocks_;
}

const MatrixXd& ModelStructure::factor_U() const {
  if (kind_ != ModelKind::lowrank)
    throw std::logic_error("factors exist only for lowrank models");
  return U_;
}

const MatrixXd& ModelStructure::factor_V() const {
  if (kind_ != ModelKind::lowrank)
    throw std::logic_error("factors exist only for lowrank models");
  return V_;
}

}  // namespace dualcert

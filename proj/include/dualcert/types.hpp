#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dualcert {

using Index = Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Measurement maps store entries row-major: row i holds the i-th functional.
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Thrown when the requested object cannot exist for structural reasons
/// (e.g. fewer measurements than the model subspace dimension), as opposed
/// to a malformed argument.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural failure caused by a near-singular restricted measurement map;
/// carries the offending singular values.
class IllConditionedError : public StructuralError {
 public:
  IllConditionedError(const std::string& what, double sigma_min,
                      double sigma_max)
      : StructuralError(what), sigma_min(sigma_min), sigma_max(sigma_max) {}

  double sigma_min;
  double sigma_max;
};

/// Ambient space of the measured objects: R^n or R^(n1 x n2).
///
/// Matrix-valued elements travel as length n1*n2 vectors in column-major
/// order; Eigen::Map reinterprets them without copying.
class AmbientShape {
 public:
  enum class Kind { vector, matrix };

  static AmbientShape vector(Index n) {
    if (n < 1) throw std::invalid_argument("ambient dimension must be >= 1");
    return AmbientShape(Kind::vector, n, 1);
  }

  static AmbientShape matrix(Index n1, Index n2) {
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("matrix dimensions must be >= 1");
    return AmbientShape(Kind::matrix, n1, n2);
  }

  Kind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return rows_ * cols_; }

  bool operator==(const AmbientShape& o) const {
    return kind_ == o.kind_ && rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool operator!=(const AmbientShape& o) const { return !(*this == o); }

 private:
  AmbientShape(Kind kind, Index rows, Index cols)
      : kind_(kind), rows_(rows), cols_(cols) {}

  Kind kind_;
  Index rows_;
  Index cols_;
};

enum class ModelKind { sparse, block, lowrank };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::sparse: return "sparse";
    case ModelKind::block: return "block";
    case ModelKind::lowrank: return "lowrank";
  }
  return "?";
}

}  // namespace dualcert

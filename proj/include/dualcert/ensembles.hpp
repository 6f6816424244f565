#pragma once

#include <cstdint>

#include "dualcert/types.hpp"

namespace dualcert {

/// A random m-row linear map over a vector or matrix ambient space.
///
/// Entries are dense, m x N with N = shape.size(). For matrix ambients, row i
/// is the column-major vectorization of the i-th sensing matrix, so apply()
/// computes the vector of trace inner products.
///
/// Entry distributions:
///   gaussian - i.i.d. N(0, 1/m)
///   sign     - i.i.d. uniform on {-(1/sqrt(m)), +(1/sqrt(m))}
///
/// Each column is generated from its own RNG substream keyed by
/// (seed, column index). Column subsets are therefore independent by
/// construction and regeneration from the same seed is bit-for-bit identical.
/// Maps are immutable once constructed and safe to share across threads.
class MeasurementMap {
 public:
  enum class Kind { gaussian, sign, custom };

  MeasurementMap(Kind kind, AmbientShape shape, Index m, std::uint64_t seed);

  /// Wraps explicit entries (kind = custom); for handcrafted instances.
  static MeasurementMap from_entries(AmbientShape shape, RowMatrixXd entries);

  /// Forward application: x -> Phi x (length m).
  VectorXd apply(const VectorXd& x) const;

  /// Adjoint application: v -> Phi* v, satisfying <Phi x, v> = <x, Phi* v>.
  VectorXd adjoint(const VectorXd& v) const;

  Kind kind() const { return kind_; }
  const AmbientShape& shape() const { return shape_; }
  Index rows() const { return entries_.rows(); }
  std::uint64_t seed() const { return seed_; }
  const RowMatrixXd& entries() const { return entries_; }

 private:
  MeasurementMap(Kind kind, AmbientShape shape, std::uint64_t seed,
                 RowMatrixXd entries)
      : kind_(kind), shape_(shape), seed_(seed), entries_(std::move(entries)) {}

  Kind kind_;
  AmbientShape shape_;
  std::uint64_t seed_;
  RowMatrixXd entries_;
};

inline const char* to_string(MeasurementMap::Kind k) {
  switch (k) {
    case MeasurementMap::Kind::gaussian: return "gaussian";
    case MeasurementMap::Kind::sign: return "sign";
    case MeasurementMap::Kind::custom: return "custom";
  }
  return "?";
}

}  // namespace dualcert

#include "dualcert/ensembles.hpp"

#include <cmath>
#include <stdexcept>

#include "dualcert/rng.hpp"

namespace dualcert {

MeasurementMap::MeasurementMap(Kind kind, AmbientShape shape, Index m,
                               std::uint64_t seed)
    : kind_(kind), shape_(shape), seed_(seed) {
  if (m < 1) throw std::invalid_argument("row count m must be >= 1");
  if (kind == Kind::custom)
    throw std::invalid_argument("custom maps are built with from_entries()");

  const Index n = shape.size();
  entries_.resize(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index j = 0; j < n; ++j) {
    rng::Stream stream(rng::mix(seed, static_cast<std::uint64_t>(j)));
    if (kind == Kind::gaussian) {
      for (Index i = 0; i < m; ++i)
        entries_(i, j) = scale * stream.next_normal();
    } else {
      for (Index i = 0; i < m; ++i)
        entries_(i, j) = scale * stream.next_sign();
    }
  }
}

MeasurementMap MeasurementMap::from_entries(AmbientShape shape,
                                            RowMatrixXd entries) {
  if (entries.cols() != shape.size())
    throw std::invalid_argument("entry columns must match the ambient size");
  if (entries.rows() < 1)
    throw std::invalid_argument("row count m must be >= 1");
  return MeasurementMap(Kind::custom, shape, 0, std::move(entries));
}

VectorXd MeasurementMap::apply(const VectorXd& x) const {
  if (x.size() != shape_.size())
    throw std::invalid_argument("element does not match the map's shape");
  return entries_ * x;
}

VectorXd MeasurementMap::adjoint(const VectorXd& v) const {
  if (v.size() != rows())
    throw std::invalid_argument("vector length must equal the row count m");
  return entries_.transpose() * v;
}

}  // namespace dualcert

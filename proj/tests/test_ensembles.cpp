#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "dualcert/ensembles.hpp"
#include "dualcert/rng.hpp"

using namespace dualcert;

namespace {

MeasurementMap tiny_map() {
  RowMatrixXd entries(2, 3);
  entries << 1, 0, 1, 0, 1, 1;
  return MeasurementMap::from_entries(AmbientShape::vector(3), entries);
}

VectorXd random_vector(rng::Stream& stream, Index n) {
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = stream.next_normal();
  return v;
}

}  // namespace

TEST_CASE("seed determinism") {
  const MeasurementMap a(MeasurementMap::Kind::gaussian,
                         AmbientShape::vector(3), 2, 7);
  const MeasurementMap b(MeasurementMap::Kind::gaussian,
                         AmbientShape::vector(3), 2, 7);
  CHECK(a.entries() == b.entries());

  const MeasurementMap c(MeasurementMap::Kind::gaussian,
                         AmbientShape::vector(3), 2, 8);
  CHECK(a.entries() != c.entries());
}

TEST_CASE("sign maps have exactly the two values +-1/sqrt(m)") {
  const MeasurementMap map(MeasurementMap::Kind::sign,
                           AmbientShape::vector(4), 4, 1);
  for (Index i = 0; i < map.rows(); ++i)
    for (Index j = 0; j < 4; ++j)
      CHECK(std::abs(map.entries()(i, j)) == 0.5);  // 4^(-1/2) exactly

  const MeasurementMap big(MeasurementMap::Kind::sign,
                           AmbientShape::vector(100), 25, 5);
  std::set<double> big_values;
  for (Index i = 0; i < big.rows(); ++i)
    for (Index j = 0; j < 100; ++j) big_values.insert(big.entries()(i, j));
  CHECK(big_values.size() == 2);
  CHECK(*big_values.begin() == -0.2);
  CHECK(*big_values.rbegin() == 0.2);
}

TEST_CASE("gaussian sample statistics") {
  // 4 * entry_sd / sqrt(#entries) with entry_sd = 1/sqrt(500) and 5e5 entries
  const MeasurementMap map(MeasurementMap::Kind::gaussian,
                           AmbientShape::vector(1000), 500, 3);
  const double mean = map.entries().mean();
  CHECK(std::abs(mean) <= 4.0 / (std::sqrt(500000.0) * std::sqrt(500.0)));

  const double mean_sq = map.entries().array().square().mean();
  CHECK(mean_sq == doctest::Approx(1.0 / 500.0).epsilon(0.05));
}

TEST_CASE("apply") {
  const MeasurementMap map = tiny_map();
  VectorXd x(3);
  x << 2, 0, 0;
  const VectorXd out = map.apply(x);
  CHECK(out(0) == 2.0);
  CHECK(out(1) == 0.0);

  CHECK(map.apply(VectorXd::Zero(3)).norm() == 0.0);

  rng::Stream stream(5);
  const VectorXd a = random_vector(stream, 3);
  const VectorXd b = random_vector(stream, 3);
  const VectorXd lhs = map.apply(2.5 * a - 1.5 * b);
  const VectorXd rhs = 2.5 * map.apply(a) - 1.5 * map.apply(b);
  CHECK((lhs - rhs).norm() <= 1e-14 * rhs.norm());
}

TEST_CASE("adjoint") {
  const MeasurementMap map = tiny_map();
  VectorXd v(2);
  v << 1, 0;
  const VectorXd out = map.adjoint(v);
  CHECK(out(0) == 1.0);
  CHECK(out(1) == 0.0);
  CHECK(out(2) == 1.0);

  CHECK(map.adjoint(VectorXd::Zero(2)).norm() == 0.0);
}

TEST_CASE("adjoint identity holds for random pairs in both ensembles") {
  for (const auto kind :
       {MeasurementMap::Kind::gaussian, MeasurementMap::Kind::sign}) {
    const MeasurementMap map(kind, AmbientShape::vector(40), 15, 11);
    rng::Stream stream(99);
    for (int rep = 0; rep < 100; ++rep) {
      const VectorXd x = random_vector(stream, 40);
      const VectorXd v = random_vector(stream, 15);
      const double lhs = map.apply(x).dot(v);
      const double rhs = x.dot(map.adjoint(v));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * x.norm() * v.norm());
    }
  }
}

TEST_CASE("columns come from per-column substreams") {
  // Widening the ambient leaves existing columns untouched.
  for (const auto kind :
       {MeasurementMap::Kind::gaussian, MeasurementMap::Kind::sign}) {
    const MeasurementMap narrow(kind, AmbientShape::vector(8), 6, 42);
    const MeasurementMap wide(kind, AmbientShape::vector(16), 6, 42);
    CHECK(narrow.entries() == wide.entries().leftCols(8));
  }
}

TEST_CASE("matrix ambient applies trace inner products") {
  const AmbientShape shape = AmbientShape::matrix(3, 2);
  const MeasurementMap map(MeasurementMap::Kind::gaussian, shape, 4, 2);
  rng::Stream stream(1);
  const VectorXd z = random_vector(stream, 6);
  const auto Z = Eigen::Map<const MatrixXd>(z.data(), 3, 2);

  const VectorXd out = map.apply(z);
  for (Index i = 0; i < 4; ++i) {
    const VectorXd row = map.entries().row(i);
    const auto Phi_i = Eigen::Map<const MatrixXd>(row.data(), 3, 2);
    CHECK(out(i) ==
          doctest::Approx((Phi_i.transpose() * Z).trace()).epsilon(1e-12));
  }
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(MeasurementMap(MeasurementMap::Kind::gaussian,
                                 AmbientShape::vector(3), 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(AmbientShape::vector(0), std::invalid_argument);
  CHECK_THROWS_AS(AmbientShape::matrix(0, 2), std::invalid_argument);

  const MeasurementMap map = tiny_map();
  CHECK_THROWS_AS(map.apply(VectorXd::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(map.adjoint(VectorXd::Zero(3)), std::invalid_argument);
}

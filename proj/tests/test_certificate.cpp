#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "dualcert/certificate.hpp"
#include "dualcert/montecarlo.hpp"
#include "dualcert/rng.hpp"
#include "support/stats.hpp"

using namespace dualcert;

namespace {

VectorXd random_vector(rng::Stream& stream, Index n) {
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = stream.next_normal();
  return v;
}

mc::Instance sparse_instance(Index n, Index s, Index m, std::uint64_t seed) {
  mc::TrialConfig config;
  config.layout.kind = ModelKind::sparse;
  config.layout.n = n;
  config.layout.s = s;
  config.m = m;
  config.base_seed = seed;
  return mc::make_instance(config, mc::trial_seed(seed, 0));
}

}  // namespace

TEST_CASE("identity map certifies a 1-sparse vector") {
  RowMatrixXd eye = RowMatrixXd::Identity(3, 3);
  const auto map = MeasurementMap::from_entries(AmbientShape::vector(3), eye);
  VectorXd x0(3);
  x0 << 1, 0, 0;
  const auto model = ModelStructure::sparse(x0);

  const DualCertificate cert = construct_multiplier(map, model);
  CHECK((cert.q - x0).norm() <= 1e-14);
  CHECK((cert.y - x0).norm() <= 1e-14);
  CHECK(cert.offT_dual_norm == 0.0);
  CHECK(cert.residual_T <= 1e-14);

  const Verdict v = certify(cert);
  CHECK(v.certified);
  CHECK(v.reason == CertReason::ok);
  CHECK(v.margin == doctest::Approx(1.0));
}

TEST_CASE("boundary instance: dual norm exactly 1 is rejected") {
  RowMatrixXd entries(2, 3);
  entries << 1, 0, 1, 0, 1, 1;
  const auto map =
      MeasurementMap::from_entries(AmbientShape::vector(3), entries);
  VectorXd x0(3);
  x0 << 2, 0, 0;
  const auto model = ModelStructure::sparse(x0);

  const DualCertificate cert = construct_multiplier(map, model);
  CHECK(cert.q(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.q(1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cert.y(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.y(2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.offT_dual_norm == doctest::Approx(1.0).epsilon(1e-14));

  const Verdict v = certify(cert);
  CHECK_FALSE(v.certified);
  CHECK(v.reason == CertReason::dual_norm_ge_one);
  CHECK(v.margin == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("certify handles hand-built edge certificates") {
  DualCertificate cert;
  cert.sigma_min_T = 0.0;
  cert.sigma_max_T = 1.0;
  cert.offT_dual_norm = 0.5;
  cert.dim_T = 1;
  CHECK(certify(cert).reason == CertReason::not_injective);

  cert.sigma_min_T = 1.0;
  cert.offT_dual_norm = 1.0;  // strict inequality required
  CHECK_FALSE(certify(cert).certified);
  cert.offT_dual_norm = 1.0 - 1e-12;
  CHECK(certify(cert).certified);

  cert.offT_dual_norm = 0.5;
  cert.residual_T = 1.0;  // exact construction failed
  CHECK(certify(cert).reason == CertReason::ill_conditioned);
}

TEST_CASE("certify is monotone in the dual norm") {
  DualCertificate cert;
  cert.sigma_min_T = 1.0;
  cert.sigma_max_T = 1.0;
  cert.dim_T = 4;
  rng::Stream stream(5);
  for (int rep = 0; rep < 200; ++rep) {
    cert.offT_dual_norm = 1.5 * stream.next_unit();
    const bool before = certify(cert).certified;
    cert.offT_dual_norm *= stream.next_unit();  // strictly smaller
    const bool after = certify(cert).certified;
    if (before) CHECK(after);
  }
}

TEST_CASE("m below dim(T) is a structural error") {
  VectorXd x0 = VectorXd::Zero(8);
  x0.head(4).setOnes();
  const auto model = ModelStructure::sparse(x0);
  const MeasurementMap map(MeasurementMap::Kind::gaussian,
                           AmbientShape::vector(8), 3, 1);
  CHECK_THROWS_AS(construct_multiplier(map, model), StructuralError);
}

TEST_CASE("construction is exact and q_norm follows the inverse chi-square "
          "law at m=60, n=128, s=4") {
  // Pre-build pilot: P(chi2_57 in [60/9, 60]) = 0.632475, so over 400 trials
  // the in-band frequency lies in (0.5602, 0.7048) at 3 standard errors. The
  // upper endpoint 3 sqrt(s) is essentially never exceeded.
  const Index trials = 400;
  Index in_band = 0;
  for (Index t = 0; t < trials; ++t) {
    const auto inst = sparse_instance(128, 4, 60, 1000 + t);
    const DualCertificate cert = construct_multiplier(inst.map, inst.model);
    CHECK(cert.residual_T <= 1e-8 * 2.0);  // sqrt(d_T) = 2
    CHECK(cert.q_norm <= 3.0 * 2.0);
    if (cert.q_norm >= 2.0) ++in_band;
  }
  const double freq = static_cast<double>(in_band) / trials;
  CHECK(freq >= 0.5602);
  CHECK(freq <= 0.7048);
}

TEST_CASE("q is the minimum-norm multiplier") {
  const auto inst = sparse_instance(64, 5, 30, 77);
  const DualCertificate cert = construct_multiplier(inst.map, inst.model);

  // Perturb q, then restore P_T(Phi* q) = e by removing the range(Phi_T)
  // component of the perturbation; the norm can only grow.
  const auto& coords = inst.model.coordinates_T();
  MatrixXd phi_T(inst.map.rows(), static_cast<Index>(coords.size()));
  for (size_t j = 0; j < coords.size(); ++j)
    phi_T.col(static_cast<Index>(j)) = inst.map.entries().col(coords[j]);
  const MatrixXd gram = phi_T.transpose() * phi_T;
  const auto llt = gram.llt();

  rng::Stream stream(123);
  for (int rep = 0; rep < 100; ++rep) {
    VectorXd delta = 0.1 * random_vector(stream, inst.map.rows());
    delta -= phi_T * llt.solve(phi_T.transpose() * delta);
    const VectorXd q2 = cert.q + delta;
    CHECK((phi_T.transpose() * (q2 - cert.q)).norm() <= 1e-10);
    CHECK(q2.norm() >= cert.q_norm - 1e-12);
  }
}

TEST_CASE("probe matches the m / chi-square law") {
  SUBCASE("mean at m=100, d_T=10") {
    const auto samples = q_squared_distribution_probe(100, 10, 2000, 42);
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / 2000.0;
    CHECK(mean == doctest::Approx(100.0 / 89.0).epsilon(0.05));
  }
  SUBCASE("heavy tail at m = d_T = 10") {
    const auto samples = q_squared_distribution_probe(10, 10, 5000, 43);
    // median of chi2_1 is 0.454936; median of m / chi2_1 = 21.981093
    CHECK(teststats::median(samples) ==
          doctest::Approx(21.981093).epsilon(0.15));
  }
  SUBCASE("single trial") {
    const auto samples = q_squared_distribution_probe(30, 5, 1, 44);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0] > 0.0);
  }
  SUBCASE("m < d_T") {
    CHECK_THROWS_AS(q_squared_distribution_probe(5, 10, 10, 1),
                    StructuralError);
  }
}

TEST_CASE("off-T dual norm follows the two-stage conditional law") {
  // Fixed T; the empirical distribution of the off-support max must match a
  // direct simulation that draws (n - s) normals with variance ||q||^2 / m.
  const Index n = 64, s = 4, m = 40, trials = 2000;
  std::vector<double> observed, simulated;
  observed.reserve(trials);
  simulated.reserve(trials);

  VectorXd x0 = VectorXd::Zero(n);
  x0.head(s).setOnes();  // fixed support
  const auto model = ModelStructure::sparse(x0);

  rng::Stream sim_stream(0xD1CE);
  for (Index t = 0; t < trials; ++t) {
    const MeasurementMap map(MeasurementMap::Kind::gaussian,
                             AmbientShape::vector(n), m,
                             rng::mix(0xFEED, static_cast<std::uint64_t>(t)));
    const DualCertificate cert = construct_multiplier(map, model);
    observed.push_back(cert.offT_dual_norm);

    const double sd = cert.q_norm / std::sqrt(static_cast<double>(m));
    double mx = 0.0;
    for (Index i = 0; i < n - s; ++i)
      mx = std::max(mx, std::abs(sd * sim_stream.next_normal()));
    simulated.push_back(mx);
  }
  CHECK(teststats::ks_distance_two_sample(observed, simulated) <= 0.05);
}

TEST_CASE("operator-path certificate agrees with a dense realization") {
  // Small lowrank instance: build an explicit orthonormal basis of T, form
  // the dense m x d_T matrix, and compare q and the extreme singular values.
  mc::TrialConfig config;
  config.layout.kind = ModelKind::lowrank;
  config.layout.n1 = 8;
  config.layout.n2 = 6;
  config.layout.r = 1;
  config.m = 30;
  config.base_seed = 91;
  const auto inst = mc::make_instance(config, mc::trial_seed(91, 0));
  const auto& model = inst.model;
  const Index d_T = model.dim_T();
  REQUIRE(d_T == 13);

  const DualCertificate cert = construct_multiplier(inst.map, inst.model);
  CHECK(cert.residual_T <= 1e-8 * std::sqrt(static_cast<double>(d_T)));

  // Dense route: orthonormal basis {u_i v_j^T : i < r or j < r} from
  // completions of U and V.
  const Index n1 = 8, n2 = 6, r = 1;
  const MatrixXd Ufull =
      Eigen::HouseholderQR<MatrixXd>(model.factor_U()).householderQ() *
      MatrixXd::Identity(n1, n1);
  const MatrixXd Vfull =
      Eigen::HouseholderQR<MatrixXd>(model.factor_V()).householderQ() *
      MatrixXd::Identity(n2, n2);
  MatrixXd basis(n1 * n2, d_T);
  Index col = 0;
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n2; ++j) {
      if (i >= r && j >= r) continue;
      const MatrixXd E = Ufull.col(i) * Vfull.col(j).transpose();
      basis.col(col++) = Eigen::Map<const VectorXd>(E.data(), n1 * n2);
    }
  REQUIRE(col == d_T);

  const MatrixXd phi_T = inst.map.entries() * basis;
  const MatrixXd gram = phi_T.transpose() * phi_T;
  const VectorXd e_coords = basis.transpose() * model.e();
  const VectorXd q_dense = phi_T * gram.llt().solve(e_coords);
  CHECK((cert.q - q_dense).norm() <= 1e-9 * q_dense.norm());

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  CHECK(cert.sigma_min_T ==
        doctest::Approx(std::sqrt(es.eigenvalues()(0))).epsilon(1e-6));
  CHECK(cert.sigma_max_T ==
        doctest::Approx(std::sqrt(es.eigenvalues()(d_T - 1))).epsilon(1e-6));
}

TEST_CASE("block model certificates construct exactly") {
  mc::TrialConfig config;
  config.layout.kind = ModelKind::block;
  config.layout.M = 16;
  config.layout.B = 3;
  config.layout.k = 2;
  config.m = 30;
  for (Index t = 0; t < 20; ++t) {
    config.base_seed = 500 + t;
    const auto inst = mc::make_instance(config, mc::trial_seed(500 + t, 0));
    const DualCertificate cert = construct_multiplier(inst.map, inst.model);
    CHECK(cert.residual_T <= 1e-8 * std::sqrt(6.0));
    CHECK((inst.model.project_T(cert.y) - inst.model.e()).norm() <=
          1e-8 * std::sqrt(6.0));
  }
}

TEST_CASE("shape mismatch is a parameter error") {
  const MeasurementMap map(MeasurementMap::Kind::gaussian,
                           AmbientShape::vector(8), 6, 1);
  VectorXd x0(3);
  x0 << 1, 0, 0;
  const auto model = ModelStructure::sparse(x0);
  CHECK_THROWS_AS(construct_multiplier(map, model), std::invalid_argument);
}

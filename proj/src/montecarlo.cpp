#include "dualcert/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dualcert/rng.hpp"

namespace dualcert::mc {

namespace {

constexpr std::uint64_t kMapStream = 0x6D61702DULL;
constexpr std::uint64_t kSignalStream = 0x7369672DULL;

// Runs fn(0..count) across up to `threads` workers; each index owns its own
// output slot, so results are schedule-independent.
void parallel_for_index(Index count, int threads,
                        const std::function<void(Index)>& fn) {
  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

VectorXd generate_signal(const ModelLayout& layout, std::uint64_t seed) {
  rng::Stream stream(seed);
  switch (layout.kind) {
    case ModelKind::sparse: {
      VectorXd x0 = VectorXd::Zero(layout.n);
      // partial Fisher-Yates for a uniform s-subset
      std::vector<Index> idx(static_cast<size_t>(layout.n));
      for (Index i = 0; i < layout.n; ++i) idx[static_cast<size_t>(i)] = i;
      for (Index i = 0; i < layout.s; ++i) {
        const Index j = i + static_cast<Index>(stream.next_below(
                                static_cast<std::uint64_t>(layout.n - i)));
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        x0(idx[static_cast<size_t>(i)]) = stream.next_sign();
      }
      return x0;
    }
    case ModelKind::block: {
      VectorXd x0 = VectorXd::Zero(layout.M * layout.B);
      std::vector<Index> idx(static_cast<size_t>(layout.M));
      for (Index i = 0; i < layout.M; ++i) idx[static_cast<size_t>(i)] = i;
      for (Index i = 0; i < layout.k; ++i) {
        const Index j = i + static_cast<Index>(stream.next_below(
                                static_cast<std::uint64_t>(layout.M - i)));
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        const Index b = idx[static_cast<size_t>(i)];
        for (Index t = 0; t < layout.B; ++t)
          x0(b * layout.B + t) = stream.next_normal();
      }
      return x0;
    }
    case ModelKind::lowrank: {
      MatrixXd G1(layout.n1, layout.r), G2(layout.n2, layout.r);
      for (Index j = 0; j < layout.r; ++j)
        for (Index i = 0; i < layout.n1; ++i) G1(i, j) = stream.next_normal();
      for (Index j = 0; j < layout.r; ++j)
        for (Index i = 0; i < layout.n2; ++i) G2(i, j) = stream.next_normal();
      const MatrixXd X0 = G1 * G2.transpose();
      return Eigen::Map<const VectorXd>(X0.data(), X0.size());
    }
  }
  throw std::logic_error("unreachable");
}

ModelStructure build_model(const ModelLayout& layout, const VectorXd& x0) {
  switch (layout.kind) {
    case ModelKind::sparse:
      return ModelStructure::sparse(x0);
    case ModelKind::block:
      return ModelStructure::block(x0, layout.M, layout.B);
    case ModelKind::lowrank:
      return ModelStructure::lowrank_vec(x0, layout.n1, layout.n2);
  }
  throw std::logic_error("unreachable");
}

bounds::BoundReport compute_bound(const SweepSpec& spec,
                                  const ModelLayout& layout) {
  using MK = MeasurementMap::Kind;
  if (spec.proto.ensemble == MK::gaussian) {
    switch (layout.kind) {
      case ModelKind::sparse:
        return bounds::sparse_gaussian_bound(spec.beta, layout.s, layout.n);
      case ModelKind::block:
        return bounds::block_gaussian_bound(spec.beta, layout.k, layout.B,
                                            layout.M);
      case ModelKind::lowrank:
        return bounds::lowrank_gaussian_bound(spec.beta, layout.r, layout.n1,
                                              layout.n2);
    }
  }
  if (spec.proto.ensemble == MK::sign && !std::isnan(spec.eps)) {
    switch (layout.kind) {
      case ModelKind::sparse:
        return bounds::bernoulli_sparse_bound(spec.beta, spec.eps, layout.s,
                                              layout.n, spec.c0, spec.c1);
      case ModelKind::block:
        return bounds::bernoulli_block_bound(spec.beta, spec.eps, layout.k,
                                             layout.B, layout.M, spec.c0,
                                             spec.c1);
      case ModelKind::lowrank:
        break;  // no sign-ensemble lowrank guarantee
    }
  }
  throw std::domain_error("no bound available for this model/ensemble pair");
}

}  // namespace

AmbientShape ModelLayout::ambient() const {
  return kind == ModelKind::lowrank ? AmbientShape::matrix(n1, n2)
         : kind == ModelKind::block ? AmbientShape::vector(M * B)
                                    : AmbientShape::vector(n);
}

Index ModelLayout::dim_T() const {
  switch (kind) {
    case ModelKind::sparse: return s;
    case ModelKind::block: return k * B;
    case ModelKind::lowrank: return r * (n1 + n2 - r);
  }
  return 0;
}

Index ModelLayout::complexity() const {
  return kind == ModelKind::sparse ? s : kind == ModelKind::block ? k : r;
}

void ModelLayout::set_complexity(Index c) {
  (kind == ModelKind::sparse ? s : kind == ModelKind::block ? k : r) = c;
}

void ModelLayout::validate() const {
  switch (kind) {
    case ModelKind::sparse:
      if (n < 1 || s < 1 || s > n)
        throw std::invalid_argument("sparse layout requires 1 <= s <= n");
      return;
    case ModelKind::block:
      if (M < 1 || B < 1 || k < 1 || k > M)
        throw std::invalid_argument("block layout requires 1 <= k <= M, B >= 1");
      return;
    case ModelKind::lowrank:
      if (n1 < 1 || n2 < 1 || r < 1 || r > std::min(n1, n2))
        throw std::invalid_argument(
            "lowrank layout requires 1 <= r <= min(n1, n2)");
      return;
  }
}

std::uint64_t trial_seed(std::uint64_t base_seed, Index trial_index) {
  return rng::mix(base_seed, static_cast<std::uint64_t>(trial_index));
}

Instance make_instance(const TrialConfig& config, std::uint64_t seed) {
  config.layout.validate();
  if (config.m < 1) throw std::invalid_argument("m must be >= 1");
  MeasurementMap map(config.ensemble, config.layout.ambient(), config.m,
                     rng::mix(seed, kMapStream));
  const VectorXd x0 =
      generate_signal(config.layout, rng::mix(seed, kSignalStream));
  ModelStructure model = build_model(config.layout, x0);
  return Instance{std::move(map), std::move(model)};
}

TrialRecord run_trial(const TrialConfig& config, Index trial_index) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.trial_index = trial_index;
  try {
    const Instance inst =
        make_instance(config, trial_seed(config.base_seed, trial_index));

    if (config.mode != CheckMode::solver_only) {
      const DualCertificate cert = construct_multiplier(inst.map, inst.model);
      rec.certified = certify(cert).certified;
      rec.offT_dual_norm = cert.offT_dual_norm;
      rec.q_norm = cert.q_norm;
    }
    if (config.mode != CheckMode::certificate_only) {
      const VectorXd b = inst.map.apply(inst.model.x0());
      const Solution sol = solve_min_norm(inst.map, b, inst.model.norm_spec(),
                                          config.solver);
      rec.solve_iterations = sol.iterations;
      rec.solver_success =
          sol.converged && recovery_success(sol.x_hat, inst.model.x0(),
                                            config.success_threshold);
    }
  } catch (const IllConditionedError& e) {
    throw IllConditionedError("trial " + std::to_string(trial_index) + ": " +
                                  e.what(),
                              e.sigma_min, e.sigma_max);
  } catch (const StructuralError& e) {
    throw StructuralError("trial " + std::to_string(trial_index) + ": " +
                          e.what());
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  if (spec.m_values.empty()) throw std::invalid_argument("empty grid");
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  spec.proto.layout.validate();

  std::vector<Index> complexities = spec.complexity_values;
  if (complexities.empty())
    complexities.push_back(spec.proto.layout.complexity());

  std::vector<SweepRow> rows;
  Index cell = 0;
  for (const Index c : complexities) {
    for (const Index m : spec.m_values) {
      TrialConfig config = spec.proto;
      config.layout.set_complexity(c);
      config.layout.validate();
      config.m = m;
      config.base_seed =
          rng::mix(spec.proto.base_seed, static_cast<std::uint64_t>(cell));

      std::vector<TrialRecord> records(static_cast<size_t>(spec.trials));
      try {
        parallel_for_index(spec.trials, spec.threads, [&](Index t) {
          records[static_cast<size_t>(t)] = run_trial(config, t);
        });
      } catch (const StructuralError& e) {
        throw StructuralError("cell " + std::to_string(cell) + " (m=" +
                              std::to_string(m) + "): " + e.what());
      }

      SweepRow row;
      row.layout = config.layout;
      row.ensemble = config.ensemble;
      row.m = m;
      row.trials = spec.trials;
      row.cell_index = cell;
      row.base_seed = spec.proto.base_seed;
      row.beta = spec.beta;

      // Aggregate in trial order so every thread count gives identical rows.
      Index cert_count = 0, solver_count = 0;
      bool has_cert = false, has_solver = false;
      double sum_dual = 0, max_dual = 0;
      for (const TrialRecord& r : records) {
        if (r.certified.has_value()) {
          has_cert = true;
          cert_count += *r.certified ? 1 : 0;
          sum_dual += r.offT_dual_norm;
          max_dual = std::max(max_dual, r.offT_dual_norm);
        }
        if (r.solver_success.has_value()) {
          has_solver = true;
          solver_count += *r.solver_success ? 1 : 0;
        }
      }
      if (has_cert) {
        row.cert_successes = cert_count;
        row.mean_dual_norm = sum_dual / static_cast<double>(spec.trials);
        row.max_dual_norm = max_dual;
      }
      if (has_solver) row.solver_successes = solver_count;

      if (!std::isnan(spec.beta)) {
        try {
          bounds::BoundReport report = compute_bound(spec, config.layout);
          if (m >= report.m_threshold) row.bound = std::move(report);
        } catch (const std::domain_error&) {
          // no theorem covers this cell; leave the bound unset
        }
      }

      rows.push_back(std::move(row));
      ++cell;
    }
  }
  return rows;
}

Summary summarize(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("rows must be nonempty");
  Summary summary;
  for (size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    if (!row.bound || row.bound->vacuous) continue;
    const double bound = row.bound->success_prob_lower;
    const auto check = [&](Index successes, const char* kind) {
      if (successes < 0) return;
      const double rate =
          static_cast<double>(successes) / static_cast<double>(row.trials);
      const double se =
          std::sqrt(rate * (1.0 - rate) / static_cast<double>(row.trials));
      if (rate < bound - 3.0 * se)
        summary.violations.push_back(
            {static_cast<Index>(i), kind, rate, bound, se});
    };
    check(row.cert_successes, "certificate");
    check(row.solver_successes, "solver");
  }
  return summary;
}

}  // namespace dualcert::mc

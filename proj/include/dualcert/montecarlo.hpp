#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dualcert/bounds.hpp"
#include "dualcert/certificate.hpp"
#include "dualcert/ensembles.hpp"
#include "dualcert/models.hpp"
#include "dualcert/solvers.hpp"

namespace dualcert::mc {

/// Model class plus the layout parameters of one experiment family.
struct ModelLayout {
  ModelKind kind = ModelKind::sparse;
  Index n = 0, s = 0;        // sparse
  Index M = 0, B = 0, k = 0; // block
  Index n1 = 0, n2 = 0, r = 0; // lowrank

  AmbientShape ambient() const;
  Index dim_T() const;
  Index complexity() const;  // s | k | r
  void set_complexity(Index c);
  void validate() const;
};

enum class CheckMode { certificate_only, solver_only, both };

struct TrialConfig {
  ModelLayout layout;
  MeasurementMap::Kind ensemble = MeasurementMap::Kind::gaussian;
  Index m = 0;
  std::uint64_t base_seed = 0;
  double success_threshold = 1e-4;
  SolverOptions solver;
  CheckMode mode = CheckMode::certificate_only;
};

struct TrialRecord {
  Index trial_index = 0;
  std::optional<bool> certified;
  std::optional<bool> solver_success;
  double offT_dual_norm = bounds::kNaN;
  double q_norm = bounds::kNaN;
  int solve_iterations = 0;
  double wall_seconds = 0;
};

struct Instance {
  MeasurementMap map;
  ModelStructure model;
};

/// Per-trial seed: h(base_seed, trial_index) = rng::mix(base_seed, index).
std::uint64_t trial_seed(std::uint64_t base_seed, Index trial_index);

/// Builds the (map, signal, model) for one trial. The map and the signal
/// come from disjoint substreams of the trial seed. Signal defaults:
/// sparse  - uniform support, nonzeros +-1 with equal probability;
/// block   - uniform active blocks, i.i.d. standard normal entries;
/// lowrank - product of two i.i.d. standard normal factors.
Instance make_instance(const TrialConfig& config, std::uint64_t seed);

/// Runs one trial: fresh instance from trial_seed(base_seed, trial_index),
/// then certificate and/or solver checks per the mode. Deterministic in
/// (config, trial_index) regardless of thread schedule.
TrialRecord run_trial(const TrialConfig& config, Index trial_index);

struct SweepSpec {
  TrialConfig proto;                   // m / complexity overridden per cell
  std::vector<Index> m_values;
  std::vector<Index> complexity_values;  // empty: keep the proto's value
  Index trials = 0;
  double beta = bounds::kNaN;  // attach theory bounds when set
  double eps = bounds::kNaN;   // sign-ensemble bound knobs
  double c0 = 1.0, c1 = 1.0;
  int threads = 0;  // 0 = hardware concurrency
};

struct SweepRow {
  ModelLayout layout;
  MeasurementMap::Kind ensemble = MeasurementMap::Kind::gaussian;
  Index m = 0;
  Index trials = 0;
  Index cell_index = 0;
  // -1 when the mode did not measure that path
  Index cert_successes = -1;
  Index solver_successes = -1;
  double mean_dual_norm = bounds::kNaN;
  double max_dual_norm = bounds::kNaN;
  double beta = bounds::kNaN;
  std::optional<bounds::BoundReport> bound;  // attached when applicable
  std::uint64_t base_seed = 0;
};

/// Runs trials for every grid cell (complexity-major, then m) and aggregates.
/// Cell c uses per-trial seeds mix(mix(base_seed, c), trial). Trials run in
/// parallel; aggregation is performed in trial order, so results are
/// identical for any thread count. A bound is attached to a cell when beta
/// is set, the theorem applies to the (model, ensemble) pair, and the cell's
/// m reaches the theorem's threshold.
std::vector<SweepRow> sweep(const SweepSpec& spec);

struct Violation {
  Index row = 0;
  const char* rate_kind = "";  // "certificate" or "solver"
  double rate = 0;
  double bound = 0;
  double stderr_value = 0;
};

struct Summary {
  std::vector<Violation> violations;
};

/// Flags every cell whose measured success rate falls more than 3 binomial
/// standard errors below a non-vacuous attached bound.
Summary summarize(const std::vector<SweepRow>& rows);

}  // namespace dualcert::mc

#include "dualcert/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "dualcert/bounds.hpp"
#include "dualcert/certificate.hpp"
#include "dualcert/solvers.hpp"

namespace dualcert::cli {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_index(Index v) { return std::to_string(v); }

void add_flag_line(std::ostream& out, const bounds::BoundReport& r) {
  if (r.vacuous) out << "vacuous: true\n";
  if (r.degenerate) out << "degenerate: true\n";
  if (r.sign_ensemble) out << "gate_ok: " << (r.gate_ok ? "true" : "false") << "\n";
}

void print_report(std::ostream& out, const bounds::BoundReport& r) {
  out << "model: " << to_string(r.model)
      << (r.sign_ensemble ? " (sign)" : " (gaussian)") << "\n"
      << "beta: " << fmt(r.beta) << "\n"
      << "m_threshold: " << r.m_threshold << "\n"
      << "success_prob_lower: " << fmt(r.success_prob_lower) << "\n";
  if (!std::isnan(r.t)) out << "t: " << fmt(r.t) << "\n";
  if (!std::isnan(r.tau)) out << "tau: " << fmt(r.tau) << "\n";
  add_flag_line(out, r);
  out << "notes: " << r.notes << "\n";
}

// Accepts "a", "a,b,c", and "lo:hi:step" range syntax.
std::vector<Index> parse_grid(const std::string& text) {
  std::vector<Index> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto c1 = token.find(':');
    if (c1 == std::string::npos) {
      values.push_back(std::stoll(token));
      continue;
    }
    const auto c2 = token.find(':', c1 + 1);
    const long long lo = std::stoll(token.substr(0, c1));
    const long long hi = std::stoll(
        token.substr(c1 + 1, c2 == std::string::npos ? std::string::npos
                                                     : c2 - c1 - 1));
    const long long step =
        c2 == std::string::npos ? 1 : std::stoll(token.substr(c2 + 1));
    if (step <= 0) throw std::invalid_argument("grid step must be positive");
    for (long long v = lo; v <= hi; v += step) values.push_back(v);
  }
  return values;
}

struct ModelArgs {
  std::string model = "sparse";
  Index n = 0, s = 0;
  Index M = 0, B = 0, k = 0;
  Index n1 = 0, n2 = 0, r = 0;

  mc::ModelLayout layout() const {
    mc::ModelLayout l;
    if (model == "sparse") {
      l.kind = ModelKind::sparse;
      l.n = n;
      l.s = s;
    } else if (model == "block") {
      l.kind = ModelKind::block;
      l.M = M;
      l.B = B;
      l.k = k;
    } else if (model == "lowrank") {
      l.kind = ModelKind::lowrank;
      l.n1 = n1;
      l.n2 = n2;
      l.r = r;
    } else {
      throw std::invalid_argument("model must be sparse, block, or lowrank");
    }
    l.validate();
    return l;
  }
};

void add_model_options(CLI::App* cmd, ModelArgs& args) {
  cmd->add_option("--model", args.model, "sparse | block | lowrank")
      ->required();
  cmd->add_option("--n", args.n, "ambient dimension (sparse)");
  cmd->add_option("--s", args.s, "sparsity (sparse)");
  cmd->add_option("--M", args.M, "number of blocks (block)");
  cmd->add_option("--B", args.B, "block size (block)");
  cmd->add_option("--k", args.k, "active blocks (block)");
  cmd->add_option("--n1", args.n1, "matrix rows (lowrank)");
  cmd->add_option("--n2", args.n2, "matrix cols (lowrank)");
  cmd->add_option("--r", args.r, "rank (lowrank)");
}

MeasurementMap::Kind parse_ensemble(const std::string& name) {
  if (name == "gaussian") return MeasurementMap::Kind::gaussian;
  if (name == "sign") return MeasurementMap::Kind::sign;
  throw std::invalid_argument("ensemble must be gaussian or sign");
}

int cmd_bounds(const ModelArgs& margs, double beta,
               const std::string& ensemble, double eps, double c0, double c1) {
  const mc::ModelLayout layout = margs.layout();
  const bool sign = parse_ensemble(ensemble) == MeasurementMap::Kind::sign;
  bounds::BoundReport report;
  if (!sign) {
    switch (layout.kind) {
      case ModelKind::sparse:
        report = bounds::sparse_gaussian_bound(beta, layout.s, layout.n);
        break;
      case ModelKind::block:
        report = bounds::block_gaussian_bound(beta, layout.k, layout.B,
                                              layout.M);
        break;
      case ModelKind::lowrank:
        report = bounds::lowrank_gaussian_bound(beta, layout.r, layout.n1,
                                                layout.n2);
        break;
    }
  } else {
    if (std::isnan(eps))
      throw std::invalid_argument("sign-ensemble bounds require --eps");
    switch (layout.kind) {
      case ModelKind::sparse:
        report = bounds::bernoulli_sparse_bound(beta, eps, layout.s, layout.n,
                                                c0, c1);
        break;
      case ModelKind::block:
        report = bounds::bernoulli_block_bound(beta, eps, layout.k, layout.B,
                                               layout.M, c0, c1);
        break;
      case ModelKind::lowrank:
        throw std::domain_error(
            "no sign-ensemble guarantee exists for lowrank models");
    }
  }
  print_report(std::cout, report);
  return 0;
}

int cmd_certify(const ModelArgs& margs, const std::string& ensemble, Index m,
                std::uint64_t seed) {
  mc::TrialConfig config;
  config.layout = margs.layout();
  config.ensemble = parse_ensemble(ensemble);
  config.m = m;
  config.base_seed = seed;

  const mc::Instance inst =
      mc::make_instance(config, mc::trial_seed(seed, 0));
  const DualCertificate cert = construct_multiplier(inst.map, inst.model);
  const Verdict verdict = certify(cert);

  std::cout << "certified: " << (verdict.certified ? "true" : "false") << "\n"
            << "reason: " << to_string(verdict.reason) << "\n"
            << "offT_dual_norm: " << fmt(cert.offT_dual_norm) << "\n"
            << "margin: " << fmt(verdict.margin) << "\n"
            << "sigma_min: " << fmt(cert.sigma_min_T) << "\n"
            << "sigma_max: " << fmt(cert.sigma_max_T) << "\n"
            << "q_norm: " << fmt(cert.q_norm) << "\n"
            << "residual_T: " << fmt(cert.residual_T) << "\n"
            << "d_T: " << cert.dim_T << "\n";
  return verdict.certified ? 0 : 2;
}

int cmd_solve(const ModelArgs& margs, const std::string& ensemble, Index m,
              std::uint64_t seed, const SolverOptions& opts,
              double threshold) {
  mc::TrialConfig config;
  config.layout = margs.layout();
  config.ensemble = parse_ensemble(ensemble);
  config.m = m;
  config.base_seed = seed;
  config.solver = opts;

  const mc::Instance inst =
      mc::make_instance(config, mc::trial_seed(seed, 0));
  const VectorXd b = inst.map.apply(inst.model.x0());
  const Solution sol =
      solve_min_norm(inst.map, b, inst.model.norm_spec(), opts);

  const double rel_error =
      (sol.x_hat - inst.model.x0()).norm() / inst.model.x0().norm();
  std::cout << "converged: " << (sol.converged ? "true" : "false") << "\n"
            << "iterations: " << sol.iterations << "\n"
            << "primal_residual: " << fmt(sol.primal_residual) << "\n"
            << "dual_residual: " << fmt(sol.dual_residual) << "\n"
            << "objective: " << fmt(sol.objective) << "\n"
            << "relative_error: " << fmt(rel_error) << "\n";
  if (!sol.converged) return 3;
  return recovery_success(sol.x_hat, inst.model.x0(), threshold) ? 0 : 2;
}

int cmd_sweep(const mc::SweepSpec& spec, const std::string& out_path) {
  const std::vector<mc::SweepRow> rows = mc::sweep(spec);

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot open output file: " << out_path << "\n";
    return 1;
  }
  write_csv(out, rows);
  out.close();
  if (!out) {
    std::cerr << "error: failed writing output file: " << out_path << "\n";
    return 1;
  }

  const mc::Summary summary = mc::summarize(rows);
  for (const auto& v : summary.violations) {
    const auto& row = rows[static_cast<size_t>(v.row)];
    std::cerr << "violation: cell " << row.cell_index << " (m=" << row.m
              << ") " << v.rate_kind << " rate " << fmt(v.rate)
              << " < bound " << fmt(v.bound) << " - 3 * " << fmt(v.stderr_value)
              << "\n";
  }
  return summary.violations.empty() ? 0 : 2;
}

}  // namespace

std::string csv_header() {
  return "model,ensemble,n,n1,n2,s,k,r,B,M,m,beta,trials,cert_successes,"
         "solver_successes,mean_dual_norm,max_dual_norm,theory_lower_bound,"
         "base_seed";
}

std::string csv_row(const mc::SweepRow& row) {
  const mc::ModelLayout& l = row.layout;
  std::string fields[19];
  fields[0] = to_string(l.kind);
  fields[1] = to_string(row.ensemble);
  switch (l.kind) {
    case ModelKind::sparse:
      fields[2] = fmt_index(l.n);
      fields[5] = fmt_index(l.s);
      break;
    case ModelKind::block:
      fields[2] = fmt_index(l.M * l.B);
      fields[6] = fmt_index(l.k);
      fields[8] = fmt_index(l.B);
      fields[9] = fmt_index(l.M);
      break;
    case ModelKind::lowrank:
      fields[3] = fmt_index(l.n1);
      fields[4] = fmt_index(l.n2);
      fields[7] = fmt_index(l.r);
      break;
  }
  fields[10] = fmt_index(row.m);
  fields[11] = fmt(row.beta);
  fields[12] = fmt_index(row.trials);
  if (row.cert_successes >= 0) fields[13] = fmt_index(row.cert_successes);
  if (row.solver_successes >= 0) fields[14] = fmt_index(row.solver_successes);
  fields[15] = fmt(row.mean_dual_norm);
  fields[16] = fmt(row.max_dual_norm);
  if (row.bound) fields[17] = fmt(row.bound->success_prob_lower);
  fields[18] = std::to_string(row.base_seed);

  std::string line = fields[0];
  for (int i = 1; i < 19; ++i) {
    line += ',';
    line += fields[i];
  }
  return line;
}

void write_csv(std::ostream& out, const std::vector<mc::SweepRow>& rows) {
  out << csv_header() << "\n";
  for (const auto& row : rows) out << csv_row(row) << "\n";
}

int run(int argc, const char* const* argv) {
  CLI::App app{
      "dual-certificate analysis of exact recovery from random linear "
      "measurements"};
  app.require_subcommand(1);

  // bounds
  ModelArgs bounds_args;
  double beta = 0;
  std::string bounds_ensemble = "gaussian";
  double eps = bounds::kNaN, c0 = 1.0, c1 = 1.0;
  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds",
      "evaluate a sample threshold and success-probability lower bound "
      "(all logarithms are natural)");
  add_model_options(bounds_cmd, bounds_args);
  bounds_cmd->add_option("--beta", beta, "oversampling factor")->required();
  bounds_cmd->add_option("--ensemble", bounds_ensemble, "gaussian | sign");
  bounds_cmd->add_option("--eps", eps, "sign-ensemble slack in (0,1)");
  bounds_cmd->add_option("--c0", c0, "sign-ensemble gate constant (default 1)");
  bounds_cmd->add_option("--c1", c1, "sign-ensemble tail constant (default 1)");

  // certify
  ModelArgs certify_args;
  std::string certify_ensemble = "gaussian";
  Index certify_m = 0;
  std::uint64_t certify_seed = 0;
  CLI::App* certify_cmd = app.add_subcommand(
      "certify", "construct the dual multiplier for one random instance and "
                 "test the uniqueness conditions");
  add_model_options(certify_cmd, certify_args);
  certify_cmd->add_option("--m", certify_m, "measurement count")->required();
  certify_cmd->add_option("--ensemble", certify_ensemble, "gaussian | sign");
  certify_cmd->add_option("--seed", certify_seed, "base seed")->required();

  // solve
  ModelArgs solve_args;
  std::string solve_ensemble = "gaussian";
  Index solve_m = 0;
  std::uint64_t solve_seed = 0;
  SolverOptions solver_opts;
  double success_threshold = 1e-4;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "solve the norm-minimization program for one random instance "
               "and report the recovery error");
  add_model_options(solve_cmd, solve_args);
  solve_cmd->add_option("--m", solve_m, "measurement count")->required();
  solve_cmd->add_option("--ensemble", solve_ensemble, "gaussian | sign");
  solve_cmd->add_option("--seed", solve_seed, "base seed")->required();
  solve_cmd->add_option("--rho", solver_opts.rho, "splitting penalty (default 1)");
  solve_cmd->add_option("--max-iters", solver_opts.max_iterations,
                        "iteration cap (default 10000)");
  solve_cmd->add_option("--eps-abs", solver_opts.eps_abs,
                        "absolute tolerance (default 1e-9)");
  solve_cmd->add_option("--eps-rel", solver_opts.eps_rel,
                        "relative tolerance (default 1e-9)");
  solve_cmd->add_option("--threshold", success_threshold,
                        "relative recovery threshold (default 1e-4)");

  // sweep
  ModelArgs sweep_args;
  std::string sweep_ensemble = "gaussian";
  std::string m_grid, complexity_grid, out_path;
  Index trials = 0;
  std::uint64_t sweep_seed = 0;
  double sweep_beta = bounds::kNaN;
  double sweep_eps = bounds::kNaN, sweep_c0 = 1.0, sweep_c1 = 1.0;
  std::string mode = "certificate";
  int threads = 0;
  SolverOptions sweep_solver;
  double sweep_threshold = 1e-4;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "run Monte Carlo trials over a grid and write one CSV row per "
               "cell; flags cells falling below an attached bound");
  add_model_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--m", m_grid, "m grid: list a,b,c or range lo:hi:step")
      ->required();
  sweep_cmd->add_option("--complexity", complexity_grid,
                        "s|k|r grid (defaults to the --s/--k/--r value)");
  sweep_cmd->add_option("--trials", trials, "trials per cell")->required();
  sweep_cmd->add_option("--seed", sweep_seed, "base seed")->required();
  sweep_cmd->add_option("--ensemble", sweep_ensemble, "gaussian | sign");
  sweep_cmd->add_option("--beta", sweep_beta,
                        "attach theory bounds at this beta");
  sweep_cmd->add_option("--eps", sweep_eps, "sign-ensemble bound slack");
  sweep_cmd->add_option("--c0", sweep_c0, "sign-ensemble gate constant");
  sweep_cmd->add_option("--c1", sweep_c1, "sign-ensemble tail constant");
  sweep_cmd->add_option("--mode", mode, "certificate | solver | both");
  sweep_cmd->add_option("--threads", threads,
                        "worker cap (default: available parallelism)");
  sweep_cmd->add_option("--out", out_path, "output CSV path")->required();
  sweep_cmd->add_option("--max-iters", sweep_solver.max_iterations,
                        "solver iteration cap");
  sweep_cmd->add_option("--threshold", sweep_threshold,
                        "relative recovery threshold (default 1e-4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (bounds_cmd->parsed())
      return cmd_bounds(bounds_args, beta, bounds_ensemble, eps, c0, c1);
    if (certify_cmd->parsed())
      return cmd_certify(certify_args, certify_ensemble, certify_m,
                         certify_seed);
    if (solve_cmd->parsed())
      return cmd_solve(solve_args, solve_ensemble, solve_m, solve_seed,
                       solver_opts, success_threshold);
    if (sweep_cmd->parsed()) {
      mc::SweepSpec spec;
      spec.proto.layout = sweep_args.layout();
      spec.proto.ensemble = parse_ensemble(sweep_ensemble);
      spec.proto.base_seed = sweep_seed;
      spec.proto.solver = sweep_solver;
      spec.proto.success_threshold = sweep_threshold;
      if (mode == "certificate")
        spec.proto.mode = mc::CheckMode::certificate_only;
      else if (mode == "solver")
        spec.proto.mode = mc::CheckMode::solver_only;
      else if (mode == "both")
        spec.proto.mode = mc::CheckMode::both;
      else
        throw std::invalid_argument("mode must be certificate, solver, or both");
      spec.m_values = parse_grid(m_grid);
      if (spec.m_values.empty()) throw std::invalid_argument("empty grid");
      spec.complexity_values = parse_grid(complexity_grid);
      spec.trials = trials;
      spec.beta = sweep_beta;
      spec.eps = sweep_eps;
      spec.c0 = sweep_c0;
      spec.c1 = sweep_c1;
      spec.threads = threads;
      return cmd_sweep(spec, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dualcert::cli

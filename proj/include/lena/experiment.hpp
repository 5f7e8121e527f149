#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lena/baselines.hpp"
#include "lena/certify.hpp"
#include "lena/config.hpp"
#include "lena/driver.hpp"

namespace lena {

struct SummaryRecord {
  std::string algo;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::BudgetExhausted;
  double final_objective = 0.0;
  std::optional<double> relative_error;  // matrix sensing only
  std::int64_t sgrad_evals = 0;
  std::int64_t steps = 0;
  std::optional<Certificate> certificate;
  double wall_time_s = 0.0;
  std::string trace_path;
  std::string point_path;
  std::string error;  // per-trial failure; empty on success
};

struct ExperimentResult {
  std::vector<SummaryRecord> summaries;
  std::string out_dir;
  std::string summary_path;
};

std::unique_ptr<Problem> build_problem(const ProblemSpec &spec);

/// Fixed initial point shared by every trial: the rank-deficient saddle
/// start for matrix sensing, the origin (or a seeded Gaussian of scale
/// x0_scale) for the quartic.
Vector initial_point(const RunConfig &config, const Problem &problem);

/// Theorem-mode derivation (constants from the config or estimated from the
/// instance) or manual fill; budget comes from the config either way.
HyperParams resolve_params(const RunConfig &config, const Problem &problem, VecRef x0);

BaselineParams resolve_baseline(const RunConfig &config);

/// One trial per seed (optionally in parallel), each writing a trace CSV
/// and final point; aggregates a summary.csv plus an instance snapshot in
/// out_dir. Per-trial errors are recorded in the summary, not rethrown.
/// Summary certificates check the gradient at 2*eps (the certified output
/// scale of the driver); Definition-style certification at eps is available
/// through certify() directly.
ExperimentResult run_experiment(const RunConfig &config);

/// Whitespace-separated doubles.
Vector read_point_file(const std::string &path, int expected_dim);
void write_point_file(VecRef x, const std::string &path);

std::string summary_to_csv(const std::vector<SummaryRecord> &summaries);

}  // namespace lena

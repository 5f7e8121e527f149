#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lena/errors.hpp"

namespace lena {

enum class Phase { GD, Perturb, Escape };

const char *phase_name(Phase p);
Phase phase_from_name(const std::string &name);

/// One row per iterate move (gradient step, perturbation, or escape step).
/// `step` is the index of the iterate the move departs from; `eta_used` is
/// absent on perturbation rows; movement_sq_cum is the accumulated
/// sum of eta_i^2 ||d_i||^2 since the epoch's perturbation (0 outside the
/// escape phase and on the perturbation row itself).
struct TraceRecord {
  std::int64_t step = 0;
  int epoch = 0;
  Phase phase = Phase::GD;
  std::int64_t sgrad_evals_cum = 0;
  std::optional<double> eta_used;
  double d_norm = 0.0;
  double movement_sq_cum = 0.0;
  bool shrink_triggered = false;
  std::optional<double> objective;       // F_full
  std::optional<double> grad_norm_full;  // ||grad F||
  std::optional<double> estimator_error;
};

inline constexpr const char *trace_csv_header =
    "step,epoch,phase,sgrad_evals_cum,eta_used,d_norm,movement_sq_cum,shrink_triggered,"
    "F_full,grad_norm_full,estimator_error";

struct Trace {
  std::string meta;  // emitted as a leading '#' comment line when nonempty
  std::vector<TraceRecord> rows;
};

std::string format_double(double v);

std::string trace_to_csv(const Trace &trace);
void write_trace_csv(const Trace &trace, const std::string &path);
Trace read_trace_csv(const std::string &path);

}  // namespace lena

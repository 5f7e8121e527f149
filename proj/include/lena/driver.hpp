#pragma once

#include <cstdint>
#include <optional>

#include "lena/hyperparams.hpp"
#include "lena/problem.hpp"
#include "lena/trace.hpp"

namespace lena {

enum class RunStatus { Converged, BudgetExhausted };

const char *run_status_name(RunStatus s);

struct RunOptions {
  /// Log F_full / grad_norm_full every this many steps (phase boundaries and
  /// trigger rows are always logged); 0 disables objective logging.
  int log_every = 10;
  /// Record ||d_t - grad F(x_t)|| on every row (test mode; costs a full
  /// gradient per step).
  bool track_estimator_error = false;
  /// Stop after this many steps (0 = unlimited); reported as BudgetExhausted.
  std::int64_t max_steps = 0;
};

struct RunOutcome {
  Vector x_out;
  RunStatus status = RunStatus::BudgetExhausted;
  Trace trace;
  std::int64_t sgrad_evals = 0;
  std::int64_t steps = 0;
  int epochs = 0;
  /// Whether the run ever reached an escape anchor (x_out is that anchor
  /// when true, the latest iterate otherwise).
  bool anchored = false;
};

/// Normalized gradient step x - (eta/||d||) d; the movement length is
/// exactly eta. ||d|| must be positive (the GD-phase gate guarantees it).
Vector gd_step(VecRef x, VecRef d, double eta);

/// x + xi with xi uniform on the solid ball of the given radius.
Vector perturb(VecRef x, double radius, Rng &rng);

struct ShrinkDecision {
  double eta = 0.0;
  bool triggered = false;
};

/// Last-step shrinkage rule for the k-th post-perturbation step (k >= 1,
/// inclusive of the current one). With candidate movement eta_h^2 d_norm^2
/// on top of sum_prev: if the total strictly exceeds k*dbar, the step size
/// shrinks to sqrt(k*dbar - sum_prev)/d_norm so the accumulated sum lands
/// exactly on k*dbar; ties and d_norm = 0 do not trigger.
ShrinkDecision shrink_eta(double sum_prev, std::int64_t k, double dbar, double d_norm,
                          double eta_h);

/// Two-phase perturbed descent driver. Epochs run a normalized GD phase
/// while ||d_t|| > eps, then perturb and take up to t_thres escape steps
/// under the movement budget; a shrinkage trigger ends the epoch, while a
/// full quiet escape phase ends the run with the epoch's anchor point.
RunOutcome lena_run(const Problem &problem, const HyperParams &params, VecRef x0, Rng &rng,
                    const RunOptions &options = {});

}  // namespace lena

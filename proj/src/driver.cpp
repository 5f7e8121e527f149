#include "lena/driver.hpp"

#include <cmath>

namespace lena {

const char *run_status_name(RunStatus s) {
  return s == RunStatus::Converged ? "Converged" : "BudgetExhausted";
}

Vector gd_step(VecRef x, VecRef d, double eta) {
  const double norm = d.norm();
  require(norm > 0.0, Errc::invalid_argument, "gd_step: zero estimate");
  return x - (eta / norm) * d;
}

Vector perturb(VecRef x, double radius, Rng &rng) {
  require(radius >= 0.0, Errc::invalid_argument, "perturb: negative radius");
  return x + rng.ball(static_cast<int>(x.size()), radius);
}

ShrinkDecision shrink_eta(double sum_prev, std::int64_t k, double dbar, double d_norm,
                          double eta_h) {
  require(k >= 1, Errc::invalid_argument, "shrink_eta: k must be >= 1");
  require(d_norm >= 0.0, Errc::invalid_argument, "shrink_eta: negative d_norm");
  const double cap = static_cast<double>(k) * dbar;
  const double headroom = cap - sum_prev;
  require(headroom >= 0.0, Errc::numeric, "shrink_eta: movement budget already exceeded");
  if (d_norm == 0.0) return {eta_h, false};
  const double candidate = sum_prev + eta_h * eta_h * d_norm * d_norm;
  if (candidate > cap) return {std::sqrt(headroom) / d_norm, true};
  return {eta_h, false};
}

namespace {

class Runner {
 public:
  Runner(const Problem &problem, const HyperParams &params, VecRef x0, Rng &rng,
         const RunOptions &options)
      : problem_(problem), params_(params), rng_(rng), options_(options), x_(x0) {}

  RunOutcome run() {
    UpdateInfo init_info;
    est_ = estimator_init(params_.estimator_config(), problem_, x_, rng_, &init_info);
    evals_ = init_info.evals;
    if (evals_ > params_.budget) return finish(RunStatus::BudgetExhausted);

    bool find = false;
    while (!find) {
      epoch_ += 1;
      find = true;

      while (est_.estimate.norm() > params_.eps) {
        const double d_norm = est_.estimate.norm();
        const double eta_t = params_.eta / d_norm;
        if (!move(Phase::GD, eta_t, d_norm, 0.0, false)) return finish(RunStatus::BudgetExhausted);
      }

      anchor_ = x_;
      anchored_ = true;
      if (!perturb_step()) return finish(RunStatus::BudgetExhausted);

      double moved_sq = 0.0;
      for (std::int64_t k = 1; k <= params_.t_thres; ++k) {
        const double d_norm = est_.estimate.norm();
        const auto decision = shrink_eta(moved_sq, k, params_.dbar, d_norm, params_.eta_h);
        moved_sq += decision.eta * decision.eta * d_norm * d_norm;
        if (!move(Phase::Escape, decision.eta, d_norm, moved_sq, decision.triggered))
          return finish(RunStatus::BudgetExhausted);
        if (decision.triggered) {
          find = false;
          break;
        }
      }
    }
    return finish(RunStatus::Converged);
  }

 private:
  // Applies one iterate move with the given step size, updates the
  // estimator, appends the trace row, and enforces the caps. Returns false
  // when the run must halt.
  bool move(Phase phase, double eta_t, double d_norm, double moved_sq, bool triggered) {
    TraceRecord row;
    row.step = est_.counter;
    row.epoch = epoch_;
    row.phase = phase;
    row.eta_used = eta_t;
    row.d_norm = d_norm;
    row.movement_sq_cum = moved_sq;
    row.shrink_triggered = triggered;
    maybe_log(row);

    const Vector x_next = d_norm > 0.0 ? Vector(x_ - eta_t * est_.estimate) : x_;
    const UpdateInfo info = estimator_update(est_, problem_, x_next, x_, rng_);
    evals_ += info.evals;
    x_ = x_next;
    steps_ += 1;

    row.sgrad_evals_cum = evals_;
    trace_.rows.push_back(row);
    return within_caps();
  }

  bool perturb_step() {
    TraceRecord row;
    row.step = est_.counter;
    row.epoch = epoch_;
    row.phase = Phase::Perturb;
    row.d_norm = est_.estimate.norm();
    row.movement_sq_cum = 0.0;
    maybe_log(row);

    const Vector x_next = perturb(x_, params_.radius, rng_);
    const UpdateInfo info = estimator_update(est_, problem_, x_next, x_, rng_);
    evals_ += info.evals;
    x_ = x_next;
    steps_ += 1;

    row.sgrad_evals_cum = evals_;
    trace_.rows.push_back(row);
    return within_caps();
  }

  bool within_caps() const {
    if (evals_ > params_.budget) return false;
    if (options_.max_steps > 0 && steps_ >= options_.max_steps) return false;
    return true;
  }

  void maybe_log(TraceRecord &row) {
    if (options_.log_every <= 0) {
      if (options_.track_estimator_error)
        row.estimator_error = estimator_error(est_, problem_, x_);
      return;
    }
    const bool boundary = row.phase == Phase::Perturb || row.shrink_triggered;
    const bool cadence = steps_ % static_cast<std::int64_t>(options_.log_every) == 0;
    if (boundary || cadence) {
      row.objective = problem_.full_value(x_);
      row.grad_norm_full = problem_.full_gradient(x_).norm();
    }
    if (options_.track_estimator_error) row.estimator_error = estimator_error(est_, problem_, x_);
  }

  RunOutcome finish(RunStatus status) {
    RunOutcome out;
    out.status = status;
    out.x_out = anchored_ ? anchor_ : x_;
    out.anchored = anchored_;
    out.trace = std::move(trace_);
    out.sgrad_evals = evals_;
    out.steps = steps_;
    out.epochs = epoch_;
    return out;
  }

  const Problem &problem_;
  const HyperParams &params_;
  Rng &rng_;
  const RunOptions &options_;

  Vector x_;
  Vector anchor_;
  bool anchored_ = false;
  EstimatorState est_;
  Trace trace_;
  std::int64_t evals_ = 0;
  std::int64_t steps_ = 0;
  int epoch_ = 0;
};

}  // namespace

RunOutcome lena_run(const Problem &problem, const HyperParams &params, VecRef x0, Rng &rng,
                    const RunOptions &options) {
  validate_hyperparams(params);
  require(x0.size() == problem.dim(), Errc::invalid_argument, "lena_run: x0 dimension mismatch");
  Runner runner(problem, params, x0, rng, options);
  return runner.run();
}

}  // namespace lena

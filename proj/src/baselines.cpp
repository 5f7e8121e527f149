#include "lena/baselines.hpp"

namespace lena {

namespace {

class BaselineRunner {
 public:
  BaselineRunner(BaselineKind kind, const Problem &problem, const BaselineParams &params, VecRef x0,
                 Rng &rng, const RunOptions &options)
      : kind_(kind), problem_(problem), params_(params), rng_(rng), options_(options), x_(x0) {}

  RunOutcome run() {
    if (params_.budget == 0) return finish(RunStatus::BudgetExhausted);
    if (kind_ == BaselineKind::PlainSpider) return run_plain_spider();
    return run_sgd();
  }

 private:
  RunOutcome run_sgd() {
    require(params_.step > 0.0, Errc::invalid_argument, "sgd: step size must be positive");
    require(params_.batch >= 1, Errc::invalid_argument, "sgd: batch must be >= 1");
    std::vector<Sample> batch(static_cast<std::size_t>(params_.batch));
    Vector grad_sum;
    while (true) {
      if (kind_ == BaselineKind::PerturbedSgd && params_.noise_radius > 0.0 && steps_ > 0 &&
          steps_ % params_.noise_period == 0) {
        TraceRecord row = base_row(Phase::Perturb);
        maybe_log(row);
        x_ = perturb(x_, params_.noise_radius, rng_);
        steps_ += 1;
        row.sgrad_evals_cum = evals_;
        trace_.rows.push_back(row);
        if (!within_caps()) return finish(RunStatus::BudgetExhausted);
        continue;
      }
      for (auto &s : batch) s = problem_.draw_sample(rng_);
      problem_.accumulate_grad(x_, batch, grad_sum);
      evals_ += params_.batch;
      const Vector g = grad_sum / static_cast<double>(params_.batch);

      TraceRecord row = base_row(Phase::GD);
      row.eta_used = params_.step;
      row.d_norm = g.norm();
      maybe_log(row);
      x_ -= params_.step * g;
      steps_ += 1;
      row.sgrad_evals_cum = evals_;
      trace_.rows.push_back(row);
      if (!within_caps()) return finish(RunStatus::BudgetExhausted);
    }
  }

  RunOutcome run_plain_spider() {
    require(params_.eta > 0.0, Errc::invalid_argument, "spider: eta must be positive");
    EstimatorConfig cfg{EstimatorKind::Spider, params_.big_batch, params_.mini_batch,
                        params_.period, 1.0, SamplingMode::WithReplacement};
    UpdateInfo init_info;
    EstimatorState est = estimator_init(cfg, problem_, x_, rng_, &init_info);
    evals_ = init_info.evals;
    if (evals_ > params_.budget) return finish(RunStatus::BudgetExhausted);
    while (true) {
      const double d_norm = est.estimate.norm();
      if (d_norm <= params_.eps_stop) return finish(RunStatus::Converged);

      TraceRecord row = base_row(Phase::GD);
      row.step = est.counter;
      row.eta_used = params_.eta / d_norm;
      row.d_norm = d_norm;
      if (options_.track_estimator_error)
        row.estimator_error = estimator_error(est, problem_, x_);
      maybe_log(row);

      const Vector x_next = x_ - (params_.eta / d_norm) * est.estimate;
      evals_ += spider_update(est, problem_, x_next, x_, rng_).evals;
      x_ = x_next;
      steps_ += 1;
      row.sgrad_evals_cum = evals_;
      trace_.rows.push_back(row);
      if (!within_caps()) return finish(RunStatus::BudgetExhausted);
    }
  }

  TraceRecord base_row(Phase phase) {
    TraceRecord row;
    row.step = steps_;
    row.epoch = 1;
    row.phase = phase;
    return row;
  }

  bool within_caps() const {
    if (evals_ > params_.budget) return false;
    if (options_.max_steps > 0 && steps_ >= options_.max_steps) return false;
    return true;
  }

  void maybe_log(TraceRecord &row) {
    if (options_.log_every <= 0) return;
    const bool cadence = steps_ % static_cast<std::int64_t>(options_.log_every) == 0;
    if (row.phase == Phase::Perturb || cadence) {
      row.objective = problem_.full_value(x_);
      row.grad_norm_full = problem_.full_gradient(x_).norm();
    }
  }

  RunOutcome finish(RunStatus status) {
    RunOutcome out;
    out.status = status;
    out.x_out = x_;
    out.anchored = false;
    out.trace = std::move(trace_);
    out.sgrad_evals = evals_;
    out.steps = steps_;
    out.epochs = 1;
    return out;
  }

  BaselineKind kind_;
  const Problem &problem_;
  const BaselineParams &params_;
  Rng &rng_;
  const RunOptions &options_;

  Vector x_;
  Trace trace_;
  std::int64_t evals_ = 0;
  std::int64_t steps_ = 0;
};

}  // namespace

RunOutcome baseline_run(BaselineKind kind, const Problem &problem, const BaselineParams &params,
                        VecRef x0, Rng &rng, const RunOptions &options) {
  require(x0.size() == problem.dim(), Errc::invalid_argument,
          "baseline_run: x0 dimension mismatch");
  require(params.budget >= 0, Errc::invalid_argument, "baseline_run: negative budget");
  BaselineRunner runner(kind, problem, params, x0, rng, options);
  return runner.run();
}

}  // namespace lena

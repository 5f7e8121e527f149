#include "lena/estimator.hpp"

namespace lena {

namespace {

// Draws happen in index order i = 1..count so replays under a fixed stream
// are well defined.
std::vector<Sample> draw_batch(const EstimatorConfig &config, const Problem &problem,
                               std::int64_t count, Rng &rng) {
  std::vector<Sample> batch(static_cast<std::size_t>(count));
  if (config.sampling == SamplingMode::Exhaustive) {
    const std::int64_t n = problem.num_components();
    for (std::int64_t i = 0; i < count; ++i)
      batch[static_cast<std::size_t>(i)] = Sample{static_cast<std::uint64_t>(i % n)};
  } else {
    for (std::int64_t i = 0; i < count; ++i)
      batch[static_cast<std::size_t>(i)] = problem.draw_sample(rng);
  }
  return batch;
}

void big_batch_refresh(EstimatorState &state, const Problem &problem, VecRef x, Rng &rng) {
  const auto batch = draw_batch(state.config, problem, state.config.big_batch, rng);
  Vector sum;
  problem.accumulate_grad(x, batch, sum);
  state.estimate = sum / static_cast<double>(state.config.big_batch);
}

}  // namespace

void validate_estimator_config(const EstimatorConfig &config) {
  require(config.big_batch >= 1, Errc::invalid_argument, "estimator: B must be >= 1");
  require(config.mini_batch >= 1, Errc::invalid_argument, "estimator: b must be >= 1");
  if (config.kind == EstimatorKind::Spider)
    require(config.period >= 1, Errc::invalid_argument, "estimator: q must be >= 1");
  if (config.kind == EstimatorKind::Storm)
    require(config.weight > 0.0 && config.weight <= 1.0, Errc::invalid_argument,
            "estimator: STORM weight a must lie in (0, 1]");
}

EstimatorState estimator_init(const EstimatorConfig &config, const Problem &problem, VecRef x1,
                              Rng &rng, UpdateInfo *info) {
  validate_estimator_config(config);
  EstimatorState state;
  state.config = config;
  big_batch_refresh(state, problem, x1, rng);
  state.counter = 1;
  if (info) *info = UpdateInfo{config.big_batch, true};
  return state;
}

UpdateInfo spider_update(EstimatorState &state, const Problem &problem, VecRef x_new, VecRef x_old,
                         Rng &rng) {
  require(state.config.kind == EstimatorKind::Spider, Errc::invalid_argument,
          "spider_update on a non-SPIDER state");
  UpdateInfo info;
  if (state.counter % state.config.period == 0) {
    big_batch_refresh(state, problem, x_new, rng);
    info.evals = state.config.big_batch;
    info.refreshed = true;
  } else {
    const auto batch = draw_batch(state.config, problem, state.config.mini_batch, rng);
    Vector sum_new, sum_old;
    problem.accumulate_grad_pair(x_new, x_old, batch, sum_new, sum_old);
    state.estimate += (sum_new - sum_old) / static_cast<double>(state.config.mini_batch);
    info.evals = 2 * state.config.mini_batch;
  }
  state.counter += 1;
  return info;
}

UpdateInfo storm_update(EstimatorState &state, const Problem &problem, VecRef x_new, VecRef x_old,
                        Rng &rng) {
  require(state.config.kind == EstimatorKind::Storm, Errc::invalid_argument,
          "storm_update on a non-STORM state");
  const auto batch = draw_batch(state.config, problem, state.config.mini_batch, rng);
  Vector sum_new, sum_old;
  problem.accumulate_grad_pair(x_new, x_old, batch, sum_new, sum_old);
  const double inv_b = 1.0 / static_cast<double>(state.config.mini_batch);
  state.estimate =
      (1.0 - state.config.weight) * (state.estimate - inv_b * sum_old) + inv_b * sum_new;
  state.counter += 1;
  return UpdateInfo{2 * state.config.mini_batch, false};
}

UpdateInfo estimator_update(EstimatorState &state, const Problem &problem, VecRef x_new,
                            VecRef x_old, Rng &rng) {
  return state.config.kind == EstimatorKind::Spider
             ? spider_update(state, problem, x_new, x_old, rng)
             : storm_update(state, problem, x_new, x_old, rng);
}

double estimator_error(const EstimatorState &state, const Problem &problem, VecRef x) {
  return (state.estimate - problem.full_gradient(x)).norm();
}

}  // namespace lena

#pragma once

#include <cstdint>
#include <vector>

#include "lena/problem.hpp"

namespace lena {

enum class EstimatorKind { Spider, Storm };

/// Exhaustive sampling walks the components in index order instead of
/// drawing them; test-only mode for exact-oracle checks (e.g. a big batch
/// of size n reproduces the full gradient).
enum class SamplingMode { WithReplacement, Exhaustive };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Spider;
  std::int64_t big_batch = 1;   // B: init (and SPIDER refresh) batch size
  std::int64_t mini_batch = 1;  // b
  std::int64_t period = 1;      // q: SPIDER refresh period
  double weight = 1.0;          // a: STORM weight in (0, 1]
  SamplingMode sampling = SamplingMode::WithReplacement;
};

/// Recursive gradient estimate d_t. The counter equals the index of the
/// iterate the estimate refers to: init produces d_1 (counter 1), and an
/// update consuming (x_t, x_{t+1}) advances counter t -> t+1. SPIDER's
/// big-batch branch fires on updates whose pre-update counter is a
/// multiple of q, i.e. at counters {q, 2q, ...}.
struct EstimatorState {
  EstimatorConfig config;
  Vector estimate;
  std::int64_t counter = 0;
};

struct UpdateInfo {
  std::int64_t evals = 0;  // individual stochastic-gradient evaluations
  bool refreshed = false;  // big-batch branch taken
};

void validate_estimator_config(const EstimatorConfig &config);

/// d_1 = mean of B stochastic gradients at x1 (both estimators).
EstimatorState estimator_init(const EstimatorConfig &config, const Problem &problem, VecRef x1,
                              Rng &rng, UpdateInfo *info = nullptr);

/// SPIDER step: big-batch refresh at x_new when counter % q == 0, otherwise
/// d += mean_b [grad f(x_new; xi) - grad f(x_old; xi)] over fresh samples.
UpdateInfo spider_update(EstimatorState &state, const Problem &problem, VecRef x_new, VecRef x_old,
                         Rng &rng);

/// STORM step: d = (1 - a) (d - mean_b grad f(x_old; xi)) + mean_b grad
/// f(x_new; xi), both means over the same b fresh samples.
UpdateInfo storm_update(EstimatorState &state, const Problem &problem, VecRef x_new, VecRef x_old,
                        Rng &rng);

/// Dispatches on state.config.kind.
UpdateInfo estimator_update(EstimatorState &state, const Problem &problem, VecRef x_new,
                            VecRef x_old, Rng &rng);

/// ||d - grad F(x)||; test-only diagnostic (needs the full-gradient oracle).
double estimator_error(const EstimatorState &state, const Problem &problem, VecRef x);

}  // namespace lena

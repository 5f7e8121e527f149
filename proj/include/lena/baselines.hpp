#pragma once

#include "lena/driver.hpp"

namespace lena {

enum class BaselineKind { Sgd, PerturbedSgd, PlainSpider };

struct BaselineParams {
  // SGD / perturbed SGD
  double step = 0.0;
  std::int64_t batch = 1;
  double noise_radius = 0.0;       // perturbed SGD only; 0 disables injection
  std::int64_t noise_period = 1000;

  // plain SPIDER (normalized steps, no escape phase)
  double eta = 0.0;
  std::int64_t big_batch = 1;
  std::int64_t mini_batch = 1;
  std::int64_t period = 1;
  double eps_stop = 0.0;  // first-order stop gate; 0 never stops early

  std::int64_t budget = 0;
};

/// Baseline optimizers emitting the same trace schema as lena_run.
/// SGD and perturbed SGD run until the budget is exhausted; plain SPIDER
/// additionally stops (Converged) once ||d_t|| <= eps_stop.
RunOutcome baseline_run(BaselineKind kind, const Problem &problem, const BaselineParams &params,
                        VecRef x0, Rng &rng, const RunOptions &options = {});

}  // namespace lena

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lena/certify.hpp"
#include "lena/driver.hpp"
#include "lena/saddle_quartic.hpp"
#include "oracles.hpp"

using namespace lena;

namespace {

HyperParams quartic_manual(EstimatorKind kind) {
  HyperParams hp;
  hp.kind = kind;
  hp.eps = 0.05;
  hp.eps_h = 0.5;
  hp.delta = 0.05;
  hp.eta = 0.01;
  hp.eta_h = 0.1;
  hp.radius = 0.01;
  hp.t_thres = 80;
  hp.dbar = 1e-4;
  hp.big_batch = 1;
  hp.mini_batch = 1;
  hp.period = 64;
  hp.weight = 1.0;
  hp.budget = 2'000'000;
  return hp;
}

struct EpochAudit {
  int violations = 0;
  int escape_rows = 0;
  int gd_rows = 0;
  int bad_gd_movement = 0;
  int triggers_not_closing = 0;
};

EpochAudit audit_trace(const Trace &trace, double eta, double dbar) {
  EpochAudit audit;
  double sum = 0.0;
  std::int64_t perturb_step = 0;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRecord &row = trace.rows[i];
    if (row.phase == Phase::Perturb) {
      sum = 0.0;
      perturb_step = row.step;
      continue;
    }
    if (row.phase == Phase::Escape) {
      audit.escape_rows += 1;
      REQUIRE(row.eta_used.has_value());
      sum += *row.eta_used * *row.eta_used * row.d_norm * row.d_norm;
      const double k = static_cast<double>(row.step - perturb_step);
      if (sum > k * dbar + 1e-12) audit.violations += 1;
      if (std::abs(sum - row.movement_sq_cum) > 1e-9) audit.violations += 1;
      if (row.shrink_triggered) {
        const bool closes = (i + 1 == trace.rows.size()) ||
                            (trace.rows[i + 1].epoch == row.epoch + 1);
        if (!closes) audit.triggers_not_closing += 1;
      }
    }
    if (row.phase == Phase::GD) {
      audit.gd_rows += 1;
      REQUIRE(row.eta_used.has_value());
      const double len = *row.eta_used * row.d_norm;
      if (std::abs(len - eta) > 1e-12 * eta) audit.bad_gd_movement += 1;
    }
  }
  return audit;
}

}  // namespace

TEST_CASE("gd_step arithmetic example") {
  const Vector x = Vector::Zero(2);
  const Vector d = (Eigen::VectorXd(2) << 3.0, 4.0).finished();
  const Vector x1 = gd_step(x, d, 0.1);
  CHECK(x1[0] == doctest::Approx(-0.06).epsilon(1e-15));
  CHECK(x1[1] == doctest::Approx(-0.08).epsilon(1e-15));
  CHECK((x1 - x).norm() == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("gd_step is invariant to the estimate's scale") {
  Rng rng(5);
  const Vector x = rng.gaussian(4);
  const Vector d = rng.gaussian(4);
  const Vector a = gd_step(x, d, 0.3);
  const Vector b = gd_step(x, 77.7 * d, 0.3);
  CHECK((a - b).norm() <= 1e-14);
  CHECK_THROWS_AS(gd_step(x, Vector::Zero(4), 0.3), Error);
}

TEST_CASE("gd_step movement equals eta for random inputs") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const int dim = 5;
    const Vector x = rng.gaussian(dim);
    Vector d = rng.gaussian(dim);
    while (d.norm() == 0.0) d = rng.gaussian(dim);
    const double eta = 0.5 + 1.5 * rng.uniform();
    const Vector x1 = gd_step(x, d, eta);
    CHECK(std::abs((x1 - x).norm() - eta) <= 1e-15 * eta);
  }
}

TEST_CASE("perturb stays in the ball and vanishes with the radius") {
  Rng rng(7);
  const Vector x = rng.gaussian(6);
  for (int i = 0; i < 200; ++i) {
    const Vector y = perturb(x, 0.25, rng);
    CHECK((y - x).norm() <= 0.25 + 1e-15);
  }
  const Vector same = perturb(x, 0.0, rng);
  CHECK((same - x).norm() == 0.0);
  const Vector close = perturb(x, 1e-12, rng);
  CHECK((close - x).norm() <= 1e-12);
}

TEST_CASE("shrink_eta worked examples") {
  // trigger: candidate sum 0.9 over cap 0.75, shrink to sqrt(0.15)
  const auto hit = shrink_eta(0.6, 3, 0.25, 1.0, std::sqrt(0.3));
  CHECK(hit.triggered);
  CHECK(hit.eta == doctest::Approx(std::sqrt(0.15)).epsilon(1e-12));

  // no trigger: 0.15 <= 0.75
  const auto miss = shrink_eta(0.1, 3, 0.25, 1.0, std::sqrt(0.05));
  CHECK_FALSE(miss.triggered);
  CHECK(miss.eta == doctest::Approx(std::sqrt(0.05)).epsilon(1e-12));

  // exact tie does not trigger (strict inequality)
  const auto tie = shrink_eta(0.5, 3, 0.25, 0.5, 1.0);
  CHECK_FALSE(tie.triggered);
  CHECK(tie.eta == 1.0);

  // zero estimate cannot trigger
  const auto zero = shrink_eta(0.74, 3, 0.25, 0.0, 1.0);
  CHECK_FALSE(zero.triggered);

  CHECK_THROWS_AS(shrink_eta(0.76, 3, 0.25, 1.0, 1.0), Error);
}

TEST_CASE("run on a strongly convex quartic converges and certifies") {
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(6);
  SaddleQuartic problem(lambda);
  HyperParams hp = quartic_manual(EstimatorKind::Spider);
  hp.eps = 1e-3;
  hp.eta = 2e-4;
  hp.radius = 1e-4;
  hp.dbar = 1e-6;
  Rng rng(3);
  const Vector x0 = 0.5 * Rng(17).gaussian(6);
  const RunOutcome out = lena_run(problem, hp, x0, rng);
  CHECK(out.status == RunStatus::Converged);
  CHECK(out.anchored);

  Rng cert_rng(8);
  const Certificate cert = certify(problem, out.x_out, 2.0 * hp.eps, hp.eps_h, 1e-6, cert_rng);
  CHECK(cert.grad_norm <= 2.0 * hp.eps);
  CHECK(cert.pass);
}

TEST_CASE("saddle start: immediate escape phase, minima reached across seeds") {
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(4);
  lambda[0] = -1.0;
  SaddleQuartic problem(lambda);
  int near_minimum = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HyperParams hp = quartic_manual(EstimatorKind::Spider);
    Rng rng(mix64(seed));
    const RunOutcome out = lena_run(problem, hp, Vector::Zero(4), rng);
    REQUIRE(!out.trace.rows.empty());
    // the first row must be the perturbation: d_1 = 0 at the origin
    CHECK(out.trace.rows.front().phase == Phase::Perturb);
    Vector target = Vector::Zero(4);
    target[0] = out.x_out[0] >= 0.0 ? 1.0 : -1.0;
    if (out.status == RunStatus::Converged && (out.x_out - target).norm() <= 0.1)
      near_minimum += 1;
  }
  CHECK(near_minimum >= 9);
}

TEST_CASE("budget zero halts immediately at the initial point") {
  SaddleQuartic problem((Eigen::VectorXd(3) << -1.0, 1.0, 1.0).finished());
  HyperParams hp = quartic_manual(EstimatorKind::Spider);
  hp.budget = 0;
  Rng rng(4);
  const Vector x0 = (Eigen::VectorXd(3) << 0.5, 0.5, 0.5).finished();
  const RunOutcome out = lena_run(problem, hp, x0, rng);
  CHECK(out.status == RunStatus::BudgetExhausted);
  CHECK((out.x_out - x0).norm() == 0.0);
  CHECK(out.trace.rows.empty());
}

TEST_CASE("trace invariants: shrinkage budget, GD movement, trigger closure") {
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(6);
  lambda[0] = -1.0;
  SaddleQuartic noisy(lambda, 0.1, 8, 2.0, 5);
  for (EstimatorKind kind : {EstimatorKind::Spider, EstimatorKind::Storm}) {
    HyperParams hp = quartic_manual(kind);
    hp.big_batch = 1600;
    hp.mini_batch = 40;
    hp.period = 40;
    hp.weight = 0.2;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      Rng rng(mix64(seed ^ 99));
      const RunOutcome out = lena_run(noisy, hp, Vector::Zero(6), rng);
      const EpochAudit audit = audit_trace(out.trace, hp.eta, hp.dbar);
      CHECK(audit.violations == 0);
      CHECK(audit.triggers_not_closing == 0);
      CHECK(audit.bad_gd_movement == 0);
      CHECK(audit.escape_rows > 0);
    }
  }
}

TEST_CASE("converged run ends with a full quiet escape phase") {
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(4);
  SaddleQuartic problem(lambda);
  HyperParams hp = quartic_manual(EstimatorKind::Spider);
  hp.eps = 0.01;
  hp.eta = 1e-3;
  hp.radius = 2e-3;
  hp.dbar = 1.6e-5;
  Rng rng(12);
  const Vector x0 = 0.4 * Rng(13).gaussian(4);
  const RunOutcome out = lena_run(problem, hp, x0, rng);
  REQUIRE(out.status == RunStatus::Converged);

  // count the final epoch's escape rows: exactly t_thres, none triggered
  std::int64_t escape_rows = 0;
  bool any_trigger = false;
  const int last_epoch = out.trace.rows.back().epoch;
  for (const auto &row : out.trace.rows) {
    if (row.epoch == last_epoch && row.phase == Phase::Escape) {
      escape_rows += 1;
      any_trigger = any_trigger || row.shrink_triggered;
    }
  }
  CHECK(escape_rows == hp.t_thres);
  CHECK_FALSE(any_trigger);

  // the returned point is the final epoch's anchor: gradient within eps of
  // the estimate gate (sigma = 0 makes the estimate exact)
  CHECK(problem.full_gradient(out.x_out).norm() <= hp.eps);
}

TEST_CASE("deterministic per-step descent in the GD phase") {
  // sigma = 0 and eta <= eps/(2L): every GD step with ||d|| > eps decreases
  // F by at least eta*eps/8
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(5);
  lambda[1] = 2.0;
  SaddleQuartic problem(lambda, 0.0, 8, 2.0, 0, /*operating_radius=*/4.0);
  HyperParams hp = quartic_manual(EstimatorKind::Spider);
  hp.eps = 0.01;
  hp.eta = hp.eps / (2.0 * problem.smoothness());
  hp.budget = 100'000;
  RunOptions options;
  options.log_every = 1;  // objective on every row
  Rng rng(21);
  const Vector x0 = Vector::Constant(5, 1.2);
  const RunOutcome out = lena_run(problem, hp, x0, rng, options);
  int checked = 0;
  for (std::size_t i = 0; i + 1 < out.trace.rows.size(); ++i) {
    const auto &row = out.trace.rows[i];
    const auto &next = out.trace.rows[i + 1];
    if (row.phase != Phase::GD || !row.objective || !next.objective) continue;
    if (row.d_norm <= hp.eps) continue;
    CHECK(*next.objective <= *row.objective - hp.eta * hp.eps / 8.0 + 1e-15);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("evaluation accounting: every row's increment is a batch or a pair") {
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(5);
  lambda[0] = -1.0;
  SaddleQuartic noisy(lambda, 0.1, 4, 2.0, 2);
  HyperParams hp = quartic_manual(EstimatorKind::Spider);
  hp.big_batch = 64;
  hp.mini_batch = 8;
  hp.period = 8;
  hp.budget = 30000;
  Rng rng(9);
  const RunOutcome out = lena_run(noisy, hp, Vector::Zero(5), rng);
  REQUIRE(!out.trace.rows.empty());
  std::int64_t prev = 64;  // init batch precedes the first row
  std::int64_t refreshes = 0;
  for (const auto &row : out.trace.rows) {
    const std::int64_t inc = row.sgrad_evals_cum - prev;
    const bool pair = inc == 2 * 8;
    const bool refresh = inc == 64;
    CHECK((pair || refresh));
    if (refresh) {
      refreshes += 1;
      CHECK(row.step % 8 == 0);  // big-batch branch fires at counters q, 2q, ...
    }
    prev = row.sgrad_evals_cum;
  }
  CHECK(refreshes > 0);
  CHECK(out.sgrad_evals == prev);
}

TEST_CASE("estimator error is tracked when requested") {
  SaddleQuartic problem((Eigen::VectorXd(3) << 1.0, 1.0, 1.0).finished());
  HyperParams hp = quartic_manual(EstimatorKind::Storm);
  hp.weight = 1.0;
  hp.budget = 4000;
  RunOptions options;
  options.track_estimator_error = true;
  Rng rng(2);
  const RunOutcome out = lena_run(problem, hp, Vector::Constant(3, 1.0), rng, options);
  REQUIRE(!out.trace.rows.empty());
  for (const auto &row : out.trace.rows) {
    REQUIRE(row.estimator_error.has_value());
    CHECK(*row.estimator_error <= 1e-10);
  }
}

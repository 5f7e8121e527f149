#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include <Eigen/Dense>

#include "lena/matrix_sensing.hpp"
#include "lena/saddle_quartic.hpp"
#include "oracles.hpp"

using namespace lena;

namespace {

Vector random_point(int dim, double scale, Rng &rng) { return scale * rng.gaussian(dim); }

std::string temp_path(const std::string &name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("draw_sample: determinism and degenerate noiseless instance") {
  MatrixSensing ms(4, 2, 4, 0);
  Rng a(0), b(0);
  for (int i = 0; i < 20; ++i) {
    const Sample sa = ms.draw_sample(a);
    const Sample sb = ms.draw_sample(b);
    CHECK(sa.token == sb.token);
    CHECK(sa.token < 4);
  }

  SaddleQuartic noiseless((Eigen::VectorXd(2) << -1.0, 1.0).finished());
  Rng c(5);
  CHECK(noiseless.num_components() == 1);
  const Sample s = noiseless.draw_sample(c);
  Vector g(2), g2(2);
  noiseless.stoch_grad(Vector::Ones(2), s, g);
  CHECK((g - noiseless.full_gradient(Vector::Ones(2))).norm() == 0.0);
  (void)g2;
}

TEST_CASE("draw_sample: uniform over components (chi-square)") {
  MatrixSensing ms(4, 1, 1000, 3);
  Rng rng(123);
  const int draws = 100000;
  std::vector<int> counts(1000, 0);
  for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(ms.draw_sample(rng).token)]++;
  const double expected = draws / 1000.0;
  double chi_sq = 0.0;
  for (int c : counts) {
    const double diff = c - expected;
    chi_sq += diff * diff / expected;
  }
  // chi-square with 999 degrees of freedom: mean 999, sd sqrt(2*999)
  const double df = 999.0;
  CHECK(std::abs(chi_sq - df) <= 3.0 * std::sqrt(2.0 * df));
}

TEST_CASE("stoch_grad_pair: stationary origin and same-point determinism") {
  SaddleQuartic quartic((Eigen::VectorXd(3) << -1.0, 1.0, 1.0).finished());
  Rng rng(1);
  const Sample s = quartic.draw_sample(rng);
  Vector g_new(3), g_old(3);
  quartic.stoch_grad_pair(Vector::Zero(3), Vector::Zero(3), s, g_new, g_old);
  CHECK(g_new.norm() == 0.0);
  CHECK(g_old.norm() == 0.0);

  MatrixSensing ms(4, 2, 10, 9);
  Rng rng2(2);
  const Vector u = random_point(ms.dim(), 0.5, rng2);
  const Sample si = ms.draw_sample(rng2);
  Vector a(ms.dim()), b(ms.dim());
  ms.stoch_grad_pair(u, u, si, a, b);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("stoch_grad_pair: dimension mismatch is an error") {
  MatrixSensing ms(4, 2, 10, 9);
  Vector short_vec = Vector::Zero(3), g1, g2;
  CHECK_THROWS_AS(ms.stoch_grad_pair(short_vec, short_vec, Sample{0}, g1, g2), Error);
}

TEST_CASE("matrix sensing component gradient matches finite differences") {
  MatrixSensing ms(5, 2, 12, 7);
  Rng rng(4);
  const Vector u = random_point(ms.dim(), 0.6, rng);
  for (std::uint64_t token : {std::uint64_t{0}, std::uint64_t{5}, std::uint64_t{11}}) {
    Vector g(ms.dim()), unused(ms.dim());
    ms.stoch_grad_pair(u, u, Sample{token}, g, unused);

    // independent oracle: rebuild the per-sample objective
    // 1/2 (<A_i, U U'> - b_i)^2 from the instance data, differentiate by
    // central differences
    const Eigen::MatrixXd a_i = ms.sensing_matrix(static_cast<int>(token));
    const double b_i = ms.observations()[static_cast<Eigen::Index>(token)];
    auto f = [&](const Vector &x) {
      const Eigen::Map<const Eigen::MatrixXd> uu(x.data(), ms.d(), ms.r());
      const double resid = (a_i.array() * (uu * uu.transpose()).array()).sum() - b_i;
      return 0.5 * resid * resid;
    };
    const Vector g_fd = testing::fd_gradient(f, u, 1e-6);
    CHECK((g - g_fd).norm() <= 1e-6 * std::max(1.0, g.norm()));

    // the closed form (<A,UU'>-b)(A+A')U agrees as well
    const Eigen::Map<const Eigen::MatrixXd> uu(u.data(), ms.d(), ms.r());
    const double resid = (a_i.array() * (uu * uu.transpose()).array()).sum() - b_i;
    const Eigen::MatrixXd gm = resid * (a_i + a_i.transpose()) * uu;
    const Vector g_closed = Eigen::Map<const Eigen::VectorXd>(gm.data(), ms.dim());
    CHECK((g - g_closed).norm() <= 1e-10 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("full_gradient: quartic stationary point and finite differences") {
  SaddleQuartic quartic((Eigen::VectorXd(2) << -1.0, 1.0).finished());
  const Vector x = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  CHECK(quartic.full_gradient(x).norm() == 0.0);

  Rng rng(3);
  const Vector y = random_point(2, 0.8, rng);
  const Vector g_fd =
      testing::fd_gradient([&](const Vector &p) { return quartic.full_value(p); }, y, 1e-6);
  CHECK((quartic.full_gradient(y) - g_fd).norm() < 1e-7);
}

TEST_CASE("full_gradient: zero at the ground truth factor") {
  MatrixSensing ms(6, 2, 40, 11);
  const auto &u_star = ms.ground_truth_factor();
  const Vector x = Eigen::Map<const Eigen::VectorXd>(u_star.data(), ms.dim());
  CHECK(ms.full_gradient(x).norm() <= 1e-10);
  CHECK(ms.full_value(x) == 0.0);
}

TEST_CASE("mean of component gradients equals the full gradient") {
  MatrixSensing ms(5, 2, 17, 13);
  Rng rng(6);
  const Vector u = random_point(ms.dim(), 0.7, rng);
  Vector sum = Vector::Zero(ms.dim());
  Vector g(ms.dim()), unused(ms.dim());
  for (int i = 0; i < 17; ++i) {
    ms.stoch_grad_pair(u, u, Sample{static_cast<std::uint64_t>(i)}, g, unused);
    sum += g;
  }
  const Vector mean = sum / 17.0;
  const Vector full = ms.full_gradient(u);
  CHECK((mean - full).norm() <= 1e-12 * std::max(1.0, full.norm()));

  SaddleQuartic noisy((Eigen::VectorXd(4) << -1.0, 1.0, 1.0, 1.0).finished(), 0.3, 4, 2.0, 5);
  const Vector y = random_point(4, 0.9, rng);
  Vector qsum = Vector::Zero(4);
  for (std::int64_t i = 0; i < noisy.num_components(); ++i) {
    noisy.stoch_grad_pair(y, y, Sample{static_cast<std::uint64_t>(i)}, g, unused);
    qsum += g;
  }
  CHECK((qsum / static_cast<double>(noisy.num_components()) - noisy.full_gradient(y)).norm() <=
        1e-12);
}

TEST_CASE("full_value examples") {
  SaddleQuartic quartic((Eigen::VectorXd(2) << -1.0, 1.0).finished());
  CHECK(quartic.full_value(Vector::Zero(2)) == 0.0);
  const Vector x = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  CHECK(quartic.full_value(x) == doctest::Approx(-0.25).epsilon(1e-12));

  MatrixSensing tiny(5, 1, 100, 1);
  const auto &u_star = tiny.ground_truth_factor();
  const Vector xs = Eigen::Map<const Eigen::VectorXd>(u_star.data(), tiny.dim());
  CHECK(tiny.full_value(xs) <= 1e-18);
}

TEST_CASE("hessian_apply: analytic quartic cases and linearity") {
  SaddleQuartic quartic((Eigen::VectorXd(2) << -1.0, 1.0).finished());
  const Vector e1 = Vector::Unit(2, 0);
  CHECK((quartic.hessian_apply(Vector::Zero(2), e1) + e1).norm() == 0.0);

  MatrixSensing ms(4, 2, 10, 2);
  Rng rng(9);
  const Vector x = random_point(ms.dim(), 0.5, rng);
  const Vector v = random_point(ms.dim(), 1.0, rng);
  const Vector hv = ms.hessian_apply(x, v);
  const Vector hv_scaled = ms.hessian_apply(x, 3.5 * v);
  CHECK((hv_scaled - 3.5 * hv).norm() <= 1e-8 * std::max(1.0, hv.norm()));
  const Vector hv_neg = ms.hessian_apply(x, -v);
  CHECK((hv_neg + hv).norm() <= 1e-8 * std::max(1.0, hv.norm()));
}

TEST_CASE("hessian_apply matches a dense finite-difference Hessian") {
  MatrixSensing ms(5, 2, 20, 17);
  Rng rng(10);
  const Vector x = random_point(ms.dim(), 0.5, rng);
  const Eigen::MatrixXd dense = testing::fd_hessian(ms, x, 1e-5);
  for (int trial = 0; trial < 3; ++trial) {
    const Vector v = random_point(ms.dim(), 1.0, rng);
    const Vector hv = ms.hessian_apply(x, v);
    CHECK((hv - dense * v).norm() <= 1e-4 * std::max(1.0, hv.norm()));
  }
}

TEST_CASE("make_matrix_sensing: rank, determinism, shapes") {
  MatrixSensing ms(50, 3, 1000, 7);
  const auto &eigs = ms.ground_truth_eigenvalues();  // ascending
  const double top = eigs[eigs.size() - 1];
  // PSD rank 3: the 4th largest eigenvalue is numerically zero
  CHECK(std::abs(eigs[eigs.size() - 4]) <= 1e-8 * top);
  CHECK(eigs[eigs.size() - 3] > 1e-4 * top);

  MatrixSensing again(50, 3, 1000, 7);
  CHECK(ms.ground_truth() == again.ground_truth());
  CHECK(ms.observations() == again.observations());

  CHECK_THROWS_AS(MatrixSensing(2, 3, 10, 0), Error);
  CHECK_THROWS_AS(MatrixSensing(3, 1, 0, 0), Error);
}

TEST_CASE("make_saddle_init: rank-deficient start") {
  MatrixSensing ms(6, 3, 30, 5);
  const Vector x0 = ms.saddle_init(-1.0, 4);
  // columns 2 and 3 exactly zero
  CHECK(x0.segment(6, 12).norm() == 0.0);
  CHECK(x0.head(6).norm() > 0.0);
  CHECK(x0.head(6).norm() < ms.lambda_max());

  const Vector zero = ms.saddle_init(0.0, 4);
  CHECK(zero.norm() == 0.0);

  // alpha too large violates the norm constraint
  CHECK_THROWS_AS(ms.saddle_init(1e9, 4), Error);
}

TEST_CASE("saddle init stalls plain gradient descent away from zero") {
  // deterministic full-gradient descent from the rank-deficient start is
  // confined to the rank-1 manifold: the objective plateaus above zero
  MatrixSensing ms(12, 2, 60, 3);
  Vector x = ms.saddle_init(-1.0, 3);
  double plateau = 1e300;
  for (int i = 0; i < 100000; ++i) {
    x -= 0.05 * ms.full_gradient(x);
    if (i % 100 == 0) plateau = std::min(plateau, ms.full_value(x));
  }
  const double final_value = ms.full_value(x);
  CHECK(final_value > 1e-3);
  CHECK(plateau > 1e-3);
  // the dead columns never move
  CHECK(x.segment(12, 12).norm() == 0.0);
}

TEST_CASE("two-point consistency: pair equals two single-point replays") {
  MatrixSensing ms(5, 2, 9, 23);
  SaddleQuartic noisy((Eigen::VectorXd(3) << -1.0, 1.0, 1.0).finished(), 0.2, 3, 2.0, 8);
  Rng rng(14);
  for (const Problem *problem : {static_cast<const Problem *>(&ms),
                                 static_cast<const Problem *>(&noisy)}) {
    for (int trial = 0; trial < 25; ++trial) {
      const Vector x = random_point(problem->dim(), 0.6, rng);
      const Vector y = random_point(problem->dim(), 0.6, rng);
      const Sample s = problem->draw_sample(rng);
      Vector g_new(problem->dim()), g_old(problem->dim());
      problem->stoch_grad_pair(x, y, s, g_new, g_old);
      Vector single_new(problem->dim()), single_old(problem->dim());
      problem->stoch_grad(x, s, single_new);
      problem->stoch_grad(y, s, single_old);
      CHECK((g_new - single_new).norm() == 0.0);
      CHECK((g_old - single_old).norm() == 0.0);
    }
  }
}

TEST_CASE("smoothness probe: per-sample gradients respect the reported L") {
  MatrixSensing ms(5, 2, 9, 23);
  SaddleQuartic noisy((Eigen::VectorXd(3) << -1.0, 1.0, 1.0).finished(), 0.2, 3, 2.0, 8);
  Rng rng(15);
  for (const Problem *problem : {static_cast<const Problem *>(&ms),
                                 static_cast<const Problem *>(&noisy)}) {
    const double scale = problem->operating_radius() / std::sqrt(3.0 * problem->dim());
    for (int trial = 0; trial < 100; ++trial) {
      Vector x1 = random_point(problem->dim(), scale, rng);
      Vector x2 = random_point(problem->dim(), scale, rng);
      const Sample s = problem->draw_sample(rng);
      Vector g1(problem->dim()), g2(problem->dim());
      problem->stoch_grad_pair(x1, x2, s, g1, g2);
      CHECK((g1 - g2).norm() <= problem->smoothness() * (x1 - x2).norm() + 1e-12);
    }
  }
}

TEST_CASE("noise bound probe: deviations stay within the reported sigma") {
  SaddleQuartic noisy((Eigen::VectorXd(3) << -1.0, 1.0, 1.0).finished(), 0.25, 4, 2.0, 31);
  MatrixSensing ms(4, 2, 8, 29);
  Rng rng(16);
  for (const Problem *problem : {static_cast<const Problem *>(&noisy),
                                 static_cast<const Problem *>(&ms)}) {
    const double scale = problem->operating_radius() / std::sqrt(3.0 * problem->dim());
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
      const Vector x = random_point(problem->dim(), scale, rng);
      const Sample s = problem->draw_sample(rng);
      Vector g(problem->dim());
      problem->stoch_grad(x, s, g);
      worst = std::max(worst, (g - problem->full_gradient(x)).norm());
    }
    CHECK(worst <= problem->noise_bound() + 1e-12);
  }
}

TEST_CASE("quartic noise model: exact sigma scale and antithetic mean") {
  SaddleQuartic noisy((Eigen::VectorXd(4) << -1.0, 1.0, 1.0, 1.0).finished(), 0.5, 6, 2.0, 3);
  CHECK(noisy.noise_bound() == 0.5);
  // at the origin every cosine term is 1, so the deviation norm is exactly
  // sigma for every component
  Vector g(4);
  for (std::int64_t i = 0; i < noisy.num_components(); ++i) {
    noisy.stoch_grad(Vector::Zero(4), Sample{static_cast<std::uint64_t>(i)}, g);
    CHECK(g.norm() == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("snapshot round trip") {
  const std::string ms_path = temp_path("lena_test_ms.snap");
  MatrixSensing ms(5, 2, 11, 19);
  ms.save(ms_path);
  const auto loaded = load_problem(ms_path);
  const auto *ms2 = dynamic_cast<const MatrixSensing *>(loaded.get());
  REQUIRE(ms2 != nullptr);
  CHECK(ms2->ground_truth() == ms.ground_truth());
  CHECK(ms2->observations() == ms.observations());

  const std::string sq_path = temp_path("lena_test_sq.snap");
  SaddleQuartic sq((Eigen::VectorXd(3) << -1.0, 0.5, 2.0).finished(), 0.1, 2, 2.0, 77);
  sq.save(sq_path);
  const auto loaded_sq = load_problem(sq_path);
  const auto *sq2 = dynamic_cast<const SaddleQuartic *>(loaded_sq.get());
  REQUIRE(sq2 != nullptr);
  CHECK(sq2->lambda() == sq.lambda());
  CHECK(sq2->sigma() == sq.sigma());
  Rng rng(2);
  const Vector x = random_point(3, 0.5, rng);
  CHECK(sq2->full_value(x) == sq.full_value(x));

  std::filesystem::remove(ms_path);
  std::filesystem::remove(sq_path);
}

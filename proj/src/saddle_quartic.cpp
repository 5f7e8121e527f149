#include "lena/saddle_quartic.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "lena/snapshot.hpp"

namespace lena {

namespace {

double quartic_operating_radius(const Eigen::VectorXd &lambda, double requested) {
  if (requested > 0.0) return requested;
  return 2.0 * std::max(1.0, std::sqrt(lambda.cwiseAbs().maxCoeff()));
}

}  // namespace

SaddleQuartic::SaddleQuartic(const Eigen::VectorXd &lambda, double sigma, int noise_pairs,
                             double noise_freq, std::uint64_t noise_seed, double operating_radius)
    : Problem(static_cast<int>(lambda.size()), 0.0, 0.0, sigma,
              quartic_operating_radius(lambda, operating_radius)),
      lambda_(lambda),
      sigma_(sigma),
      noise_pairs_(sigma > 0.0 ? noise_pairs : 0),
      noise_freq_(noise_freq),
      noise_seed_(noise_seed) {
  require(lambda.size() >= 1, Errc::invalid_argument, "saddle quartic needs dim >= 1");
  require(sigma >= 0.0, Errc::invalid_argument, "sigma must be nonnegative");
  if (sigma > 0.0) {
    require(noise_pairs >= 1, Errc::invalid_argument, "noisy instance needs noise_pairs >= 1");
    require(noise_freq > 0.0, Errc::invalid_argument, "noise_freq must be positive");
    noise_dirs_.resize(dim(), noise_pairs_);
    Rng rng(mix64(noise_seed ^ 0x71c3a5d2e9b40f68ULL));
    for (int j = 0; j < noise_pairs_; ++j) {
      Eigen::VectorXd w = rng.gaussian(dim());
      double n = w.norm();
      while (n == 0.0) {
        w = rng.gaussian(dim());
        n = w.norm();
      }
      noise_dirs_.col(j) = w * (noise_freq_ / n);
    }
  }
  const double radius = this->operating_radius();
  const double base_smooth = lambda_.cwiseAbs().maxCoeff() + 3.0 * radius * radius;
  const double base_rho = 6.0 * radius;
  // Noise adds sigma*freq to the per-sample Hessian bound and sigma*freq^2
  // to its Lipschitz constant.
  set_constants(base_smooth + sigma_ * noise_freq_, base_rho + sigma_ * noise_freq_ * noise_freq_,
                sigma_, radius);
}

double SaddleQuartic::inf_value() const {
  const double lmin = lambda_.minCoeff();
  if (lmin >= 0.0) return 0.0;
  return -0.25 * lmin * lmin;
}

std::int64_t SaddleQuartic::num_components() const {
  return sigma_ > 0.0 ? static_cast<std::int64_t>(2 * noise_pairs_) : 1;
}

void SaddleQuartic::base_gradient(VecRef x, Vector &g) const {
  const double sq = x.squaredNorm();
  g = lambda_.cwiseProduct(x) + sq * x;
}

void SaddleQuartic::component_gradient(VecRef x, std::uint64_t token, Vector &g) const {
  base_gradient(x, g);
  if (sigma_ == 0.0) return;
  require(token < static_cast<std::uint64_t>(num_components()), Errc::invalid_argument,
          "sample token out of range");
  const int pair = static_cast<int>(token / 2);
  const double sign = (token % 2 == 0) ? 1.0 : -1.0;
  const auto w = noise_dirs_.col(pair);
  g += (sign * sigma_ * std::cos(w.dot(x)) / noise_freq_) * w;
}

void SaddleQuartic::do_stoch_grad_pair(VecRef x_new, VecRef x_old, Sample s, Vector &g_new,
                                       Vector &g_old) const {
  component_gradient(x_new, s.token, g_new);
  component_gradient(x_old, s.token, g_old);
}

void SaddleQuartic::do_full_gradient(VecRef x, Vector &g) const { base_gradient(x, g); }

double SaddleQuartic::do_full_value(VecRef x) const {
  const double sq = x.squaredNorm();
  return 0.5 * lambda_.dot(x.cwiseProduct(x)) + 0.25 * sq * sq;
}

void SaddleQuartic::do_hessian_apply(VecRef x, VecRef v, Vector &out) const {
  // hess F(x) = diag(lambda) + ||x||^2 I + 2 x x'; the noise Hessians cancel
  // pairwise, so the full Hessian is analytic.
  const double sq = x.squaredNorm();
  out = lambda_.cwiseProduct(v) + sq * v + 2.0 * x.dot(v) * x;
}

void SaddleQuartic::save(const std::string &path) const {
  SnapshotWriter w(path, snapshot_kind_quartic);
  w.write_i32(dim());
  w.write_f64(sigma_);
  w.write_i32(noise_pairs_);
  w.write_f64(noise_freq_);
  w.write_u64(noise_seed_);
  w.write_f64(operating_radius());
  for (int i = 0; i < dim(); ++i) w.write_f64(lambda_[i]);
  w.finish();
}

std::unique_ptr<SaddleQuartic> SaddleQuartic::load_file(const std::string &path) {
  SnapshotReader r(path, snapshot_kind_quartic);
  const int dim = r.read_i32();
  const double sigma = r.read_f64();
  const int pairs = r.read_i32();
  const double freq = r.read_f64();
  const std::uint64_t seed = r.read_u64();
  const double radius = r.read_f64();
  require(dim >= 1, Errc::io, "corrupt snapshot: bad dimension");
  Eigen::VectorXd lambda(dim);
  for (int i = 0; i < dim; ++i) lambda[i] = r.read_f64();
  r.finish();
  return std::make_unique<SaddleQuartic>(lambda, sigma, sigma > 0.0 ? pairs : 8, freq, seed,
                                         radius);
}

}  // namespace lena

#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Core>

#include "lena/problem.hpp"

namespace lena {

/// Synthetic objective F(x) = 1/2 sum_j lambda_j x_j^2 + 1/4 ||x||^4.
/// The origin is a strict saddle whenever min_j lambda_j < 0; with
/// lambda = (-1, 1, ..., 1) the two minima sit at +-e1.
///
/// Optional finite-sum noise: components come in antithetic pairs
///   f_{2j,2j+1}(x) = F(x) +- sigma * sin(w_j' x) / ||w_j||,
/// so each stochastic gradient deviates from grad F by exactly
/// sigma * cos(w_j' x) * w_j / ||w_j|| (norm <= sigma, tight), and the
/// component mean equals F identically. All w_j have norm noise_freq.
class SaddleQuartic final : public Problem {
 public:
  SaddleQuartic(const Eigen::VectorXd &lambda, double sigma = 0.0, int noise_pairs = 8,
                double noise_freq = 2.0, std::uint64_t noise_seed = 0,
                double operating_radius = 0.0);

  const Eigen::VectorXd &lambda() const { return lambda_; }
  double sigma() const { return sigma_; }
  int noise_pairs() const { return noise_pairs_; }
  double noise_freq() const { return noise_freq_; }
  std::uint64_t noise_seed() const { return noise_seed_; }

  double inf_value() const override;
  std::int64_t num_components() const override;

  void save(const std::string &path) const override;
  static std::unique_ptr<SaddleQuartic> load_file(const std::string &path);

 protected:
  void do_stoch_grad_pair(VecRef x_new, VecRef x_old, Sample s, Vector &g_new,
                          Vector &g_old) const override;
  void do_full_gradient(VecRef x, Vector &g) const override;
  double do_full_value(VecRef x) const override;
  void do_hessian_apply(VecRef x, VecRef v, Vector &out) const override;

 private:
  void base_gradient(VecRef x, Vector &g) const;
  void component_gradient(VecRef x, std::uint64_t token, Vector &g) const;

  Eigen::VectorXd lambda_;
  double sigma_;
  int noise_pairs_;
  double noise_freq_;
  std::uint64_t noise_seed_;
  Eigen::MatrixXd noise_dirs_;  // dim x noise_pairs, each column has norm noise_freq
};

}  // namespace lena

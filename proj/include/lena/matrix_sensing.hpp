#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "lena/problem.hpp"

namespace lena {

/// Symmetric matrix sensing: recover the rank-r PSD matrix M* = U* U*' from
/// n linear measurements b_i = <A_i, M*>. The optimization variable is
/// U in R^{d x r}, flattened column-major into a point of dimension d*r:
///
///   F(U) = 1/(2n) sum_i (<A_i, U U'> - b_i)^2,
///   grad f_i(U) = (<A_i, U U'> - b_i) (A_i + A_i') U.
///
/// U* entries are N(0, 1/d), A_i entries are standard normal, and
/// b_i = <A_i, M*> exactly (noiseless), so inf F = 0. Construction is
/// bit-reproducible from (d, r, n, seed).
///
/// Reported L, rho, sigma are conservative per-component bounds over the
/// operating ball {||U||_F <= 2 ||U*||_F}; the quartic objective has no
/// finite global constants.
class MatrixSensing final : public Problem {
 public:
  MatrixSensing(int d, int r, int n, std::uint64_t seed);

  int d() const { return d_; }
  int r() const { return r_; }
  int n() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  const Eigen::MatrixXd &ground_truth_factor() const { return u_star_; }
  const Eigen::MatrixXd &ground_truth() const { return m_star_; }
  const Eigen::VectorXd &observations() const { return b_; }
  Eigen::MatrixXd sensing_matrix(int i) const {
    require(i >= 0 && i < n_, Errc::invalid_argument, "sensing matrix index out of range");
    return Eigen::Map<const Eigen::MatrixXd>(a_.row(i).data(), d_, d_);
  }
  /// Eigenvalues of M*, ascending.
  const Eigen::VectorXd &ground_truth_eigenvalues() const { return m_eigs_; }
  double lambda_max() const { return m_eigs_[m_eigs_.size() - 1]; }

  /// ||U U' - M*||_F^2 / ||M*||_F^2 for the point x = vec(U).
  double relative_error(VecRef x) const;

  /// Rank-deficient start U0 = [u0, 0, ..., 0] with u0 = alpha * g, g a
  /// seeded Gaussian vector. A negative alpha selects the default scale
  /// 0.1 * sqrt(lambda_max(M*)) / ||g|| (alpha = 0 is the zero matrix).
  /// Requires ||u0|| < lambda_max(M*).
  Vector saddle_init(double alpha, std::uint64_t seed) const;

  double inf_value() const override { return 0.0; }
  std::int64_t num_components() const override { return n_; }
  double hessian_fd_step(VecRef x) const override;

  void save(const std::string &path) const override;
  static std::unique_ptr<MatrixSensing> load_file(const std::string &path);

 protected:
  void do_stoch_grad_pair(VecRef x_new, VecRef x_old, Sample s, Vector &g_new,
                          Vector &g_old) const override;
  void do_accumulate_grad_pair(VecRef x_new, VecRef x_old, std::span<const Sample> batch,
                               Vector &sum_new, Vector &sum_old) const override;
  void do_accumulate_grad(VecRef x, std::span<const Sample> batch, Vector &sum) const override;
  void do_full_gradient(VecRef x, Vector &g) const override;
  double do_full_value(VecRef x) const override;
  void do_hessian_apply(VecRef x, VecRef v, Vector &out) const override;

 private:
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Eigen::Map<const Eigen::MatrixXd> factor_view(VecRef x) const {
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), d_, r_);
  }
  /// vec(U U') for the point x = vec(U).
  Eigen::VectorXd gram_vec(VecRef x) const;
  void derive_constants();

  int d_, r_, n_;
  std::uint64_t seed_;
  Eigen::MatrixXd u_star_;  // d x r
  Eigen::MatrixXd m_star_;  // d x d
  Eigen::VectorXd m_eigs_;
  Eigen::VectorXd b_;  // n
  RowMat a_;           // n x d^2, row i = vec(A_i)
};

/// Loads any snapshot written by Problem save() methods.
std::unique_ptr<Problem> load_problem(const std::string &path);

}  // namespace lena

#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Core>

#include "lena/errors.hpp"
#include "lena/rng.hpp"

namespace lena {

using Vector = Eigen::VectorXd;
using VecRef = const Eigen::Ref<const Eigen::VectorXd> &;

/// Opaque randomness handle. For finite-sum problems the token is a
/// component index; applying the same Sample at two points evaluates the
/// two stochastic gradients under identical randomness.
struct Sample {
  std::uint64_t token = 0;
};

/// Stochastic objective F(x) = E[f(x; xi)] exposing two-point
/// same-randomness gradient queries, plus full value/gradient/Hessian-vector
/// access for finite-sum instances (used by certification and tests).
///
/// Reported constants are effective over the operating ball
/// {||x|| <= operating_radius()}:
///   ||grad f(x1;xi) - grad f(x2;xi)||  <= smoothness() * ||x1 - x2||
///   ||hess f(x1;xi) - hess f(x2;xi)||  <= hessian_lipschitz() * ||x1 - x2||
///   ||grad f(x;xi) - grad F(x)||       <= noise_bound()
class Problem {
 public:
  virtual ~Problem() = default;

  int dim() const { return dim_; }
  double smoothness() const { return smoothness_; }
  double hessian_lipschitz() const { return hessian_lipschitz_; }
  double noise_bound() const { return noise_bound_; }
  double operating_radius() const { return operating_radius_; }

  /// Known lower bound on F (exact for the built-in instances).
  virtual double inf_value() const = 0;

  /// Number of finite-sum components (>= 1 for all built-in instances).
  virtual std::int64_t num_components() const = 0;

  /// Uniform component draw. Degenerate single-component instances return
  /// a fixed Sample without consuming the stream.
  Sample draw_sample(Rng &rng) const {
    const std::int64_t n = num_components();
    if (n == 1) return Sample{0};
    return Sample{static_cast<std::uint64_t>(rng.uniform_index(n))};
  }

  /// g_new = grad f(x_new; s), g_old = grad f(x_old; s), same randomness.
  void stoch_grad_pair(VecRef x_new, VecRef x_old, Sample s, Vector &g_new, Vector &g_old) const {
    check_dim(x_new);
    check_dim(x_old);
    do_stoch_grad_pair(x_new, x_old, s, g_new, g_old);
  }

  /// Single-point stochastic gradient.
  void stoch_grad(VecRef x, Sample s, Vector &g) const {
    check_dim(x);
    do_stoch_grad(x, s, g);
  }

  /// Sums (not means) of stochastic gradients over a batch, both points
  /// under the same per-sample randomness. Subclasses may vectorize; the
  /// summation order over the batch is an internal detail.
  void accumulate_grad_pair(VecRef x_new, VecRef x_old, std::span<const Sample> batch,
                            Vector &sum_new, Vector &sum_old) const {
    check_dim(x_new);
    check_dim(x_old);
    do_accumulate_grad_pair(x_new, x_old, batch, sum_new, sum_old);
  }

  void accumulate_grad(VecRef x, std::span<const Sample> batch, Vector &sum) const {
    check_dim(x);
    do_accumulate_grad(x, batch, sum);
  }

  Vector full_gradient(VecRef x) const {
    check_dim(x);
    Vector g(dim_);
    do_full_gradient(x, g);
    return g;
  }

  double full_value(VecRef x) const {
    check_dim(x);
    return do_full_value(x);
  }

  /// Hessian-vector product hess F(x) * v, analytic or by symmetric finite
  /// difference of the full gradient.
  Vector hessian_apply(VecRef x, VecRef v) const {
    check_dim(x);
    check_dim(v);
    Vector out(dim_);
    do_hessian_apply(x, v, out);
    return out;
  }

  /// Finite-difference step used by hessian_apply at x; 0 when analytic.
  virtual double hessian_fd_step(VecRef) const { return 0.0; }

  /// Versioned binary snapshot for replayable benchmark runs; reload with
  /// load_problem().
  virtual void save(const std::string &path) const = 0;

 protected:
  Problem(int dim, double smoothness, double hessian_lipschitz, double noise_bound,
          double operating_radius)
      : dim_(dim),
        smoothness_(smoothness),
        hessian_lipschitz_(hessian_lipschitz),
        noise_bound_(noise_bound),
        operating_radius_(operating_radius) {
    require(dim >= 1, Errc::invalid_argument, "problem dimension must be positive");
  }

  void set_constants(double smoothness, double hessian_lipschitz, double noise_bound,
                     double operating_radius) {
    smoothness_ = smoothness;
    hessian_lipschitz_ = hessian_lipschitz;
    noise_bound_ = noise_bound;
    operating_radius_ = operating_radius;
  }

  void check_dim(VecRef x) const {
    require(x.size() == dim_, Errc::invalid_argument, "point dimension mismatch");
  }

  virtual void do_stoch_grad_pair(VecRef x_new, VecRef x_old, Sample s, Vector &g_new,
                                  Vector &g_old) const = 0;

  virtual void do_stoch_grad(VecRef x, Sample s, Vector &g) const {
    Vector dummy;
    do_stoch_grad_pair(x, x, s, g, dummy);
  }

  virtual void do_accumulate_grad_pair(VecRef x_new, VecRef x_old, std::span<const Sample> batch,
                                       Vector &sum_new, Vector &sum_old) const {
    sum_new.setZero(dim_);
    sum_old.setZero(dim_);
    Vector g_new(dim_), g_old(dim_);
    for (const Sample &s : batch) {
      do_stoch_grad_pair(x_new, x_old, s, g_new, g_old);
      sum_new += g_new;
      sum_old += g_old;
    }
  }

  virtual void do_accumulate_grad(VecRef x, std::span<const Sample> batch, Vector &sum) const {
    sum.setZero(dim_);
    Vector g(dim_);
    for (const Sample &s : batch) {
      do_stoch_grad(x, s, g);
      sum += g;
    }
  }

  virtual void do_full_gradient(VecRef x, Vector &g) const = 0;
  virtual double do_full_value(VecRef x) const = 0;
  virtual void do_hessian_apply(VecRef x, VecRef v, Vector &out) const = 0;

 private:
  int dim_;
  double smoothness_;
  double hessian_lipschitz_;
  double noise_bound_;
  double operating_radius_;
};

}  // namespace lena

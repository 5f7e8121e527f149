#pragma once

#include "lena/problem.hpp"

namespace lena {

struct EigenEstimate {
  double value = 0.0;     // smallest eigenvalue of hess F(x)
  Vector vector;          // unit eigenvector estimate
  double residual = 0.0;  // ||H v - value * v||
  double scale = 1.0;     // residual criterion scale: max(1, spectral radius)
  int iterations = 0;
};

/// Thrown when power iteration exhausts its restarts; carries the best
/// estimate seen so far.
class EigenvalueError : public Error {
 public:
  EigenvalueError(const std::string &what, EigenEstimate best)
      : Error(Errc::numeric, what), best_(std::move(best)) {}
  const EigenEstimate &best() const { return best_; }

 private:
  EigenEstimate best_;
};

/// Smallest Hessian eigenvalue at x by power iteration on the shifted
/// operator s*I - hess F(x). The shift s is an upper bound on the spectral
/// radius obtained from a preliminary power pass (never above the reported
/// smoothness constant). Converges when the eigenpair residual drops below
/// tol * scale, where scale = max(1, spectral-radius estimate); restarts
/// from a fresh random vector up to 3 times on stagnation, then throws
/// EigenvalueError with the best estimate.
EigenEstimate min_eigenvalue(const Problem &problem, VecRef x, double tol, int max_iter, Rng &rng);

/// Approximate-local-minimum decision: gradient norm within eps and
/// smallest Hessian eigenvalue above -eps_h (minus the reported slack).
struct Certificate {
  double grad_norm = 0.0;
  double min_eig = 0.0;
  double eps = 0.0;
  double eps_h = 0.0;
  bool pass = false;
  int iterations = 0;
  double residual = 0.0;
  /// Curvature tolerance actually applied: max(tol * scale, 10 * h * rho)
  /// with h the Hessian-vector finite-difference step (0 when analytic).
  double slack = 0.0;
};

Certificate certify(const Problem &problem, VecRef x, double eps, double eps_h, double tol,
                    Rng &rng, int max_iter = 20000);

}  // namespace lena

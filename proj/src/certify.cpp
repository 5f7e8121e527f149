#include "lena/certify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lena {

namespace {

Vector random_unit(int dim, Rng &rng) {
  Vector v = rng.gaussian(dim);
  double n = v.norm();
  while (n == 0.0) {
    v = rng.gaussian(dim);
    n = v.norm();
  }
  return v / n;
}

/// Rough spectral-radius upper bound for hess F(x): a short power pass on
/// the Hessian itself, inflated by 25%.
double spectral_radius_bound(const Problem &problem, VecRef x, Rng &rng) {
  Vector v = random_unit(problem.dim(), rng);
  double top = 0.0;
  for (int i = 0; i < 60; ++i) {
    Vector w = problem.hessian_apply(x, v);
    const double n = w.norm();
    if (n == 0.0) break;
    top = n;
    v = w / n;
  }
  const double scale = std::max(top, 1e-12);
  return std::min(1.25 * scale + 1e-9 * std::max(1.0, scale), problem.smoothness());
}

}  // namespace

EigenEstimate min_eigenvalue(const Problem &problem, VecRef x, double tol, int max_iter, Rng &rng) {
  require(tol > 0.0, Errc::invalid_argument, "min_eigenvalue: tol must be positive");
  require(max_iter >= 1, Errc::invalid_argument, "min_eigenvalue: max_iter must be >= 1");

  const double shift = spectral_radius_bound(problem, x, rng);
  const double scale = std::max(1.0, shift);
  const double target = tol * scale;

  EigenEstimate best;
  best.scale = scale;
  best.residual = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < 4; ++attempt) {
    Vector v = random_unit(problem.dim(), rng);
    double stagnant_best = std::numeric_limits<double>::infinity();
    int stagnant_for = 0;
    for (int iter = 1; iter <= max_iter; ++iter) {
      const Vector hv = problem.hessian_apply(x, v);
      const Vector w = shift * v - hv;  // (shift*I - H) v, PSD by construction
      const double mu = v.dot(w);
      const double lambda = shift - mu;
      const double residual = (hv - lambda * v).norm();
      if (residual < best.residual) {
        best.value = lambda;
        best.vector = v;
        best.residual = residual;
      }
      best.iterations += 1;
      if (residual <= target) {
        best.value = lambda;
        best.vector = v;
        best.residual = residual;
        return best;
      }
      const double wn = w.norm();
      if (wn == 0.0) break;  // v already invariant; residual check above decides
      v = w / wn;

      if (residual < 0.999 * stagnant_best) {
        stagnant_best = residual;
        stagnant_for = 0;
      } else if (++stagnant_for >= 200) {
        break;  // restart with a fresh vector
      }
    }
  }

  std::ostringstream os;
  os << "min_eigenvalue did not converge: best residual " << best.residual << " above tolerance "
     << target;
  throw EigenvalueError(os.str(), best);
}

Certificate certify(const Problem &problem, VecRef x, double eps, double eps_h, double tol,
                    Rng &rng, int max_iter) {
  require(eps > 0.0 && eps_h > 0.0, Errc::invalid_argument, "certify: targets must be positive");
  Certificate cert;
  cert.eps = eps;
  cert.eps_h = eps_h;
  cert.grad_norm = problem.full_gradient(x).norm();
  const EigenEstimate eig = min_eigenvalue(problem, x, tol, max_iter, rng);
  cert.min_eig = eig.value;
  cert.iterations = eig.iterations;
  cert.residual = eig.residual;
  const double h = problem.hessian_fd_step(x);
  cert.slack = std::max(tol * eig.scale, 10.0 * h * problem.hessian_lipschitz());
  cert.pass = cert.grad_norm <= eps && cert.min_eig >= -eps_h - cert.slack;
  return cert;
}

}  // namespace lena

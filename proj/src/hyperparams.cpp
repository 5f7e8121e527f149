#include "lena/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <sstream>

namespace lena {

namespace {

constexpr std::int64_t max_budget = std::int64_t{1} << 62;

// Derivation logs are clamped to >= 1 so shrinking arguments can only make
// the choices more conservative (smaller eta_H, larger t_thres).
double clog(double x) { return std::max(1.0, std::log(x)); }

std::int64_t ceil_i64(double x) {
  require(x < 9.0e18, Errc::numeric, "derived parameter overflows 64-bit range");
  return static_cast<std::int64_t>(std::ceil(x));
}

std::int64_t budget_cap(const HyperParams &p, double log4d) {
  const double per_step =
      2.0 * p.mini_batch +
      (p.kind == EstimatorKind::Spider ? p.big_batch / p.period : 0.0);
  double gd_iters, esc_iters;
  if (p.sigma > 0.0) {
    if (p.kind == EstimatorKind::Spider) {
      const double sqrt_b = std::sqrt(p.big_batch);
      gd_iters = 16.0 * sqrt_b * p.smoothness * p.value_gap / (p.sigma * p.eps);
      esc_iters = p.big_batch * p.value_gap / (log4d * p.eta_h * p.sigma * p.sigma);
    } else {
      const double b = p.mini_batch;
      gd_iters = 16.0 * b * p.smoothness * p.value_gap / (p.sigma * p.eps);
      esc_iters = b * b * p.value_gap / (log4d * log4d * p.eta_h * p.sigma * p.sigma);
    }
  } else {
    // Exact-estimator mode: the GD phase decreases F by eta*eps/8 per step;
    // there is no noise-driven escape rate, so the escape share is headroom.
    gd_iters = 8.0 * p.value_gap / (p.eta * p.eps);
    esc_iters = gd_iters;
  }
  const double total =
      2.0 * per_step * (gd_iters + esc_iters + static_cast<double>(p.t_thres)) +
      static_cast<double>(p.big_batch);
  if (!(total < static_cast<double>(max_budget))) return max_budget;
  const double floor_evals = p.big_batch + 2.0 * p.mini_batch * static_cast<double>(p.t_thres);
  if (!(floor_evals < static_cast<double>(max_budget))) return max_budget;
  return std::max<std::int64_t>(static_cast<std::int64_t>(total) + 1,
                                static_cast<std::int64_t>(floor_evals) + 1);
}

}  // namespace

HyperParams derive_params(EstimatorKind kind, double eps, double eps_h, double delta, double sigma,
                          double smoothness, double hessian_lipschitz, double value_gap, int dim) {
  require(eps > 0.0 && eps_h > 0.0, Errc::invalid_argument, "eps and eps_h must be positive");
  require(delta > 0.0 && delta < 1.0, Errc::invalid_argument, "delta must lie in (0, 1)");
  require(sigma >= 0.0, Errc::invalid_argument, "sigma must be nonnegative");
  require(smoothness > 0.0, Errc::invalid_argument, "L must be positive");
  require(hessian_lipschitz > 0.0, Errc::invalid_argument, "rho must be positive");
  require(value_gap > 0.0, Errc::invalid_argument, "Delta must be positive");
  require(dim >= 1, Errc::invalid_argument, "dim must be positive");

  const double log4d = std::log(4.0 / delta);
  const double L = smoothness;
  const double rho = hessian_lipschitz;
  const double root_d = std::sqrt(static_cast<double>(dim));

  HyperParams p;
  p.kind = kind;
  p.eps = eps;
  p.eps_h = eps_h;
  p.delta = delta;
  p.sigma = sigma;
  p.smoothness = L;
  p.hessian_lipschitz = rho;
  p.value_gap = value_gap;
  p.dim = dim;
  p.derived = true;

  // Fills every field that depends on (eta_h, t); returns the log factor
  // whose argument feeds back into the eta_h bound.
  const auto fill = [&](double eta_h, std::int64_t t) -> double {
    const double c = clog(static_cast<double>(dim) * static_cast<double>(t) / delta);
    p.log_const = c;
    p.eta_h = eta_h;
    p.t_thres = t;
    if (kind == EstimatorKind::Spider) {
      if (sigma > 0.0) {
        const double b_floor = 16.0 * log4d / (eta_h * eta_h * eps_h * eps_h);
        const double b_raw = std::max({32.0 * log4d * sigma * sigma / (eps * eps),
                                       32.0 * log4d * sigma * sigma * rho * rho /
                                           (eps_h * eps_h * eps_h * eps_h),
                                       b_floor * b_floor});
        p.mini_batch = p.period = std::ceil(std::sqrt(b_raw));
        p.big_batch = p.mini_batch * p.mini_batch;
        const double sqrt_b = p.mini_batch;
        p.eta = sigma / (2.0 * sqrt_b * L);
        p.radius = std::min(
            {sigma / (2.0 * sqrt_b * L),
             log4d * eta_h * sigma * sigma / (2.0 * p.big_batch * eps),
             std::sqrt(2.0 * log4d * eta_h * sigma * sigma / (p.big_batch * L)),
             L * eta_h * eps_h / (c * rho)});
      } else {
        p.mini_batch = p.period = p.big_batch = 1;
        p.eta = eps / (2.0 * L);
        p.radius = L * eta_h * eps_h / (c * rho);
      }
      const double escape_cap = 0.99 * c * c * L * L * eta_h * eta_h * eps_h * eps_h /
                               (rho * rho * static_cast<double>(t) * static_cast<double>(t));
      p.dbar = sigma > 0.0
                   ? std::min(sigma * sigma / (4.0 * p.big_batch * L * L), escape_cap)
                   : escape_cap;
      p.weight = p.weight_raw = 1.0;
      return eta_h * eps_h * root_d * L / (c * rho * delta * p.radius);  // Theta
    }
    // STORM
    if (sigma > 0.0) {
      const double b_raw =
          std::max({2048.0 * log4d * sigma / eps,
                    16.0 * log4d / (eta_h * eta_h * L * L * eps_h * eps_h),
                    3136.0 * log4d,
                    sigma * std::sqrt(rho) * static_cast<double>(t) /
                        (2.0 * L * L * eta_h * eps_h * std::sqrt(0.99))});
      p.mini_batch = std::ceil(b_raw);
      p.big_batch = p.mini_batch * p.mini_batch;
      p.period = 1;
      const double b = p.mini_batch;
      p.eta = sigma / (2.0 * b * L);
      p.radius = std::min({sigma / (2.0 * b * L),
                           log4d * log4d * eta_h * sigma * sigma / (4.0 * b * b * eps),
                           std::sqrt(2.0 * log4d * log4d * eta_h * sigma * sigma / (b * b * L)),
                           L * eta_h * eps_h / rho});
    } else {
      p.mini_batch = p.big_batch = p.period = 1;
      p.eta = eps / (2.0 * L);
      p.radius = L * eta_h * eps_h / rho;
    }
    const double b = p.mini_batch;
    const double escape_cap = 0.99 * L * L * eta_h * eta_h * eps_h * eps_h /
                             (rho * static_cast<double>(t) * static_cast<double>(t));
    p.dbar = sigma > 0.0 ? std::min(sigma * sigma / (4.0 * b * b * L * L), escape_cap)
                         : escape_cap;
    p.weight_raw = 3136.0 * log4d / b;
    p.weight =
        std::min({p.weight_raw, 1.0 / (4.0 * static_cast<double>(t)), eta_h * eps_h, 1.0});
    return 8.0 * eps_h * root_d / (rho * delta * p.radius);  // Theta for t_thres
  };

  double eta_h = (kind == EstimatorKind::Spider) ? 1.0 / (16.0 * L) : 1.0 / (10.0 * L);
  std::int64_t t = std::max<std::int64_t>(1, ceil_i64(2.0 * clog(1.0 / delta) / (eta_h * eps_h)));

  bool settled = false;
  for (int round = 0; round < 100 && !settled; ++round) {
    const double theta = fill(eta_h, t);
    double eta_h_next;
    std::int64_t t_next;
    if (kind == EstimatorKind::Spider) {
      eta_h_next = std::min({eta_h, 1.0 / (16.0 * L * clog(theta)),
                             1.0 / (8.0 * p.log_const * L * clog(static_cast<double>(t))),
                             1.0 / (L * std::sqrt(128.0 * log4d))});
      t_next = std::max(t, ceil_i64(2.0 * clog(theta) / (eta_h_next * eps_h)));
    } else {
      const double theta_eta = theta * L;
      eta_h_next = std::min({eta_h, 1.0 / (10.0 * L * clog(theta_eta)),
                             1.0 / (10.0 * L * clog(static_cast<double>(t))),
                             1.0 / (4096.0 * L * log4d)});
      t_next = std::max(t, ceil_i64(2.0 * clog(theta) / (eta_h_next * eps_h)));
    }
    settled = (t_next == t) && (eta_h_next == eta_h);
    eta_h = eta_h_next;
    t = t_next;
  }

  if (!settled) {
    std::ostringstream os;
    os << "parameter fixed point did not settle in 100 rounds (eta_h=" << eta_h << ", t_thres=" << t
       << ", eps=" << eps << ", eps_h=" << eps_h << ", delta=" << delta << ", sigma=" << sigma
       << ", L=" << L << ", rho=" << rho << ")";
    fail(Errc::numeric, os.str());
  }

  fill(eta_h, t);
  p.budget = budget_cap(p, log4d);
  validate_hyperparams(p);
  return p;
}

void validate_hyperparams(const HyperParams &hp) {
  require(hp.eps > 0.0, Errc::invalid_argument, "hyperparams: eps must be positive");
  require(hp.eta > 0.0, Errc::invalid_argument, "hyperparams: eta must be positive");
  require(hp.eta_h > 0.0, Errc::invalid_argument, "hyperparams: eta_h must be positive");
  require(hp.radius > 0.0, Errc::invalid_argument, "hyperparams: r must be positive");
  require(hp.t_thres >= 1, Errc::invalid_argument, "hyperparams: t_thres must be >= 1");
  require(hp.dbar > 0.0, Errc::invalid_argument, "hyperparams: dbar must be positive");
  require(hp.budget >= 0, Errc::invalid_argument, "hyperparams: budget must be nonnegative");
  require(hp.big_batch >= 1 && hp.mini_batch >= 1, Errc::invalid_argument,
          "hyperparams: batch sizes must be >= 1");
  if (hp.kind == EstimatorKind::Spider)
    require(hp.period >= 1, Errc::invalid_argument, "hyperparams: q must be >= 1");
  if (hp.kind == EstimatorKind::Storm)
    require(hp.weight > 0.0 && hp.weight <= 1.0, Errc::invalid_argument,
            "hyperparams: STORM weight a must lie in (0, 1]");
}

namespace {

std::string count_text(double v) {
  if (v < 9.0e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

}  // namespace

std::string describe(const HyperParams &hp) {
  std::ostringstream os;
  os.precision(12);
  os << "estimator = " << (hp.kind == EstimatorKind::Spider ? "spider" : "storm") << "\n"
     << "mode = " << (hp.derived ? "theorem" : "manual") << "\n"
     << "eps = " << hp.eps << "\n"
     << "eps_h = " << hp.eps_h << "\n"
     << "delta = " << hp.delta << "\n"
     << "sigma = " << hp.sigma << "\n"
     << "L = " << hp.smoothness << "\n"
     << "rho = " << hp.hessian_lipschitz << "\n"
     << "Delta = " << hp.value_gap << "\n"
     << "dim = " << hp.dim << "\n"
     << "eta = " << hp.eta << "\n"
     << "eta_h = " << hp.eta_h << "\n"
     << "r = " << hp.radius << "\n"
     << "t_thres = " << hp.t_thres << "\n"
     << "dbar = " << hp.dbar << "\n"
     << "B = " << count_text(hp.big_batch) << "\n"
     << "b = " << count_text(hp.mini_batch) << "\n"
     << "q = " << count_text(hp.period) << "\n"
     << "a = " << hp.weight << "\n"
     << "a_raw = " << hp.weight_raw << "\n"
     << "C = " << hp.log_const << "\n"
     << "budget = " << hp.budget << "\n";
  return os.str();
}

}  // namespace lena

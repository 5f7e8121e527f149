#pragma once

#include <cstdint>
#include <string>

#include "lena/estimator.hpp"

namespace lena {

/// Full tunable set of the two-phase driver plus the problem constants the
/// derivations consume. Either produced by derive_params (theorem mode) or
/// filled directly by the caller (manual mode; `derived` records which).
struct HyperParams {
  EstimatorKind kind = EstimatorKind::Spider;

  // targets and problem constants
  double eps = 0.0;
  double eps_h = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  double smoothness = 0.0;         // L
  double hessian_lipschitz = 0.0;  // rho
  double value_gap = 0.0;          // Delta
  int dim = 0;

  // tunables. Batch sizes are integer-valued but held as doubles: the
  // analysis-exact choices grow far beyond practical (and 64-bit) range at
  // small targets, and derive_params must still report them faithfully.
  // estimator_config() converts and rejects sizes that cannot execute.
  double eta = 0.0;          // GD-phase movement per step
  double eta_h = 0.0;        // Escape-phase step size
  double radius = 0.0;       // perturbation radius r
  std::int64_t t_thres = 0;  // Escape-phase length
  double dbar = 0.0;         // average squared-movement budget
  double big_batch = 1;      // B
  double mini_batch = 1;     // b
  double period = 1;         // q
  double weight = 1.0;       // a (STORM)
  double weight_raw = 1.0;   // a before clipping
  double log_const = 1.0;    // C
  std::int64_t budget = 0;   // max stochastic-gradient evaluations

  bool derived = false;

  EstimatorConfig estimator_config() const {
    require(big_batch < 1e15 && mini_batch < 1e15 && period < 1e15, Errc::unsupported,
            "derived batch sizes are too large to execute; supply manual parameters");
    return EstimatorConfig{kind, static_cast<std::int64_t>(big_batch),
                           static_cast<std::int64_t>(mini_batch),
                           static_cast<std::int64_t>(period), weight,
                           SamplingMode::WithReplacement};
  }
};

/// Derives every tunable from (eps, eps_h, delta, sigma, L, rho, Delta, dim),
/// spelling out the constants the convergence analysis forces:
///
/// SPIDER:  B = ceil(max(32 log(4/d) s^2/e^2, 32 log(4/d) s^2 rho^2/eh^4,
///                       (16 log(4/d)/(eta_H^2 eh^2))^2)) rounded to b^2 with
///          b = q = ceil(sqrt(B)); eta = s/(2 sqrt(B) L);
///          r = min(s/(2 sqrt(B) L), log(4/d) eta_H s^2/(2 B e),
///                  sqrt(2 log(4/d) eta_H s^2/(B L)), L eta_H eh/(C rho));
///          Dbar = min(s^2/(4 B L^2), 0.99 C^2 L^2 eta_H^2 eh^2/(rho^2 t^2)).
///          eta_H and t_thres solve the coupled bounds
///          eta_H <= min(1/(16 L log Theta), 1/(8 C L log t), 1/(L sqrt(128 log(4/d)))),
///          t = ceil(2 log(Theta)/(eta_H eh)), Theta = eta_H eh sqrt(dim) L/(C rho d r),
///          C = log(dim t / d), by fixed-point iteration (shrink eta_H, grow t).
///
/// STORM:   b = ceil(max(2^11 log(4/d) s/e, 16 log(4/d)/(eta_H^2 L^2 eh^2),
///                       56^2 log(4/d), s sqrt(rho) t/(2 L^2 eta_H eh sqrt(0.99)))),
///          B = b^2; eta = s/(2 b L); a = 56^2 log(4/d)/b clipped to
///          min(a, 1/(4t), eta_H eh, 1); r = min(s/(2 b L),
///          log(4/d)^2 eta_H s^2/(4 b^2 e), sqrt(2 log(4/d)^2 eta_H s^2/(b^2 L)),
///          L eta_H eh/rho); Dbar = min(s^2/(4 b^2 L^2), 0.99 L^2 eta_H^2 eh^2/(rho t^2));
///          eta_H <= min(1/(10 L log(8 eh L sqrt(dim)/(rho d r))), 1/(10 L log t),
///                       1/(2^12 L log(4/d))), t = ceil(2 log(8 eh sqrt(dim)/(rho d r))/(eta_H eh)).
///
/// sigma = 0 degenerates to an exact-estimator mode: B = b = q = 1,
/// eta = eps/(2L), and the sigma-scaled bounds on r and Dbar become vacuous.
/// Throws Errc::numeric if the fixed point fails to settle within 100 rounds.
HyperParams derive_params(EstimatorKind kind, double eps, double eps_h, double delta, double sigma,
                          double smoothness, double hessian_lipschitz, double value_gap, int dim);

/// Basic sanity validation (both modes): positivity, batch shapes, weight
/// range. Theorem-tightness checks live with the derivation's callers.
void validate_hyperparams(const HyperParams &hp);

/// Multi-line human-readable dump (one `name = value` per line).
std::string describe(const HyperParams &hp);

}  // namespace lena

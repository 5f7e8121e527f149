#include "lena.h"

#include <cstring>
#include <string>

#include "lena/baselines.hpp"
#include "lena/certify.hpp"
#include "lena/config.hpp"
#include "lena/driver.hpp"
#include "lena/experiment.hpp"
#include "lena/matrix_sensing.hpp"
#include "lena/plot.hpp"
#include "lena/saddle_quartic.hpp"

struct lena_problem {
  std::unique_ptr<lena::Problem> impl;
};

struct lena_params {
  lena::HyperParams hp;
  double sgd_step = 0.0;
  std::int64_t sgd_batch = 1;
  std::int64_t noise_period = 1000;
};

struct lena_result {
  lena::RunOutcome outcome;
};

struct lena_config {
  lena::RunConfig impl;
};

struct lena_report {
  lena::ExperimentResult impl;
};

namespace {

thread_local std::string g_last_error;

int set_error(lena::Errc code, const char *what) {
  g_last_error = what;
  switch (code) {
    case lena::Errc::invalid_argument:
      return LENA_ERR_INVALID_ARGUMENT;
    case lena::Errc::unsupported:
      return LENA_ERR_UNSUPPORTED;
    case lena::Errc::numeric:
      return LENA_ERR_NUMERIC;
    case lena::Errc::io:
      return LENA_ERR_IO;
    case lena::Errc::config:
      return LENA_ERR_CONFIG;
  }
  return LENA_ERR_NUMERIC;
}

template <typename Fn>
int guarded(Fn &&fn) {
  try {
    fn();
    return LENA_OK;
  } catch (const lena::Error &e) {
    return set_error(e.code(), e.what());
  } catch (const std::exception &e) {
    return set_error(lena::Errc::numeric, e.what());
  } catch (...) {
    return set_error(lena::Errc::numeric, "unknown error");
  }
}

void check_arg(bool ok, const char *what) {
  lena::require(ok, lena::Errc::invalid_argument, what);
}

Eigen::Map<const Eigen::VectorXd> as_vec(const double *x, int32_t dim) {
  return Eigen::Map<const Eigen::VectorXd>(x, dim);
}

char *dup_string(const std::string &s) {
  char *out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lena::Algorithm to_algorithm(int algorithm) {
  switch (algorithm) {
    case LENA_ALGO_LENA_SPIDER:
      return lena::Algorithm::LenaSpider;
    case LENA_ALGO_LENA_STORM:
      return lena::Algorithm::LenaStorm;
    case LENA_ALGO_SGD:
      return lena::Algorithm::Sgd;
    case LENA_ALGO_PERTURBED_SGD:
      return lena::Algorithm::PerturbedSgd;
    case LENA_ALGO_SPIDER:
      return lena::Algorithm::Spider;
    default:
      lena::fail(lena::Errc::invalid_argument, "unknown algorithm id");
  }
}

lena::EstimatorKind to_estimator(int estimator) {
  check_arg(estimator == LENA_ESTIMATOR_SPIDER || estimator == LENA_ESTIMATOR_STORM,
            "unknown estimator id");
  return estimator == LENA_ESTIMATOR_SPIDER ? lena::EstimatorKind::Spider
                                            : lena::EstimatorKind::Storm;
}

lena_certificate to_c_certificate(const lena::Certificate &cert) {
  lena_certificate out;
  out.grad_norm = cert.grad_norm;
  out.min_eig = cert.min_eig;
  out.eps = cert.eps;
  out.eps_h = cert.eps_h;
  out.residual = cert.residual;
  out.slack = cert.slack;
  out.pass = cert.pass ? 1 : 0;
  out.iterations = cert.iterations;
  return out;
}

}  // namespace

extern "C" {

const char *lena_version(void) { return "1.0.0"; }

const char *lena_status_name(int status) {
  switch (status) {
    case LENA_OK:
      return "ok";
    case LENA_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case LENA_ERR_UNSUPPORTED:
      return "unsupported";
    case LENA_ERR_NUMERIC:
      return "numeric error";
    case LENA_ERR_IO:
      return "io error";
    case LENA_ERR_CONFIG:
      return "config error";
    default:
      return "unknown status";
  }
}

const char *lena_last_error(void) { return g_last_error.c_str(); }

void lena_string_free(char *s) { delete[] s; }

int lena_matrix_sensing_create(int32_t d, int32_t r, int32_t n, uint64_t seed,
                               lena_problem **out) {
  return guarded([&] {
    check_arg(out != nullptr, "out must not be NULL");
    *out = new lena_problem{std::make_unique<lena::MatrixSensing>(d, r, n, seed)};
  });
}

int lena_saddle_quartic_create(const double *lambda, int32_t dim, double sigma,
                               int32_t noise_pairs, uint64_t noise_seed, lena_problem **out) {
  return guarded([&] {
    check_arg(out != nullptr && lambda != nullptr && dim >= 1, "bad arguments");
    Eigen::VectorXd l(dim);
    for (int32_t i = 0; i < dim; ++i) l[i] = lambda[i];
    *out = new lena_problem{std::make_unique<lena::SaddleQuartic>(
        l, sigma, noise_pairs > 0 ? noise_pairs : 8, 2.0, noise_seed)};
  });
}

void lena_problem_free(lena_problem *p) { delete p; }

int lena_problem_dim(const lena_problem *p, int32_t *out) {
  return guarded([&] {
    check_arg(p && out, "bad arguments");
    *out = p->impl->dim();
  });
}

int lena_problem_constants(const lena_problem *p, double *smoothness, double *hessian_lipschitz,
                           double *noise_bound) {
  return guarded([&] {
    check_arg(p != nullptr, "problem must not be NULL");
    if (smoothness) *smoothness = p->impl->smoothness();
    if (hessian_lipschitz) *hessian_lipschitz = p->impl->hessian_lipschitz();
    if (noise_bound) *noise_bound = p->impl->noise_bound();
  });
}

int lena_problem_value(const lena_problem *p, const double *x, int32_t dim, double *out) {
  return guarded([&] {
    check_arg(p && x && out, "bad arguments");
    *out = p->impl->full_value(as_vec(x, dim));
  });
}

int lena_problem_gradient(const lena_problem *p, const double *x, int32_t dim, double *out) {
  return guarded([&] {
    check_arg(p && x && out, "bad arguments");
    const lena::Vector g = p->impl->full_gradient(as_vec(x, dim));
    std::memcpy(out, g.data(), sizeof(double) * static_cast<std::size_t>(g.size()));
  });
}

int lena_problem_save(const lena_problem *p, const char *path) {
  return guarded([&] {
    check_arg(p && path, "bad arguments");
    p->impl->save(path);
  });
}

int lena_problem_load(const char *path, lena_problem **out) {
  return guarded([&] {
    check_arg(path && out, "bad arguments");
    *out = new lena_problem{lena::load_problem(path)};
  });
}

int lena_matrix_sensing_saddle_init(const lena_problem *p, double alpha, uint64_t seed, double *x0,
                                    int32_t dim) {
  return guarded([&] {
    check_arg(p && x0, "bad arguments");
    const auto *ms = dynamic_cast<const lena::MatrixSensing *>(p->impl.get());
    lena::require(ms != nullptr, lena::Errc::unsupported,
                  "saddle_init requires a matrix sensing instance");
    check_arg(dim == ms->dim(), "x0 dimension mismatch");
    const lena::Vector v = ms->saddle_init(alpha, seed);
    std::memcpy(x0, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  });
}

int lena_matrix_sensing_relative_error(const lena_problem *p, const double *x, int32_t dim,
                                       double *out) {
  return guarded([&] {
    check_arg(p && x && out, "bad arguments");
    const auto *ms = dynamic_cast<const lena::MatrixSensing *>(p->impl.get());
    lena::require(ms != nullptr, lena::Errc::unsupported,
                  "relative_error requires a matrix sensing instance");
    *out = ms->relative_error(as_vec(x, dim));
  });
}

int lena_params_derive(int estimator, double eps, double eps_h, double delta, double sigma,
                       double smoothness, double hessian_lipschitz, double value_gap, int32_t dim,
                       lena_params **out) {
  return guarded([&] {
    check_arg(out != nullptr, "out must not be NULL");
    auto p = std::make_unique<lena_params>();
    p->hp = lena::derive_params(to_estimator(estimator), eps, eps_h, delta, sigma, smoothness,
                                hessian_lipschitz, value_gap, dim);
    *out = p.release();
  });
}

int lena_params_manual(int estimator, double eps, double eps_h, double delta, lena_params **out) {
  return guarded([&] {
    check_arg(out != nullptr, "out must not be NULL");
    auto p = std::make_unique<lena_params>();
    p->hp.kind = to_estimator(estimator);
    p->hp.eps = eps;
    p->hp.eps_h = eps_h;
    p->hp.delta = delta;
    p->hp.budget = std::int64_t{1} << 62;
    p->hp.derived = false;
    *out = p.release();
  });
}

void lena_params_free(lena_params *p) { delete p; }

namespace {

double *param_slot_f64(lena_params *p, const std::string &key) {
  auto &hp = p->hp;
  if (key == "eps") return &hp.eps;
  if (key == "eps_h") return &hp.eps_h;
  if (key == "delta") return &hp.delta;
  if (key == "sigma") return &hp.sigma;
  if (key == "L") return &hp.smoothness;
  if (key == "rho") return &hp.hessian_lipschitz;
  if (key == "Delta") return &hp.value_gap;
  if (key == "eta") return &hp.eta;
  if (key == "eta_h") return &hp.eta_h;
  if (key == "r") return &hp.radius;
  if (key == "dbar") return &hp.dbar;
  if (key == "a") return &hp.weight;
  if (key == "a_raw") return &hp.weight_raw;
  if (key == "C") return &hp.log_const;
  if (key == "B") return &hp.big_batch;
  if (key == "b") return &hp.mini_batch;
  if (key == "q") return &hp.period;
  if (key == "sgd_step") return &p->sgd_step;
  return nullptr;
}

std::int64_t *param_slot_i64(lena_params *p, const std::string &key) {
  auto &hp = p->hp;
  if (key == "t_thres") return &hp.t_thres;
  if (key == "budget") return &hp.budget;
  if (key == "sgd_batch") return &p->sgd_batch;
  if (key == "noise_period") return &p->noise_period;
  return nullptr;
}

}  // namespace

int lena_params_get(const lena_params *p, const char *key, double *out) {
  return guarded([&] {
    check_arg(p && key && out, "bad arguments");
    auto *mp = const_cast<lena_params *>(p);
    if (const double *f = param_slot_f64(mp, key)) {
      *out = *f;
      return;
    }
    if (const std::int64_t *i = param_slot_i64(mp, key)) {
      *out = static_cast<double>(*i);
      return;
    }
    if (std::string(key) == "dim") {
      *out = p->hp.dim;
      return;
    }
    lena::fail(lena::Errc::invalid_argument, std::string("unknown parameter key '") + key + "'");
  });
}

int lena_params_set(lena_params *p, const char *key, double value) {
  return guarded([&] {
    check_arg(p && key, "bad arguments");
    if (double *f = param_slot_f64(p, key)) {
      *f = value;
      return;
    }
    if (std::int64_t *i = param_slot_i64(p, key)) {
      *i = static_cast<std::int64_t>(value);
      return;
    }
    if (std::string(key) == "dim") {
      p->hp.dim = static_cast<int>(value);
      return;
    }
    lena::fail(lena::Errc::invalid_argument, std::string("unknown parameter key '") + key + "'");
  });
}

int lena_params_describe(const lena_params *p, char **out) {
  return guarded([&] {
    check_arg(p && out, "bad arguments");
    *out = dup_string(lena::describe(p->hp));
  });
}

int lena_optimize(const lena_problem *problem, const lena_params *params, int algorithm,
                  uint64_t seed, const double *x0, int32_t dim, const char *trace_path,
                  int32_t log_every, lena_result **out) {
  return guarded([&] {
    check_arg(problem && params && out, "bad arguments");
    lena::Vector start;
    if (x0) {
      check_arg(dim == problem->impl->dim(), "x0 dimension mismatch");
      start = as_vec(x0, dim);
    } else {
      start = lena::Vector::Zero(problem->impl->dim());
    }
    lena::Rng rng(lena::mix64(seed ^ 0x545249414c731e0bULL));
    lena::RunOptions options;
    options.log_every = log_every;
    const lena::Algorithm algo = to_algorithm(algorithm);
    auto result = std::make_unique<lena_result>();
    if (algo == lena::Algorithm::LenaSpider || algo == lena::Algorithm::LenaStorm) {
      lena::HyperParams hp = params->hp;
      hp.kind = algo == lena::Algorithm::LenaSpider ? lena::EstimatorKind::Spider
                                                    : lena::EstimatorKind::Storm;
      result->outcome = lena::lena_run(*problem->impl, hp, start, rng, options);
    } else {
      lena::BaselineParams bp;
      bp.budget = params->hp.budget;
      if (algo == lena::Algorithm::Spider) {
        bp.eta = params->hp.eta;
        bp.big_batch = static_cast<std::int64_t>(params->hp.big_batch);
        bp.mini_batch = static_cast<std::int64_t>(params->hp.mini_batch);
        bp.period = static_cast<std::int64_t>(params->hp.period);
        bp.eps_stop = params->hp.eps;
      } else {
        bp.step = params->sgd_step;
        bp.batch = params->sgd_batch;
        if (algo == lena::Algorithm::PerturbedSgd) {
          bp.noise_radius = params->hp.radius;
          bp.noise_period = params->noise_period;
        }
      }
      lena::BaselineKind kind = algo == lena::Algorithm::Sgd ? lena::BaselineKind::Sgd
                                : algo == lena::Algorithm::PerturbedSgd
                                    ? lena::BaselineKind::PerturbedSgd
                                    : lena::BaselineKind::PlainSpider;
      result->outcome = lena::baseline_run(kind, *problem->impl, bp, start, rng, options);
    }
    if (trace_path) lena::write_trace_csv(result->outcome.trace, trace_path);
    *out = result.release();
  });
}

void lena_result_free(lena_result *r) { delete r; }

int lena_result_status(const lena_result *r, int32_t *out) {
  return guarded([&] {
    check_arg(r && out, "bad arguments");
    *out = r->outcome.status == lena::RunStatus::Converged ? LENA_RUN_CONVERGED
                                                           : LENA_RUN_BUDGET_EXHAUSTED;
  });
}

int lena_result_evals(const lena_result *r, int64_t *out) {
  return guarded([&] {
    check_arg(r && out, "bad arguments");
    *out = r->outcome.sgrad_evals;
  });
}

int lena_result_steps(const lena_result *r, int64_t *out) {
  return guarded([&] {
    check_arg(r && out, "bad arguments");
    *out = r->outcome.steps;
  });
}

int lena_result_point(const lena_result *r, double *x, int32_t dim) {
  return guarded([&] {
    check_arg(r && x, "bad arguments");
    check_arg(dim == r->outcome.x_out.size(), "dimension mismatch");
    std::memcpy(x, r->outcome.x_out.data(), sizeof(double) * static_cast<std::size_t>(dim));
  });
}

int lena_certify(const lena_problem *problem, const double *x, int32_t dim, double eps,
                 double eps_h, double tol, uint64_t seed, lena_certificate *out) {
  return guarded([&] {
    check_arg(problem && x && out, "bad arguments");
    lena::Rng rng(lena::mix64(seed ^ 0x6365727469667931ULL));
    *out = to_c_certificate(lena::certify(*problem->impl, as_vec(x, dim), eps, eps_h, tol, rng));
  });
}

int lena_config_load(const char *path, lena_config **out) {
  return guarded([&] {
    check_arg(path && out, "bad arguments");
    *out = new lena_config{lena::parse_config_file(path)};
  });
}

int lena_config_parse(const char *text, lena_config **out) {
  return guarded([&] {
    check_arg(text && out, "bad arguments");
    *out = new lena_config{lena::parse_config_text(text)};
  });
}

void lena_config_free(lena_config *c) { delete c; }

int lena_config_override(lena_config *c, const char *key, const char *value) {
  return guarded([&] {
    check_arg(c && key && value, "bad arguments");
    lena::apply_override(c->impl, key, value);
    lena::validate_config(c->impl);
  });
}

int lena_config_serialize(const lena_config *c, char **out) {
  return guarded([&] {
    check_arg(c && out, "bad arguments");
    *out = dup_string(lena::serialize_config(c->impl));
  });
}

int lena_params_from_config(const lena_config *c, lena_params **out) {
  return guarded([&] {
    check_arg(c && out, "bad arguments");
    const auto problem = lena::build_problem(c->impl.problem);
    const lena::Vector x0 = lena::initial_point(c->impl, *problem);
    auto p = std::make_unique<lena_params>();
    p->hp = lena::resolve_params(c->impl, *problem, x0);
    *out = p.release();
  });
}

int lena_experiment_run(const lena_config *c, lena_report **out) {
  return guarded([&] {
    check_arg(c != nullptr, "config must not be NULL");
    lena::ExperimentResult result = lena::run_experiment(c->impl);
    if (out) *out = new lena_report{std::move(result)};
  });
}

void lena_report_free(lena_report *r) { delete r; }

int lena_report_count(const lena_report *r, int32_t *out) {
  return guarded([&] {
    check_arg(r && out, "bad arguments");
    *out = static_cast<int32_t>(r->impl.summaries.size());
  });
}

namespace {

const lena::SummaryRecord &report_at(const lena_report *r, int32_t index) {
  lena::require(r != nullptr, lena::Errc::invalid_argument, "report must not be NULL");
  lena::require(index >= 0 && index < static_cast<int32_t>(r->impl.summaries.size()),
                lena::Errc::invalid_argument, "report index out of range");
  return r->impl.summaries[static_cast<std::size_t>(index)];
}

}  // namespace

int lena_report_get(const lena_report *r, int32_t index, const char *field, double *out) {
  return guarded([&] {
    check_arg(field && out, "bad arguments");
    const auto &rec = report_at(r, index);
    const std::string f(field);
    if (f == "seed")
      *out = static_cast<double>(rec.seed);
    else if (f == "status")
      *out = rec.status == lena::RunStatus::Converged ? LENA_RUN_CONVERGED
                                                      : LENA_RUN_BUDGET_EXHAUSTED;
    else if (f == "final_objective")
      *out = rec.final_objective;
    else if (f == "relative_error")
      *out = rec.relative_error.value_or(-1.0);
    else if (f == "sgrad_evals")
      *out = static_cast<double>(rec.sgrad_evals);
    else if (f == "steps")
      *out = static_cast<double>(rec.steps);
    else if (f == "wall_time_s")
      *out = rec.wall_time_s;
    else if (f == "cert_pass")
      *out = rec.certificate ? (rec.certificate->pass ? 1.0 : 0.0) : -1.0;
    else if (f == "grad_norm")
      *out = rec.certificate ? rec.certificate->grad_norm : -1.0;
    else if (f == "min_eig")
      *out = rec.certificate ? rec.certificate->min_eig : 0.0;
    else
      lena::fail(lena::Errc::invalid_argument, "unknown report field '" + f + "'");
  });
}

const char *lena_report_trace_path(const lena_report *r, int32_t index) {
  try {
    return report_at(r, index).trace_path.c_str();
  } catch (...) {
    return nullptr;
  }
}

const char *lena_report_error(const lena_report *r, int32_t index) {
  try {
    return report_at(r, index).error.c_str();
  } catch (...) {
    return nullptr;
  }
}

const char *lena_report_summary_path(const lena_report *r) {
  return r ? r->impl.summary_path.c_str() : nullptr;
}

int lena_certify_from_config(const lena_config *c, const char *point_path,
                             lena_certificate *out) {
  return guarded([&] {
    check_arg(c && point_path && out, "bad arguments");
    const auto problem = lena::build_problem(c->impl.problem);
    const lena::Vector x = lena::read_point_file(point_path, problem->dim());
    lena::Rng rng(lena::mix64(c->impl.seeds.front() ^ 0x6365727469667931ULL));
    *out = to_c_certificate(
        lena::certify(*problem, x, c->impl.eps, c->impl.eps_h, 1e-6, rng));
  });
}

int lena_plot_emit(const char *const *trace_paths, int32_t count, const char *data_path,
                   const char *svg_path) {
  return guarded([&] {
    check_arg(trace_paths && count >= 1 && data_path, "bad arguments");
    std::vector<std::string> paths;
    paths.reserve(static_cast<std::size_t>(count));
    for (int32_t i = 0; i < count; ++i) {
      check_arg(trace_paths[i] != nullptr, "trace path must not be NULL");
      paths.emplace_back(trace_paths[i]);
    }
    lena::emit_plot(paths, data_path, svg_path ? svg_path : "");
  });
}

}  // extern "C"

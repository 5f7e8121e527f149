#include "lena/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "lena/matrix_sensing.hpp"
#include "lena/saddle_quartic.hpp"
#include "lena/trace.hpp"

namespace lena {

namespace fs = std::filesystem;

std::unique_ptr<Problem> build_problem(const ProblemSpec &spec) {
  if (spec.kind == ProblemKind::MatrixSensing)
    return std::make_unique<MatrixSensing>(spec.d, spec.r, spec.n, spec.seed);
  Eigen::VectorXd lambda(spec.dim);
  if (spec.lambda.empty()) {
    // Default spectrum (-1, 1, ..., 1): a strict saddle at the origin with
    // minima at +-e1.
    lambda.setOnes();
    lambda[0] = -1.0;
  } else {
    for (int i = 0; i < spec.dim; ++i) lambda[i] = spec.lambda[static_cast<std::size_t>(i)];
  }
  return std::make_unique<SaddleQuartic>(lambda, spec.sigma, spec.noise_pairs, spec.noise_freq,
                                         spec.noise_seed);
}

Vector initial_point(const RunConfig &config, const Problem &problem) {
  if (config.problem.kind == ProblemKind::MatrixSensing) {
    const auto &ms = dynamic_cast<const MatrixSensing &>(problem);
    return ms.saddle_init(config.problem.alpha, config.problem.seed);
  }
  if (config.problem.x0_scale > 0.0) {
    Rng rng(mix64(config.problem.noise_seed ^ 0x78305f696e6974ULL));
    return config.problem.x0_scale * rng.gaussian(problem.dim());
  }
  return Vector::Zero(problem.dim());
}

HyperParams resolve_params(const RunConfig &config, const Problem &problem, VecRef x0) {
  const EstimatorKind kind =
      config.algo == Algorithm::LenaStorm ? EstimatorKind::Storm : EstimatorKind::Spider;
  if (config.mode == ParamMode::Theorem) {
    const double sigma = config.constants.sigma.value_or(problem.noise_bound());
    const double smooth = config.constants.smoothness.value_or(problem.smoothness());
    const double rho = config.constants.hessian_lipschitz.value_or(problem.hessian_lipschitz());
    const double gap =
        config.constants.value_gap.value_or(problem.full_value(x0) - problem.inf_value());
    HyperParams hp = derive_params(kind, config.eps, config.eps_h, config.delta, sigma, smooth,
                                   rho, std::max(gap, 1e-12), problem.dim());
    hp.budget = config.budget;
    return hp;
  }
  HyperParams hp;
  hp.kind = kind;
  hp.eps = config.eps;
  hp.eps_h = config.eps_h;
  hp.delta = config.delta;
  hp.sigma = problem.noise_bound();
  hp.smoothness = problem.smoothness();
  hp.hessian_lipschitz = problem.hessian_lipschitz();
  hp.value_gap = problem.full_value(x0) - problem.inf_value();
  hp.dim = problem.dim();
  hp.eta = *config.manual.eta;
  hp.eta_h = *config.manual.eta_h;
  hp.radius = *config.manual.radius;
  hp.t_thres = *config.manual.t_thres;
  hp.dbar = *config.manual.dbar;
  hp.big_batch = *config.manual.big_batch;
  hp.mini_batch = *config.manual.mini_batch;
  hp.period = config.manual.period.value_or(1);
  hp.weight = config.manual.weight.value_or(1.0);
  hp.weight_raw = hp.weight;
  hp.budget = config.budget;
  hp.derived = false;
  validate_hyperparams(hp);
  return hp;
}

BaselineParams resolve_baseline(const RunConfig &config) {
  BaselineParams bp;
  bp.budget = config.budget;
  if (config.algo == Algorithm::Spider) {
    bp.eta = config.manual.eta.value_or(0.0);
    bp.big_batch = config.manual.big_batch.value_or(1);
    bp.mini_batch = config.manual.mini_batch.value_or(1);
    bp.period = config.manual.period.value_or(1);
    bp.eps_stop = config.eps;
  } else {
    bp.step = config.manual.sgd_step.value_or(0.0);
    bp.batch = config.manual.sgd_batch.value_or(1);
    if (config.algo == Algorithm::PerturbedSgd) {
      bp.noise_radius = config.manual.radius.value_or(0.0);
      bp.noise_period = config.manual.noise_period.value_or(1000);
    }
  }
  return bp;
}

namespace {

BaselineKind baseline_kind(Algorithm algo) {
  switch (algo) {
    case Algorithm::Sgd:
      return BaselineKind::Sgd;
    case Algorithm::PerturbedSgd:
      return BaselineKind::PerturbedSgd;
    default:
      return BaselineKind::PlainSpider;
  }
}

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

Vector read_point_file(const std::string &path, int expected_dim) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open point file: " + path);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  require(static_cast<int>(values.size()) == expected_dim, Errc::invalid_argument,
          "point file holds " + std::to_string(values.size()) + " values, expected " +
              std::to_string(expected_dim));
  Vector x(expected_dim);
  for (int i = 0; i < expected_dim; ++i) x[i] = values[static_cast<std::size_t>(i)];
  return x;
}

void write_point_file(VecRef x, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open point file for writing: " + path);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out << format_double(x[i]) << "\n";
  }
  require(out.good(), Errc::io, "point write failed: " + path);
}

std::string summary_to_csv(const std::vector<SummaryRecord> &summaries) {
  std::string out =
      "algo,seed,status,final_objective,relative_error,total_sgrad_evals,steps,grad_norm,"
      "min_eig,cert_pass,cert_slack,wall_time_s,trace_path,error\n";
  char wall[32];
  for (const auto &s : summaries) {
    out += s.algo;
    out += ',';
    out += std::to_string(s.seed);
    out += ',';
    out += run_status_name(s.status);
    out += ',';
    out += format_double(s.final_objective);
    out += ',';
    if (s.relative_error) out += format_double(*s.relative_error);
    out += ',';
    out += std::to_string(s.sgrad_evals);
    out += ',';
    out += std::to_string(s.steps);
    out += ',';
    if (s.certificate) out += format_double(s.certificate->grad_norm);
    out += ',';
    if (s.certificate) out += format_double(s.certificate->min_eig);
    out += ',';
    if (s.certificate) out += s.certificate->pass ? "1" : "0";
    out += ',';
    if (s.certificate) out += format_double(s.certificate->slack);
    out += ',';
    std::snprintf(wall, sizeof(wall), "%.3f", s.wall_time_s);
    out += wall;
    out += ',';
    out += csv_escape(s.trace_path);
    out += ',';
    out += csv_escape(s.error);
    out += '\n';
  }
  return out;
}

ExperimentResult run_experiment(const RunConfig &config) {
  validate_config(config);
  const std::unique_ptr<Problem> problem = build_problem(config.problem);
  const Vector x0 = initial_point(config, *problem);

  const bool lena_algo = config.algo == Algorithm::LenaSpider || config.algo == Algorithm::LenaStorm;
  HyperParams hp;
  BaselineParams bp;
  if (lena_algo)
    hp = resolve_params(config, *problem, x0);
  else
    bp = resolve_baseline(config);

  fs::create_directories(config.out_dir);
  problem->save((fs::path(config.out_dir) / "instance.snap").string());

  RunOptions options;
  options.log_every = config.log_every;
  options.track_estimator_error = config.trace_estimator_error;

  const std::string algo = algorithm_name(config.algo);
  const auto *sensing = dynamic_cast<const MatrixSensing *>(problem.get());

  std::vector<SummaryRecord> summaries(config.seeds.size());
  std::atomic<std::size_t> next{0};

  auto run_trial = [&](std::size_t idx) {
    SummaryRecord &rec = summaries[idx];
    const std::uint64_t seed = config.seeds[idx];
    rec.algo = algo;
    rec.seed = seed;
    const fs::path dir(config.out_dir);
    rec.trace_path =
        (dir / ("trace_" + algo + "_seed" + std::to_string(seed) + ".csv")).string();
    try {
      Rng rng(mix64(seed ^ 0x545249414c731e0bULL));
      const auto t0 = std::chrono::steady_clock::now();
      RunOutcome out =
          lena_algo ? lena_run(*problem, hp, x0, rng, options)
                    : baseline_run(baseline_kind(config.algo), *problem, bp, x0, rng, options);
      rec.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rec.status = out.status;
      rec.sgrad_evals = out.sgrad_evals;
      rec.steps = out.steps;
      rec.final_objective = problem->full_value(out.x_out);
      if (sensing) rec.relative_error = sensing->relative_error(out.x_out);

      std::ostringstream meta;
      meta << "algo=" << algo << " mode=" << mode_name(config.mode) << " seed=" << seed;
      out.trace.meta = meta.str();
      write_trace_csv(out.trace, rec.trace_path);

      if (config.write_points) {
        rec.point_path =
            (dir / ("point_" + algo + "_seed" + std::to_string(seed) + ".txt")).string();
        write_point_file(out.x_out, rec.point_path);
      }
      if (config.run_certify) {
        Rng cert_rng(mix64(seed ^ 0x6365727469667931ULL));
        rec.certificate =
            certify(*problem, out.x_out, 2.0 * config.eps, config.eps_h, 1e-6, cert_rng);
      }
    } catch (const Error &e) {
      rec.error = e.what();
    } catch (const std::exception &e) {
      rec.error = e.what();
    }
  };

  unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads,
                                              static_cast<unsigned>(config.seeds.size())));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) run_trial(i);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < config.seeds.size(); i = next.fetch_add(1))
          run_trial(i);
      });
    }
    for (auto &t : workers) t.join();
  }

  ExperimentResult result;
  result.out_dir = config.out_dir;
  result.summaries = std::move(summaries);
  result.summary_path = (fs::path(config.out_dir) / "summary.csv").string();
  std::ofstream out(result.summary_path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open summary for writing: " + result.summary_path);
  const std::string text = summary_to_csv(result.summaries);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(out.good(), Errc::io, "summary write failed");
  return result;
}

}  // namespace lena

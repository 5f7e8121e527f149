// Command-line front end. Everything goes through the C API in lena.h.

#include <glob.h>

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lena.h"

namespace {

int exit_code_for(int status) {
  if (status == LENA_OK) return 0;
  if (status == LENA_ERR_CONFIG) return 1;
  return 2;
}

int report_failure(int status) {
  std::fprintf(stderr, "error (%s): %s\n", lena_status_name(status), lena_last_error());
  return exit_code_for(status);
}

struct ConfigHandle {
  lena_config *ptr = nullptr;
  ~ConfigHandle() { lena_config_free(ptr); }
};

int load_config(const std::string &path, const std::vector<std::pair<std::string, std::string>> &overrides,
                ConfigHandle &out) {
  int status = lena_config_load(path.c_str(), &out.ptr);
  if (status != LENA_OK) return status;
  for (const auto &[key, value] : overrides) {
    status = lena_config_override(out.ptr, key.c_str(), value.c_str());
    if (status != LENA_OK) return status;
  }
  return LENA_OK;
}

std::vector<std::string> expand_globs(const std::vector<std::string> &patterns) {
  std::vector<std::string> paths;
  for (const std::string &pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
    } else if (rc == GLOB_NOMATCH) {
      paths.push_back(pattern);  // let the library report the missing file
    }
    globfree(&g);
  }
  return paths;
}

void print_certificate(const lena_certificate &cert) {
  std::printf("grad_norm  = %.10g   (eps   = %.10g)\n", cert.grad_norm, cert.eps);
  std::printf("min_eig    = %.10g   (eps_h = %.10g, slack = %.3g)\n", cert.min_eig, cert.eps_h,
              cert.slack);
  std::printf("residual   = %.3g after %d iterations\n", cert.residual, cert.iterations);
  std::printf("pass       = %s\n", cert.pass ? "true" : "false");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"lena: perturbed variance-reduced stochastic optimization"};
  app.require_subcommand(1);

  // run
  auto *run = app.add_subcommand("run", "run an experiment from a config file");
  std::string run_config;
  run->add_option("--config", run_config, "config file path")->required();
  std::string run_algo, run_mode, run_out;
  std::int64_t run_seed = -1, run_seeds = -1, run_budget = -1, run_log_every = -1;
  run->add_option("--algo", run_algo, "algorithm override");
  run->add_option("--seed", run_seed, "single trial seed override");
  run->add_option("--seeds", run_seeds, "run seeds 0..k-1");
  run->add_option("--budget", run_budget, "stochastic-gradient budget override");
  run->add_option("--out", run_out, "output directory override");
  run->add_option("--log-every", run_log_every, "objective logging cadence override");
  run->add_option("--mode", run_mode, "theorem|manual override");

  // certify
  auto *certify = app.add_subcommand("certify", "certify a point against a config's problem");
  std::string cert_config, cert_point;
  certify->add_option("--config", cert_config, "config file path")->required();
  certify->add_option("--point", cert_point, "point file (whitespace-separated values)")
      ->required();

  // plot
  auto *plot = app.add_subcommand("plot", "emit plot data (and optional SVG) from trace CSVs");
  std::vector<std::string> plot_traces;
  std::string plot_out, plot_svg;
  plot->add_option("--traces", plot_traces, "trace files or globs")->required()->expected(-1);
  plot->add_option("--out", plot_out, "plot-data output file")->required();
  plot->add_option("--svg", plot_svg, "also write an SVG chart here");

  // params
  auto *params = app.add_subcommand("params", "print the driver parameters a config resolves to");
  std::string params_config;
  params->add_option("--config", params_config, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    std::vector<std::pair<std::string, std::string>> overrides;
    if (!run_algo.empty()) overrides.emplace_back("algorithm.name", run_algo);
    if (!run_mode.empty()) overrides.emplace_back("algorithm.mode", run_mode);
    if (run_seed >= 0) overrides.emplace_back("run.seeds", std::to_string(run_seed));
    if (run_seeds >= 0) {
      std::string list;
      for (std::int64_t s = 0; s < run_seeds; ++s) {
        if (s) list += ",";
        list += std::to_string(s);
      }
      overrides.emplace_back("run.seeds", list);
    }
    if (run_budget >= 0) overrides.emplace_back("run.budget", std::to_string(run_budget));
    if (!run_out.empty()) overrides.emplace_back("run.out_dir", run_out);
    if (run_log_every >= 0)
      overrides.emplace_back("run.log_every", std::to_string(run_log_every));

    ConfigHandle config;
    int status = load_config(run_config, overrides, config);
    if (status != LENA_OK) return report_failure(status);

    lena_report *report = nullptr;
    status = lena_experiment_run(config.ptr, &report);
    if (status != LENA_OK) return report_failure(status);

    int32_t count = 0;
    lena_report_count(report, &count);
    std::printf("%-6s %-16s %-14s %-14s %-12s %-9s\n", "seed", "status", "objective", "rel_error",
                "sgrad_evals", "wall_s");
    bool any_failed = false;
    for (int32_t i = 0; i < count; ++i) {
      const char *err = lena_report_error(report, i);
      double seed, st, obj, rel, evals, wall;
      lena_report_get(report, i, "seed", &seed);
      if (err && err[0]) {
        std::printf("%-6.0f trial failed: %s\n", seed, err);
        any_failed = true;
        continue;
      }
      lena_report_get(report, i, "status", &st);
      lena_report_get(report, i, "final_objective", &obj);
      lena_report_get(report, i, "relative_error", &rel);
      lena_report_get(report, i, "sgrad_evals", &evals);
      lena_report_get(report, i, "wall_time_s", &wall);
      char rel_text[32] = "-";
      if (rel >= 0.0) std::snprintf(rel_text, sizeof(rel_text), "%.4e", rel);
      std::printf("%-6.0f %-16s %-14.6e %-14s %-12.0f %-9.3f\n", seed,
                  static_cast<int>(st) == LENA_RUN_CONVERGED ? "Converged" : "BudgetExhausted",
                  obj, rel_text, evals, wall);
    }
    std::printf("summary: %s\n", lena_report_summary_path(report));
    lena_report_free(report);
    return any_failed ? 2 : 0;
  }

  if (certify->parsed()) {
    ConfigHandle config;
    int status = load_config(cert_config, {}, config);
    if (status != LENA_OK) return report_failure(status);
    lena_certificate cert;
    status = lena_certify_from_config(config.ptr, cert_point.c_str(), &cert);
    if (status != LENA_OK) return report_failure(status);
    print_certificate(cert);
    return 0;
  }

  if (plot->parsed()) {
    const std::vector<std::string> paths = expand_globs(plot_traces);
    if (paths.empty()) {
      std::fprintf(stderr, "error: no trace files matched\n");
      return 2;
    }
    std::vector<const char *> c_paths;
    c_paths.reserve(paths.size());
    for (const auto &p : paths) c_paths.push_back(p.c_str());
    const int status = lena_plot_emit(c_paths.data(), static_cast<int32_t>(c_paths.size()),
                                      plot_out.c_str(), plot_svg.empty() ? nullptr : plot_svg.c_str());
    if (status != LENA_OK) return report_failure(status);
    std::printf("wrote %s\n", plot_out.c_str());
    if (!plot_svg.empty()) std::printf("wrote %s\n", plot_svg.c_str());
    return 0;
  }

  if (params->parsed()) {
    ConfigHandle config;
    int status = load_config(params_config, {}, config);
    if (status != LENA_OK) return report_failure(status);
    lena_params *p = nullptr;
    status = lena_params_from_config(config.ptr, &p);
    if (status != LENA_OK) return report_failure(status);
    char *text = nullptr;
    lena_params_describe(p, &text);
    std::fputs(text, stdout);
    lena_string_free(text);
    lena_params_free(p);
    return 0;
  }

  return 0;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lena/errors.hpp"

namespace lena {

enum class Algorithm { LenaSpider, LenaStorm, Sgd, PerturbedSgd, Spider };
enum class ParamMode { Theorem, Manual };
enum class ProblemKind { MatrixSensing, SaddleQuartic };

const char *algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string &name);
const char *mode_name(ParamMode m);
ParamMode mode_from_name(const std::string &name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::MatrixSensing;
  // matrix sensing
  int d = 50;
  int r = 3;
  int n = 1000;
  std::uint64_t seed = 0;
  double alpha = -1.0;  // saddle init scale; negative selects the default
  // saddle quartic
  int dim = 10;
  std::vector<double> lambda;
  double sigma = 0.0;
  int noise_pairs = 8;
  double noise_freq = 2.0;
  std::uint64_t noise_seed = 0;
  double x0_scale = 0.0;  // 0 => origin start; else Gaussian of this scale

  bool operator==(const ProblemSpec &) const = default;
};

struct ManualParams {
  std::optional<double> eta, eta_h, radius, dbar, weight;
  std::optional<std::int64_t> t_thres, big_batch, mini_batch, period;
  std::optional<double> sgd_step;
  std::optional<std::int64_t> sgd_batch, noise_period;

  bool operator==(const ManualParams &) const = default;
};

/// Theorem-mode problem constants; unset fields are estimated from the
/// instance ("estimate" in the file).
struct ConstantSpec {
  std::optional<double> sigma, smoothness, hessian_lipschitz, value_gap;

  bool operator==(const ConstantSpec &) const = default;
};

struct RunConfig {
  ProblemSpec problem;
  Algorithm algo = Algorithm::LenaSpider;
  ParamMode mode = ParamMode::Theorem;
  double eps = 0.1;
  double eps_h = 0.5;
  double delta = 0.05;
  ManualParams manual;
  ConstantSpec constants;
  std::int64_t budget = 10'000'000;
  std::vector<std::uint64_t> seeds = {0};
  int log_every = 10;
  std::string out_dir = "out";
  int threads = 0;  // 0 => hardware concurrency
  bool trace_estimator_error = false;
  bool write_points = true;
  bool run_certify = true;

  bool operator==(const RunConfig &) const = default;
};

/// Strict flat key=value parser with [section] headers and '#' comments.
/// Unknown sections or keys are errors (Errc::config).
RunConfig parse_config_text(const std::string &text);
RunConfig parse_config_file(const std::string &path);

/// Canonical serialization; parse_config_text(serialize_config(c)) == c for
/// every valid config.
std::string serialize_config(const RunConfig &config);

/// Applies one "section.key" override with the same validation as the
/// parser.
void apply_override(RunConfig &config, const std::string &dotted_key, const std::string &value);

/// Cross-field validation (mode/algorithm requirements, ranges).
void validate_config(const RunConfig &config);

}  // namespace lena

#include "lena/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lena/trace.hpp"

namespace lena {

const char *algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::LenaSpider:
      return "lena-spider";
    case Algorithm::LenaStorm:
      return "lena-storm";
    case Algorithm::Sgd:
      return "sgd";
    case Algorithm::PerturbedSgd:
      return "perturbed-sgd";
    case Algorithm::Spider:
      return "spider";
  }
  return "lena-spider";
}

Algorithm algorithm_from_name(const std::string &name) {
  if (name == "lena-spider") return Algorithm::LenaSpider;
  if (name == "lena-storm") return Algorithm::LenaStorm;
  if (name == "sgd") return Algorithm::Sgd;
  if (name == "perturbed-sgd") return Algorithm::PerturbedSgd;
  if (name == "spider") return Algorithm::Spider;
  fail(Errc::config, "unknown algorithm '" + name + "'");
}

const char *mode_name(ParamMode m) { return m == ParamMode::Theorem ? "theorem" : "manual"; }

ParamMode mode_from_name(const std::string &name) {
  if (name == "theorem") return ParamMode::Theorem;
  if (name == "manual") return ParamMode::Manual;
  fail(Errc::config, "unknown mode '" + name + "' (expected theorem or manual)");
}

namespace {

std::string trim(const std::string &s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string &key, const std::string &value) {
  char *end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  require(end && *end == '\0' && !value.empty(), Errc::config,
          "key '" + key + "': expected a number, got '" + value + "'");
  return v;
}

std::int64_t parse_int(const std::string &key, const std::string &value) {
  char *end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  require(end && *end == '\0' && !value.empty(), Errc::config,
          "key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

std::uint64_t parse_uint(const std::string &key, const std::string &value) {
  char *end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  require(end && *end == '\0' && !value.empty() && value[0] != '-', Errc::config,
          "key '" + key + "': expected a nonnegative integer, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(Errc::config, "key '" + key + "': expected true or false, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string &key, const std::string &value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  require(!out.empty(), Errc::config, "key '" + key + "': empty list");
  return out;
}

std::vector<std::uint64_t> parse_uint_list(const std::string &key, const std::string &value) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_uint(key, trim(item)));
  require(!out.empty(), Errc::config, "key '" + key + "': empty list");
  return out;
}

/// "estimate" (or empty) leaves a theorem constant unset.
void parse_constant(std::optional<double> &slot, const std::string &key,
                    const std::string &value) {
  if (value == "estimate") {
    slot.reset();
    return;
  }
  slot = parse_double(key, value);
}

void apply_key(RunConfig &c, const std::string &section, const std::string &key,
               const std::string &value) {
  const std::string full = section + "." + key;
  if (section == "problem") {
    if (key == "kind") {
      if (value == "matrix-sensing")
        c.problem.kind = ProblemKind::MatrixSensing;
      else if (value == "saddle-quartic")
        c.problem.kind = ProblemKind::SaddleQuartic;
      else
        fail(Errc::config, "unknown problem kind '" + value + "'");
    } else if (key == "d") {
      c.problem.d = static_cast<int>(parse_int(full, value));
    } else if (key == "r") {
      c.problem.r = static_cast<int>(parse_int(full, value));
    } else if (key == "n") {
      c.problem.n = static_cast<int>(parse_int(full, value));
    } else if (key == "seed") {
      c.problem.seed = parse_uint(full, value);
    } else if (key == "alpha") {
      c.problem.alpha = parse_double(full, value);
    } else if (key == "dim") {
      c.problem.dim = static_cast<int>(parse_int(full, value));
    } else if (key == "lambda") {
      c.problem.lambda = parse_double_list(full, value);
    } else if (key == "sigma") {
      c.problem.sigma = parse_double(full, value);
    } else if (key == "noise_pairs") {
      c.problem.noise_pairs = static_cast<int>(parse_int(full, value));
    } else if (key == "noise_freq") {
      c.problem.noise_freq = parse_double(full, value);
    } else if (key == "noise_seed") {
      c.problem.noise_seed = parse_uint(full, value);
    } else if (key == "x0_scale") {
      c.problem.x0_scale = parse_double(full, value);
    } else {
      fail(Errc::config, "unknown key '" + full + "'");
    }
  } else if (section == "targets") {
    if (key == "eps")
      c.eps = parse_double(full, value);
    else if (key == "eps_h")
      c.eps_h = parse_double(full, value);
    else if (key == "delta")
      c.delta = parse_double(full, value);
    else
      fail(Errc::config, "unknown key '" + full + "'");
  } else if (section == "algorithm") {
    if (key == "name")
      c.algo = algorithm_from_name(value);
    else if (key == "mode")
      c.mode = mode_from_name(value);
    else
      fail(Errc::config, "unknown key '" + full + "'");
  } else if (section == "constants") {
    if (key == "sigma")
      parse_constant(c.constants.sigma, full, value);
    else if (key == "L")
      parse_constant(c.constants.smoothness, full, value);
    else if (key == "rho")
      parse_constant(c.constants.hessian_lipschitz, full, value);
    else if (key == "Delta")
      parse_constant(c.constants.value_gap, full, value);
    else
      fail(Errc::config, "unknown key '" + full + "'");
  } else if (section == "manual") {
    if (key == "eta")
      c.manual.eta = parse_double(full, value);
    else if (key == "eta_h")
      c.manual.eta_h = parse_double(full, value);
    else if (key == "r")
      c.manual.radius = parse_double(full, value);
    else if (key == "dbar")
      c.manual.dbar = parse_double(full, value);
    else if (key == "a")
      c.manual.weight = parse_double(full, value);
    else if (key == "t_thres")
      c.manual.t_thres = parse_int(full, value);
    else if (key == "B")
      c.manual.big_batch = parse_int(full, value);
    else if (key == "b")
      c.manual.mini_batch = parse_int(full, value);
    else if (key == "q")
      c.manual.period = parse_int(full, value);
    else if (key == "sgd_step")
      c.manual.sgd_step = parse_double(full, value);
    else if (key == "sgd_batch")
      c.manual.sgd_batch = parse_int(full, value);
    else if (key == "noise_period")
      c.manual.noise_period = parse_int(full, value);
    else
      fail(Errc::config, "unknown key '" + full + "'");
  } else if (section == "run") {
    if (key == "budget")
      c.budget = parse_int(full, value);
    else if (key == "seeds")
      c.seeds = parse_uint_list(full, value);
    else if (key == "log_every")
      c.log_every = static_cast<int>(parse_int(full, value));
    else if (key == "out_dir")
      c.out_dir = value;
    else if (key == "threads")
      c.threads = static_cast<int>(parse_int(full, value));
    else if (key == "trace_estimator_error")
      c.trace_estimator_error = parse_bool(full, value);
    else if (key == "write_points")
      c.write_points = parse_bool(full, value);
    else if (key == "certify")
      c.run_certify = parse_bool(full, value);
    else
      fail(Errc::config, "unknown key '" + full + "'");
  } else {
    fail(Errc::config, "unknown section '[" + section + "]'");
  }
}

std::string fmt_opt(const std::optional<double> &v) {
  return v ? format_double(*v) : std::string("estimate");
}

}  // namespace

RunConfig parse_config_text(const std::string &text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      require(t.back() == ']', Errc::config,
              "line " + std::to_string(line_no) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    require(eq != std::string::npos, Errc::config,
            "line " + std::to_string(line_no) + ": expected key = value");
    require(!section.empty(), Errc::config,
            "line " + std::to_string(line_no) + ": key outside any section");
    apply_key(config, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  validate_config(config);
  return config;
}

RunConfig parse_config_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::config, "cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig &c) {
  std::ostringstream os;
  os << "[problem]\n";
  if (c.problem.kind == ProblemKind::MatrixSensing) {
    os << "kind = matrix-sensing\n"
       << "d = " << c.problem.d << "\n"
       << "r = " << c.problem.r << "\n"
       << "n = " << c.problem.n << "\n"
       << "seed = " << c.problem.seed << "\n"
       << "alpha = " << format_double(c.problem.alpha) << "\n";
  } else {
    os << "kind = saddle-quartic\n"
       << "dim = " << c.problem.dim << "\n";
    if (!c.problem.lambda.empty()) {
      os << "lambda = ";
      for (std::size_t i = 0; i < c.problem.lambda.size(); ++i) {
        if (i) os << ",";
        os << format_double(c.problem.lambda[i]);
      }
      os << "\n";
    }
    os << "sigma = " << format_double(c.problem.sigma) << "\n"
       << "noise_pairs = " << c.problem.noise_pairs << "\n"
       << "noise_freq = " << format_double(c.problem.noise_freq) << "\n"
       << "noise_seed = " << c.problem.noise_seed << "\n"
       << "x0_scale = " << format_double(c.problem.x0_scale) << "\n";
  }
  os << "\n[targets]\n"
     << "eps = " << format_double(c.eps) << "\n"
     << "eps_h = " << format_double(c.eps_h) << "\n"
     << "delta = " << format_double(c.delta) << "\n";
  os << "\n[algorithm]\n"
     << "name = " << algorithm_name(c.algo) << "\n"
     << "mode = " << mode_name(c.mode) << "\n";
  if (c.mode == ParamMode::Theorem) {
    os << "\n[constants]\n"
       << "sigma = " << fmt_opt(c.constants.sigma) << "\n"
       << "L = " << fmt_opt(c.constants.smoothness) << "\n"
       << "rho = " << fmt_opt(c.constants.hessian_lipschitz) << "\n"
       << "Delta = " << fmt_opt(c.constants.value_gap) << "\n";
  }
  const auto &m = c.manual;
  if (m.eta || m.eta_h || m.radius || m.dbar || m.weight || m.t_thres || m.big_batch ||
      m.mini_batch || m.period || m.sgd_step || m.sgd_batch || m.noise_period) {
    os << "\n[manual]\n";
    if (m.eta) os << "eta = " << format_double(*m.eta) << "\n";
    if (m.eta_h) os << "eta_h = " << format_double(*m.eta_h) << "\n";
    if (m.radius) os << "r = " << format_double(*m.radius) << "\n";
    if (m.dbar) os << "dbar = " << format_double(*m.dbar) << "\n";
    if (m.t_thres) os << "t_thres = " << *m.t_thres << "\n";
    if (m.big_batch) os << "B = " << *m.big_batch << "\n";
    if (m.mini_batch) os << "b = " << *m.mini_batch << "\n";
    if (m.period) os << "q = " << *m.period << "\n";
    if (m.weight) os << "a = " << format_double(*m.weight) << "\n";
    if (m.sgd_step) os << "sgd_step = " << format_double(*m.sgd_step) << "\n";
    if (m.sgd_batch) os << "sgd_batch = " << *m.sgd_batch << "\n";
    if (m.noise_period) os << "noise_period = " << *m.noise_period << "\n";
  }
  os << "\n[run]\n"
     << "budget = " << c.budget << "\n"
     << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    if (i) os << ",";
    os << c.seeds[i];
  }
  os << "\n"
     << "log_every = " << c.log_every << "\n"
     << "out_dir = " << c.out_dir << "\n"
     << "threads = " << c.threads << "\n"
     << "trace_estimator_error = " << (c.trace_estimator_error ? "true" : "false") << "\n"
     << "write_points = " << (c.write_points ? "true" : "false") << "\n"
     << "certify = " << (c.run_certify ? "true" : "false") << "\n";
  return os.str();
}

void apply_override(RunConfig &config, const std::string &dotted_key, const std::string &value) {
  const std::size_t dot = dotted_key.find('.');
  require(dot != std::string::npos, Errc::config,
          "override key must be section.key: " + dotted_key);
  apply_key(config, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value);
}

void validate_config(const RunConfig &c) {
  require(c.eps > 0.0, Errc::config, "targets.eps must be positive");
  require(c.eps_h > 0.0, Errc::config, "targets.eps_h must be positive");
  require(c.delta > 0.0 && c.delta < 1.0, Errc::config, "targets.delta must lie in (0,1)");
  require(c.budget >= 0, Errc::config, "run.budget must be nonnegative");
  require(!c.seeds.empty(), Errc::config, "run.seeds must list at least one seed");
  require(c.log_every >= 0, Errc::config, "run.log_every must be nonnegative");
  require(c.threads >= 0, Errc::config, "run.threads must be nonnegative");

  if (c.problem.kind == ProblemKind::MatrixSensing) {
    require(c.problem.d >= 1 && c.problem.r >= 1 && c.problem.d >= c.problem.r, Errc::config,
            "problem: need d >= r >= 1");
    require(c.problem.n >= 1, Errc::config, "problem.n must be >= 1");
  } else {
    require(c.problem.dim >= 1, Errc::config, "problem.dim must be >= 1");
    if (!c.problem.lambda.empty())
      require(static_cast<int>(c.problem.lambda.size()) == c.problem.dim, Errc::config,
              "problem.lambda must list exactly dim values");
    require(c.problem.sigma >= 0.0, Errc::config, "problem.sigma must be nonnegative");
    if (c.problem.sigma > 0.0)
      require(c.problem.noise_pairs >= 1, Errc::config,
              "problem.noise_pairs must be >= 1 when sigma > 0");
  }

  const bool lena_algo = c.algo == Algorithm::LenaSpider || c.algo == Algorithm::LenaStorm;
  if (c.mode == ParamMode::Manual) {
    auto need = [&](bool present, const char *key) {
      require(present, Errc::config,
              std::string("manual mode missing key 'manual.") + key + "'");
    };
    if (lena_algo) {
      need(c.manual.eta.has_value(), "eta");
      need(c.manual.eta_h.has_value(), "eta_h");
      need(c.manual.radius.has_value(), "r");
      need(c.manual.t_thres.has_value(), "t_thres");
      need(c.manual.dbar.has_value(), "dbar");
      need(c.manual.big_batch.has_value(), "B");
      need(c.manual.mini_batch.has_value(), "b");
      if (c.algo == Algorithm::LenaSpider) need(c.manual.period.has_value(), "q");
      if (c.algo == Algorithm::LenaStorm) need(c.manual.weight.has_value(), "a");
    } else if (c.algo == Algorithm::Sgd || c.algo == Algorithm::PerturbedSgd) {
      need(c.manual.sgd_step.has_value(), "sgd_step");
      need(c.manual.sgd_batch.has_value(), "sgd_batch");
      if (c.algo == Algorithm::PerturbedSgd) {
        need(c.manual.radius.has_value(), "r");
        need(c.manual.noise_period.has_value(), "noise_period");
      }
    } else {  // plain SPIDER
      need(c.manual.eta.has_value(), "eta");
      need(c.manual.big_batch.has_value(), "B");
      need(c.manual.mini_batch.has_value(), "b");
      need(c.manual.period.has_value(), "q");
    }
  } else {
    require(lena_algo, Errc::config,
            "theorem mode applies to lena-spider / lena-storm only; baselines need manual "
            "parameters");
  }
}

}  // namespace lena

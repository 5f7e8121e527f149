#include "lena/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lena {

const char *phase_name(Phase p) {
  switch (p) {
    case Phase::GD:
      return "GD";
    case Phase::Perturb:
      return "PERTURB";
    case Phase::Escape:
      return "ESCAPE";
  }
  return "GD";
}

Phase phase_from_name(const std::string &name) {
  if (name == "GD") return Phase::GD;
  if (name == "PERTURB") return Phase::Perturb;
  if (name == "ESCAPE") return Phase::Escape;
  fail(Errc::io, "unknown trace phase: " + name);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_opt(std::string &out, const std::optional<double> &v) {
  if (v) out += format_double(*v);
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::optional<double> parse_opt(const std::string &s) {
  if (s.empty()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string trace_to_csv(const Trace &trace) {
  std::string out;
  out.reserve(trace.rows.size() * 96 + 256);
  if (!trace.meta.empty()) {
    out += "# ";
    out += trace.meta;
    out += '\n';
  }
  out += trace_csv_header;
  out += '\n';
  for (const TraceRecord &r : trace.rows) {
    out += std::to_string(r.step);
    out += ',';
    out += std::to_string(r.epoch);
    out += ',';
    out += phase_name(r.phase);
    out += ',';
    out += std::to_string(r.sgrad_evals_cum);
    out += ',';
    append_opt(out, r.eta_used);
    out += ',';
    out += format_double(r.d_norm);
    out += ',';
    out += format_double(r.movement_sq_cum);
    out += ',';
    out += r.shrink_triggered ? "1" : "0";
    out += ',';
    append_opt(out, r.objective);
    out += ',';
    append_opt(out, r.grad_norm_full);
    out += ',';
    append_opt(out, r.estimator_error);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const Trace &trace, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open trace for writing: " + path);
  const std::string text = trace_to_csv(trace);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  require(out.good(), Errc::io, "trace write failed: " + path);
}

Trace read_trace_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open trace: " + path);
  Trace trace;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (trace.meta.empty()) trace.meta = line.size() > 2 ? line.substr(2) : "";
      continue;
    }
    if (!saw_header) {
      require(line == trace_csv_header, Errc::io, "unexpected trace header in " + path);
      saw_header = true;
      continue;
    }
    const auto f = split_csv_line(line);
    require(f.size() == 11, Errc::io, "malformed trace row in " + path);
    TraceRecord r;
    r.step = std::strtoll(f[0].c_str(), nullptr, 10);
    r.epoch = static_cast<int>(std::strtol(f[1].c_str(), nullptr, 10));
    r.phase = phase_from_name(f[2]);
    r.sgrad_evals_cum = std::strtoll(f[3].c_str(), nullptr, 10);
    r.eta_used = parse_opt(f[4]);
    r.d_norm = std::strtod(f[5].c_str(), nullptr);
    r.movement_sq_cum = std::strtod(f[6].c_str(), nullptr);
    r.shrink_triggered = f[7] == "1";
    r.objective = parse_opt(f[8]);
    r.grad_norm_full = parse_opt(f[9]);
    r.estimator_error = parse_opt(f[10]);
    trace.rows.push_back(r);
  }
  require(saw_header, Errc::io, "trace has no header: " + path);
  return trace;
}

}  // namespace lena

#include "lena/matrix_sensing.hpp"

#include <cmath>
#include <cstring>

#include <Eigen/Dense>

#include "lena/saddle_quartic.hpp"
#include "lena/snapshot.hpp"

namespace lena {

MatrixSensing::MatrixSensing(int d, int r, int n, std::uint64_t seed)
    : Problem(d * r, 0.0, 0.0, 0.0, 0.0), d_(d), r_(r), n_(n), seed_(seed) {
  require(d >= 1 && r >= 1 && d >= r, Errc::invalid_argument,
          "matrix sensing requires d >= r >= 1");
  require(n >= 1, Errc::invalid_argument, "matrix sensing requires n >= 1");

  Rng rng(mix64(seed ^ 0x6d617473656e7365ULL));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  u_star_.resize(d_, r_);
  for (int j = 0; j < r_; ++j)
    for (int i = 0; i < d_; ++i) u_star_(i, j) = scale * rng.normal();
  m_star_.noalias() = u_star_ * u_star_.transpose();

  a_.resize(n_, d_ * d_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < d_ * d_; ++k) a_(i, k) = rng.normal();

  const Eigen::Map<const Eigen::VectorXd> m_vec(m_star_.data(), d_ * d_);
  b_.noalias() = a_ * m_vec;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_star_);
  m_eigs_ = es.eigenvalues();

  derive_constants();
}

void MatrixSensing::derive_constants() {
  const double radius = 2.0 * u_star_.norm();
  const double m_norm = m_star_.norm();
  const double rr = radius * radius;
  double smooth = 0.0, rho = 0.0, as_max = 0.0;
  Eigen::MatrixXd ai(d_, d_);
  for (int i = 0; i < n_; ++i) {
    const Eigen::Map<const Eigen::MatrixXd> view(a_.row(i).data(), d_, d_);
    ai = view + view.transpose();
    const double s = ai.norm();
    const double na = view.norm();
    const double resid_bound = na * (rr + m_norm);
    smooth = std::max(smooth, s * s * rr + resid_bound * s);
    rho = std::max(rho, 2.0 * radius * s * (s + na));
    as_max = std::max(as_max, na * s);
  }
  const double sigma = 2.0 * radius * (rr + m_norm) * as_max;
  set_constants(smooth, rho, sigma, radius);
}

Eigen::VectorXd MatrixSensing::gram_vec(VecRef x) const {
  const auto u = factor_view(x);
  Eigen::MatrixXd p(d_, d_);
  p.noalias() = u * u.transpose();
  return Eigen::Map<const Eigen::VectorXd>(p.data(), d_ * d_);
}

double MatrixSensing::relative_error(VecRef x) const {
  check_dim(x);
  const auto u = factor_view(x);
  Eigen::MatrixXd diff = u * u.transpose() - m_star_;
  return diff.squaredNorm() / m_star_.squaredNorm();
}

Vector MatrixSensing::saddle_init(double alpha, std::uint64_t seed) const {
  Rng rng(mix64(seed ^ 0x73616464fe0135a7ULL));
  Eigen::VectorXd g = rng.gaussian(d_);
  double gn = g.norm();
  while (gn == 0.0) {
    g = rng.gaussian(d_);
    gn = g.norm();
  }
  const double lmax = lambda_max();
  if (alpha < 0.0) alpha = 0.1 * std::sqrt(lmax) / gn;
  const double u0_norm = alpha * gn;
  require(u0_norm < lmax, Errc::invalid_argument,
          "saddle_init: ||u0|| must stay below lambda_max(M*)");
  Vector x = Vector::Zero(dim());
  x.head(d_) = alpha * g;
  return x;
}

void MatrixSensing::do_stoch_grad_pair(VecRef x_new, VecRef x_old, Sample s, Vector &g_new,
                                       Vector &g_old) const {
  const Sample batch[1] = {s};
  do_accumulate_grad_pair(x_new, x_old, batch, g_new, g_old);
}

void MatrixSensing::do_accumulate_grad_pair(VecRef x_new, VecRef x_old,
                                            std::span<const Sample> batch, Vector &sum_new,
                                            Vector &sum_old) const {
  const Eigen::VectorXd p_new = gram_vec(x_new);
  const Eigen::VectorXd p_old = gram_vec(x_old);
  Eigen::VectorXd w_new = Eigen::VectorXd::Zero(d_ * d_);
  Eigen::VectorXd w_old = Eigen::VectorXd::Zero(d_ * d_);
  for (const Sample &s : batch) {
    require(s.token < static_cast<std::uint64_t>(n_), Errc::invalid_argument,
            "sample token out of range");
    const auto row = a_.row(static_cast<Eigen::Index>(s.token));
    w_new += (row.dot(p_new) - b_[static_cast<Eigen::Index>(s.token)]) * row.transpose();
    w_old += (row.dot(p_old) - b_[static_cast<Eigen::Index>(s.token)]) * row.transpose();
  }
  const Eigen::Map<const Eigen::MatrixXd> wm_new(w_new.data(), d_, d_);
  const Eigen::Map<const Eigen::MatrixXd> wm_old(w_old.data(), d_, d_);
  sum_new.resize(dim());
  sum_old.resize(dim());
  Eigen::Map<Eigen::MatrixXd> gm_new(sum_new.data(), d_, r_);
  Eigen::Map<Eigen::MatrixXd> gm_old(sum_old.data(), d_, r_);
  gm_new.noalias() = (wm_new + wm_new.transpose()) * factor_view(x_new);
  gm_old.noalias() = (wm_old + wm_old.transpose()) * factor_view(x_old);
}

void MatrixSensing::do_accumulate_grad(VecRef x, std::span<const Sample> batch,
                                       Vector &sum) const {
  const Eigen::VectorXd p = gram_vec(x);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d_ * d_);
  for (const Sample &s : batch) {
    require(s.token < static_cast<std::uint64_t>(n_), Errc::invalid_argument,
            "sample token out of range");
    const auto row = a_.row(static_cast<Eigen::Index>(s.token));
    w += (row.dot(p) - b_[static_cast<Eigen::Index>(s.token)]) * row.transpose();
  }
  const Eigen::Map<const Eigen::MatrixXd> wm(w.data(), d_, d_);
  sum.resize(dim());
  Eigen::Map<Eigen::MatrixXd> gm(sum.data(), d_, r_);
  gm.noalias() = (wm + wm.transpose()) * factor_view(x);
}

void MatrixSensing::do_full_gradient(VecRef x, Vector &g) const {
  const Eigen::VectorXd p = gram_vec(x);
  Eigen::VectorXd resid = a_ * p - b_;
  Eigen::VectorXd w = a_.transpose() * resid;
  const Eigen::Map<const Eigen::MatrixXd> wm(w.data(), d_, d_);
  g.resize(dim());
  Eigen::Map<Eigen::MatrixXd> gm(g.data(), d_, r_);
  gm.noalias() = (wm + wm.transpose()) * factor_view(x);
  g /= static_cast<double>(n_);
}

double MatrixSensing::do_full_value(VecRef x) const {
  const Eigen::VectorXd p = gram_vec(x);
  return (a_ * p - b_).squaredNorm() / (2.0 * n_);
}

double MatrixSensing::hessian_fd_step(VecRef x) const {
  return 1e-5 * std::max(1.0, x.norm());
}

void MatrixSensing::do_hessian_apply(VecRef x, VecRef v, Vector &out) const {
  const double vn = v.norm();
  if (vn == 0.0) {
    out.setZero(dim());
    return;
  }
  const double h = hessian_fd_step(x);
  const Vector dir = v / vn;
  const Vector gp = full_gradient(x + h * dir);
  const Vector gm = full_gradient(x - h * dir);
  out = (gp - gm) * (vn / (2.0 * h));
}

void MatrixSensing::save(const std::string &path) const {
  SnapshotWriter w(path, snapshot_kind_matrix_sensing);
  w.write_i32(d_);
  w.write_i32(r_);
  w.write_i32(n_);
  w.write_u64(seed_);
  // Instances regenerate from the key; checksums guard against a drifting
  // generator.
  std::uint64_t mh = 0xcbf29ce484222325ULL;
  auto mix_doubles = [](std::uint64_t &h, const double *p, std::size_t cnt) {
    for (std::size_t i = 0; i < cnt; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &p[i], 8);
      h ^= bits;
      h *= 0x100000001b3ULL;
    }
  };
  mix_doubles(mh, m_star_.data(), static_cast<std::size_t>(d_) * d_);
  mix_doubles(mh, b_.data(), static_cast<std::size_t>(n_));
  w.write_u64(mh);
  w.finish();
}

std::unique_ptr<MatrixSensing> MatrixSensing::load_file(const std::string &path) {
  SnapshotReader r(path, snapshot_kind_matrix_sensing);
  const int d = r.read_i32();
  const int rk = r.read_i32();
  const int n = r.read_i32();
  const std::uint64_t seed = r.read_u64();
  const std::uint64_t stored = r.read_u64();
  r.finish();
  auto problem = std::make_unique<MatrixSensing>(d, rk, n, seed);
  std::uint64_t mh = 0xcbf29ce484222325ULL;
  auto mix_doubles = [](std::uint64_t &h, const double *p, std::size_t cnt) {
    for (std::size_t i = 0; i < cnt; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &p[i], 8);
      h ^= bits;
      h *= 0x100000001b3ULL;
    }
  };
  mix_doubles(mh, problem->m_star_.data(), static_cast<std::size_t>(d) * d);
  mix_doubles(mh, problem->b_.data(), static_cast<std::size_t>(n));
  require(mh == stored, Errc::io,
          "snapshot checksum mismatch: instance cannot be regenerated identically");
  return problem;
}

std::unique_ptr<Problem> load_problem(const std::string &path) {
  SnapshotReader probe(path);
  const std::uint32_t kind = probe.kind();
  if (kind == snapshot_kind_matrix_sensing) return MatrixSensing::load_file(path);
  if (kind == snapshot_kind_quartic) return SaddleQuartic::load_file(path);
  fail(Errc::io, "unknown snapshot kind");
}

}  // namespace lena

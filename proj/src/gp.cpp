#include "mpbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mpbo/errors.hpp"

namespace mpbo {

namespace {

constexpr double kLogWMin = -40.0;
constexpr double kLogWMax = 10.0;
constexpr double kMaxJitter = 1e-2;

double displacement_sum(const Permutation& a, const Permutation& b,
                        const Eigen::VectorXd& w) {
  const std::vector<int>& ia = a.inverse();
  const std::vector<int>& ib = b.inverse();
  double s = 0;
  for (int n = 0; n < a.size(); ++n) s += w[n] * std::abs(ia[n] - ib[n]);
  return s;
}

// Cholesky of K + (noise + jitter) I, escalating jitter until it succeeds.
struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0;
};

Factorization factorize(Eigen::MatrixXd k_noise_free, double noise_var) {
  const auto n = k_noise_free.rows();
  k_noise_free.diagonal().array() += noise_var;
  Factorization f;
  double jitter = 0;
  for (;;) {
    Eigen::MatrixXd k_y = k_noise_free;
    if (jitter > 0) k_y.diagonal().array() += jitter;
    f.llt.compute(k_y);
    if (f.llt.info() == Eigen::Success) {
      f.jitter = jitter;
      return f;
    }
    jitter = jitter == 0 ? 1e-8 : jitter * 10;
    if (jitter > kMaxJitter)
      throw NumericalFailure(
          "gram factorization failed at maximum jitter (" +
          std::to_string(n) + " points)");
  }
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

void Dataset::add(SequencePair sp, double y) {
  if (!x_.empty() && sp.size() != seq_len())
    throw std::invalid_argument("sequence pair length mismatch in dataset");
  std::string key = canonical_key(sp);
  if (!keys_.insert(std::move(key)).second)
    throw std::invalid_argument("duplicate sequence pair in dataset");
  x_.push_back(std::move(sp));
  y_.push_back(y);
}

double k_perm(const Permutation& p1, const Permutation& p2,
              const Eigen::VectorXd& w) {
  if (p1.size() != p2.size() || w.size() != p1.size())
    throw std::invalid_argument("permutation/weight length mismatch");
  return std::exp(-displacement_sum(p1, p2, w));
}

double k_sp(const SequencePair& a, const SequencePair& b,
            const KernelParams& params) {
  if (a.size() != b.size() || params.log_w.size() != a.size() ||
      params.log_w_prime.size() != a.size())
    throw std::invalid_argument("sequence pair/weight length mismatch");
  const double s = displacement_sum(a.pi, b.pi, params.log_w.array().exp()) +
                   displacement_sum(a.pi_prime, b.pi_prime,
                                    params.log_w_prime.array().exp());
  return std::exp(-s);
}

Eigen::MatrixXd gram(std::span<const SequencePair> xs,
                     const KernelParams& params) {
  const int t = static_cast<int>(xs.size());
  const Eigen::VectorXd w = params.log_w.array().exp();
  const Eigen::VectorXd wp = params.log_w_prime.array().exp();
  Eigen::MatrixXd k(t, t);
  for (int i = 0; i < t; ++i) {
    k(i, i) = 1.0;
    for (int j = i + 1; j < t; ++j) {
      const double s = displacement_sum(xs[i].pi, xs[j].pi, w) +
                       displacement_sum(xs[i].pi_prime, xs[j].pi_prime, wp);
      k(i, j) = k(j, i) = std::exp(-s);
    }
  }
  return k;
}

Eigen::VectorXd kernel_vector(const SequencePair& x,
                              std::span<const SequencePair> xs,
                              const KernelParams& params) {
  const int t = static_cast<int>(xs.size());
  const Eigen::VectorXd w = params.log_w.array().exp();
  const Eigen::VectorXd wp = params.log_w_prime.array().exp();
  Eigen::VectorXd k(t);
  for (int i = 0; i < t; ++i) {
    const double s = displacement_sum(x.pi, xs[i].pi, w) +
                     displacement_sum(x.pi_prime, xs[i].pi_prime, wp);
    k[i] = std::exp(-s);
  }
  return k;
}

double mll(const GpHyper& hyper, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const int t = data.size();
  const Eigen::MatrixXd k = gram(data.points(), hyper.kernel);
  const Factorization f = factorize(k, hyper.noise_var);
  const Eigen::VectorXd y_c =
      Eigen::Map<const Eigen::VectorXd>(data.targets().data(), t).array() -
      hyper.mean_const;
  const Eigen::VectorXd alpha = f.llt.solve(y_c);
  return -0.5 * y_c.dot(alpha) - 0.5 * log_det_from_llt(f.llt) -
         0.5 * t * std::log(2.0 * std::numbers::pi);
}

MllGradient mll_with_grad(const GpHyper& hyper, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const int t = data.size();
  const int n = data.seq_len();
  const Eigen::VectorXd w = hyper.kernel.log_w.array().exp();
  const Eigen::VectorXd wp = hyper.kernel.log_w_prime.array().exp();

  const Eigen::MatrixXd k = gram(data.points(), hyper.kernel);
  const Factorization f = factorize(k, hyper.noise_var);
  const Eigen::VectorXd y_c =
      Eigen::Map<const Eigen::VectorXd>(data.targets().data(), t).array() -
      hyper.mean_const;
  const Eigen::VectorXd alpha = f.llt.solve(y_c);

  MllGradient g;
  g.value = -0.5 * y_c.dot(alpha) - 0.5 * log_det_from_llt(f.llt) -
            0.5 * t * std::log(2.0 * std::numbers::pi);

  // M = alpha alpha^T - K_y^-1; d mll / d theta = 0.5 tr(M dK/d theta).
  Eigen::MatrixXd m = -f.llt.solve(Eigen::MatrixXd::Identity(t, t));
  m.noalias() += alpha * alpha.transpose();

  g.d_mean = alpha.sum();
  g.d_log_noise = 0.5 * hyper.noise_var * m.trace();

  // dK_ij / d log w_n = -w_n * |pos_i(n) - pos_j(n)| * K_ij, accumulated over
  // the upper triangle (diagonal displacements are zero).
  Eigen::VectorXd acc_w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd acc_wp = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < t; ++i) {
    const std::vector<int>& pi_i = data.x(i).pi.inverse();
    const std::vector<int>& pp_i = data.x(i).pi_prime.inverse();
    for (int j = i + 1; j < t; ++j) {
      const double c = 2.0 * m(i, j) * k(i, j);
      if (c == 0.0) continue;
      const std::vector<int>& pi_j = data.x(j).pi.inverse();
      const std::vector<int>& pp_j = data.x(j).pi_prime.inverse();
      for (int q = 0; q < n; ++q) {
        acc_w[q] += c * std::abs(pi_i[q] - pi_j[q]);
        acc_wp[q] += c * std::abs(pp_i[q] - pp_j[q]);
      }
    }
  }
  g.d_log_w = -0.5 * w.array() * acc_w.array();
  g.d_log_w_prime = -0.5 * wp.array() * acc_wp.array();
  return g;
}

GpHyper default_init(const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const int n = data.seq_len();
  GpHyper h;
  h.kernel.log_w = Eigen::VectorXd::Constant(n, -std::log(double(n)));
  h.kernel.log_w_prime = h.kernel.log_w;
  const auto& y = data.targets();
  double mean = 0;
  for (double v : y) mean += v;
  mean /= y.size();
  double var = 0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= y.size();
  h.mean_const = mean;
  h.noise_var = std::max(kNoiseFloor, 0.01 * var);
  return h;
}

std::pair<Dataset, YTransform> standardized(const Dataset& data) {
  YTransform t;
  const auto& y = data.targets();
  if (!y.empty()) {
    double mean = 0;
    for (double v : y) mean += v;
    mean /= y.size();
    double var = 0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= y.size();
    t.mean = mean;
    t.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  Dataset out;
  for (int i = 0; i < data.size(); ++i)
    out.add(data.x(i), (data.y(i) - t.mean) / t.scale);
  return {std::move(out), t};
}

namespace {

struct PackedTheta {
  Eigen::VectorXd v;  // [log_w, log_w', log noise, mean]

  static PackedTheta from(const GpHyper& h) {
    const int n = static_cast<int>(h.kernel.log_w.size());
    PackedTheta t;
    t.v.resize(2 * n + 2);
    t.v.head(n) = h.kernel.log_w;
    t.v.segment(n, n) = h.kernel.log_w_prime;
    t.v[2 * n] = std::log(h.noise_var);
    t.v[2 * n + 1] = h.mean_const;
    return t;
  }

  GpHyper to(int n) const {
    GpHyper h;
    h.kernel.log_w = v.head(n);
    h.kernel.log_w_prime = v.segment(n, n);
    h.noise_var = std::exp(v[2 * n]);
    h.mean_const = v[2 * n + 1];
    return h;
  }

  void clamp(int n) {
    for (int i = 0; i < 2 * n; ++i) v[i] = std::clamp(v[i], kLogWMin, kLogWMax);
    v[2 * n] = std::max(v[2 * n], std::log(kNoiseFloor));
  }
};

Eigen::VectorXd pack_grad(const MllGradient& g) {
  const int n = static_cast<int>(g.d_log_w.size());
  Eigen::VectorXd v(2 * n + 2);
  v.head(n) = g.d_log_w;
  v.segment(n, n) = g.d_log_w_prime;
  v[2 * n] = g.d_log_noise;
  v[2 * n + 1] = g.d_mean;
  return v;
}

}  // namespace

GpHyper fit(const Dataset& data, const GpHyper& init, const FitOptions& opts) {
  const int n = data.seq_len();
  const MllGradient g0 = mll_with_grad(init, data);
  GpHyper best = init;
  double best_value = g0.value;
  if (pack_grad(g0).cwiseAbs().maxCoeff() < 1e-10) return init;

  PackedTheta theta = PackedTheta::from(init);
  const int dim = static_cast<int>(theta.v.size());
  Eigen::VectorXd step = Eigen::VectorXd::Constant(dim, opts.initial_step);
  Eigen::VectorXd prev_grad = pack_grad(g0);

  // First move from the initial gradient, then iRprop- style adaptation.
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    for (int i = 0; i < dim; ++i) {
      const double s = prev_grad[i] > 0 ? 1.0 : (prev_grad[i] < 0 ? -1.0 : 0.0);
      theta.v[i] += step[i] * s;
    }
    theta.clamp(n);

    const MllGradient g = mll_with_grad(theta.to(n), data);
    if (g.value > best_value) {
      best_value = g.value;
      best = theta.to(n);
    }
    Eigen::VectorXd grad = pack_grad(g);
    for (int i = 0; i < dim; ++i) {
      const double prod = grad[i] * prev_grad[i];
      if (prod > 0) {
        step[i] = std::min(step[i] * opts.step_grow, opts.step_max);
      } else if (prod < 0) {
        step[i] = std::max(step[i] * opts.step_shrink, opts.step_min);
        grad[i] = 0;  // iRprop-: skip the next move on sign flips
      }
    }
    prev_grad = std::move(grad);
  }
  return best;
}

GpPosterior::GpPosterior(GpHyper hyper, Dataset data, YTransform transform)
    : hyper_(std::move(hyper)),
      data_(std::move(data)),
      transform_(transform) {
  if (data_.size() == 0) throw std::invalid_argument("empty dataset");
  Factorization f =
      factorize(gram(data_.points(), hyper_.kernel), hyper_.noise_var);
  llt_ = std::move(f.llt);
  jitter_ = f.jitter;
  const Eigen::VectorXd y_c =
      Eigen::Map<const Eigen::VectorXd>(data_.targets().data(), data_.size())
          .array() -
      hyper_.mean_const;
  alpha_ = llt_.solve(y_c);
}

std::pair<double, double> GpPosterior::predict(const SequencePair& x) const {
  const Eigen::VectorXd k = kernel_vector(x, data_.points(), hyper_.kernel);
  const double mu = hyper_.mean_const + k.dot(alpha_);
  // var = 1 - k^T K_y^-1 k = 1 - ||L^-1 k||^2
  const double var =
      std::max(0.0, 1.0 - llt_.matrixL().solve(k).squaredNorm());
  return {mu, var};
}

std::pair<double, double> GpPosterior::predict_raw(const SequencePair& x) const {
  const auto [mu, var] = predict(x);
  return {transform_.mean + transform_.scale * mu,
          transform_.scale * transform_.scale * var};
}

void GpPosterior::predict_many(std::span<const SequencePair> xs,
                               Eigen::VectorXd& mu,
                               Eigen::VectorXd& var) const {
  const int f = static_cast<int>(xs.size());
  const int t = data_.size();
  mu.resize(f);
  var.resize(f);
  constexpr int kChunk = 2048;
  Eigen::MatrixXd block(t, std::min(f, kChunk));
  for (int start = 0; start < f; start += kChunk) {
    const int width = std::min(kChunk, f - start);
    for (int c = 0; c < width; ++c)
      block.col(c) = kernel_vector(xs[start + c], data_.points(), hyper_.kernel);
    auto cols = block.leftCols(width);
    for (int c = 0; c < width; ++c)
      mu[start + c] = hyper_.mean_const + cols.col(c).dot(alpha_);
    llt_.matrixL().solveInPlace(cols);  // cols := L^-1 K
    for (int c = 0; c < width; ++c)
      var[start + c] = std::max(0.0, 1.0 - cols.col(c).squaredNorm());
  }
}

double GpPosterior::cross_cov(const SequencePair& a,
                              const SequencePair& b) const {
  const Eigen::VectorXd ka = kernel_vector(a, data_.points(), hyper_.kernel);
  const Eigen::VectorXd kb = kernel_vector(b, data_.points(), hyper_.kernel);
  return k_sp(a, b, hyper_.kernel) - ka.dot(llt_.solve(kb));
}

GpPosterior::PointCache GpPosterior::cache_point(const SequencePair& x) const {
  PointCache c;
  c.k = kernel_vector(x, data_.points(), hyper_.kernel);
  c.solved = llt_.solve(c.k);
  c.mu = hyper_.mean_const + c.k.dot(alpha_);
  c.var = std::max(0.0, 1.0 - c.k.dot(c.solved));
  return c;
}

double GpPosterior::cross_cov_cached(const PointCache& a, const PointCache& b,
                                     double k_ab) const {
  return k_ab - a.k.dot(b.solved);
}

}  // namespace mpbo

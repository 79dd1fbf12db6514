#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mpbo/seq_pair.hpp"

namespace mpbo {

// Per-macro positive weights for both permutation factors, kept in log space
// so gradient steps preserve positivity.
struct KernelParams {
  Eigen::VectorXd log_w;
  Eigen::VectorXd log_w_prime;
};

struct GpHyper {
  KernelParams kernel;
  double noise_var = 1e-2;  // floored at kNoiseFloor
  double mean_const = 0;
};

inline constexpr double kNoiseFloor = 1e-6;

// Evaluated sequence pairs with internal objective values (the engines store
// negated HPWL so that larger is better). Duplicate keys are rejected.
class Dataset {
 public:
  void add(SequencePair sp, double y);
  bool contains(const std::string& key) const { return keys_.count(key) > 0; }
  int size() const { return static_cast<int>(x_.size()); }
  int seq_len() const { return x_.empty() ? 0 : x_.front().size(); }
  const SequencePair& x(int i) const { return x_[i]; }
  double y(int i) const { return y_[i]; }
  const std::vector<SequencePair>& points() const { return x_; }
  const std::vector<double>& targets() const { return y_; }

 private:
  std::vector<SequencePair> x_;
  std::vector<double> y_;
  std::unordered_set<std::string> keys_;
};

// exp(-sum_n w_n |pos1(n) - pos2(n)|); w strictly positive, value in (0, 1].
double k_perm(const Permutation& p1, const Permutation& p2,
              const Eigen::VectorXd& w);

// Product of the two permutation factors under (W, W').
double k_sp(const SequencePair& a, const SequencePair& b,
            const KernelParams& params);

Eigen::MatrixXd gram(std::span<const SequencePair> xs,
                     const KernelParams& params);

Eigen::VectorXd kernel_vector(const SequencePair& x,
                              std::span<const SequencePair> xs,
                              const KernelParams& params);

// Log marginal likelihood of the targets under mean m and covariance
// K + noise_var * I.
double mll(const GpHyper& hyper, const Dataset& data);

struct MllGradient {
  double value = 0;
  Eigen::VectorXd d_log_w;
  Eigen::VectorXd d_log_w_prime;
  double d_log_noise = 0;
  double d_mean = 0;
};

MllGradient mll_with_grad(const GpHyper& hyper, const Dataset& data);

struct FitOptions {
  int max_iters = 100;
  double initial_step = 0.1;
  double step_grow = 1.2;
  double step_shrink = 0.5;
  double step_min = 1e-6;
  double step_max = 1.0;
};

// Sign-based gradient ascent with per-coordinate step adaptation over
// (log_w, log_w', log noise, mean). Returns the iterate with the highest
// marginal likelihood seen; never worse than the initial point.
GpHyper fit(const Dataset& data, const GpHyper& init,
            const FitOptions& opts = {});

// Uniform weights 1/N, mean(y) prior mean, noise 0.01 * var(y) (floored).
GpHyper default_init(const Dataset& data);

// Affine map between raw targets and the values the model is trained on:
// raw = mean + scale * model.
struct YTransform {
  double mean = 0;
  double scale = 1;
};

std::pair<Dataset, YTransform> standardized(const Dataset& data);

// Exact posterior with a cached Cholesky factorization. Jitter escalates by
// x10 from 1e-8 up to 1e-2 on factorization failure, then the build throws.
class GpPosterior {
 public:
  GpPosterior(GpHyper hyper, Dataset data, YTransform transform = {});

  // Predictive mean and variance in model space; variance clamped at 0.
  std::pair<double, double> predict(const SequencePair& x) const;
  // Same, mapped back to raw target units through the stored transform.
  std::pair<double, double> predict_raw(const SequencePair& x) const;
  void predict_many(std::span<const SequencePair> xs, Eigen::VectorXd& mu,
                    Eigen::VectorXd& var) const;

  // Posterior covariance K^(t)(a, b).
  double cross_cov(const SequencePair& a, const SequencePair& b) const;

  struct PointCache {
    Eigen::VectorXd k;
    Eigen::VectorXd solved;  // (K + sigma^2 I)^-1 k
    double mu = 0;
    double var = 0;
  };
  PointCache cache_point(const SequencePair& x) const;
  double cross_cov_cached(const PointCache& a, const PointCache& b,
                          double k_ab) const;

  const GpHyper& hyper() const { return hyper_; }
  const Dataset& data() const { return data_; }
  const YTransform& y_transform() const { return transform_; }
  double jitter() const { return jitter_; }

 private:
  GpHyper hyper_;
  Dataset data_;
  YTransform transform_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0;
};

}  // namespace mpbo

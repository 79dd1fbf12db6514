#include "mpbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mpbo {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

AcqKind parse_acq_kind(const std::string& name) {
  if (name == "ei") return AcqKind::kEi;
  if (name == "ucb") return AcqKind::kUcb;
  throw std::invalid_argument("unknown acquisition '" + name + "'");
}

const char* to_string(AcqKind kind) {
  return kind == AcqKind::kEi ? "ei" : "ucb";
}

double expected_improvement(double mu, double var, double incumbent) {
  const double sigma = std::sqrt(std::max(0.0, var));
  if (sigma < 1e-12) return std::max(0.0, mu - incumbent);
  const double z = (mu - incumbent) / sigma;
  return std::max(0.0, sigma * (z * normal_cdf(z) + normal_pdf(z)));
}

double upper_confidence_bound(double mu, double var, double beta) {
  return mu + std::sqrt(beta) * std::sqrt(std::max(0.0, var));
}

double acq_value(double mu, double var, const AcqConfig& cfg) {
  switch (cfg.kind) {
    case AcqKind::kEi: return expected_improvement(mu, var, cfg.incumbent);
    case AcqKind::kUcb: return upper_confidence_bound(mu, var, cfg.ucb_beta);
  }
  throw std::logic_error("bad acquisition kind");
}

double acq_single(const GpPosterior& post, const SequencePair& x,
                  const AcqConfig& cfg) {
  const auto [mu, var] = post.predict(x);
  return acq_value(mu, var, cfg);
}

RhoContext make_rho_context(std::span<const double> pool_values,
                            double rho_scale) {
  if (rho_scale <= 0) throw std::invalid_argument("rho_scale must be positive");
  RhoContext ctx;
  if (pool_values.empty()) return ctx;
  double mean = 0, max = pool_values[0];
  for (double v : pool_values) {
    mean += v;
    max = std::max(max, v);
  }
  mean /= static_cast<double>(pool_values.size());
  double var = 0;
  for (double v : pool_values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(pool_values.size());
  ctx.shift = max;
  ctx.scale = var > 1e-24 ? rho_scale * std::sqrt(var) : rho_scale;
  return ctx;
}

double rho_weight(double value, const RhoContext& ctx) {
  return std::exp((value - ctx.shift) / ctx.scale);
}

double acq_batch_from_parts(std::span<const double> acq_values,
                            const Eigen::MatrixXd& posterior_cov,
                            const RhoContext& rho) {
  const int b = static_cast<int>(acq_values.size());
  Eigen::MatrixXd m(b, b);
  for (int i = 0; i < b; ++i) {
    const double ri = rho_weight(acq_values[i], rho);
    for (int j = i; j < b; ++j) {
      const double rj = rho_weight(acq_values[j], rho);
      m(i, j) = m(j, i) = ri * posterior_cov(i, j) * rj;
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return 0.0;
  double det = 1.0;
  for (int i = 0; i < b; ++i) det *= ldlt.vectorD()[i];
  return std::max(0.0, det);
}

double acq_batch(const GpPosterior& post, std::span<const SequencePair> xs,
                 const AcqConfig& cfg, const RhoContext& rho) {
  const int b = static_cast<int>(xs.size());
  if (b < 1) throw std::invalid_argument("batch must hold at least one point");
  std::vector<GpPosterior::PointCache> cache;
  cache.reserve(b);
  for (const SequencePair& x : xs) cache.push_back(post.cache_point(x));

  std::vector<double> values(b);
  for (int i = 0; i < b; ++i)
    values[i] = acq_value(cache[i].mu, cache[i].var, cfg);

  Eigen::MatrixXd cov(b, b);
  for (int i = 0; i < b; ++i) {
    cov(i, i) = cache[i].var;
    for (int j = i + 1; j < b; ++j) {
      const double k_ij = k_sp(xs[i], xs[j], post.hyper().kernel);
      cov(i, j) = cov(j, i) = post.cross_cov_cached(cache[i], cache[j], k_ij);
    }
  }
  return acq_batch_from_parts(values, cov, rho);
}

}  // namespace mpbo

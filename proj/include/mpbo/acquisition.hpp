#pragma once

#include <span>

#include "mpbo/gp.hpp"

namespace mpbo {

enum class AcqKind { kEi, kUcb };

AcqKind parse_acq_kind(const std::string& name);
const char* to_string(AcqKind kind);

struct AcqConfig {
  AcqKind kind = AcqKind::kEi;
  double ucb_beta = 4.0;
  // Best internal objective value seen so far (maximization convention).
  double incumbent = 0;
};

// Closed-form E[max(g - incumbent, 0)] for g ~ Normal(mu, var); collapses to
// max(mu - incumbent, 0) as var -> 0.
double expected_improvement(double mu, double var, double incumbent);

double upper_confidence_bound(double mu, double var, double beta);

double acq_value(double mu, double var, const AcqConfig& cfg);

double acq_single(const GpPosterior& post, const SequencePair& x,
                  const AcqConfig& cfg);

// Quality weight rho(z) = exp((z - shift) / scale). The shift is the maximum
// acquisition value over the candidate pool, so weights stay in (0, 1] there;
// shifting multiplies every weight by one common factor and leaves all batch
// argmax decisions unchanged. The scale is the pool's acquisition standard
// deviation times the configured rho_scale.
struct RhoContext {
  double shift = 0;
  double scale = 1;
};

RhoContext make_rho_context(std::span<const double> pool_values,
                            double rho_scale);

double rho_weight(double value, const RhoContext& ctx);

struct BatchAcqConfig {
  int batch_size = 10;
  double rho_scale = 1.0;
};

// Determinant of [rho(a(x_b)) K^(t)(x_b, x_c) rho(a(x_c))], computed through
// a symmetric factorization; round-off negatives clamp to 0.
double acq_batch(const GpPosterior& post, std::span<const SequencePair> xs,
                 const AcqConfig& cfg, const RhoContext& rho);

// Same determinant from precomputed parts: per-point acquisition values and
// the full B x B posterior covariance (variances on the diagonal).
double acq_batch_from_parts(std::span<const double> acq_values,
                            const Eigen::MatrixXd& posterior_cov,
                            const RhoContext& rho);

}  // namespace mpbo

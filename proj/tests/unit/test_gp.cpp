#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mpbo/errors.hpp"
#include "mpbo/gp.hpp"
#include "support/oracles.hpp"

using namespace mpbo;

namespace {

SequencePair sp_of(std::vector<int> pi, std::vector<int> pp) {
  return {Permutation(std::move(pi)), Permutation(std::move(pp))};
}

KernelParams uniform_params(int n, double w) {
  KernelParams p;
  p.log_w = Eigen::VectorXd::Constant(n, std::log(w));
  p.log_w_prime = p.log_w;
  return p;
}

Dataset random_dataset(int n, int count, RngStream& rng, double spread = 1.0) {
  Dataset data;
  while (data.size() < count) {
    SequencePair sp = random_sequence_pair(n, rng);
    if (data.contains(canonical_key(sp))) continue;
    data.add(std::move(sp), spread * (2.0 * rng.uniform() - 1.0));
  }
  return data;
}

GpHyper random_hyper(int n, RngStream& rng) {
  GpHyper h;
  h.kernel.log_w = Eigen::VectorXd::NullaryExpr(
      n, [&](Eigen::Index) { return -3.0 + 3.0 * rng.uniform(); });
  h.kernel.log_w_prime = Eigen::VectorXd::NullaryExpr(
      n, [&](Eigen::Index) { return -3.0 + 3.0 * rng.uniform(); });
  h.noise_var = 0.05 + 0.5 * rng.uniform();
  h.mean_const = 2.0 * rng.uniform() - 1.0;
  return h;
}

}  // namespace

TEST_CASE("permutation kernel basics") {
  const Permutation a({0, 1, 2}), b({1, 0, 2});
  CHECK(k_perm(a, a, Eigen::VectorXd::Constant(3, 0.7)) == doctest::Approx(1.0));
  CHECK(k_perm(a, b, Eigen::VectorXd::Zero(3)) == doctest::Approx(1.0));
  // displacements: element 0 moves by 1, element 1 by 1, element 2 stays
  CHECK(k_perm(a, b, Eigen::VectorXd::Constant(3, 0.5)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(k_perm(a, b, Eigen::VectorXd::Constant(2, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("sequence-pair kernel is the product of its factors") {
  RngStream rng(53);
  const int n = 5;
  for (int trial = 0; trial < 20; ++trial) {
    const SequencePair a = random_sequence_pair(n, rng);
    const SequencePair b = random_sequence_pair(n, rng);
    KernelParams params;
    params.log_w = Eigen::VectorXd::NullaryExpr(
        n, [&](Eigen::Index) { return -2.0 + 2.0 * rng.uniform(); });
    params.log_w_prime = Eigen::VectorXd::NullaryExpr(
        n, [&](Eigen::Index) { return -2.0 + 2.0 * rng.uniform(); });
    const double factor_pi =
        k_perm(a.pi, b.pi, params.log_w.array().exp());
    const double factor_pp =
        k_perm(a.pi_prime, b.pi_prime, params.log_w_prime.array().exp());
    CHECK(k_sp(a, b, params) ==
          doctest::Approx(factor_pi * factor_pp).epsilon(1e-12));
    CHECK(k_sp(a, b, params) == doctest::Approx(k_sp(b, a, params)));
    CHECK(k_sp(a, a, params) == doctest::Approx(1.0));
    // same pi parts: kernel reduces to the pi' factor
    const SequencePair c{a.pi, b.pi_prime};
    CHECK(k_sp(a, c, params) == doctest::Approx(factor_pp).epsilon(1e-12));
  }
}

TEST_CASE("gram matrices are postive semidefinite with unit diagonal") {
  RngStream rng(59);
  const auto params10 = uniform_params(10, 0.1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<SequencePair> xs;
    for (int i = 0; i < 30; ++i) xs.push_back(random_sequence_pair(10, rng));
    const Eigen::MatrixXd k = gram(xs, params10);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    for (int i = 0; i < k.rows(); ++i) CHECK(k(i, i) == doctest::Approx(1.0));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  }

  const Eigen::MatrixXd single =
      gram(std::vector<SequencePair>{sp_of({0, 1}, {0, 1})},
           uniform_params(2, 0.5));
  CHECK(single.rows() == 1);
  CHECK(single(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("one-point marginal likelihood has its closed form") {
  // y == m and K + sigma^2 I == [2]: mll = -0.5 log(4 pi)
  Dataset data;
  data.add(sp_of({0, 1}, {0, 1}), 3.0);
  GpHyper h;
  h.kernel = uniform_params(2, 0.5);
  h.noise_var = 1.0;
  h.mean_const = 3.0;
  CHECK(mll(h, data) ==
        doctest::Approx(-0.5 * std::log(4.0 * std::numbers::pi))
            .epsilon(1e-12));
}

TEST_CASE("marginal likelihood is invariant to joint shifts of y and m") {
  RngStream rng(61);
  Dataset data = random_dataset(4, 6, rng);
  GpHyper h = random_hyper(4, rng);
  const double base = mll(h, data);
  Dataset shifted;
  for (int i = 0; i < data.size(); ++i) shifted.add(data.x(i), data.y(i) + 17.5);
  GpHyper h2 = h;
  h2.mean_const += 17.5;
  CHECK(mll(h2, shifted) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  RngStream rng(67);
  for (int config = 0; config < 50; ++config) {
    const int n = 3 + static_cast<int>(rng.below(3));
    const int count = 2 + static_cast<int>(rng.below(6));
    Dataset data = random_dataset(n, count, rng, 2.0);
    GpHyper h = random_hyper(n, rng);

    const MllGradient g = mll_with_grad(h, data);
    CHECK(g.value == doctest::Approx(mll(h, data)).epsilon(1e-12));

    auto fd = [&](auto setter) {
      const double eps = 1e-5;
      GpHyper hp = h, hm = h;
      setter(hp, eps);
      setter(hm, -eps);
      return (mll(hp, data) - mll(hm, data)) / (2 * eps);
    };
    auto check = [&](double analytic, double numeric) {
      const double scale = std::max({1e-8, std::abs(analytic), std::abs(numeric)});
      CHECK(std::abs(analytic - numeric) / scale <= 1e-4);
    };

    check(g.d_mean, fd([](GpHyper& hh, double e) { hh.mean_const += e; }));
    check(g.d_log_noise, fd([](GpHyper& hh, double e) {
            hh.noise_var = std::exp(std::log(hh.noise_var) + e);
          }));
    for (int q = 0; q < n; ++q) {
      check(g.d_log_w[q],
            fd([q](GpHyper& hh, double e) { hh.kernel.log_w[q] += e; }));
      check(g.d_log_w_prime[q], fd([q](GpHyper& hh, double e) {
              hh.kernel.log_w_prime[q] += e;
            }));
    }
  }
}

TEST_CASE("fit never returns anything worse than the initial point") {
  RngStream rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(3));
    Dataset data = random_dataset(n, 10, rng, 3.0);
    const GpHyper init = default_init(data);
    FitOptions opts;
    opts.max_iters = 40;
    const GpHyper fitted = fit(data, init, opts);
    CHECK(mll(fitted, data) >= mll(init, data) - 1e-12);
    // determinism
    const GpHyper again = fit(data, init, opts);
    CHECK(fitted.noise_var == again.noise_var);
    CHECK(fitted.mean_const == again.mean_const);
    CHECK((fitted.kernel.log_w - again.kernel.log_w).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("fit returns the initial point when nothing can move") {
  // Single observation equal to the mean, noise pinned at the floor: the mean
  // and weight gradients vanish and the noise gradient only pushes into the
  // clamp, so every iterate equals the initial point.
  Dataset data;
  data.add(sp_of({0, 1, 2}, {1, 2, 0}), 5.0);
  GpHyper init;
  init.kernel = uniform_params(3, 1.0 / 3);
  init.noise_var = kNoiseFloor;
  init.mean_const = 5.0;
  const GpHyper out = fit(data, init);
  CHECK(out.mean_const == init.mean_const);
  CHECK(out.noise_var == init.noise_var);
  CHECK((out.kernel.log_w - init.kernel.log_w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit recovers structure from a known-weight sample") {
  // Deterministic pseudo-sample from a GP with strongly non-uniform weights:
  // compare the fitted likelihood against a perturbed-weight hypothesis.
  RngStream rng(73);
  const int n = 4;
  KernelParams truth = uniform_params(n, 0.05);
  truth.log_w[0] = std::log(2.0);  // element 0 dominates the pi factor

  std::vector<SequencePair> xs;
  while (xs.size() < 12) xs.push_back(random_sequence_pair(n, rng));
  Eigen::MatrixXd k = gram(xs, truth);
  k.diagonal().array() += 1e-4;
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  Eigen::VectorXd z(12);
  for (int i = 0; i < 12; ++i) z[i] = oracle::normal_draw(rng);
  const Eigen::VectorXd y = llt.matrixL() * z;

  Dataset data;
  for (int i = 0; i < 12; ++i) data.add(xs[i], y[i]);

  GpHyper init = default_init(data);
  const GpHyper fitted = fit(data, init);
  GpHyper perturbed = fitted;
  perturbed.kernel.log_w.array() += 1.5;
  CHECK(mll(fitted, data) >= mll(perturbed, data));
}

TEST_CASE("posterior predictions match the dense textbook formula") {
  RngStream rng(79);
  const int n = 5;
  Dataset data = random_dataset(n, 12, rng, 2.0);
  const GpHyper h = random_hyper(n, rng);
  const GpPosterior post(h, data);
  for (int trial = 0; trial < 20; ++trial) {
    const SequencePair x = random_sequence_pair(n, rng);
    const auto [mu, var] = post.predict(x);
    const auto dense = oracle::dense_gp_predict(data, h, post.jitter(), x);
    CHECK(mu == doctest::Approx(dense.mu).epsilon(1e-8));
    CHECK(var == doctest::Approx(std::max(0.0, dense.var)).epsilon(1e-8));
    CHECK(var <= 1.0 + 1e-9);
    CHECK(var >= 0.0);
    // cross covariance at (x, x) is the variance
    CHECK(post.cross_cov(x, x) == doctest::Approx(var).epsilon(1e-8));
  }
}

TEST_CASE("posterior interpolates training data at tiny noise") {
  RngStream rng(83);
  Dataset data = random_dataset(4, 8, rng, 5.0);
  GpHyper h;
  h.kernel = uniform_params(4, 0.5);
  h.noise_var = 1e-6;
  h.mean_const = 0.0;
  const GpPosterior post(h, data);
  for (int i = 0; i < data.size(); ++i) {
    const auto [mu, var] = post.predict(data.x(i));
    CHECK(std::abs(mu - data.y(i)) <= 1e-3);
  }
}

TEST_CASE("far points revert to the prior") {
  Dataset data;
  data.add(sp_of({0, 1, 2, 3}, {0, 1, 2, 3}), 2.0);
  GpHyper h;
  h.kernel = uniform_params(4, 8.0);  // huge weights: any move kills the kernel
  h.noise_var = 0.1;
  h.mean_const = -1.0;
  const GpPosterior post(h, data);
  const auto [mu, var] = post.predict(sp_of({3, 2, 1, 0}, {3, 2, 1, 0}));
  CHECK(mu == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("adding a point never increases predictive variance") {
  RngStream rng(89);
  const int n = 4;
  Dataset data = random_dataset(n, 6, rng);
  const GpHyper h = random_hyper(n, rng);
  const SequencePair probe = random_sequence_pair(n, rng);
  const GpPosterior before(h, data);
  Dataset more = data;
  SequencePair extra = random_sequence_pair(n, rng);
  while (more.contains(canonical_key(extra)))
    extra = random_sequence_pair(n, rng);
  more.add(extra, 0.3);
  const GpPosterior after(h, more);
  CHECK(after.predict(probe).second <= before.predict(probe).second + 1e-8);
}

TEST_CASE("predictions are invariant to dataset ordering") {
  RngStream rng(97);
  const int n = 4;
  Dataset data = random_dataset(n, 7, rng);
  Dataset reversed;
  for (int i = data.size() - 1; i >= 0; --i) reversed.add(data.x(i), data.y(i));
  const GpHyper h = random_hyper(n, rng);
  const GpPosterior a(h, data), b(h, reversed);
  for (int trial = 0; trial < 10; ++trial) {
    const SequencePair x = random_sequence_pair(n, rng);
    CHECK(a.predict(x).first == doctest::Approx(b.predict(x).first).epsilon(1e-9));
    CHECK(a.predict(x).second ==
          doctest::Approx(b.predict(x).second).epsilon(1e-9));
  }
}

TEST_CASE("batched prediction equals pointwise prediction") {
  RngStream rng(101);
  const int n = 5;
  Dataset data = random_dataset(n, 9, rng);
  const GpHyper h = random_hyper(n, rng);
  const GpPosterior post(h, data);
  std::vector<SequencePair> xs;
  for (int i = 0; i < 40; ++i) xs.push_back(random_sequence_pair(n, rng));
  Eigen::VectorXd mu, var;
  post.predict_many(xs, mu, var);
  for (int i = 0; i < 40; ++i) {
    const auto [m1, v1] = post.predict(xs[i]);
    CHECK(mu[i] == doctest::Approx(m1).epsilon(1e-10));
    CHECK(var[i] == doctest::Approx(v1).epsilon(1e-10));
  }
}

TEST_CASE("standardization stores the transform and z-scores targets") {
  Dataset data;
  data.add(sp_of({0, 1}, {0, 1}), 10.0);
  data.add(sp_of({1, 0}, {0, 1}), 14.0);
  const auto [std_data, t] = standardized(data);
  CHECK(t.mean == doctest::Approx(12.0));
  CHECK(t.scale == doctest::Approx(2.0));
  CHECK(std_data.y(0) == doctest::Approx(-1.0));
  CHECK(std_data.y(1) == doctest::Approx(1.0));

  const GpPosterior post(default_init(std_data), std_data, t);
  const auto [raw_mu, raw_var] = post.predict_raw(data.x(0));
  const auto [mu, var] = post.predict(data.x(0));
  CHECK(raw_mu == doctest::Approx(12.0 + 2.0 * mu));
  CHECK(raw_var == doctest::Approx(4.0 * var));
}

TEST_CASE("zero-noise factorization escalates jitter instead of failing") {
  // With weights ~0 every kernel entry is 1 and the gram is singular.
  Dataset data;
  RngStream rng(103);
  for (int i = 0; i < 5; ++i) {
    SequencePair sp = random_sequence_pair(4, rng);
    while (data.contains(canonical_key(sp))) sp = random_sequence_pair(4, rng);
    data.add(sp, static_cast<double>(i));
  }
  GpHyper h;
  h.kernel = uniform_params(4, 1e-30);  // exp(-d * w) rounds to exactly 1
  h.noise_var = 0.0;  // below the documented floor on purpose
  h.mean_const = 2.0;
  const GpPosterior post(h, data);
  CHECK(post.jitter() > 0.0);
  CHECK(std::isfinite(mll(h, data)));
}

TEST_CASE("duplicate dataset points are rejected") {
  Dataset data;
  data.add(sp_of({0, 1}, {0, 1}), 1.0);
  CHECK_THROWS_AS(data.add(sp_of({0, 1}, {0, 1}), 2.0), std::invalid_argument);
}

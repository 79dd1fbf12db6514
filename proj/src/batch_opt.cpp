#include "mpbo/batch_opt.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpbo {

bool FeasibleSet::insert(const SequencePair& sp) {
  std::string key = canonical_key(sp);
  const auto [it, fresh] = index_.try_emplace(std::move(key), items_.size());
  if (fresh) items_.push_back(sp);
  return fresh;
}

bool FeasibleSet::contains(const std::string& key) const {
  return index_.count(key) > 0;
}

const SequencePair& FeasibleSet::sample(RngStream& rng) const {
  if (items_.empty()) throw std::invalid_argument("feasible set is empty");
  return items_[rng.below(items_.size())];
}

LocalUpdateResult local_update(const ObjectiveFn& g, const SequencePair& x_old,
                               const FeasibleFn& c_feasible,
                               const NeighborFn& neighbor_fn) {
  LocalUpdateResult result;
  result.point = x_old;
  for (SequencePair& cand : neighbor_fn(x_old)) {
    if (!c_feasible(cand)) continue;
    result.feasible_neighbors.push_back(std::move(cand));
  }
  if (result.feasible_neighbors.empty()) return result;

  const double g_old = g(x_old);
  double best = g_old;
  std::string best_key;
  const SequencePair* best_point = nullptr;
  for (const SequencePair& cand : result.feasible_neighbors) {
    const double v = g(cand);
    if (v < best) continue;
    std::string key = canonical_key(cand);
    if (v > best || (best_point != nullptr && key < best_key)) {
      best = v;
      best_key = std::move(key);
      best_point = &cand;
    }
  }
  // Move only on strict improvement over the current point.
  if (best_point != nullptr && best > g_old) {
    result.point = *best_point;
    result.moved = true;
  }
  return result;
}

namespace {

// Batch objective for one coordinate: all other coordinates frozen at their
// caches, candidate spliced into slot b.
class CoordinateObjective {
 public:
  CoordinateObjective(const GpPosterior& post, const AcqConfig& acq_cfg,
                      const RhoContext& rho,
                      const std::vector<GpPosterior::PointCache>& frozen,
                      const std::vector<SequencePair>& coords, int slot)
      : post_(post),
        acq_cfg_(acq_cfg),
        rho_(rho),
        frozen_(frozen),
        coords_(coords),
        slot_(slot),
        b_(static_cast<int>(frozen.size())) {
    values_.resize(b_);
    cov_.resize(b_, b_);
    for (int i = 0; i < b_; ++i) {
      values_[i] = acq_value(frozen[i].mu, frozen[i].var, acq_cfg_);
      cov_(i, i) = frozen[i].var;
      for (int j = i + 1; j < b_; ++j) {
        const double k_ij =
            k_sp(coords[i], coords[j], post.hyper().kernel);
        cov_(i, j) = cov_(j, i) =
            post.cross_cov_cached(frozen[i], frozen[j], k_ij);
      }
    }
  }

  double operator()(const SequencePair& cand) const {
    GpPosterior::PointCache cache = post_.cache_point(cand);
    std::vector<double> values = values_;
    Eigen::MatrixXd cov = cov_;
    values[slot_] = acq_value(cache.mu, cache.var, acq_cfg_);
    cov(slot_, slot_) = cache.var;
    for (int j = 0; j < b_; ++j) {
      if (j == slot_) continue;
      const double k_cj = k_sp(cand, coords_[j], post_.hyper().kernel);
      const double c = post_.cross_cov_cached(cache, frozen_[j], k_cj);
      cov(slot_, j) = cov(j, slot_) = c;
    }
    return acq_batch_from_parts(values, cov, rho_);
  }

 private:
  const GpPosterior& post_;
  const AcqConfig& acq_cfg_;
  const RhoContext& rho_;
  const std::vector<GpPosterior::PointCache>& frozen_;
  const std::vector<SequencePair>& coords_;
  int slot_;
  int b_;
  std::vector<double> values_;
  Eigen::MatrixXd cov_;
};

}  // namespace

BatchProposal optimize_batch(const GpPosterior& post, const AcqConfig& acq_cfg,
                             const BatchAcqConfig& batch_cfg,
                             FeasibleSet& feasible, RngStream& rng,
                             const FeasibleFn& is_feasible_fn,
                             const BatchOptOptions& opts) {
  if (feasible.size() == 0)
    throw std::invalid_argument("feasible set is empty");
  const int b = batch_cfg.batch_size;
  if (b < 1) throw std::invalid_argument("batch size must be >= 1");

  // Score the whole pool once: picks the leading point and fixes the rho
  // normalization for this proposal.
  Eigen::VectorXd mu, var;
  post.predict_many(feasible.items(), mu, var);
  std::vector<double> pool_values(feasible.size());
  for (std::size_t i = 0; i < feasible.size(); ++i)
    pool_values[i] = acq_value(mu[static_cast<int>(i)],
                               var[static_cast<int>(i)], acq_cfg);

  std::size_t best_idx = 0;
  std::string best_key = canonical_key(feasible.at(0));
  for (std::size_t i = 1; i < feasible.size(); ++i) {
    if (pool_values[i] < pool_values[best_idx]) continue;
    std::string key = canonical_key(feasible.at(i));
    if (pool_values[i] > pool_values[best_idx] || key < best_key) {
      best_idx = i;
      best_key = std::move(key);
    }
  }
  const RhoContext rho = make_rho_context(pool_values, batch_cfg.rho_scale);

  BatchProposal proposal;
  std::vector<SequencePair> coords;
  coords.push_back(feasible.at(best_idx));
  for (int i = 1; i < b; ++i) coords.push_back(feasible.sample(rng));

  if (b > 1) {
    std::vector<GpPosterior::PointCache> caches(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
      caches[i] = post.cache_point(coords[i]);

    for (int round = 0; round < opts.s_max; ++round) {
      std::vector<SequencePair> next = coords;
      std::vector<std::vector<SequencePair>> discovered(coords.size());
      bool any_moved = false;
      // Jacobi sweep: every slot reads this round's frozen coordinates, so
      // the updates are independent and schedule-order free.
      for (int slot = 1; slot < b; ++slot) {
        const CoordinateObjective g(post, acq_cfg, rho, caches, coords, slot);
        LocalUpdateResult r =
            local_update(g, coords[slot], is_feasible_fn, neighbors);
        next[slot] = std::move(r.point);
        discovered[slot] = std::move(r.feasible_neighbors);
        any_moved = any_moved || r.moved;
      }
      for (const auto& batch : discovered)
        for (const SequencePair& sp : batch) feasible.insert(sp);
      proposal.rounds_used = round + 1;
      if (!any_moved) break;
      for (int slot = 1; slot < b; ++slot) {
        if (!(next[slot] == coords[slot]))
          caches[slot] = post.cache_point(next[slot]);
      }
      coords = std::move(next);
    }
  }

  // Resample duplicate coordinates to keep the evaluated batch distinct.
  std::vector<std::string> keys;
  keys.reserve(coords.size());
  for (const SequencePair& sp : coords) keys.push_back(canonical_key(sp));
  for (std::size_t i = 1; i < coords.size(); ++i) {
    auto clashes = [&](std::size_t i2) {
      for (std::size_t j = 0; j < i2; ++j)
        if (keys[j] == keys[i2]) return true;
      return false;
    };
    int attempts = 0;
    const int max_attempts = 64;
    while (clashes(i) && attempts < max_attempts) {
      coords[i] = feasible.sample(rng);
      keys[i] = canonical_key(coords[i]);
      ++attempts;
    }
    if (clashes(i)) {
      // Deterministic fallback: first unused member in insertion order.
      for (std::size_t f = 0; f < feasible.size(); ++f) {
        std::string key = canonical_key(feasible.at(f));
        if (std::find(keys.begin(), keys.begin() + i + 1, key) ==
            keys.begin() + i + 1) {
          coords[i] = feasible.at(f);
          keys[i] = std::move(key);
          break;
        }
      }
    }
  }
  // Anything still clashing (feasible set smaller than the batch) is dropped.
  std::vector<SequencePair> unique_points;
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (std::find(seen.begin(), seen.end(), keys[i]) != seen.end()) continue;
    seen.push_back(keys[i]);
    unique_points.push_back(coords[i]);
  }
  proposal.points = std::move(unique_points);
  return proposal;
}

}  // namespace mpbo

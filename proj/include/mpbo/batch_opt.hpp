#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpbo/acquisition.hpp"
#include "mpbo/seq_pair.hpp"

namespace mpbo {

// Sequence pairs known to fit the outline, keyed by canonical_key. Grows
// monotonically; sampling is uniform over the current members.
class FeasibleSet {
 public:
  bool insert(const SequencePair& sp);
  bool contains(const std::string& key) const;
  std::size_t size() const { return items_.size(); }
  const SequencePair& at(std::size_t i) const { return items_[i]; }
  const std::vector<SequencePair>& items() const { return items_; }
  const SequencePair& sample(RngStream& rng) const;

 private:
  std::vector<SequencePair> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

using ObjectiveFn = std::function<double(const SequencePair&)>;
using FeasibleFn = std::function<bool(const SequencePair&)>;
using NeighborFn = std::function<std::vector<SequencePair>(const SequencePair&)>;

struct LocalUpdateResult {
  SequencePair point;
  std::vector<SequencePair> feasible_neighbors;
  bool moved = false;
};

// One hill-climbing step: move to the feasible neighbor maximizing g if it
// strictly improves on g(x_old), otherwise stay. Ties break on canonical_key
// order. The full feasible neighborhood is returned for accumulation.
LocalUpdateResult local_update(const ObjectiveFn& g, const SequencePair& x_old,
                               const FeasibleFn& c_feasible,
                               const NeighborFn& neighbor_fn);

struct BatchProposal {
  std::vector<SequencePair> points;
  int rounds_used = 0;
};

struct BatchOptOptions {
  int s_max = 20;
};

// Batch acquisition maximization: the first point is the single-point argmax
// over the feasible set; the remaining B-1 points start at uniform samples
// and take synchronized per-coordinate hill-climbing steps against the batch
// determinant with the other coordinates frozen at the previous round. Every
// feasible neighbor discovered is merged into `feasible` at round barriers.
// Duplicate coordinates in the final batch are resampled to distinct points.
BatchProposal optimize_batch(const GpPosterior& post, const AcqConfig& acq_cfg,
                             const BatchAcqConfig& batch_cfg,
                             FeasibleSet& feasible, RngStream& rng,
                             const FeasibleFn& is_feasible_fn,
                             const BatchOptOptions& opts = {});

}  // namespace mpbo

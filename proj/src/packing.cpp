#include "mpbo/packing.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpbo {

namespace {

// Fenwick tree over positions 0..n-1 supporting prefix maxima. Stored values
// only ever grow, which is all the packing sweep needs.
class PrefixMax {
 public:
  explicit PrefixMax(int n) : tree_(static_cast<std::size_t>(n) + 1, 0.0) {}

  // max over keys in [0, key); 0 when empty.
  double query_before(int key) const {
    double best = 0.0;
    for (int i = key; i > 0; i -= i & -i) best = std::max(best, tree_[i]);
    return best;
  }

  void update(int key, double value) {
    for (int i = key + 1; i < static_cast<int>(tree_.size()); i += i & -i)
      tree_[i] = std::max(tree_[i], value);
  }

 private:
  std::vector<double> tree_;
};

// One axis of the packing sweep. Macros are visited in pi order; a macro's
// coordinate is the best chain value among already-visited macros whose sort
// key precedes its own.
std::vector<double> sweep(const Permutation& pi, const std::vector<int>& key_of,
                          std::span<const MacroShape> shapes,
                          double MacroShape::* extent) {
  const int n = pi.size();
  std::vector<double> coord(n, 0.0);
  PrefixMax tree(n);
  for (int p = 0; p < n; ++p) {
    const int m = pi.at(p);
    const int key = key_of[m];
    coord[m] = tree.query_before(key);
    tree.update(key, coord[m] + shapes[m].*extent);
  }
  return coord;
}

}  // namespace

PackResult pack(const SequencePair& sp, std::span<const MacroShape> shapes) {
  const int n = sp.size();
  if (static_cast<int>(shapes.size()) != n)
    throw std::invalid_argument("shape count does not match sequence pair length");

  // x chains: j left of i iff j precedes i in both permutations.
  std::vector<double> xs = sweep(sp.pi, sp.pi_prime.inverse(), shapes,
                                 &MacroShape::width);

  // y chains: j below i iff j precedes i in pi and succeeds i in pi_prime,
  // i.e. j precedes i in both pi and reversed pi_prime.
  std::vector<int> rev_key(n);
  for (int m = 0; m < n; ++m)
    rev_key[m] = n - 1 - sp.pi_prime.position_of(m);
  std::vector<double> ys = sweep(sp.pi, rev_key, shapes, &MacroShape::height);

  PackResult result;
  result.positions.resize(n);
  for (int m = 0; m < n; ++m) {
    result.positions[m] = {xs[m], ys[m]};
    result.packed_width = std::max(result.packed_width, xs[m] + shapes[m].width);
    result.packed_height =
        std::max(result.packed_height, ys[m] + shapes[m].height);
  }
  return result;
}

bool is_feasible(const SequencePair& sp, std::span<const MacroShape> shapes,
                 const Outline& outline) {
  const PackResult r = pack(sp, shapes);
  return r.packed_width <= outline.width && r.packed_height <= outline.height;
}

}  // namespace mpbo

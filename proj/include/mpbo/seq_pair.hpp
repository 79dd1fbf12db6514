#pragma once

#include <string>
#include <vector>

#include "mpbo/rng.hpp"

namespace mpbo {

// Permutation of {0, ..., n-1}. order()[p] is the macro at position p; the
// inverse mapping (macro -> position) is kept in sync on construction.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> order);
  static Permutation identity(int n);

  int size() const { return static_cast<int>(order_.size()); }
  int at(int pos) const { return order_[pos]; }
  int position_of(int macro) const { return inverse_[macro]; }
  const std::vector<int>& order() const { return order_; }
  const std::vector<int>& inverse() const { return inverse_; }

  // New permutation with positions pos and pos+1 exchanged.
  Permutation with_adjacent_swap(int pos) const;
  Permutation reversed() const;

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.order_ == b.order_;
  }

 private:
  std::vector<int> order_;
  std::vector<int> inverse_;
};

struct SequencePair {
  Permutation pi;
  Permutation pi_prime;

  int size() const { return pi.size(); }

  friend bool operator==(const SequencePair& a, const SequencePair& b) {
    return a.pi == b.pi && a.pi_prime == b.pi_prime;
  }
};

enum class Relation { kLeftOf, kRightOf, kBelow, kAbove };

Relation opposite(Relation r);
const char* to_string(Relation r);

// Relative location of macro i with respect to macro j:
//   i before j in both permutations          -> i left of j
//   j before i in both permutations          -> i right of j
//   i before j in pi, j before i in pi_prime -> i below j
//   j before i in pi, i before j in pi_prime -> i above j
Relation relation(const SequencePair& sp, int i, int j);

// The 2(N-1) sequence pairs one adjacent transposition away: all pi swaps by
// ascending position first, then all pi_prime swaps.
std::vector<SequencePair> neighbors(const SequencePair& sp);

// Both permutations drawn independently and uniformly (Fisher-Yates).
SequencePair random_sequence_pair(int n, RngStream& rng);

// Injective byte string over sequence pairs of fixed length; lexicographic
// comparison gives a total order used for deterministic tie-breaking.
std::string canonical_key(const SequencePair& sp);

}  // namespace mpbo

#include "mpbo/seq_pair.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpbo {

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
  const int n = static_cast<int>(order_.size());
  if (n < 1) throw std::invalid_argument("permutation must have length >= 1");
  inverse_.assign(n, -1);
  for (int p = 0; p < n; ++p) {
    const int m = order_[p];
    if (m < 0 || m >= n)
      throw std::invalid_argument("permutation entry out of range");
    if (inverse_[m] != -1)
      throw std::invalid_argument("permutation entry repeated");
    inverse_[m] = p;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  return Permutation(std::move(order));
}

Permutation Permutation::with_adjacent_swap(int pos) const {
  if (pos < 0 || pos + 1 >= size())
    throw std::invalid_argument("swap position out of range");
  std::vector<int> order = order_;
  std::swap(order[pos], order[pos + 1]);
  return Permutation(std::move(order));
}

Permutation Permutation::reversed() const {
  std::vector<int> order(order_.rbegin(), order_.rend());
  return Permutation(std::move(order));
}

Relation opposite(Relation r) {
  switch (r) {
    case Relation::kLeftOf: return Relation::kRightOf;
    case Relation::kRightOf: return Relation::kLeftOf;
    case Relation::kBelow: return Relation::kAbove;
    case Relation::kAbove: return Relation::kBelow;
  }
  throw std::logic_error("bad relation");
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::kLeftOf: return "left-of";
    case Relation::kRightOf: return "right-of";
    case Relation::kBelow: return "below";
    case Relation::kAbove: return "above";
  }
  return "?";
}

Relation relation(const SequencePair& sp, int i, int j) {
  const int n = sp.size();
  if (i == j) throw std::invalid_argument("relation undefined for i == j");
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw std::invalid_argument("macro index out of range");
  const bool first = sp.pi.position_of(i) < sp.pi.position_of(j);
  const bool second = sp.pi_prime.position_of(i) < sp.pi_prime.position_of(j);
  if (first && second) return Relation::kLeftOf;
  if (!first && !second) return Relation::kRightOf;
  if (first) return Relation::kBelow;
  return Relation::kAbove;
}

std::vector<SequencePair> neighbors(const SequencePair& sp) {
  const int n = sp.size();
  std::vector<SequencePair> out;
  out.reserve(2 * std::max(0, n - 1));
  for (int p = 0; p + 1 < n; ++p)
    out.push_back({sp.pi.with_adjacent_swap(p), sp.pi_prime});
  for (int p = 0; p + 1 < n; ++p)
    out.push_back({sp.pi, sp.pi_prime.with_adjacent_swap(p)});
  return out;
}

namespace {

Permutation random_permutation(int n, RngStream& rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  return Permutation(std::move(order));
}

}  // namespace

SequencePair random_sequence_pair(int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sequence pair length must be >= 1");
  Permutation pi = random_permutation(n, rng);
  Permutation pi_prime = random_permutation(n, rng);
  return {std::move(pi), std::move(pi_prime)};
}

std::string canonical_key(const SequencePair& sp) {
  const int n = sp.size();
  std::string key;
  key.resize(static_cast<std::size_t>(8) * n);
  std::size_t at = 0;
  auto put = [&](const std::vector<int>& order) {
    for (int v : order) {
      const auto u = static_cast<std::uint32_t>(v);
      key[at++] = static_cast<char>((u >> 24) & 0xff);
      key[at++] = static_cast<char>((u >> 16) & 0xff);
      key[at++] = static_cast<char>((u >> 8) & 0xff);
      key[at++] = static_cast<char>(u & 0xff);
    }
  };
  put(sp.pi.order());
  put(sp.pi_prime.order());
  return key;
}

}  // namespace mpbo

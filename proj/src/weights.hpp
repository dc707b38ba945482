#pragma once

// Sorted sparse weight books shared by the public map-based operations and
// the index-based simulation loop.

#include <cmath>
#include <utility>
#include <vector>

namespace ewsim::detail {

template <class Key>
using Book = std::vector<std::pair<Key, double>>;

// Drifts `book` through one period and renormalizes. Returns the gross
// growth sum_i w_i (1 + r_i).
template <class Key, class ReturnOf>
double drift_in_place(Book<Key>& book, ReturnOf&& return_of) {
  double growth = 0.0;
  for (auto& [key, w] : book) {
    w *= 1.0 + return_of(key);
    growth += w;
  }
  for (auto& entry : book) entry.second /= growth;
  return growth;
}

// Replaces `book` with `targets` (both sorted by key) and reports every
// nonzero weight change as on_trade(key, delta, prior_weight). Returns sum |dw|.
template <class Key, class OnTrade>
double rebalance_in_place(Book<Key>& book, const Book<Key>& targets, OnTrade&& on_trade) {
  double traded = 0.0;
  auto emit = [&](const Key& key, double prior, double target) {
    const double delta = target - prior;
    if (delta != 0.0) {
      traded += std::abs(delta);
      on_trade(key, delta, prior);
    }
  };
  auto a = book.begin();
  auto b = targets.begin();
  while (a != book.end() || b != targets.end()) {
    if (b == targets.end() || (a != book.end() && a->first < b->first)) {
      emit(a->first, a->second, 0.0);
      ++a;
    } else if (a == book.end() || b->first < a->first) {
      emit(b->first, 0.0, b->second);
      ++b;
    } else {
      emit(a->first, a->second, b->second);
      ++a;
      ++b;
    }
  }
  book = targets;
  return traded;
}

}  // namespace ewsim::detail

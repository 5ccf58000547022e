#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace conreg {

enum class OrderingPolicy { with_replacement, without_replacement, cyclic, explicit_list };

std::string to_string(OrderingPolicy p);
OrderingPolicy ordering_policy_from_string(const std::string& s);

// A realized task ordering tau: {1..k} -> {0..T-1} (indices zero-based).
struct Ordering {
  std::vector<int> indices;  // length k, entries in [0, T)
  OrderingPolicy policy = OrderingPolicy::explicit_list;
  std::optional<std::uint64_t> seed;
  int T = 0;
  int k = 0;
};

// i.i.d. uniform indices; identical seed reproduces the sequence exactly.
Ordering sample_with_replacement(std::uint64_t seed, int T, int k);

// First k entries of a uniform random permutation of [T] (Fisher-Yates).
// Throws for k > T ("without-replacement ordering exhausted").
Ordering sample_without_replacement(std::uint64_t seed, int T, int k);

// indices[t] = t mod T.
Ordering cyclic_ordering(int T, int k);

Ordering explicit_ordering(std::vector<int> indices, int T);

}  // namespace conreg

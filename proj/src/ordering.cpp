#include "conreg/ordering.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

#include "conreg/rng.hpp"

namespace conreg {

namespace {

void require_positive(int T, int k) {
  if (T < 1) throw std::invalid_argument("ordering: T >= 1 required");
  if (k < 1) throw std::invalid_argument("ordering: k >= 1 required");
}

}  // namespace

std::string to_string(OrderingPolicy p) {
  switch (p) {
    case OrderingPolicy::with_replacement: return "with_replacement";
    case OrderingPolicy::without_replacement: return "without_replacement";
    case OrderingPolicy::cyclic: return "cyclic";
    case OrderingPolicy::explicit_list: return "explicit";
  }
  return "unknown";
}

OrderingPolicy ordering_policy_from_string(const std::string& s) {
  if (s == "with_replacement" || s == "wr") return OrderingPolicy::with_replacement;
  if (s == "without_replacement" || s == "wor") return OrderingPolicy::without_replacement;
  if (s == "cyclic") return OrderingPolicy::cyclic;
  if (s == "explicit") return OrderingPolicy::explicit_list;
  throw std::invalid_argument("unknown ordering policy: " + s);
}

Ordering sample_with_replacement(std::uint64_t seed, int T, int k) {
  require_positive(T, k);
  Rng rng(seed);
  Ordering o;
  o.policy = OrderingPolicy::with_replacement;
  o.seed = seed;
  o.T = T;
  o.k = k;
  o.indices.resize(static_cast<std::size_t>(k));
  for (auto& idx : o.indices) idx = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(T)));
  return o;
}

Ordering sample_without_replacement(std::uint64_t seed, int T, int k) {
  require_positive(T, k);
  if (k > T) throw std::invalid_argument("without-replacement ordering exhausted (k > T)");
  Rng rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(T));
  std::iota(perm.begin(), perm.end(), 0);
  // Fisher-Yates; only the first k entries are consumed.
  for (int i = 0; i < T - 1; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(T - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  Ordering o;
  o.policy = OrderingPolicy::without_replacement;
  o.seed = seed;
  o.T = T;
  o.k = k;
  o.indices.assign(perm.begin(), perm.begin() + k);
  return o;
}

Ordering cyclic_ordering(int T, int k) {
  require_positive(T, k);
  Ordering o;
  o.policy = OrderingPolicy::cyclic;
  o.T = T;
  o.k = k;
  o.indices.resize(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) o.indices[static_cast<std::size_t>(t)] = t % T;
  return o;
}

Ordering explicit_ordering(std::vector<int> indices, int T) {
  if (indices.empty()) throw std::invalid_argument("ordering: k >= 1 required");
  for (int idx : indices) {
    if (idx < 0 || idx >= T) throw std::invalid_argument("explicit ordering: index out of range");
  }
  Ordering o;
  o.policy = OrderingPolicy::explicit_list;
  o.T = T;
  o.k = static_cast<int>(indices.size());
  o.indices = std::move(indices);
  return o;
}

}  // namespace conreg

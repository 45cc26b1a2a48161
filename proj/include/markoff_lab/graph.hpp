#pragma once

// Connected components of an implicit graph whose vertices are packed 64-bit
// keys. Shared by the Markoff and Markoff-Hurwitz solution graphs.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace markoff_lab {

struct ComponentReport {
  std::uint64_t total_nonzero = 0;
  std::vector<std::uint64_t> component_sizes;   // descending
  std::vector<std::uint64_t> representatives;   // smallest key per component, aligned
  std::uint64_t giant_size = 0;
  std::uint64_t residual = 0;
  std::uint64_t min_component = 0;

  std::size_t component_count() const { return component_sizes.size(); }
};

/// Vertex keys (ascending) with the index of the component each belongs to.
/// Component 0 is the giant: largest size, ties broken by smallest key.
struct Decomposition {
  std::vector<std::uint64_t> keys;
  std::vector<std::uint32_t> component_of;
  ComponentReport report;

  /// Component index of a key, or -1 when the key is not a vertex.
  std::int64_t component_of_key(std::uint64_t key) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) return -1;
    return component_of[static_cast<std::size_t>(it - keys.begin())];
  }
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// `for_each_neighbor(key, sink)` must call `sink(k)` for every neighbour key.
/// Neighbours outside `keys` are an error: the move set must be closed.
template <class NeighborFn>
Decomposition decompose(std::vector<std::uint64_t> keys, NeighborFn&& for_each_neighbor) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  const std::size_t n = keys.size();
  UnionFind uf(n);
  auto index_of = [&](std::uint64_t k) {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it == keys.end() || *it != k) {
      throw std::logic_error("neighbour outside the vertex set");
    }
    return static_cast<std::size_t>(it - keys.begin());
  };
  for (std::size_t i = 0; i < n; ++i) {
    for_each_neighbor(keys[i], [&](std::uint64_t k) { uf.unite(i, index_of(k)); });
  }

  // Roots are visited in ascending key order, so the first vertex seen for a
  // root is that component's smallest key.
  std::vector<std::int64_t> root_slot(n, -1);
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint64_t> reps;
  std::vector<std::uint32_t> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = uf.find(i);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<std::int64_t>(sizes.size());
      sizes.push_back(0);
      reps.push_back(keys[i]);
    }
    raw[i] = static_cast<std::uint32_t>(root_slot[r]);
    ++sizes[raw[i]];
  }

  std::vector<std::uint32_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return reps[a] < reps[b];
  });
  std::vector<std::uint32_t> rank(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  Decomposition d;
  d.component_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.component_of[i] = rank[raw[i]];
  d.keys = std::move(keys);
  ComponentReport& rep = d.report;
  rep.total_nonzero = n;
  for (std::uint32_t c : order) {
    rep.component_sizes.push_back(sizes[c]);
    rep.representatives.push_back(reps[c]);
  }
  if (!rep.component_sizes.empty()) {
    rep.giant_size = rep.component_sizes.front();
    rep.min_component = rep.component_sizes.back();
  }
  rep.residual = rep.total_nonzero - rep.giant_size;
  return d;
}

}  // namespace markoff_lab

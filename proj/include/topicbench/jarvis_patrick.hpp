#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "topicbench/density.hpp"
#include "topicbench/error.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/metricspace.hpp"

namespace topicbench {

/// Shared-nearest-neighbour structure. knn(i) is the first k points of i's (distance, index) order
/// with i itself skipped.
class SharedNeighborIndex {
 public:
  struct Edge {
    std::uint32_t i;
    std::uint32_t j;
    std::uint32_t shared;
  };

  explicit SharedNeighborIndex(const NeighborOrder& order) : n_(order.size()), rank_(n_ * n_), lists_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint32_t pos = 0;
      for (std::uint32_t j : order.row(i)) {
        if (j == i) continue;
        rank_[i * n_ + j] = pos;
        lists_[i * n_ + pos] = j;
        ++pos;
      }
      rank_[i * n_ + i] = static_cast<std::uint32_t>(n_);  // never a neighbour of itself
    }
  }

  std::size_t size() const { return n_; }

  std::span<const std::uint32_t> knn(std::size_t i, std::size_t k) const {
    return std::span(lists_).subspan(i * n_, k);
  }

  bool in_knn(std::size_t i, std::size_t j, std::size_t k) const { return rank_[i * n_ + j] < k; }

  /// Mutual-knn pairs (i < j) with their shared-neighbour counts.
  std::vector<Edge> mutual_edges(std::size_t k) const {
    check_k(k);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::uint32_t j : knn(i, k)) {
        if (j <= i || !in_knn(j, i, k)) continue;
        std::uint32_t shared = 0;
        for (std::uint32_t m : knn(i, k)) {
          if (in_knn(j, m, k)) ++shared;
        }
        edges.push_back({static_cast<std::uint32_t>(i), j, shared});
      }
    }
    return edges;
  }

  void check_k(std::size_t k) const {
    if (k < 1 || k >= n_) {
      throw Error(ErrorCode::InvalidArgument, "Jarvis-Patrick needs 1 <= k <= n-1 (k=" + std::to_string(k) +
                                                  ", n=" + std::to_string(n_) + ")");
    }
  }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint32_t> lists_;
};

/// Connected components of the edges whose shared count reaches k_t. Components are numbered by their
/// lowest point index; every point belongs to some cluster.
inline ClusterLabeling jarvis_patrick_components(std::size_t n, std::span<const SharedNeighborIndex::Edge> edges,
                                                 std::size_t k, std::size_t k_t) {
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0U);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : edges) {
    if (e.shared < k_t) continue;
    auto a = find(e.i), b = find(e.j);
    if (a == b) continue;
    if (a < b) {
      parent[b] = a;
    } else {
      parent[a] = b;
    }
  }
  ClusterLabeling out;
  out.labels.assign(n, kNoise);
  std::vector<int> root_label(n, kNoise);
  int next = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto r = find(i);
    if (root_label[r] == kNoise) root_label[r] = next++;
    out.labels[i] = root_label[r];
  }
  out.k = static_cast<std::size_t>(next);
  out.method = ClustererId::JarvisPatrick;
  out.params = JarvisPatrickParams{k, k_t};
  return out;
}

/// Points i and j are joined iff each is in the other's k nearest neighbours and the two lists share
/// at least k_t points. Clusters are the connected components of that join graph.
inline ClusterLabeling jarvis_patrick(const SharedNeighborIndex& index, std::size_t k, std::size_t k_t) {
  validate(ClusterParams{JarvisPatrickParams{k, k_t}});
  auto edges = index.mutual_edges(k);
  return jarvis_patrick_components(index.size(), edges, k, k_t);
}

inline ClusterLabeling jarvis_patrick(const DistanceMatrix& d, std::size_t k, std::size_t k_t) {
  if (k >= d.size()) {
    throw Error(ErrorCode::InvalidArgument, "Jarvis-Patrick needs k <= n-1 (k=" + std::to_string(k) + ", n=" +
                                                std::to_string(d.size()) + ")");
  }
  NeighborOrder order(d);
  return jarvis_patrick(SharedNeighborIndex(order), k, k_t);
}

}  // namespace topicbench

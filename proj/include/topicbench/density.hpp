#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "topicbench/error.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/metricspace.hpp"

namespace topicbench {

/// For every point, all point indices sorted by (distance, index). Self is included.
class NeighborOrder {
 public:
  explicit NeighborOrder(const DistanceMatrix& d) : d_(&d), n_(d.size()), order_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      auto row = std::span(order_).subspan(i * n_, n_);
      std::iota(row.begin(), row.end(), 0U);
      std::sort(row.begin(), row.end(), [&](std::uint32_t a, std::uint32_t b) {
        double da = d(i, a), db = d(i, b);
        return da < db || (da == db && a < b);
      });
    }
  }

  const DistanceMatrix& distances() const { return *d_; }
  std::size_t size() const { return n_; }
  std::span<const std::uint32_t> row(std::size_t i) const { return std::span(order_).subspan(i * n_, n_); }

  /// Number of points j with d(i, j) <= eps, self included.
  std::size_t count_within(std::size_t i, double eps) const {
    auto r = row(i);
    auto it = std::partition_point(r.begin(), r.end(), [&](std::uint32_t j) { return (*d_)(i, j) <= eps; });
    return static_cast<std::size_t>(it - r.begin());
  }

 private:
  const DistanceMatrix* d_;
  std::size_t n_;
  std::vector<std::uint32_t> order_;
};

/// DBSCAN over a precomputed neighbour order. A point is core when at least `min_pts` points (itself
/// included) lie within `eps`. Clusters are started from cores in index order; a border point joins the
/// first cluster that reaches it.
inline ClusterLabeling dbscan(const NeighborOrder& neighbors, double eps, std::size_t min_pts) {
  validate(ClusterParams{DbscanParams{eps, min_pts}});
  const std::size_t n = neighbors.size();
  std::vector<std::size_t> reach(n);
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    reach[i] = neighbors.count_within(i, eps);
    core[i] = reach[i] >= min_pts;
  }
  constexpr int kUnassigned = -2;
  std::vector<int> labels(n, kUnassigned);
  int cluster = 0;
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != kUnassigned) continue;
    labels[i] = cluster;
    queue.assign(1, i);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::size_t p = queue[head];
      auto row = neighbors.row(p).first(reach[p]);
      for (std::uint32_t q : row) {
        if (labels[q] != kUnassigned) continue;
        labels[q] = cluster;
        if (core[q]) queue.push_back(q);
      }
    }
    ++cluster;
  }
  for (auto& l : labels) {
    if (l == kUnassigned) l = kNoise;
  }
  ClusterLabeling out;
  out.labels = std::move(labels);
  out.k = static_cast<std::size_t>(cluster);
  out.method = ClustererId::Dbscan;
  out.params = DbscanParams{eps, min_pts};
  return out;
}

inline ClusterLabeling dbscan(const DistanceMatrix& d, double eps, std::size_t min_pts) {
  return dbscan(NeighborOrder(d), eps, min_pts);
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Steepness threshold of the reachability-plot cluster extraction. Fixed because only MinPts is tuned.
inline constexpr double kOpticsXi = 0.05;

struct ReachabilityPlot {
  std::vector<std::size_t> ordering;              // visit order
  std::vector<double> reachability;               // per point; infinity when never reached
  std::vector<double> core_distance;              // per point
  std::vector<std::optional<std::size_t>> predecessor;  // per point
};

/// OPTICS ordering with an unbounded radius. The next point is the unprocessed one with the smallest
/// reachability, lower index on ties, so the first point is index 0.
inline ReachabilityPlot optics_order(const NeighborOrder& neighbors, std::size_t min_pts) {
  validate(ClusterParams{OpticsParams{min_pts}});
  const auto& d = neighbors.distances();
  const std::size_t n = neighbors.size();
  ReachabilityPlot plot;
  plot.reachability.assign(n, kInfinity);
  plot.core_distance.assign(n, kInfinity);
  plot.predecessor.assign(n, std::nullopt);
  plot.ordering.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (min_pts <= n) plot.core_distance[i] = d(i, neighbors.row(i)[min_pts - 1]);
  }
  std::vector<bool> processed(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (processed[i]) continue;
      if (p == n || plot.reachability[i] < plot.reachability[p]) p = i;
    }
    processed[p] = true;
    plot.ordering.push_back(p);
    if (!std::isfinite(plot.core_distance[p])) continue;
    for (std::size_t q = 0; q < n; ++q) {
      if (processed[q]) continue;
      double r = std::max(plot.core_distance[p], d(p, q));
      if (r < plot.reachability[q]) {
        plot.reachability[q] = r;
        plot.predecessor[q] = p;
      }
    }
  }
  return plot;
}

namespace detail {

struct SteepDownArea {
  std::size_t start;
  std::size_t end;
  double mib;
};

// Extends a steep area while at most `min_samples` consecutive non-steep points keep the direction.
inline std::size_t extend_region(const std::vector<bool>& steep, const std::vector<bool>& against,
                                 std::size_t start, std::size_t min_samples) {
  const std::size_t n = steep.size();
  std::size_t non_steep = 0;
  std::size_t end = start;
  for (std::size_t index = start; index < n; ++index) {
    if (steep[index]) {
      non_steep = 0;
      end = index;
    } else if (!against[index]) {
      if (++non_steep > min_samples) break;
    } else {
      return end;
    }
  }
  return end;
}

inline void update_filter_sdas(std::vector<SteepDownArea>& sdas, double mib, double xi_complement,
                               const std::vector<double>& r) {
  if (std::isinf(mib)) {
    sdas.clear();
    return;
  }
  std::erase_if(sdas, [&](const SteepDownArea& a) { return !(mib <= r[a.start] * xi_complement); });
  for (auto& a : sdas) a.mib = std::max(a.mib, mib);
}

// Shrinks [s, e] until the end point's predecessor lies inside the interval.
inline bool correct_predecessor(const std::vector<double>& r, const std::vector<std::optional<std::size_t>>& pred,
                                std::span<const std::size_t> ordering, std::size_t& s, std::size_t& e) {
  while (s < e) {
    if (r[s] > r[e]) return true;
    const auto& p_e = pred[e];
    for (std::size_t i = s; i < e; ++i) {
      if (p_e && *p_e == ordering[i]) return true;
    }
    --e;
  }
  return false;
}

}  // namespace detail

/// Steep-area (xi) extraction over a reachability plot. Intervals are produced smallest-first per
/// steep-up area and the first non-overlapping interval claims its points; the rest are noise.
inline ClusterLabeling extract_xi(const ReachabilityPlot& plot, double xi, std::size_t min_samples,
                                  std::size_t min_cluster_size) {
  const std::size_t n = plot.ordering.size();
  min_cluster_size = std::max<std::size_t>(2, min_cluster_size);
  std::vector<double> r(n + 1);
  std::vector<std::optional<std::size_t>> pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = plot.reachability[plot.ordering[i]];
    pred[i] = plot.predecessor[plot.ordering[i]];
  }
  r[n] = kInfinity;

  const double xi_complement = 1.0 - xi;
  std::vector<bool> steep_up(n), steep_down(n), down(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ratio = r[i] / r[i + 1];  // NaN for inf/inf and 0/0, which matches nothing below
    steep_up[i] = ratio <= xi_complement;
    steep_down[i] = ratio >= 1.0 / xi_complement;
    down[i] = ratio > 1.0;
    up[i] = ratio < 1.0;
  }

  std::vector<std::pair<std::size_t, std::size_t>> clusters;
  std::vector<detail::SteepDownArea> sdas;
  std::size_t index = 0;
  double mib = 0.0;
  for (std::size_t steep_index = 0; steep_index < n; ++steep_index) {
    if (!(steep_up[steep_index] || steep_down[steep_index])) continue;
    if (steep_index < index) continue;
    for (std::size_t i = index; i <= steep_index; ++i) mib = std::max(mib, r[i]);

    if (steep_down[steep_index]) {
      detail::update_filter_sdas(sdas, mib, xi_complement, r);
      std::size_t d_end = detail::extend_region(steep_down, up, steep_index, min_samples);
      sdas.push_back({steep_index, d_end, 0.0});
      index = d_end + 1;
      mib = r[index];
      continue;
    }

    detail::update_filter_sdas(sdas, mib, xi_complement, r);
    const std::size_t u_start = steep_index;
    const std::size_t u_end = detail::extend_region(steep_up, down, u_start, min_samples);
    index = u_end + 1;
    mib = r[index];

    std::vector<std::pair<std::size_t, std::size_t>> found;
    for (const auto& sda : sdas) {
      std::size_t c_start = sda.start;
      std::size_t c_end = u_end;
      if (r[c_end + 1] * xi_complement < sda.mib) continue;

      const double d_max = r[sda.start];
      if (d_max * xi_complement >= r[c_end + 1]) {
        while (r[c_start + 1] > r[c_end + 1] && c_start < sda.end) ++c_start;
      } else if (r[c_end + 1] * xi_complement >= d_max) {
        while (c_end > u_start && r[c_end - 1] > d_max) --c_end;
      }

      if (!detail::correct_predecessor(r, pred, plot.ordering, c_start, c_end)) continue;
      if (c_end - c_start + 1 < min_cluster_size) continue;
      if (c_start > sda.end) continue;
      if (c_end < u_start) continue;
      found.emplace_back(c_start, c_end);
    }
    clusters.insert(clusters.end(), found.rbegin(), found.rend());
  }

  std::vector<int> by_position(n, kNoise);
  int label = 0;
  for (auto [s, e] : clusters) {
    bool free = std::all_of(by_position.begin() + static_cast<std::ptrdiff_t>(s),
                            by_position.begin() + static_cast<std::ptrdiff_t>(e) + 1, [](int l) { return l == kNoise; });
    if (!free) continue;
    std::fill(by_position.begin() + static_cast<std::ptrdiff_t>(s), by_position.begin() + static_cast<std::ptrdiff_t>(e) + 1,
              label);
    ++label;
  }
  ClusterLabeling out;
  out.labels.assign(n, kNoise);
  for (std::size_t i = 0; i < n; ++i) out.labels[plot.ordering[i]] = by_position[i];
  out.k = static_cast<std::size_t>(label);
  out.method = ClustererId::Optics;
  return out;
}

struct OpticsResult {
  ReachabilityPlot plot;
  ClusterLabeling labeling;
};

/// Ordering plus xi extraction with xi = kOpticsXi and minimum cluster size = min_pts.
inline OpticsResult optics(const NeighborOrder& neighbors, std::size_t min_pts) {
  OpticsResult result;
  result.plot = optics_order(neighbors, min_pts);
  result.labeling = extract_xi(result.plot, kOpticsXi, min_pts, min_pts);
  result.labeling.params = OpticsParams{min_pts};
  return result;
}

inline OpticsResult optics(const DistanceMatrix& d, std::size_t min_pts) { return optics(NeighborOrder(d), min_pts); }

}  // namespace topicbench

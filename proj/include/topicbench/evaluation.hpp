#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "topicbench/error.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/metricspace.hpp"

namespace topicbench {

enum class NoisePolicy { Exclude, AsSingletons };

inline std::string_view to_string(NoisePolicy p) { return p == NoisePolicy::Exclude ? "exclude" : "as-singletons"; }

struct SilhouetteReport {
  std::vector<std::optional<double>> per_point;  // nullopt for points left out under NoisePolicy::Exclude
  double mean = 0.0;
  MetricId metric = MetricId::EuclideanNormalized;
  NoisePolicy noise_policy = NoisePolicy::Exclude;
  std::size_t clusters = 0;
  bool degenerate = false;  // fewer than two clusters; mean forced to 0
};

namespace detail {

// Effective cluster ids after applying the noise policy; -1 marks an excluded point.
inline std::vector<int> effective_labels(const ClusterLabeling& labeling, NoisePolicy policy, std::size_t& clusters) {
  std::vector<int> canon = canonical_labels(labeling.labels);
  int next = 0;
  for (int l : canon) next = std::max(next, l + 1);
  if (policy == NoisePolicy::AsSingletons) {
    for (auto& l : canon) {
      if (l == kNoise) l = next++;
    }
  }
  clusters = static_cast<std::size_t>(next);
  return canon;
}

}  // namespace detail

/// s(i) = (b - a) / max(a, b), with a the mean distance to the rest of i's cluster and b the smallest
/// mean distance to another cluster. Members of singleton clusters score 0, as do points with a = b = 0.
inline SilhouetteReport silhouette(const ClusterLabeling& labeling, const DistanceMatrix& d,
                                   NoisePolicy policy = NoisePolicy::Exclude) {
  const std::size_t n = d.size();
  if (labeling.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "labeling covers " + std::to_string(labeling.size()) +
                                                  " points, matrix " + std::to_string(n));
  }
  SilhouetteReport report;
  report.metric = d.metric();
  report.noise_policy = policy;
  report.per_point.assign(n, std::nullopt);

  std::size_t clusters = 0;
  auto labels = detail::effective_labels(labeling, policy, clusters);
  report.clusters = clusters;

  std::vector<std::size_t> sizes(clusters, 0);
  std::size_t included = 0;
  for (int l : labels) {
    if (l == kNoise) continue;
    ++sizes[static_cast<std::size_t>(l)];
    ++included;
  }
  if (included == 0) throw Error(ErrorCode::EmptyEvaluation, "no points left to evaluate");
  if (clusters < 2) {
    report.degenerate = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != kNoise) report.per_point[i] = 0.0;
    }
    report.mean = 0.0;
    return report;
  }

  std::vector<double> sums(clusters);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == kNoise) continue;
    const auto own = static_cast<std::size_t>(labels[i]);
    double s = 0.0;
    if (sizes[own] > 1) {
      std::fill(sums.begin(), sums.end(), 0.0);
      auto row = d.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] == kNoise || j == i) continue;
        sums[static_cast<std::size_t>(labels[j])] += row[j];
      }
      double a = sums[own] / static_cast<double>(sizes[own] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < clusters; ++c) {
        if (c == own || sizes[c] == 0) continue;
        b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
      }
      double denom = std::max(a, b);
      s = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    report.per_point[i] = s;
    total += s;
  }
  report.mean = total / static_cast<double>(included);
  return report;
}

inline double silhouette_score(const ClusterLabeling& labeling, const DistanceMatrix& d,
                               NoisePolicy policy = NoisePolicy::Exclude) {
  return silhouette(labeling, d, policy).mean;
}

/// s(i) for one point; nullopt when the point is excluded as noise or fewer than two clusters exist.
inline std::optional<double> silhouette_point(std::size_t i, const ClusterLabeling& labeling, const DistanceMatrix& d,
                                              NoisePolicy policy = NoisePolicy::Exclude) {
  if (i >= d.size()) throw Error(ErrorCode::InvalidArgument, "point index out of range");
  auto report = silhouette(labeling, d, policy);
  if (report.degenerate) return std::nullopt;
  return report.per_point[i];
}

}  // namespace topicbench

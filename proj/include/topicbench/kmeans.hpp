#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "topicbench/embedding.hpp"
#include "topicbench/error.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/metricspace.hpp"
#include "topicbench/rng.hpp"

namespace topicbench {

/// Non-owning row-major view of n points in `dim` dimensions.
struct RowView {
  std::span<const double> data;
  std::size_t n = 0;
  std::size_t dim = 0;

  RowView(std::span<const double> d, std::size_t rows, std::size_t cols) : data(d), n(rows), dim(cols) {
    if (data.size() != n * dim) throw Error(ErrorCode::DimensionMismatch, "row view size");
  }
  RowView(const EmbeddedChunk& chunk) : RowView(chunk.data, chunk.rows(), chunk.dim) {}  // NOLINT

  std::span<const double> row(std::size_t i) const { return data.subspan(i * dim, dim); }
};

struct KMeansOptions {
  std::size_t max_iter = 300;
};

struct KMeansResult {
  ClusterLabeling labeling;
  std::vector<double> centroids;          // k x dim, row-major
  std::vector<double> objective_history;  // objective after every completed iteration
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

class KMeansSolver {
 public:
  KMeansSolver(RowView rows, bool spherical, std::size_t k)
      : n_(rows.n), dim_(rows.dim), k_(k), spherical_(spherical), x_(rows.data.begin(), rows.data.end()),
        centroids_(k * rows.dim, 0.0), labels_(rows.n, -1) {
    if (spherical_) {
      for (std::size_t i = 0; i < n_; ++i) {
        auto r = point(i);
        double norm2 = squared_norm(r);
        if (norm2 == 0.0) throw Error(ErrorCode::ZeroNorm, "spherical k-means on zero-norm row " + std::to_string(i));
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& v : r) v *= inv;
      }
    }
  }

  KMeansResult run(std::uint64_t seed, const KMeansOptions& options) {
    Rng rng(seed);
    seed_plus_plus(rng);
    KMeansResult result;
    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
      bool changed = assign();
      if (iter > 0 && !changed) {
        result.converged = true;
        break;
      }
      update_centroids();
      fill_empty_clusters();
      result.objective_history.push_back(objective());
      result.iterations = iter + 1;
    }
    result.labeling.labels = labels_;
    result.labeling.k = k_;
    result.centroids = centroids_;
    return result;
  }

 private:
  std::span<double> point(std::size_t i) { return std::span(x_).subspan(i * dim_, dim_); }
  std::span<const double> point(std::size_t i) const { return std::span(x_).subspan(i * dim_, dim_); }
  std::span<double> centroid(std::size_t c) { return std::span(centroids_).subspan(c * dim_, dim_); }
  std::span<const double> centroid(std::size_t c) const { return std::span(centroids_).subspan(c * dim_, dim_); }

  // squared euclidean, or 1 - cos for unit vectors
  double dissimilarity(std::span<const double> a, std::span<const double> b) const {
    if (spherical_) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dim_; ++d) dot += a[d] * b[d];
      return std::max(0.0, 1.0 - dot);
    }
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      double diff = a[d] - b[d];
      s += diff * diff;
    }
    return s;
  }

  // k-means++: first centre uniform, then proportional to the dissimilarity to the nearest chosen centre.
  void seed_plus_plus(Rng& rng) {
    std::vector<bool> chosen(n_, false);
    std::vector<double> nearest(n_, std::numeric_limits<double>::infinity());
    std::size_t first = rng.index(n_);
    for (std::size_t c = 0; c < k_; ++c) {
      std::size_t pick = first;
      if (c > 0) {
        double total = 0.0;
        for (std::size_t i = 0; i < n_; ++i) total += chosen[i] ? 0.0 : nearest[i];
        pick = n_;
        if (total > 0.0) {
          double target = rng.uniform() * total;
          double cumulative = 0.0;
          for (std::size_t i = 0; i < n_; ++i) {
            if (chosen[i] || nearest[i] == 0.0) continue;
            cumulative += nearest[i];
            pick = i;
            if (cumulative > target) break;
          }
        }
        if (pick == n_) {
          // every remaining point coincides with a centre
          for (std::size_t i = 0; i < n_; ++i) {
            if (!chosen[i]) {
              pick = i;
              break;
            }
          }
        }
      }
      chosen[pick] = true;
      auto dst = centroid(c);
      auto src = point(pick);
      std::copy(src.begin(), src.end(), dst.begin());
      for (std::size_t i = 0; i < n_; ++i) nearest[i] = std::min(nearest[i], dissimilarity(point(i), dst));
    }
  }

  bool assign() {
    bool changed = false;
    for (std::size_t i = 0; i < n_; ++i) {
      auto p = point(i);
      int best = 0;
      double best_d = dissimilarity(p, centroid(0));
      for (std::size_t c = 1; c < k_; ++c) {
        double d = dissimilarity(p, centroid(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (labels_[i] != best) {
        labels_[i] = best;
        changed = true;
      }
    }
    return changed;
  }

  void recompute_centroid(std::size_t c) {
    std::vector<double> sum(dim_, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (labels_[i] != static_cast<int>(c)) continue;
      auto p = point(i);
      for (std::size_t d = 0; d < dim_; ++d) sum[d] += p[d];
      ++count;
    }
    if (count == 0) return;
    auto dst = centroid(c);
    if (spherical_) {
      double norm2 = squared_norm(sum);
      if (norm2 == 0.0) return;  // mean direction undefined; keep the previous centre
      double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t d = 0; d < dim_; ++d) dst[d] = sum[d] * inv;
    } else {
      for (std::size_t d = 0; d < dim_; ++d) dst[d] = sum[d] / static_cast<double>(count);
    }
  }

  void update_centroids() {
    for (std::size_t c = 0; c < k_; ++c) recompute_centroid(c);
  }

  // An empty cluster takes the point farthest from its own centre among clusters with more than one member.
  void fill_empty_clusters() {
    std::vector<std::size_t> sizes(k_, 0);
    for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < k_; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t victim = n_;
      double worst = -1.0;
      for (std::size_t i = 0; i < n_; ++i) {
        auto owner = static_cast<std::size_t>(labels_[i]);
        if (sizes[owner] < 2) continue;
        double d = dissimilarity(point(i), centroid(owner));
        if (d > worst) {
          worst = d;
          victim = i;
        }
      }
      if (victim == n_) break;  // cannot happen while k <= n
      auto donor = static_cast<std::size_t>(labels_[victim]);
      labels_[victim] = static_cast<int>(c);
      --sizes[donor];
      ++sizes[c];
      auto src = point(victim);
      auto dst = centroid(c);
      std::copy(src.begin(), src.end(), dst.begin());
      recompute_centroid(donor);
    }
  }

  double objective() const {
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      total += dissimilarity(point(i), centroid(static_cast<std::size_t>(labels_[i])));
    }
    return total;
  }

  std::size_t n_, dim_, k_;
  bool spherical_;
  std::vector<double> x_;
  std::vector<double> centroids_;
  std::vector<int> labels_;
};

}  // namespace detail

/// Lloyd's k-means with k-means++ seeding. Under cosine the spherical variant runs: rows and centres are
/// unit-normalized and the objective is the summed cosine distance. Equal-distance ties go to the lower
/// centre index.
inline KMeansResult kmeans_detailed(RowView rows, MetricId metric, std::size_t k, std::uint64_t seed,
                                    const KMeansOptions& options = {}) {
  if (k < 1 || k > rows.n) {
    throw Error(ErrorCode::InvalidArgument, "k-means needs 1 <= k <= n (k=" + std::to_string(k) +
                                                ", n=" + std::to_string(rows.n) + ")");
  }
  detail::KMeansSolver solver(rows, metric == MetricId::Cosine, k);
  auto result = solver.run(seed, options);
  result.labeling.method = ClustererId::KMeans;
  result.labeling.params = KMeansParams{k};
  result.labeling.seed = seed;
  return result;
}

inline ClusterLabeling kmeans(RowView rows, MetricId metric, std::size_t k, std::uint64_t seed) {
  return kmeans_detailed(rows, metric, k, seed).labeling;
}

}  // namespace topicbench

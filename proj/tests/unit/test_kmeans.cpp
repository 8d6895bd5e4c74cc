#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "topicbench/kmeans.hpp"
#include "topicbench/rng.hpp"

namespace tb = topicbench;
using tb::MetricId;

namespace {

struct Points {
  std::vector<double> data;
  std::size_t n = 0;
  std::size_t dim = 0;

  tb::RowView view() const { return tb::RowView(data, n, dim); }
};

Points gaussian_blobs(std::uint64_t seed, std::size_t per_blob, std::vector<std::vector<double>> centres, double sd) {
  tb::Rng rng(seed);
  Points p;
  p.dim = centres.front().size();
  for (const auto& c : centres) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      for (double x : c) p.data.push_back(x + sd * rng.normal());
      ++p.n;
    }
  }
  return p;
}

double sse(const Points& p, const std::vector<int>& labels, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    std::vector<double> mean(p.dim, 0.0);
    int count = 0;
    for (std::size_t i = 0; i < p.n; ++i) {
      if (labels[i] != c) continue;
      for (std::size_t d = 0; d < p.dim; ++d) mean[d] += p.data[i * p.dim + d];
      ++count;
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    for (auto& m : mean) m /= count;
    for (std::size_t i = 0; i < p.n; ++i) {
      if (labels[i] != c) continue;
      for (std::size_t d = 0; d < p.dim; ++d) total += std::pow(p.data[i * p.dim + d] - mean[d], 2);
    }
  }
  return total;
}

}  // namespace

TEST(KMeans, KEqualsNIsZeroObjective) {
  auto p = gaussian_blobs(1, 6, {{0, 0}}, 1.0);
  auto r = tb::kmeans_detailed(p.view(), MetricId::EuclideanNormalized, 6, 3);
  EXPECT_EQ(tb::count_clusters(r.labeling.labels), 6u);
  EXPECT_EQ(r.objective_history.back(), 0.0);
}

TEST(KMeans, TwoGroupsMatchBruteForceOptimum) {
  auto p = gaussian_blobs(2, 5, {{0, 0}, {10, 10}}, 0.5);
  auto labels = tb::kmeans(p.view(), MetricId::EuclideanNormalized, 2, 17).labels;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_labels;
  for (unsigned mask = 1; mask < (1u << p.n) - 1; ++mask) {
    std::vector<int> l(p.n);
    for (std::size_t i = 0; i < p.n; ++i) l[i] = (mask >> i) & 1u;
    double v = sse(p, l, 2);
    if (v < best) {
      best = v;
      best_labels = l;
    }
  }
  EXPECT_TRUE(tb::same_partition(labels, best_labels));
  EXPECT_TRUE(tb::same_partition(labels, std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
}

TEST(KMeans, Deterministic) {
  auto p = gaussian_blobs(3, 30, {{0, 0, 0}, {1, 1, 0}, {0, 1, 1}}, 0.6);
  for (auto metric : {MetricId::EuclideanNormalized, MetricId::Cosine}) {
    auto a = tb::kmeans_detailed(p.view(), metric, 4, 99);
    auto b = tb::kmeans_detailed(p.view(), metric, 4, 99);
    EXPECT_EQ(a.labeling, b.labeling);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.objective_history, b.objective_history);
  }
}

TEST(KMeans, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto p = gaussian_blobs(seed, 25, {{0, 0, 0}, {2, 0, 1}, {0, 2, -1}, {1, 1, 1}}, 1.0);
    for (auto metric : {MetricId::EuclideanNormalized, MetricId::Cosine}) {
      auto r = tb::kmeans_detailed(p.view(), metric, 2 + seed % 9, seed * 31 + 7);
      for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
        ASSERT_LE(r.objective_history[i], r.objective_history[i - 1]) << "seed " << seed;
      }
    }
  }
}

TEST(KMeans, EveryClusterNonEmptyWithDuplicates) {
  Points p;
  p.dim = 2;
  for (int i = 0; i < 8; ++i) {
    p.data.push_back(i < 6 ? 1.0 : 5.0);
    p.data.push_back(0.0);
    ++p.n;
  }
  auto r = tb::kmeans(p.view(), MetricId::EuclideanNormalized, 4, 5);
  EXPECT_EQ(tb::count_clusters(r.labels), 4u);
}

TEST(KMeans, SphericalIgnoresMagnitude) {
  Points p;
  p.dim = 2;
  const double rows[][2] = {{1, 0.05}, {10, 0.2}, {0.3, 0.01}, {0.05, 1}, {0.1, 7}, {0.01, 0.2}};
  for (const auto& r : rows) {
    p.data.insert(p.data.end(), {r[0], r[1]});
    ++p.n;
  }
  auto labels = tb::kmeans(p.view(), MetricId::Cosine, 2, 1).labels;
  EXPECT_TRUE(tb::same_partition(labels, std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(KMeans, InvalidK) {
  auto p = gaussian_blobs(1, 3, {{0, 0}}, 1.0);
  EXPECT_THROW(tb::kmeans(p.view(), MetricId::EuclideanNormalized, 4, 1), tb::Error);
  EXPECT_THROW(tb::kmeans(p.view(), MetricId::EuclideanNormalized, 0, 1), tb::Error);
}

TEST(KMeans, ZeroRowUnderCosine) {
  Points p{{0, 0, 1, 1, 2, 0}, 3, 2};
  EXPECT_THROW(tb::kmeans(p.view(), MetricId::Cosine, 2, 1), tb::Error);
}

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/density.hpp"
#include "topicbench/embedding.hpp"
#include "topicbench/error.hpp"
#include "topicbench/evaluation.hpp"
#include "topicbench/jarvis_patrick.hpp"
#include "topicbench/kmeans.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/metricspace.hpp"
#include "topicbench/rng.hpp"
#include "topicbench/spectral.hpp"

namespace topicbench {

// --- tuning grids ------------------------------------------------------------------------------------

/// DBSCAN radii 0.1, 0.2, ..., 5.0, computed as i/10 so each value is the double nearest its decimal.
inline std::vector<double> default_eps_values() {
  std::vector<double> eps;
  for (int i = 1; i <= 50; ++i) eps.push_back(static_cast<double>(i) / 10.0);
  return eps;
}

/// Default tuning domains: k-means/spectral k in 2..49, DBSCAN eps x MinPts in {0.1..5.0} x 2..49,
/// OPTICS MinPts in 2..49, Jarvis-Patrick k in 10..100 with 1 <= k_t <= k.
inline std::vector<ClusterParams> default_grid(ClustererId id) {
  std::vector<ClusterParams> grid;
  switch (id) {
    case ClustererId::KMeans:
      for (std::size_t k = 2; k <= 49; ++k) grid.emplace_back(KMeansParams{k});
      break;
    case ClustererId::Dbscan:
      for (double eps : default_eps_values()) {
        for (std::size_t m = 2; m <= 49; ++m) grid.emplace_back(DbscanParams{eps, m});
      }
      break;
    case ClustererId::Optics:
      for (std::size_t m = 2; m <= 49; ++m) grid.emplace_back(OpticsParams{m});
      break;
    case ClustererId::Spectral:
      for (std::size_t k = 2; k <= 49; ++k) grid.emplace_back(SpectralParams{k});
      break;
    case ClustererId::JarvisPatrick:
      for (std::size_t k = 10; k <= 100; ++k) {
        for (std::size_t kt = 1; kt <= k; ++kt) grid.emplace_back(JarvisPatrickParams{k, kt});
      }
      break;
  }
  return grid;
}

// --- records -----------------------------------------------------------------------------------------

/// "ok", "degenerate" (fewer than two clusters, score 0), or the error code of a failed run (score 0).
using RunStatus = std::string;

inline constexpr std::string_view kStatusOk = "ok";
inline constexpr std::string_view kStatusDegenerate = "degenerate";

struct ExperimentRecord {
  std::string embedder;
  MetricId metric = MetricId::EuclideanNormalized;
  ClustererId clusterer = ClustererId::KMeans;
  ClusterParams params;
  double score = 0.0;
  RunStatus status{kStatusOk};
  std::size_t clusters = 0;
  std::size_t noise = 0;

  bool failed() const { return status != kStatusOk && status != kStatusDegenerate; }
  bool operator==(const ExperimentRecord&) const = default;
};

struct ResultRecord {
  std::string embedder;
  MetricId metric = MetricId::EuclideanNormalized;
  ClustererId clusterer = ClustererId::KMeans;
  std::optional<ClusterParams> best_params;  // absent for imported results without parameters
  double score = 0.0;
  RunStatus status{kStatusOk};

  bool failed() const { return status != kStatusOk && status != kStatusDegenerate; }
  bool operator==(const ResultRecord&) const = default;
};

// --- plan --------------------------------------------------------------------------------------------

struct ExperimentPlan {
  std::vector<std::shared_ptr<const Embedder>> embedders;
  std::vector<MetricId> metrics{MetricId::EuclideanNormalized, MetricId::Cosine};
  std::vector<ClustererId> clusterers{std::begin(kAllClusterers), std::end(kAllClusterers)};
  std::map<ClustererId, std::vector<ClusterParams>> grids;  // clusterers without an entry use default_grid
  std::uint64_t seed = 0;
  Chunk chunk;
  NoisePolicy noise_policy = NoisePolicy::Exclude;
  std::string provenance;  // source hashes etc.; part of the resume fingerprint

  std::vector<ClusterParams> grid(ClustererId id) const {
    auto it = grids.find(id);
    return it == grids.end() ? default_grid(id) : it->second;
  }

  std::size_t combinations() const { return embedders.size() * metrics.size() * clusterers.size(); }
};

inline void validate(const ExperimentPlan& plan) {
  if (plan.embedders.empty() || plan.metrics.empty() || plan.clusterers.empty()) {
    throw Error(ErrorCode::InvalidArgument, "plan needs at least one embedder, metric and clusterer");
  }
  std::set<std::string> ids;
  for (const auto& e : plan.embedders) {
    if (!ids.insert(e->spec().id).second) throw Error(ErrorCode::Duplicate, "embedder id '" + e->spec().id + "'");
  }
  for (auto c : plan.clusterers) {
    auto grid = plan.grid(c);
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid for " + std::string(to_string(c)));
    for (const auto& p : grid) {
      if (clusterer_of(p) != c) throw Error(ErrorCode::InvalidArgument, "grid of " + std::string(to_string(c)) +
                                                                            " holds foreign parameters");
      validate(p);
    }
  }
}

/// Seed of one experiment, a pure function of the master seed and the experiment's coordinates.
inline std::uint64_t experiment_seed(std::uint64_t master, std::string_view embedder, MetricId metric,
                                     const ClusterParams& params) {
  std::uint64_t s = mix_seed(master, io::fnv1a64(embedder));
  s = mix_seed(s, static_cast<std::uint64_t>(metric));
  s = mix_seed(s, static_cast<std::uint64_t>(params.index()));
  return mix_seed(s, io::fnv1a64(format_params(params)));
}

// --- cached inputs -----------------------------------------------------------------------------------

/// Lazily built per-plan inputs: embeddings once for all embedders, then per (embedder, metric) the
/// distance matrix and the structures each clusterer reuses across its grid.
class Workspace {
 public:
  explicit Workspace(const ExperimentPlan& plan) : plan_(plan) {}

  const ExperimentPlan& plan() const { return plan_; }

  const std::vector<EmbeddedChunk>& embedded() {
    if (!embedded_) embedded_ = embed_chunk(plan_.chunk, plan_.embedders);
    return *embedded_;
  }

  const EmbeddedChunk& embedded(std::size_t i) { return embedded().at(i); }

  const DistanceMatrix& distances(std::size_t i, std::size_t j) { return slot(i, j).distances(*this, i, j); }

  const NeighborOrder& neighbors(std::size_t i, std::size_t j) {
    auto& s = slot(i, j);
    if (!s.neighbors) s.neighbors = std::make_unique<NeighborOrder>(distances(i, j));
    return *s.neighbors;
  }

  const SharedNeighborIndex& shared_neighbors(std::size_t i, std::size_t j) {
    auto& s = slot(i, j);
    if (!s.shared) s.shared = std::make_unique<SharedNeighborIndex>(neighbors(i, j));
    return *s.shared;
  }

  /// Mutual-knn edges for one k; only the most recent k is kept per slot (grids are k-major).
  const std::vector<SharedNeighborIndex::Edge>& jp_edges(std::size_t i, std::size_t j, std::size_t k) {
    auto& s = slot(i, j);
    if (s.edges_k != k) {
      s.edges = shared_neighbors(i, j).mutual_edges(k);
      s.edges_k = k;
    }
    return s.edges;
  }

  const SpectralDecomposition& spectral(std::size_t i, std::size_t j) {
    auto& s = slot(i, j);
    if (s.spectral_error) std::rethrow_exception(s.spectral_error);
    if (!s.spectral) {
      try {
        s.spectral = std::make_unique<SpectralDecomposition>(spectral_decompose(to_similarity(distances(i, j))));
      } catch (const Error&) {
        s.spectral_error = std::current_exception();
        throw;
      }
    }
    return *s.spectral;
  }

 private:
  struct Slot {
    std::unique_ptr<DistanceMatrix> matrix;
    std::exception_ptr matrix_error;
    std::unique_ptr<NeighborOrder> neighbors;
    std::unique_ptr<SharedNeighborIndex> shared;
    std::vector<SharedNeighborIndex::Edge> edges;
    std::size_t edges_k = 0;
    std::unique_ptr<SpectralDecomposition> spectral;
    std::exception_ptr spectral_error;

    const DistanceMatrix& distances(Workspace& ws, std::size_t i, std::size_t j) {
      if (matrix_error) std::rethrow_exception(matrix_error);
      if (!matrix) {
        try {
          matrix = std::make_unique<DistanceMatrix>(build_distance_matrix(ws.embedded(i), ws.plan_.metrics.at(j)));
        } catch (const Error&) {
          matrix_error = std::current_exception();
          throw;
        }
      }
      return *matrix;
    }
  };

  Slot& slot(std::size_t i, std::size_t j) { return slots_[{i, j}]; }

  const ExperimentPlan& plan_;
  std::optional<std::vector<EmbeddedChunk>> embedded_;
  std::map<std::pair<std::size_t, std::size_t>, Slot> slots_;
};

// --- experiments -------------------------------------------------------------------------------------

/// Clustering of one grid point, using the workspace caches.
inline ClusterLabeling cluster_once(Workspace& ws, std::size_t i, std::size_t j, const ClusterParams& params) {
  const auto& plan = ws.plan();
  const auto seed = experiment_seed(plan.seed, plan.embedders.at(i)->spec().id, plan.metrics.at(j), params);
  const auto metric = plan.metrics.at(j);
  ClusterLabeling labeling = std::visit(
      [&](const auto& p) -> ClusterLabeling {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, KMeansParams>) {
          // matrix first, so a degenerate chunk fails the same way for every clusterer
          ws.distances(i, j);
          return kmeans(RowView(ws.embedded(i)), metric, p.k, seed);
        } else if constexpr (std::is_same_v<P, DbscanParams>) {
          return dbscan(ws.neighbors(i, j), p.eps, p.min_pts);
        } else if constexpr (std::is_same_v<P, OpticsParams>) {
          return optics(ws.neighbors(i, j), p.min_pts).labeling;
        } else if constexpr (std::is_same_v<P, SpectralParams>) {
          return spectral_cluster(ws.spectral(i, j), p.k, seed);
        } else {
          validate(ClusterParams{p});
          ws.shared_neighbors(i, j).check_k(p.k);
          return jarvis_patrick_components(ws.distances(i, j).size(), ws.jp_edges(i, j, p.k), p.k, p.k_t);
        }
      },
      params);
  labeling.params = params;
  labeling.seed = seed;
  return labeling;
}

/// Embeds (cached per embedder), builds the matrix (cached per embedder and metric), clusters and scores.
/// Degenerate chunks, empty evaluations, disconnected affinities and out-of-range parameters become a
/// recorded failure with score 0.
inline ExperimentRecord run_experiment(Workspace& ws, std::size_t i, std::size_t j, const ClusterParams& params) {
  const auto& plan = ws.plan();
  ExperimentRecord rec;
  rec.embedder = plan.embedders.at(i)->spec().id;
  rec.metric = plan.metrics.at(j);
  rec.clusterer = clusterer_of(params);
  rec.params = params;
  try {
    auto labeling = cluster_once(ws, i, j, params);
    rec.clusters = count_clusters(labeling.labels);
    rec.noise = labeling.noise_count();
    auto report = silhouette(labeling, ws.distances(i, j), plan.noise_policy);
    rec.score = report.mean;
    rec.status = report.degenerate ? std::string(kStatusDegenerate) : std::string(kStatusOk);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::DegenerateChunk:
      case ErrorCode::EmptyEvaluation:
      case ErrorCode::DisconnectedPoint:
      case ErrorCode::InvalidArgument:
      case ErrorCode::ZeroNorm:
        rec.score = 0.0;
        rec.status = std::string(to_string(e.code()));
        break;
      default: throw;
    }
  }
  return rec;
}

struct TuneResult {
  ResultRecord result;
  std::vector<ExperimentRecord> experiments;  // grid order
};

/// True when `a` beats `b`: higher score, ties broken toward the smaller parameter.
inline bool better_experiment(const ExperimentRecord& a, const ExperimentRecord& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.params < b.params;
}

/// Argmax of the score over every grid point (failed points count as 0).
inline ResultRecord best_of(std::span<const ExperimentRecord> experiments) {
  if (experiments.empty()) throw Error(ErrorCode::InvalidArgument, "empty tuning slice");
  const ExperimentRecord* best = &experiments.front();
  for (const auto& e : experiments) {
    if (better_experiment(e, *best)) best = &e;
  }
  return ResultRecord{best->embedder, best->metric, best->clusterer, best->params, best->score, best->status};
}

inline TuneResult tune(Workspace& ws, std::size_t i, std::size_t j, ClustererId k) {
  auto grid = ws.plan().grid(k);
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid for " + std::string(to_string(k)));
  TuneResult out;
  out.experiments.reserve(grid.size());
  for (const auto& p : grid) out.experiments.push_back(run_experiment(ws, i, j, p));
  out.result = best_of(out.experiments);
  return out;
}

// --- factor analysis ---------------------------------------------------------------------------------

/// Factor levels in order of first appearance, and a lookup of the single record per cell.
struct ResultGrid {
  std::vector<std::string> embedders;
  std::vector<MetricId> metrics;
  std::vector<ClustererId> clusterers;
  std::map<std::tuple<std::string, MetricId, ClustererId>, double> scores;

  double at(const std::string& e, MetricId m, ClustererId c) const { return scores.at({e, m, c}); }
};

inline ResultGrid make_result_grid(std::span<const ResultRecord> results) {
  ResultGrid g;
  for (const auto& r : results) {
    if (std::find(g.embedders.begin(), g.embedders.end(), r.embedder) == g.embedders.end()) g.embedders.push_back(r.embedder);
    if (std::find(g.metrics.begin(), g.metrics.end(), r.metric) == g.metrics.end()) g.metrics.push_back(r.metric);
    if (std::find(g.clusterers.begin(), g.clusterers.end(), r.clusterer) == g.clusterers.end()) {
      g.clusterers.push_back(r.clusterer);
    }
    if (!g.scores.emplace(std::make_tuple(r.embedder, r.metric, r.clusterer), r.score).second) {
      throw Error(ErrorCode::Duplicate, "duplicate result for (" + r.embedder + ", " + std::string(to_string(r.metric)) +
                                            ", " + std::string(to_string(r.clusterer)) + ")");
    }
  }
  std::string missing;
  for (const auto& e : g.embedders) {
    for (auto m : g.metrics) {
      for (auto c : g.clusterers) {
        if (!g.scores.contains({e, m, c})) {
          missing += " (" + e + ", " + std::string(to_string(m)) + ", " + std::string(to_string(c)) + ")";
        }
      }
    }
  }
  if (!missing.empty()) throw Error(ErrorCode::IncompleteGrid, "missing cells:" + missing);
  if (g.scores.empty()) throw Error(ErrorCode::IncompleteGrid, "no results");
  return g;
}

struct MarginalReport {
  std::vector<std::pair<std::string, double>> by_embedder;
  std::vector<std::pair<MetricId, double>> by_metric;
  std::vector<std::pair<ClustererId, double>> by_clusterer;

  double embedder(std::string_view id) const {
    for (const auto& [k, v] : by_embedder) {
      if (k == id) return v;
    }
    throw Error(ErrorCode::InvalidArgument, "no embedder '" + std::string(id) + "'");
  }
  double metric(MetricId id) const {
    for (const auto& [k, v] : by_metric) {
      if (k == id) return v;
    }
    throw Error(ErrorCode::InvalidArgument, "no metric");
  }
  double clusterer(ClustererId id) const {
    for (const auto& [k, v] : by_clusterer) {
      if (k == id) return v;
    }
    throw Error(ErrorCode::InvalidArgument, "no clusterer");
  }
};

/// Mean score per level of each factor, averaging over every combination of the other two.
inline MarginalReport compute_marginals(std::span<const ResultRecord> results) {
  auto g = make_result_grid(results);
  MarginalReport report;
  for (const auto& e : g.embedders) {
    double sum = 0.0;
    for (auto m : g.metrics) {
      for (auto c : g.clusterers) sum += g.at(e, m, c);
    }
    report.by_embedder.emplace_back(e, sum / static_cast<double>(g.metrics.size() * g.clusterers.size()));
  }
  for (auto m : g.metrics) {
    double sum = 0.0;
    for (const auto& e : g.embedders) {
      for (auto c : g.clusterers) sum += g.at(e, m, c);
    }
    report.by_metric.emplace_back(m, sum / static_cast<double>(g.embedders.size() * g.clusterers.size()));
  }
  for (auto c : g.clusterers) {
    double sum = 0.0;
    for (const auto& e : g.embedders) {
      for (auto m : g.metrics) sum += g.at(e, m, c);
    }
    report.by_clusterer.emplace_back(c, sum / static_cast<double>(g.embedders.size() * g.metrics.size()));
  }
  return report;
}

/// Per (metric, clusterer) column, rank 1..|Emb| of each embedder by descending score; ties go to the
/// embedder listed first.
struct EmbeddingRanks {
  std::vector<std::string> embedders;
  std::vector<std::pair<MetricId, ClustererId>> columns;
  std::vector<std::vector<int>> ranks;  // ranks[column][embedder]

  int rank(std::string_view embedder, MetricId m, ClustererId c) const {
    for (std::size_t col = 0; col < columns.size(); ++col) {
      if (columns[col] != std::make_pair(m, c)) continue;
      for (std::size_t e = 0; e < embedders.size(); ++e) {
        if (embedders[e] == embedder) return ranks[col][e];
      }
    }
    throw Error(ErrorCode::InvalidArgument, "no such rank cell");
  }
};

inline EmbeddingRanks rank_embeddings(std::span<const ResultRecord> results) {
  auto g = make_result_grid(results);
  EmbeddingRanks out;
  out.embedders = g.embedders;
  for (auto m : g.metrics) {
    for (auto c : g.clusterers) {
      std::vector<std::size_t> order(g.embedders.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return g.at(g.embedders[a], m, c) > g.at(g.embedders[b], m, c);
      });
      std::vector<int> ranks(g.embedders.size());
      for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r + 1);
      out.columns.emplace_back(m, c);
      out.ranks.push_back(std::move(ranks));
    }
  }
  return out;
}

/// Per (embedder, clusterer): cosine ranks 1 only when it strictly beats normalized Euclidean.
struct MetricDuel {
  std::vector<std::string> embedders;
  std::vector<ClustererId> clusterers;
  std::vector<std::vector<int>> cosine_rank;  // [embedder][clusterer]

  std::size_t cosine_wins() const {
    std::size_t wins = 0;
    for (const auto& row : cosine_rank) wins += static_cast<std::size_t>(std::count(row.begin(), row.end(), 1));
    return wins;
  }
};

inline MetricDuel rank_metric_duel(std::span<const ResultRecord> results) {
  auto g = make_result_grid(results);
  auto has = [&](MetricId m) { return std::find(g.metrics.begin(), g.metrics.end(), m) != g.metrics.end(); };
  if (!has(MetricId::Cosine) || !has(MetricId::EuclideanNormalized)) {
    throw Error(ErrorCode::IncompleteGrid, "metric duel needs both cosine and euclidean-normalized results");
  }
  MetricDuel out;
  out.embedders = g.embedders;
  out.clusterers = g.clusterers;
  for (const auto& e : g.embedders) {
    std::vector<int> row;
    for (auto c : g.clusterers) {
      row.push_back(g.at(e, MetricId::Cosine, c) > g.at(e, MetricId::EuclideanNormalized, c) ? 1 : 2);
    }
    out.cosine_rank.push_back(std::move(row));
  }
  return out;
}

}  // namespace topicbench

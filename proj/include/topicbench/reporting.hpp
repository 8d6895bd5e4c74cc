#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/error.hpp"
#include "topicbench/harness.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/text_io.hpp"

namespace topicbench {

// --- results table -----------------------------------------------------------------------------------

inline constexpr std::string_view kResultsHeader =
    "clustering_method\tdistance_metric\tembedding_method\tbest_params\tsilhouette\tstatus";

inline std::string format_results_table(std::span<const ResultRecord> results) {
  if (results.empty()) throw Error(ErrorCode::InvalidArgument, "no results to emit");
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& r : results) {
    out += to_string(r.clusterer);
    out += '\t';
    out += to_string(r.metric);
    out += '\t';
    out += r.embedder;
    out += '\t';
    out += r.best_params ? format_params(*r.best_params) : "-";
    out += '\t';
    out += io::format_double(r.score);
    out += '\t';
    out += r.status;
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string record_where(std::size_t line_no) { return "line " + std::to_string(line_no); }

inline MetricId field_metric(std::string_view text, std::size_t line_no) {
  auto m = parse_metric(text);
  if (!m) throw Error(ErrorCode::Parse, record_where(line_no) + ": unknown metric '" + std::string(text) + "'");
  return *m;
}

inline ClustererId field_clusterer(std::string_view text, std::size_t line_no) {
  auto c = parse_clusterer(text);
  if (!c) throw Error(ErrorCode::Parse, record_where(line_no) + ": unknown clusterer '" + std::string(text) + "'");
  return *c;
}

inline double field_score(std::string_view text, std::size_t line_no) {
  auto v = io::parse_double(text);
  if (!v || !std::isfinite(*v)) {
    throw Error(ErrorCode::Parse, record_where(line_no) + ": bad silhouette '" + std::string(text) + "'");
  }
  return *v;
}

}  // namespace detail

/// Accepts the 6-column form written above and the 5-column form without a status column.
inline std::vector<ResultRecord> parse_results_table(std::span<const std::string> lines) {
  std::vector<ResultRecord> out;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    auto f = io::split(line, '\t');
    if (!header_seen) {
      header_seen = true;
      if (f.size() >= 5 && f[0] == "clustering_method") continue;
    }
    if (f.size() != 5 && f.size() != 6) {
      throw Error(ErrorCode::Parse, detail::record_where(i + 1) + ": expected 5 or 6 columns, got " +
                                        std::to_string(f.size()));
    }
    ResultRecord r;
    r.clusterer = detail::field_clusterer(f[0], i + 1);
    r.metric = detail::field_metric(f[1], i + 1);
    r.embedder = std::string(f[2]);
    if (r.embedder.empty()) throw Error(ErrorCode::Parse, detail::record_where(i + 1) + ": empty embedding_method");
    if (f[3] != "-") {
      try {
        r.best_params = parse_params(r.clusterer, f[3]);
      } catch (const Error& e) {
        throw Error(ErrorCode::Parse, detail::record_where(i + 1) + ": " + e.what());
      }
    }
    r.score = detail::field_score(f[4], i + 1);
    r.status = f.size() == 6 ? std::string(f[5]) : std::string(kStatusOk);
    out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(ErrorCode::Parse, "results table has no rows");
  return out;
}

inline std::vector<ResultRecord> read_results_table(const std::filesystem::path& path) {
  auto lines = io::read_lines(path);
  try {
    return parse_results_table(lines);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// --- experiment log ----------------------------------------------------------------------------------

inline constexpr std::string_view kExperimentsHeader =
    "embedding_method\tdistance_metric\tclustering_method\tparams\tsilhouette\tstatus\tclusters\tnoise";

inline std::string format_experiments(std::span<const ExperimentRecord> experiments) {
  std::string out(kExperimentsHeader);
  out += '\n';
  for (const auto& e : experiments) {
    out += e.embedder;
    out += '\t';
    out += to_string(e.metric);
    out += '\t';
    out += to_string(e.clusterer);
    out += '\t';
    out += format_params(e.params);
    out += '\t';
    out += io::format_double(e.score);
    out += '\t';
    out += e.status;
    out += '\t';
    out += std::to_string(e.clusters);
    out += '\t';
    out += std::to_string(e.noise);
    out += '\n';
  }
  return out;
}

inline std::vector<ExperimentRecord> parse_experiments(std::span<const std::string> lines) {
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line.front() == '#' || line == kExperimentsHeader) continue;
    auto f = io::split(line, '\t');
    if (f.size() != 8) {
      throw Error(ErrorCode::Parse, detail::record_where(i + 1) + ": expected 8 columns, got " + std::to_string(f.size()));
    }
    ExperimentRecord e;
    e.embedder = std::string(f[0]);
    e.metric = detail::field_metric(f[1], i + 1);
    e.clusterer = detail::field_clusterer(f[2], i + 1);
    e.params = parse_params(e.clusterer, f[3]);
    e.score = detail::field_score(f[4], i + 1);
    e.status = std::string(f[5]);
    auto clusters = io::parse_int<std::size_t>(f[6]);
    auto noise = io::parse_int<std::size_t>(f[7]);
    if (!clusters || !noise) throw Error(ErrorCode::Parse, detail::record_where(i + 1) + ": bad counts");
    e.clusters = *clusters;
    e.noise = *noise;
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<ExperimentRecord> read_experiments(const std::filesystem::path& path) {
  auto lines = io::read_lines(path);
  try {
    return parse_experiments(lines);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// --- analysis tables ---------------------------------------------------------------------------------

inline std::string format_marginals(const MarginalReport& m) {
  std::string out = "factor\tlevel\tmean_silhouette\n";
  for (const auto& [k, v] : m.by_embedder) out += "embedding\t" + k + '\t' + io::format_double(v) + '\n';
  for (const auto& [k, v] : m.by_metric) {
    out += "metric\t" + std::string(to_string(k)) + '\t' + io::format_double(v) + '\n';
  }
  for (const auto& [k, v] : m.by_clusterer) {
    out += "clustering\t" + std::string(to_string(k)) + '\t' + io::format_double(v) + '\n';
  }
  return out;
}

inline std::string format_embedding_ranks(const EmbeddingRanks& r) {
  std::string out = "embedding_method";
  for (const auto& [m, c] : r.columns) out += '\t' + std::string(to_string(m)) + '/' + std::string(to_string(c));
  out += '\n';
  for (std::size_t e = 0; e < r.embedders.size(); ++e) {
    out += r.embedders[e];
    for (const auto& col : r.ranks) out += '\t' + std::to_string(col[e]);
    out += '\n';
  }
  return out;
}

inline std::string format_metric_duel(const MetricDuel& d) {
  std::string out = "embedding_method";
  for (auto c : d.clusterers) out += '\t' + std::string(to_string(c));
  out += '\n';
  for (std::size_t e = 0; e < d.embedders.size(); ++e) {
    out += d.embedders[e];
    for (int rank : d.cosine_rank[e]) out += '\t' + std::to_string(rank);
    out += '\n';
  }
  return out;
}

// --- sweeps ------------------------------------------------------------------------------------------

namespace detail {

inline std::vector<const ExperimentRecord*> slice_of(std::span<const ExperimentRecord> experiments,
                                                     std::string_view embedder, MetricId metric, ClustererId clusterer) {
  std::vector<const ExperimentRecord*> rows;
  for (const auto& e : experiments) {
    if (e.embedder == embedder && e.metric == metric && e.clusterer == clusterer) rows.push_back(&e);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no experiments for (" + std::string(embedder) + ", " +
                                                std::string(to_string(metric)) + ", " +
                                                std::string(to_string(clusterer)) + ")");
  }
  return rows;
}

}  // namespace detail

/// Score against the single tuned parameter, ascending. Only for k-means, OPTICS and spectral.
inline std::string emit_sweep(std::span<const ExperimentRecord> experiments, std::string_view embedder,
                              MetricId metric, ClustererId clusterer) {
  auto name = single_parameter_name(clusterer);
  if (!name) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(clusterer)) + " has more than one tuned parameter");
  }
  auto rows = detail::slice_of(experiments, embedder, metric, clusterer);
  std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRecord* a, const ExperimentRecord* b) {
    return single_parameter_value(a->params) < single_parameter_value(b->params);
  });
  std::string out = std::string(*name) + "\tsilhouette\tstatus\n";
  for (const auto* r : rows) {
    out += io::format_double(single_parameter_value(r->params)) + '\t' + io::format_double(r->score) + '\t' +
           r->status + '\n';
  }
  return out;
}

/// Jarvis-Patrick scores as a k x k_t grid. Cells with k_t > k, or not evaluated, print "NA".
inline std::string emit_heatgrid(std::span<const ExperimentRecord> experiments, std::string_view embedder,
                                 MetricId metric) {
  auto rows = detail::slice_of(experiments, embedder, metric, ClustererId::JarvisPatrick);
  std::map<std::size_t, std::map<std::size_t, double>> cells;
  std::size_t max_kt = 0;
  for (const auto* r : rows) {
    const auto& p = std::get<JarvisPatrickParams>(r->params);
    cells[p.k][p.k_t] = r->score;
    max_kt = std::max(max_kt, p.k_t);
  }
  std::string out = "k\\k_t";
  for (std::size_t kt = 1; kt <= max_kt; ++kt) out += '\t' + std::to_string(kt);
  out += '\n';
  for (const auto& [k, row] : cells) {
    out += std::to_string(k);
    for (std::size_t kt = 1; kt <= max_kt; ++kt) {
      auto it = row.find(kt);
      out += '\t';
      out += (kt > k || it == row.end()) ? std::string("NA") : io::format_double(it->second);
    }
    out += '\n';
  }
  return out;
}

// --- topics ------------------------------------------------------------------------------------------

struct TopicSummary {
  int cluster = 0;
  std::size_t size = 0;
  std::vector<std::pair<std::string, std::size_t>> top_words;  // descending count, ties lexicographic
};

/// Most frequent words per cluster, over the tweets at the labelled positions. Noise is skipped.
inline std::vector<TopicSummary> extract_topics(std::span<const CleanTweet* const> tweets,
                                                const ClusterLabeling& labeling, std::size_t top_n) {
  if (tweets.size() != labeling.size()) {
    throw Error(ErrorCode::DimensionMismatch, "labeling covers " + std::to_string(labeling.size()) + " points, " +
                                                  std::to_string(tweets.size()) + " tweets given");
  }
  std::map<int, std::unordered_map<std::string, std::size_t>> counts;
  std::map<int, std::size_t> sizes;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    int label = labeling.labels[i];
    if (label == kNoise) continue;
    ++sizes[label];
    auto& c = counts[label];
    for (const auto& w : tweets[i]->word_tokens) ++c[w];
  }
  std::vector<TopicSummary> out;
  for (auto& [label, c] : counts) {
    TopicSummary t;
    t.cluster = label;
    t.size = sizes[label];
    t.top_words.assign(c.begin(), c.end());
    std::sort(t.top_words.begin(), t.top_words.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (t.top_words.size() > top_n) t.top_words.resize(top_n);
    out.push_back(std::move(t));
  }
  return out;
}

/// Resolves retained ids against a chunk, in retained order.
inline std::vector<const CleanTweet*> tweets_by_id(const Chunk& chunk, std::span<const std::string> ids) {
  std::unordered_map<std::string_view, const CleanTweet*> index;
  for (const auto& t : chunk.tweets) index.emplace(t.id, &t);
  std::vector<const CleanTweet*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::MissingId, "tweet '" + id + "' is not in chunk " +
                                                                 std::to_string(chunk.chunk_id));
    out.push_back(it->second);
  }
  return out;
}

inline std::string format_topics(std::span<const TopicSummary> topics) {
  std::string out = "cluster\tsize\ttop_words\n";
  for (const auto& t : topics) {
    out += std::to_string(t.cluster) + '\t' + std::to_string(t.size) + '\t';
    for (std::size_t i = 0; i < t.top_words.size(); ++i) {
      if (i) out += ' ';
      out += t.top_words[i].first + ':' + std::to_string(t.top_words[i].second);
    }
    out += '\n';
  }
  return out;
}

}  // namespace topicbench

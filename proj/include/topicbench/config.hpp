#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicbench/corpus.hpp"
#include "topicbench/embedding.hpp"
#include "topicbench/error.hpp"
#include "topicbench/harness.hpp"
#include "topicbench/stopwords.hpp"
#include "topicbench/synthetic_corpus.hpp"
#include "topicbench/text_io.hpp"

namespace topicbench {

namespace detail {

using Json = nlohmann::json;

[[noreturn]] inline void config_error(const std::string& what) { throw Error(ErrorCode::Parse, "plan: " + what); }

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) config_error(std::string("missing '") + key + "'");
  return j.at(key);
}

// A list of integers, or {"from": a, "to": b} inclusive.
inline std::vector<std::size_t> int_values(const Json& j, const char* what) {
  std::vector<std::size_t> out;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer() || v.get<long long>() < 0) config_error(std::string(what) + " must hold non-negative integers");
      out.push_back(v.get<std::size_t>());
    }
  } else if (j.is_object()) {
    auto from = require(j, "from").get<std::size_t>();
    auto to = require(j, "to").get<std::size_t>();
    for (std::size_t v = from; v <= to; ++v) out.push_back(v);
  } else {
    config_error(std::string(what) + " must be a list or a {from, to} range");
  }
  if (out.empty()) config_error(std::string(what) + " is empty");
  return out;
}

// A list of radii, or {"tenths_from": a, "tenths_to": b} for a/10 .. b/10.
inline std::vector<double> eps_values(const Json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) config_error("eps must hold numbers");
      out.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    auto from = require(j, "tenths_from").get<int>();
    auto to = require(j, "tenths_to").get<int>();
    for (int i = from; i <= to; ++i) out.push_back(static_cast<double>(i) / 10.0);
  } else {
    config_error("eps must be a list or a {tenths_from, tenths_to} range");
  }
  if (out.empty()) config_error("eps is empty");
  return out;
}

inline std::vector<ClusterParams> grid_from_json(ClustererId id, const Json& j) {
  std::vector<ClusterParams> grid;
  switch (id) {
    case ClustererId::KMeans:
      for (auto k : int_values(require(j, "k"), "k")) grid.emplace_back(KMeansParams{k});
      break;
    case ClustererId::Spectral:
      for (auto k : int_values(require(j, "k"), "k")) grid.emplace_back(SpectralParams{k});
      break;
    case ClustererId::Optics:
      for (auto m : int_values(require(j, "min_pts"), "min_pts")) grid.emplace_back(OpticsParams{m});
      break;
    case ClustererId::Dbscan: {
      auto mins = int_values(require(j, "min_pts"), "min_pts");
      for (double eps : eps_values(require(j, "eps"))) {
        for (auto m : mins) grid.emplace_back(DbscanParams{eps, m});
      }
      break;
    }
    case ClustererId::JarvisPatrick: {
      auto ks = int_values(require(j, "k"), "k");
      std::vector<std::size_t> kts;
      if (j.contains("k_t")) kts = int_values(j.at("k_t"), "k_t");
      for (auto k : ks) {
        if (kts.empty()) {
          for (std::size_t kt = 1; kt <= k; ++kt) grid.emplace_back(JarvisPatrickParams{k, kt});
        } else {
          for (auto kt : kts) {
            if (kt <= k) grid.emplace_back(JarvisPatrickParams{k, kt});
          }
        }
      }
      break;
    }
  }
  for (const auto& p : grid) validate(p);
  return grid;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

/// Builds the chunk a plan clusters: either one chunk of a chunk file, or a generated corpus.
inline Chunk load_plan_chunk(const nlohmann::json& corpus, const std::filesystem::path& base, std::string& provenance) {
  using detail::require;
  if (corpus.contains("chunks")) {
    auto path = detail::resolve(base, require(corpus, "chunks").get<std::string>());
    auto chunks = read_chunks(path);
    const auto wanted = corpus.value("chunk", std::size_t{0});
    for (auto& c : chunks) {
      if (c.chunk_id == wanted) return std::move(c);
    }
    throw Error(ErrorCode::InvalidArgument, path.string() + " has no chunk " + std::to_string(wanted));
  }
  if (!corpus.contains("synthetic")) detail::config_error("corpus needs 'chunks' or 'synthetic'");
  const auto& s = corpus.at("synthetic");
  SyntheticCorpusOptions o;
  o.tweets = s.value("tweets", o.tweets);
  o.topics = s.value("topics", o.topics);
  o.vocabulary = s.value("vocabulary", o.vocabulary);
  o.min_words = s.value("min_words", o.min_words);
  o.max_words = s.value("max_words", o.max_words);
  o.shared_word_rate = s.value("shared_word_rate", o.shared_word_rate);
  o.decoration_rate = s.value("decoration_rate", o.decoration_rate);
  o.seed = s.value("seed", o.seed);
  auto tweets = generate_synthetic_tweets(o);
  StopwordSet stopwords =
      corpus.contains("stopwords") ? load_stopwords(detail::resolve(base, corpus.at("stopwords").get<std::string>()))
                                   : default_stopwords();
  ChunkOptions copt;
  copt.chunk_size = std::max<std::size_t>(2, o.tweets);
  copt.min_words = corpus.value("min_words", kDefaultMinWords);
  auto result = chunk_stream(tweets, stopwords, copt);
  if (result.chunks.empty()) throw Error(ErrorCode::InvalidArgument, "generated corpus left no tweets");
  provenance += "synthetic-corpus=" + s.dump() + '\n';
  return std::move(result.chunks.front());
}

/// Builds one embedder. File-backed embedders read word vectors ("<count> <dim>" header) for
/// word2vec/glove/fasttext or tab-separated sentence vectors for bert/t5.
inline std::shared_ptr<const Embedder> load_plan_embedder(const nlohmann::json& j, const std::filesystem::path& base,
                                                          std::string& provenance) {
  using detail::require;
  EmbedderSpec spec;
  spec.name = require(j, "name").get<std::string>();
  spec.id = j.value("id", spec.name);
  auto kind = published_kind(spec.name);
  if (!kind) detail::config_error("unknown embedder name '" + spec.name + "'");
  spec.kind = *kind;
  const bool check_dim = j.value("check_published_dim", true);

  if (spec.kind == EmbedderKind::Synthetic) {
    spec.dim = require(j, "dim").get<std::size_t>();
    if (spec.dim < 2) detail::config_error("synthetic embedder '" + spec.id + "' needs dim >= 2");
    return std::make_shared<SyntheticEmbedder>(spec, j.value("seed", std::uint64_t{0}));
  }

  auto path = detail::resolve(base, require(j, "path").get<std::string>());
  provenance += "source " + spec.id + "=" + io::hex64(io::fnv1a64(io::read_file(path))) + '\n';
  if (spec.kind == EmbedderKind::WordLevel) {
    auto table = std::make_shared<WordVectorTable>(load_word_vectors(path));
    spec.dim = table->dim();
    if (check_dim) validate(spec);
    return std::make_shared<WordLevelEmbedder>(spec, std::move(table));
  }
  auto vectors = std::make_shared<SentenceVectors>(load_sentence_vectors(path));
  spec.dim = vectors->dim;
  if (check_dim) validate(spec);
  return std::make_shared<SentenceLevelEmbedder>(spec, std::move(vectors));
}

/// Reads a JSON plan. Relative paths are taken from the plan file's directory.
inline ExperimentPlan load_plan(const nlohmann::json& j, const std::filesystem::path& base) {
  using detail::require;
  ExperimentPlan plan;
  try {
    plan.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("noise_policy")) {
      auto p = j.at("noise_policy").get<std::string>();
      if (p == "exclude") {
        plan.noise_policy = NoisePolicy::Exclude;
      } else if (p == "as-singletons") {
        plan.noise_policy = NoisePolicy::AsSingletons;
      } else {
        detail::config_error("unknown noise_policy '" + p + "'");
      }
    }
    plan.chunk = load_plan_chunk(require(j, "corpus"), base, plan.provenance);
    for (const auto& e : require(j, "embedders")) plan.embedders.push_back(load_plan_embedder(e, base, plan.provenance));
    if (j.contains("metrics")) {
      plan.metrics.clear();
      for (const auto& m : j.at("metrics")) {
        auto id = parse_metric(m.get<std::string>());
        if (!id) detail::config_error("unknown metric '" + m.get<std::string>() + "'");
        plan.metrics.push_back(*id);
      }
    }
    if (j.contains("clusterers")) {
      plan.clusterers.clear();
      for (const auto& c : j.at("clusterers")) {
        auto id = parse_clusterer(c.get<std::string>());
        if (!id) detail::config_error("unknown clusterer '" + c.get<std::string>() + "'");
        plan.clusterers.push_back(*id);
      }
    }
    if (j.contains("grids")) {
      for (const auto& [name, g] : j.at("grids").items()) {
        auto id = parse_clusterer(name);
        if (!id) detail::config_error("grid for unknown clusterer '" + name + "'");
        plan.grids[*id] = detail::grid_from_json(*id, g);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    detail::config_error(e.what());
  }
  validate(plan);
  return plan;
}

inline ExperimentPlan load_plan(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  return load_plan(j, path.parent_path());
}

}  // namespace topicbench

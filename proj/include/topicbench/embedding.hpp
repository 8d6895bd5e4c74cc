#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/error.hpp"
#include "topicbench/rng.hpp"
#include "topicbench/text_io.hpp"
#include "topicbench/utf8.hpp"

namespace topicbench {

using EmbeddingVector = std::vector<double>;

inline double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

/// Token -> vector table in insertion order. Keys are lowercase.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  const std::vector<std::string>& tokens() const { return order_; }

  const EmbeddingVector* find(std::string_view token) const {
    auto it = entries_.find(std::string(token));
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Returns false when the token is already present.
  bool insert(std::string token, EmbeddingVector values) {
    if (values.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "vector for '" + token + "'");
    auto [it, inserted] = entries_.emplace(token, std::move(values));
    if (inserted) order_.push_back(std::move(token));
    return inserted;
  }

  bool operator==(const WordVectorTable& other) const {
    if (dim_ != other.dim_ || order_ != other.order_) return false;
    for (const auto& t : order_) {
      if (entries_.at(t) != other.entries_.at(t)) return false;
    }
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
};

namespace detail {

inline std::string at_line(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

inline EmbeddingVector parse_values(std::span<const std::string_view> fields, const std::string& where) {
  EmbeddingVector values;
  values.reserve(fields.size());
  for (auto f : fields) {
    auto v = io::parse_double(f);
    if (!v) throw Error(ErrorCode::Parse, where + ": not a number: '" + std::string(f) + "'");
    if (!std::isfinite(*v)) throw Error(ErrorCode::NonFinite, where + ": non-finite value '" + std::string(f) + "'");
    values.push_back(*v);
  }
  return values;
}

}  // namespace detail

/// Text format: "<count> <dim>" header, then "token v1 ... v_dim" per line.
inline WordVectorTable parse_word_vectors(std::span<const std::string> lines, const std::filesystem::path& origin) {
  if (lines.empty()) throw Error(ErrorCode::Parse, origin.string() + ": missing header");
  auto header = io::split_ws(lines[0]);
  std::optional<std::size_t> count;
  std::optional<std::size_t> dim;
  if (header.size() == 2) {
    count = io::parse_int<std::size_t>(header[0]);
    dim = io::parse_int<std::size_t>(header[1]);
  }
  if (!count || !dim || *dim == 0) {
    throw Error(ErrorCode::Parse, detail::at_line(origin, 1) + ": malformed header '" + lines[0] + "'");
  }
  WordVectorTable table(*dim);
  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = io::split_ws(lines[i]);
    if (fields.empty()) continue;
    auto where = detail::at_line(origin, i + 1);
    if (fields.size() != *dim + 1) {
      throw Error(ErrorCode::DimensionMismatch, where + ": expected " + std::to_string(*dim) + " values, got " +
                                                    std::to_string(fields.size() - 1));
    }
    auto values = detail::parse_values(std::span(fields).subspan(1), where);
    if (!table.insert(utf8::to_lower(fields[0]), std::move(values))) {
      throw Error(ErrorCode::Duplicate, where + ": duplicate token '" + std::string(fields[0]) + "'");
    }
    ++rows;
  }
  if (rows != *count) {
    throw Error(ErrorCode::RowCount, origin.string() + ": header declares " + std::to_string(*count) + " rows, found " +
                                         std::to_string(rows));
  }
  return table;
}

inline WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  auto lines = io::read_lines(path);
  return parse_word_vectors(lines, path);
}

inline std::string format_word_vectors(const WordVectorTable& table) {
  std::string out = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
  for (const auto& token : table.tokens()) {
    out += token;
    for (double v : *table.find(token)) {
      out += ' ';
      out += io::format_double(v);
    }
    out += '\n';
  }
  return out;
}

/// Tweet id -> pooled vector, as exported for sentence-level models.
struct SentenceVectors {
  std::size_t dim = 0;
  std::vector<std::string> ids;
  std::unordered_map<std::string, EmbeddingVector> vectors;
  std::vector<std::string> metadata;  // "# ..." lines, e.g. the pooling choice
  std::vector<std::string> warnings;

  const EmbeddingVector* find(std::string_view id) const {
    auto it = vectors.find(std::string(id));
    return it == vectors.end() ? nullptr : &it->second;
  }
};

/// Text format: "tweet-id<TAB>v1 v2 ... v_dim" per line; lines starting with '#' are metadata.
inline SentenceVectors parse_sentence_vectors(std::span<const std::string> lines, const std::filesystem::path& origin) {
  SentenceVectors out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty()) continue;
    if (line.front() == '#') {
      out.metadata.push_back(line);
      continue;
    }
    auto where = detail::at_line(origin, i + 1);
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw Error(ErrorCode::Parse, where + ": expected '<id>\\t<values>'");
    std::string id = line.substr(0, tab);
    auto fields = io::split_ws(std::string_view(line).substr(tab + 1));
    if (fields.empty()) throw Error(ErrorCode::Parse, where + ": no values for '" + id + "'");
    if (out.dim == 0) out.dim = fields.size();
    if (fields.size() != out.dim) {
      throw Error(ErrorCode::DimensionMismatch, where + ": ragged row, expected " + std::to_string(out.dim) +
                                                    " values, got " + std::to_string(fields.size()));
    }
    auto values = detail::parse_values(fields, where);
    if (!out.vectors.emplace(id, std::move(values)).second) {
      throw Error(ErrorCode::Duplicate, where + ": duplicate id '" + id + "'");
    }
    out.ids.push_back(std::move(id));
  }
  if (out.ids.empty()) out.warnings.push_back(origin.string() + ": no sentence vectors");
  return out;
}

inline SentenceVectors load_sentence_vectors(const std::filesystem::path& path) {
  auto lines = io::read_lines(path);
  return parse_sentence_vectors(lines, path);
}

inline std::string format_sentence_vectors(std::span<const std::string> ids, std::span<const EmbeddingVector> rows) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    out += '\t';
    for (std::size_t d = 0; d < rows[i].size(); ++d) {
      if (d) out += ' ';
      out += io::format_double(rows[i][d]);
    }
    out += '\n';
  }
  return out;
}

/// Mean of the in-vocabulary word vectors; nullopt when no token is in the table.
inline std::optional<EmbeddingVector> compose_tweet_vector(const CleanTweet& tweet, const WordVectorTable& table) {
  if (table.empty()) throw Error(ErrorCode::InvalidArgument, "empty word-vector table");
  EmbeddingVector sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& token : tweet.word_tokens) {
    const auto* v = table.find(token);
    if (!v) continue;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += (*v)[d];
    ++hits;
  }
  if (hits == 0) return std::nullopt;
  for (auto& x : sum) x /= static_cast<double>(hits);
  return sum;
}

/// Seeded pseudo-random unit vector for a token.
inline EmbeddingVector synthetic_token_vector(std::string_view token, std::size_t dim, std::uint64_t seed) {
  Rng rng(mix_seed(seed, io::fnv1a64(token)));
  EmbeddingVector v(dim);
  double norm2 = 0.0;
  do {
    for (auto& x : v) x = rng.normal();
    norm2 = squared_norm(v);
  } while (norm2 == 0.0);
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

/// Test double: hash each token to a seeded unit vector, average, renormalize to unit length.
inline EmbeddingVector synthetic_embedder(const CleanTweet& tweet, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "synthetic embedder needs dim >= 2");
  EmbeddingVector sum(dim, 0.0);
  for (const auto& token : tweet.word_tokens) {
    auto v = synthetic_token_vector(token, dim, seed);
    for (std::size_t d = 0; d < dim; ++d) sum[d] += v[d];
  }
  double norm2 = squared_norm(sum);
  if (norm2 == 0.0) {
    // no tokens, or tokens cancelling exactly: fall back to the seed's own direction
    return synthetic_token_vector("", dim, seed);
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : sum) x *= inv;
  return sum;
}

enum class EmbedderKind { WordLevel, SentenceLevel, Synthetic };

inline std::string_view to_string(EmbedderKind kind) {
  switch (kind) {
    case EmbedderKind::WordLevel: return "word-level";
    case EmbedderKind::SentenceLevel: return "sentence-level";
    case EmbedderKind::Synthetic: return "synthetic";
  }
  return "synthetic";
}

/// Published vector sizes of the five pretrained models.
inline std::optional<std::size_t> published_dimension(std::string_view name) {
  if (name == "word2vec" || name == "fasttext") return 400;
  if (name == "glove") return 200;
  if (name == "bert" || name == "t5") return 768;
  return std::nullopt;
}

inline std::optional<EmbedderKind> published_kind(std::string_view name) {
  if (name == "word2vec" || name == "fasttext" || name == "glove") return EmbedderKind::WordLevel;
  if (name == "bert" || name == "t5") return EmbedderKind::SentenceLevel;
  if (name == "synthetic") return EmbedderKind::Synthetic;
  return std::nullopt;
}

struct EmbedderSpec {
  std::string id;    // label used in result records; unique within a plan
  std::string name;  // word2vec | fasttext | glove | bert | t5 | synthetic
  EmbedderKind kind = EmbedderKind::Synthetic;
  std::size_t dim = 0;

  bool operator==(const EmbedderSpec&) const = default;
};

inline void validate(const EmbedderSpec& spec) {
  auto kind = published_kind(spec.name);
  if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown embedder '" + spec.name + "'");
  if (*kind != spec.kind) throw Error(ErrorCode::InvalidArgument, "embedder '" + spec.name + "' has the wrong kind");
  if (auto dim = published_dimension(spec.name); dim && *dim != spec.dim) {
    throw Error(ErrorCode::DimensionMismatch, "embedder '" + spec.name + "' must have dim " + std::to_string(*dim) +
                                                  ", got " + std::to_string(spec.dim));
  }
  if (spec.dim == 0) throw Error(ErrorCode::InvalidArgument, "embedder '" + spec.id + "' has dim 0");
}

class Embedder {
 public:
  explicit Embedder(EmbedderSpec spec) : spec_(std::move(spec)) {}
  virtual ~Embedder() = default;

  const EmbedderSpec& spec() const { return spec_; }

  /// nullopt marks the tweet out-of-vocabulary for this embedder.
  virtual std::optional<EmbeddingVector> embed(const CleanTweet& tweet) const = 0;

 private:
  EmbedderSpec spec_;
};

class WordLevelEmbedder final : public Embedder {
 public:
  WordLevelEmbedder(EmbedderSpec spec, std::shared_ptr<const WordVectorTable> table)
      : Embedder(std::move(spec)), table_(std::move(table)) {
    if (table_->dim() != this->spec().dim) {
      throw Error(ErrorCode::DimensionMismatch, "word table dim " + std::to_string(table_->dim()) + " for embedder '" +
                                                    this->spec().id + "'");
    }
  }

  std::optional<EmbeddingVector> embed(const CleanTweet& tweet) const override {
    return compose_tweet_vector(tweet, *table_);
  }

 private:
  std::shared_ptr<const WordVectorTable> table_;
};

class SentenceLevelEmbedder final : public Embedder {
 public:
  SentenceLevelEmbedder(EmbedderSpec spec, std::shared_ptr<const SentenceVectors> vectors)
      : Embedder(std::move(spec)), vectors_(std::move(vectors)) {
    if (!vectors_->ids.empty() && vectors_->dim != this->spec().dim) {
      throw Error(ErrorCode::DimensionMismatch, "sentence vectors dim " + std::to_string(vectors_->dim) +
                                                    " for embedder '" + this->spec().id + "'");
    }
  }

  std::optional<EmbeddingVector> embed(const CleanTweet& tweet) const override {
    const auto* v = vectors_->find(tweet.id);
    if (!v) throw Error(ErrorCode::MissingId, "embedder '" + spec().id + "' has no vector for tweet '" + tweet.id + "'");
    return *v;
  }

 private:
  std::shared_ptr<const SentenceVectors> vectors_;
};

class SyntheticEmbedder final : public Embedder {
 public:
  SyntheticEmbedder(EmbedderSpec spec, std::uint64_t seed) : Embedder(std::move(spec)), seed_(seed) {}

  std::optional<EmbeddingVector> embed(const CleanTweet& tweet) const override {
    if (tweet.word_tokens.empty()) return std::nullopt;
    return synthetic_embedder(tweet, spec().dim, seed_);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Row-major matrix of tweet vectors aligned with the retained tweet ids.
struct EmbeddedChunk {
  std::size_t chunk_id = 0;
  EmbedderSpec embedder;
  std::vector<std::string> ids;
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t rows() const { return ids.size(); }
  std::span<const double> row(std::size_t i) const { return std::span(data).subspan(i * dim, dim); }

  bool operator==(const EmbeddedChunk&) const = default;
};

/// Embeds a chunk with every embedder of a plan. A tweet that is out-of-vocabulary (or zero-norm)
/// under any embedder is dropped for all of them, so every returned chunk covers the same ids.
inline std::vector<EmbeddedChunk> embed_chunk(const Chunk& chunk,
                                              std::span<const std::shared_ptr<const Embedder>> embedders) {
  const std::size_t n = chunk.tweets.size();
  std::vector<std::vector<std::optional<EmbeddingVector>>> vectors(embedders.size());
  std::vector<bool> retained(n, true);
  for (std::size_t e = 0; e < embedders.size(); ++e) {
    const auto& spec = embedders[e]->spec();
    vectors[e].resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      auto v = embedders[e]->embed(chunk.tweets[t]);
      if (v) {
        if (v->size() != spec.dim) {
          throw Error(ErrorCode::DimensionMismatch, "embedder '" + spec.id + "' produced dim " +
                                                        std::to_string(v->size()) + " for tweet '" +
                                                        chunk.tweets[t].id + "'");
        }
        if (!all_finite(*v)) {
          throw Error(ErrorCode::NonFinite, "embedder '" + spec.id + "' on tweet '" + chunk.tweets[t].id + "'");
        }
        if (squared_norm(*v) == 0.0) v.reset();
      }
      if (!v) retained[t] = false;
      vectors[e][t] = std::move(v);
    }
  }

  std::vector<EmbeddedChunk> out;
  out.reserve(embedders.size());
  for (std::size_t e = 0; e < embedders.size(); ++e) {
    EmbeddedChunk ec;
    ec.chunk_id = chunk.chunk_id;
    ec.embedder = embedders[e]->spec();
    ec.dim = ec.embedder.dim;
    for (std::size_t t = 0; t < n; ++t) {
      if (!retained[t]) continue;
      ec.ids.push_back(chunk.tweets[t].id);
      ec.data.insert(ec.data.end(), vectors[e][t]->begin(), vectors[e][t]->end());
    }
    out.push_back(std::move(ec));
  }
  return out;
}

inline EmbeddedChunk embed_chunk(const Chunk& chunk, const std::shared_ptr<const Embedder>& embedder) {
  std::shared_ptr<const Embedder> one[] = {embedder};
  return std::move(embed_chunk(chunk, std::span<const std::shared_ptr<const Embedder>>(one)).front());
}

/// Builds an EmbeddedChunk directly from row vectors (test fixtures, pre-embedded data).
inline EmbeddedChunk make_embedded_chunk(std::span<const EmbeddingVector> rows, EmbedderSpec spec = {}) {
  EmbeddedChunk ec;
  ec.dim = rows.empty() ? spec.dim : rows.front().size();
  if (spec.dim == 0) spec.dim = ec.dim;
  if (spec.id.empty()) spec.id = "fixture";
  if (spec.name.empty()) spec.name = "synthetic";
  ec.embedder = spec;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != ec.dim) throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(i));
    ec.ids.push_back(std::to_string(i));
    ec.data.insert(ec.data.end(), rows[i].begin(), rows[i].end());
  }
  return ec;
}

}  // namespace topicbench

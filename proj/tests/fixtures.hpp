#pragma once

#include <memory>
#include <string>
#include <vector>

#include "topicbench/harness.hpp"
#include "topicbench/rng.hpp"
#include "topicbench/stopwords.hpp"
#include "topicbench/synthetic_corpus.hpp"

namespace fixture {

namespace tb = topicbench;

inline tb::Chunk synthetic_chunk(const tb::SyntheticCorpusOptions& o) {
  auto tweets = tb::generate_synthetic_tweets(o);
  tb::ChunkOptions copt;
  copt.chunk_size = o.tweets;
  auto result = tb::chunk_stream(tweets, tb::default_stopwords(), copt);
  return result.chunks.at(0);
}

/// Well-separated topics: disjoint vocabularies, no shared words or decorations.
inline tb::SyntheticCorpusOptions blob_options(std::size_t tweets, std::size_t topics, std::uint64_t seed) {
  tb::SyntheticCorpusOptions o;
  o.tweets = tweets;
  o.topics = topics;
  o.shared_word_rate = 0.0;
  o.decoration_rate = 0.0;
  o.seed = seed;
  return o;
}

inline std::shared_ptr<const tb::Embedder> synthetic_embedder(const std::string& id, std::size_t dim,
                                                              std::uint64_t seed) {
  return std::make_shared<tb::SyntheticEmbedder>(tb::EmbedderSpec{id, "synthetic", tb::EmbedderKind::Synthetic, dim},
                                                 seed);
}

/// Places each tweet at its topic's centre (a scaled axis) plus Gaussian noise seeded by the tweet id,
/// so a chunk of synthetic tweets becomes one isotropic blob per topic.
class BlobEmbedder final : public tb::Embedder {
 public:
  BlobEmbedder(std::string id, std::size_t dim, double spread)
      : tb::Embedder(tb::EmbedderSpec{std::move(id), "synthetic", tb::EmbedderKind::Synthetic, dim}), spread_(spread) {}

  std::optional<tb::EmbeddingVector> embed(const tb::CleanTweet& tweet) const override {
    const std::size_t topic = topic_of(tweet);
    tb::EmbeddingVector v(spec().dim);
    tb::Rng rng(tb::io::fnv1a64(tweet.id));
    for (auto& x : v) x = spread_ * rng.normal();
    v[topic % spec().dim] += 1.0;
    return v;
  }

  static std::size_t topic_of(const tb::CleanTweet& tweet) {
    for (const auto& w : tweet.word_tokens) {
      for (std::size_t t = 0; t < tb::kSyntheticTopics.size(); ++t) {
        for (auto word : tb::kSyntheticTopics[t]) {
          if (w == word) return t;
        }
      }
    }
    throw tb::Error(tb::ErrorCode::InvalidArgument, "tweet '" + tweet.id + "' has no topic word");
  }

 private:
  double spread_;
};

inline std::shared_ptr<const tb::Embedder> blob_embedder(const std::string& id, std::size_t dim = 16,
                                                         double spread = 0.08) {
  return std::make_shared<BlobEmbedder>(id, dim, spread);
}

/// Five synthetic stand-ins for the five pretrained models, at reduced dimension.
inline std::vector<std::shared_ptr<const tb::Embedder>> five_embedders() {
  return {synthetic_embedder("word2vec", 64, 11), synthetic_embedder("glove", 64, 12),
          synthetic_embedder("fasttext", 32, 13), synthetic_embedder("bert", 96, 14),
          synthetic_embedder("t5", 96, 15)};
}

}  // namespace fixture

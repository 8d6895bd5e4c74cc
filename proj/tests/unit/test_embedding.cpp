#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "topicbench/embedding.hpp"

namespace tb = topicbench;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  for (auto l : tb::io::split(text, '\n')) out.emplace_back(l);
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

tb::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const tb::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return tb::ErrorCode::InvalidArgument;
}

tb::CleanTweet tweet(std::string id, std::vector<std::string> words) {
  return tb::CleanTweet{std::move(id), std::move(words), "", "en"};
}

std::shared_ptr<const tb::Embedder> word_embedder(std::string id, const std::string& file) {
  auto table = std::make_shared<tb::WordVectorTable>(tb::parse_word_vectors(lines_of(file), id));
  return std::make_shared<tb::WordLevelEmbedder>(tb::EmbedderSpec{id, "word2vec", tb::EmbedderKind::WordLevel, table->dim()},
                                                 table);
}

}  // namespace

TEST(WordVectors, ParsesSmallFile) {
  auto t = tb::parse_word_vectors(lines_of("2 3\na 1 0 0\nb 0 1 0\n"), "mem");
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(*t.find("b"), (tb::EmbeddingVector{0, 1, 0}));
}

TEST(WordVectors, Errors) {
  EXPECT_EQ(code_of([] { tb::parse_word_vectors(lines_of("5 2\na 1 0\nb 1 0\nc 1 0\nd 1 0\n"), "mem"); }),
            tb::ErrorCode::RowCount);
  EXPECT_EQ(code_of([] { tb::parse_word_vectors(lines_of("1 2\na NaN 0\n"), "mem"); }), tb::ErrorCode::NonFinite);
  EXPECT_EQ(code_of([] { tb::parse_word_vectors(lines_of("1 2\na 1 0 0\n"), "mem"); }),
            tb::ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { tb::parse_word_vectors(lines_of("two 2\n"), "mem"); }), tb::ErrorCode::Parse);
  EXPECT_EQ(code_of([] { tb::parse_word_vectors(lines_of("2 1\nA 1\na 2\n"), "mem"); }), tb::ErrorCode::Duplicate);
}

TEST(WordVectors, ErrorNamesLine) {
  try {
    tb::parse_word_vectors(lines_of("2 2\na 1 0\nb inf 0\n"), "vec.txt");
    FAIL();
  } catch (const tb::Error& e) {
    EXPECT_NE(std::string(e.what()).find("vec.txt:3"), std::string::npos);
  }
}

TEST(WordVectors, FormatRoundTripIsBitIdentical) {
  tb::WordVectorTable t(3);
  tb::Rng rng(5);
  for (int i = 0; i < 50; ++i) t.insert("w" + std::to_string(i), {rng.normal(), rng.normal() * 1e-9, rng.normal() * 1e7});
  auto back = tb::parse_word_vectors(lines_of(tb::format_word_vectors(t)), "mem");
  EXPECT_EQ(back, t);
  EXPECT_EQ(tb::format_word_vectors(back), tb::format_word_vectors(t));
}

TEST(SentenceVectors, ParsesAndRejects) {
  auto s = tb::parse_sentence_vectors(lines_of("# pooling=mean\nt1\t1 2 3 4\nt2\t5 6 7 8\n"), "mem");
  EXPECT_EQ(s.ids.size(), 2u);
  EXPECT_EQ(s.dim, 4u);
  EXPECT_EQ(s.metadata.size(), 1u);
  EXPECT_TRUE(s.warnings.empty());
  EXPECT_EQ(code_of([] { tb::parse_sentence_vectors(lines_of("t1\t1 2\nt1\t3 4\n"), "mem"); }), tb::ErrorCode::Duplicate);
  EXPECT_EQ(code_of([] { tb::parse_sentence_vectors(lines_of("t1\t1 2\nt2\t3 4 5\n"), "mem"); }),
            tb::ErrorCode::DimensionMismatch);
}

TEST(SentenceVectors, EmptyFileWarns) {
  auto s = tb::parse_sentence_vectors({}, "empty.tsv");
  EXPECT_TRUE(s.ids.empty());
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(SentenceVectors, FormatRoundTrip) {
  std::vector<std::string> ids = {"a", "b"};
  std::vector<tb::EmbeddingVector> rows = {{0.1, -2.5}, {1e-300, 3}};
  auto s = tb::parse_sentence_vectors(lines_of(tb::format_sentence_vectors(ids, rows)), "mem");
  EXPECT_EQ(s.ids, ids);
  EXPECT_EQ(*s.find("b"), rows[1]);
}

TEST(Compose, MeanOfKnownVectors) {
  tb::WordVectorTable t(2);
  t.insert("a", {1, 0});
  t.insert("b", {0, 1});
  EXPECT_EQ(*tb::compose_tweet_vector(tweet("1", {"a", "a"}), t), (tb::EmbeddingVector{1, 0}));
  EXPECT_EQ(*tb::compose_tweet_vector(tweet("1", {"a", "b"}), t), (tb::EmbeddingVector{0.5, 0.5}));
  EXPECT_EQ(*tb::compose_tweet_vector(tweet("1", {"a", "zzz", "b"}), t), (tb::EmbeddingVector{0.5, 0.5}));
  EXPECT_FALSE(tb::compose_tweet_vector(tweet("1", {"zzz"}), t).has_value());
}

TEST(Synthetic, DeterministicUnitAndDistinct) {
  auto t = tweet("1", {"vaccine", "dose"});
  auto a = tb::synthetic_embedder(t, 64, 9);
  EXPECT_EQ(a, tb::synthetic_embedder(t, 64, 9));
  EXPECT_NEAR(std::sqrt(tb::squared_norm(a)), 1.0, 1e-9);
  EXPECT_NE(a, tb::synthetic_embedder(tweet("2", {"mask", "gloves"}), 64, 9));
  EXPECT_NE(a, tb::synthetic_embedder(t, 64, 10));
  EXPECT_THROW(tb::synthetic_embedder(t, 1, 9), tb::Error);
}

TEST(Synthetic, DisjointTweetsNeverCollide) {
  for (std::size_t dim : {32u, 64u}) {
    for (int i = 0; i < 200; ++i) {
      auto a = tb::synthetic_embedder(tweet("a", {"x" + std::to_string(i)}), dim, 1);
      auto b = tb::synthetic_embedder(tweet("b", {"y" + std::to_string(i)}), dim, 1);
      ASSERT_NE(a, b);
    }
  }
}

TEST(EmbedChunk, AllInVocabulary) {
  auto e = word_embedder("w2v", "3 2\na 1 0\nb 0 1\nc 1 1\n");
  tb::Chunk c{0, {tweet("1", {"a"}), tweet("2", {"b"}), tweet("3", {"c"})}};
  auto ec = tb::embed_chunk(c, e);
  EXPECT_EQ(ec.rows(), 3u);
  EXPECT_EQ(ec.ids, (std::vector<std::string>{"1", "2", "3"}));
}

TEST(EmbedChunk, OovTweetDroppedForEveryEmbedder) {
  auto w2v = word_embedder("w2v", "2 2\na 1 0\nc 1 1\n");
  auto glove = word_embedder("glove", "3 2\na 1 0\nb 0 1\nc 1 1\n");
  tb::Chunk c{0, {tweet("1", {"a"}), tweet("2", {"b"}), tweet("3", {"c"})}};
  std::vector<std::shared_ptr<const tb::Embedder>> embedders = {w2v, glove};
  auto out = tb::embed_chunk(c, embedders);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& ec : out) EXPECT_EQ(ec.ids, (std::vector<std::string>{"1", "3"}));
}

TEST(EmbedChunk, SentenceRowsFollowChunkOrder) {
  auto vectors = std::make_shared<tb::SentenceVectors>(
      tb::parse_sentence_vectors(lines_of("3\t3 3\n1\t1 1\n2\t2 2\n"), "mem"));
  auto e = std::make_shared<tb::SentenceLevelEmbedder>(tb::EmbedderSpec{"bert", "bert", tb::EmbedderKind::SentenceLevel, 2},
                                                       vectors);
  tb::Chunk c{0, {tweet("1", {"x"}), tweet("2", {"y"}), tweet("3", {"z"})}};
  auto ec = tb::embed_chunk(c, std::shared_ptr<const tb::Embedder>(e));
  EXPECT_EQ(ec.data, (std::vector<double>{1, 1, 2, 2, 3, 3}));
  tb::Chunk missing{0, {tweet("4", {"x"})}};
  EXPECT_EQ(code_of([&] { tb::embed_chunk(missing, std::shared_ptr<const tb::Embedder>(e)); }), tb::ErrorCode::MissingId);
}

TEST(EmbedChunk, ZeroNormRowTreatedAsOov) {
  auto e = word_embedder("w2v", "2 2\na 1 0\nz 0 0\n");
  tb::Chunk c{0, {tweet("1", {"a"}), tweet("2", {"z"})}};
  EXPECT_EQ(tb::embed_chunk(c, e).ids, (std::vector<std::string>{"1"}));
}

TEST(EmbedderSpec, PublishedDimensions) {
  EXPECT_EQ(tb::published_dimension("word2vec"), 400u);
  EXPECT_EQ(tb::published_dimension("fasttext"), 400u);
  EXPECT_EQ(tb::published_dimension("glove"), 200u);
  EXPECT_EQ(tb::published_dimension("bert"), 768u);
  EXPECT_EQ(tb::published_dimension("t5"), 768u);
  EXPECT_NO_THROW(tb::validate(tb::EmbedderSpec{"g", "glove", tb::EmbedderKind::WordLevel, 200}));
  EXPECT_THROW(tb::validate(tb::EmbedderSpec{"g", "glove", tb::EmbedderKind::WordLevel, 300}), tb::Error);
  EXPECT_THROW(tb::validate(tb::EmbedderSpec{"b", "bert", tb::EmbedderKind::WordLevel, 768}), tb::Error);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "topicbench/labeling.hpp"
#include "topicbench/reporting.hpp"

namespace tb = topicbench;
using tb::ClustererId;
using tb::MetricId;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  for (auto l : tb::io::split(text, '\n')) {
    if (!l.empty()) out.emplace_back(l);
  }
  return out;
}

std::vector<tb::ResultRecord> reference_results() {
  return tb::read_results_table(std::filesystem::path(TOPICBENCH_TEST_DATA) / "reference_results.tsv");
}

tb::ExperimentRecord record(std::string emb, MetricId m, tb::ClusterParams p, double score) {
  tb::ExperimentRecord r;
  r.embedder = std::move(emb);
  r.metric = m;
  r.clusterer = tb::clusterer_of(p);
  r.params = p;
  r.score = score;
  r.clusters = 2;
  return r;
}

std::vector<tb::ExperimentRecord> full_jp_slice() {
  std::vector<tb::ExperimentRecord> out;
  for (const auto& p : tb::default_grid(ClustererId::JarvisPatrick)) {
    const auto& jp = std::get<tb::JarvisPatrickParams>(p);
    out.push_back(record("glove", MetricId::Cosine, p, 1.0 / static_cast<double>(jp.k + jp.k_t)));
  }
  return out;
}

tb::CleanTweet tweet(std::string id, std::vector<std::string> words) {
  tb::CleanTweet t;
  t.id = std::move(id);
  t.word_tokens = std::move(words);
  return t;
}

}  // namespace

TEST(Params, FormatParseRoundTrip) {
  std::vector<tb::ClusterParams> all = {tb::KMeansParams{5}, tb::DbscanParams{0.2, 4}, tb::OpticsParams{3},
                                        tb::SpectralParams{7}, tb::JarvisPatrickParams{10, 2}};
  EXPECT_EQ(tb::format_params(all[1]), "eps=0.2;min_pts=4");
  EXPECT_EQ(tb::format_params(all[4]), "k=10;k_t=2");
  for (const auto& p : all) EXPECT_EQ(tb::parse_params(tb::clusterer_of(p), tb::format_params(p)), p);
  for (const auto& p : tb::default_grid(ClustererId::Dbscan)) {
    ASSERT_EQ(tb::parse_params(ClustererId::Dbscan, tb::format_params(p)), p);
  }
  EXPECT_THROW(tb::parse_params(ClustererId::KMeans, "q=3"), tb::Error);
  EXPECT_THROW(tb::parse_params(ClustererId::Dbscan, "min_pts=3"), tb::Error);
}

TEST(Params, Validation) {
  EXPECT_THROW(tb::validate(tb::ClusterParams{tb::DbscanParams{0.0, 3}}), tb::Error);
  EXPECT_THROW(tb::validate(tb::ClusterParams{tb::OpticsParams{1}}), tb::Error);
  EXPECT_THROW(tb::validate(tb::ClusterParams{tb::JarvisPatrickParams{10, 11}}), tb::Error);
  EXPECT_NO_THROW(tb::validate(tb::ClusterParams{tb::JarvisPatrickParams{10, 10}}));
}

TEST(Labeling, RoundTrip) {
  tb::ClusterLabeling l;
  l.labels = {0, 1, tb::kNoise, 1, 0};
  l.k = 2;
  l.method = ClustererId::Dbscan;
  l.params = tb::DbscanParams{0.4, 3};
  auto text = tb::format_labeling(l);
  EXPECT_NE(text.find("2 NOISE"), std::string::npos);
  EXPECT_EQ(tb::parse_labeling(lines_of(text)), l);
  l.seed = 77;
  l.method = ClustererId::KMeans;
  l.params = tb::KMeansParams{2};
  EXPECT_EQ(tb::parse_labeling(lines_of(tb::format_labeling(l))), l);
}

TEST(Labeling, Canonical) {
  EXPECT_EQ(tb::canonical_labels(std::vector<int>{3, 3, tb::kNoise, 0, 3}), (std::vector<int>{0, 0, tb::kNoise, 1, 0}));
  EXPECT_TRUE(tb::same_partition(std::vector<int>{1, 0, 1}, std::vector<int>{0, 2, 0}));
  EXPECT_FALSE(tb::same_partition(std::vector<int>{1, 0, 1}, std::vector<int>{0, 0, 1}));
  EXPECT_EQ(tb::count_clusters(std::vector<int>{tb::kNoise, 4, 4, 9}), 2u);
}

TEST(ResultsTable, ReferenceFileShape) {
  auto rows = reference_results();
  ASSERT_EQ(rows.size(), 50u);
  auto text = tb::format_results_table(rows);
  auto lines = lines_of(text);
  EXPECT_EQ(lines.size(), 51u);
  EXPECT_EQ(lines.front(), tb::kResultsHeader);
  EXPECT_EQ(tb::parse_results_table(lines), rows);
}

TEST(ResultsTable, RoundTripWithParamsAndStatus) {
  std::vector<tb::ResultRecord> rows = {
      {"bert", MetricId::Cosine, ClustererId::Dbscan, tb::DbscanParams{0.3, 4}, 0.276191, "ok"},
      {"t5", MetricId::EuclideanNormalized, ClustererId::JarvisPatrick, tb::JarvisPatrickParams{12, 3}, 0.0,
       "degenerate"},
      {"glove", MetricId::Cosine, ClustererId::Spectral, std::nullopt, -0.0123456789012345, "ok"},
  };
  EXPECT_EQ(tb::parse_results_table(lines_of(tb::format_results_table(rows))), rows);
}

TEST(ResultsTable, Errors) {
  EXPECT_THROW(tb::format_results_table(std::span<const tb::ResultRecord>{}), tb::Error);
  EXPECT_THROW(tb::parse_results_table(std::vector<std::string>{std::string(tb::kResultsHeader)}), tb::Error);
  EXPECT_THROW(tb::parse_results_table(std::vector<std::string>{"k-means\tcosine\tbert\t-\tnotanumber"}), tb::Error);
  EXPECT_THROW(tb::parse_results_table(std::vector<std::string>{"k-means\tmanhattan\tbert\t-\t0.1"}), tb::Error);
}

TEST(Experiments, RoundTrip) {
  std::vector<tb::ExperimentRecord> rows = {record("a", MetricId::Cosine, tb::KMeansParams{3}, 0.5),
                                            record("a", MetricId::Cosine, tb::OpticsParams{4}, 0.25)};
  rows[1].status = "empty-evaluation";
  rows[1].noise = 17;
  EXPECT_EQ(tb::parse_experiments(lines_of(tb::format_experiments(rows))), rows);
}

TEST(Sweep, KMeansHasOneRowPerK) {
  std::vector<tb::ExperimentRecord> recs;
  auto grid = tb::default_grid(ClustererId::KMeans);
  std::reverse(grid.begin(), grid.end());
  for (const auto& p : grid) recs.push_back(record("bert", MetricId::Cosine, p, 0.01 * std::get<tb::KMeansParams>(p).k));
  recs.push_back(record("glove", MetricId::Cosine, tb::KMeansParams{2}, 0.9));
  auto lines = lines_of(tb::emit_sweep(recs, "bert", MetricId::Cosine, ClustererId::KMeans));
  ASSERT_EQ(lines.size(), 49u);
  EXPECT_EQ(lines[0], "k\tsilhouette\tstatus");
  EXPECT_TRUE(lines[1].starts_with("2\t"));
  EXPECT_TRUE(lines[48].starts_with("49\t"));
}

TEST(Sweep, TwoParameterMethodsRejected) {
  std::vector<tb::ExperimentRecord> recs = {record("bert", MetricId::Cosine, tb::DbscanParams{0.1, 2}, 0.1)};
  EXPECT_THROW(tb::emit_sweep(recs, "bert", MetricId::Cosine, ClustererId::Dbscan), tb::Error);
}

TEST(Heatgrid, FullDefaultGrid) {
  auto recs = full_jp_slice();
  auto lines = lines_of(tb::emit_heatgrid(recs, "glove", MetricId::Cosine));
  ASSERT_EQ(lines.size(), 92u);  // header + k = 10..100
  std::size_t values = 0, na = 0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = tb::io::split(lines[r], '\t');
    ASSERT_EQ(cells.size(), 101u);
    for (std::size_t c = 1; c < cells.size(); ++c) (cells[c] == "NA" ? na : values) += 1;
  }
  EXPECT_EQ(values, 5005u);
  auto row10 = tb::io::split(lines[1], '\t');
  EXPECT_EQ(row10[0], "10");
  EXPECT_EQ(row10[11], "NA");  // k_t = 11 > k = 10
  EXPECT_NE(row10[10], "NA");
  EXPECT_EQ(na, 91u * 100u - 5005u);
}

TEST(Heatgrid, SubsetOfK) {
  auto recs = full_jp_slice();
  std::erase_if(recs, [](const tb::ExperimentRecord& r) { return std::get<tb::JarvisPatrickParams>(r.params).k > 11; });
  auto lines = lines_of(tb::emit_heatgrid(recs, "glove", MetricId::Cosine));
  ASSERT_EQ(lines.size(), 3u);
  std::size_t values = 0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    for (auto cell : tb::io::split(lines[r], '\t')) values += cell != "NA" ? 1 : 0;
  }
  EXPECT_EQ(values, 2u + 21u);  // two k labels plus 10 + 11 cells
}

TEST(Topics, HandWorkedExample) {
  auto a = tweet("1", {"vaccine", "dose", "trial"});
  auto b = tweet("2", {"vaccine", "dose"});
  auto c = tweet("3", {"vaccine", "school"});
  auto d = tweet("4", {"school", "closed"});
  std::vector<const tb::CleanTweet*> tweets = {&a, &b, &c, &d};
  tb::ClusterLabeling l;
  l.labels = {0, 0, 0, tb::kNoise};
  l.k = 1;
  auto topics = tb::extract_topics(tweets, l, 2);
  ASSERT_EQ(topics.size(), 1u);
  EXPECT_EQ(topics[0].size, 3u);
  ASSERT_EQ(topics[0].top_words.size(), 2u);
  EXPECT_EQ(topics[0].top_words[0], (std::pair<std::string, std::size_t>{"vaccine", 3}));
  EXPECT_EQ(topics[0].top_words[1], (std::pair<std::string, std::size_t>{"dose", 2}));
  EXPECT_EQ(tb::format_topics(topics), "cluster\tsize\ttop_words\n0\t3\tvaccine:3 dose:2\n");
}

TEST(Topics, TiesAreLexicographicAndNoiseIgnored) {
  auto a = tweet("1", {"zeta", "alpha", "mid"});
  std::vector<const tb::CleanTweet*> tweets = {&a};
  tb::ClusterLabeling l;
  l.labels = {0};
  l.k = 1;
  auto topics = tb::extract_topics(tweets, l, 2);
  EXPECT_EQ(topics[0].top_words[0].first, "alpha");
  EXPECT_EQ(topics[0].top_words[1].first, "mid");
  l.labels = {tb::kNoise};
  l.k = 0;
  EXPECT_TRUE(tb::extract_topics(tweets, l, 5).empty());
}

TEST(Topics, CountsMatchRecount) {
  std::mt19937_64 rng(6);
  const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
  std::vector<tb::CleanTweet> store;
  std::vector<int> labels;
  for (int t = 0; t < 60; ++t) {
    std::vector<std::string> words;
    for (int w = 0; w < 5; ++w) words.emplace_back(vocab[rng() % 6]);
    store.push_back(tweet(std::to_string(t), words));
    labels.push_back(static_cast<int>(rng() % 4) - 1);
  }
  std::vector<const tb::CleanTweet*> tweets;
  for (const auto& t : store) tweets.push_back(&t);
  tb::ClusterLabeling l;
  l.labels = labels;
  l.k = tb::count_clusters(labels);
  for (const auto& topic : tb::extract_topics(tweets, l, 6)) {
    std::map<std::string, std::size_t> counts;
    std::size_t size = 0;
    for (std::size_t i = 0; i < store.size(); ++i) {
      if (labels[i] != topic.cluster) continue;
      ++size;
      for (const auto& w : store[i].word_tokens) ++counts[w];
    }
    EXPECT_EQ(topic.size, size);
    for (std::size_t r = 0; r < topic.top_words.size(); ++r) {
      EXPECT_EQ(topic.top_words[r].second, counts.at(topic.top_words[r].first));
      if (r) {
        EXPECT_GE(topic.top_words[r - 1].second, topic.top_words[r].second);
      }
    }
  }
}

TEST(Topics, LookupById) {
  tb::Chunk chunk;
  chunk.tweets = {tweet("x", {"a"}), tweet("y", {"b"})};
  std::vector<std::string> ids = {"y", "x"};
  auto got = tb::tweets_by_id(chunk, ids);
  EXPECT_EQ(got[0]->id, "y");
  ids.push_back("z");
  EXPECT_THROW(tb::tweets_by_id(chunk, ids), tb::Error);
}

TEST(AnalysisTables, Shapes) {
  auto rows = reference_results();
  auto marg = lines_of(tb::format_marginals(tb::compute_marginals(rows)));
  EXPECT_EQ(marg.size(), 1u + 5u + 2u + 5u);
  auto ranks = lines_of(tb::format_embedding_ranks(tb::rank_embeddings(rows)));
  EXPECT_EQ(ranks.size(), 6u);
  auto duel = lines_of(tb::format_metric_duel(tb::rank_metric_duel(rows)));
  EXPECT_GE(duel.size(), 6u);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "topicbench/config.hpp"

namespace fs = std::filesystem;
namespace tb = topicbench;
using tb::ClustererId;

namespace {

fs::path source(const char* rel) { return fs::path(TOPICBENCH_SOURCE_DIR) / rel; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("topicbench-config-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

tb::ErrorCode code_of(const nlohmann::json& j, const fs::path& base) {
  try {
    tb::load_plan(j, base);
  } catch (const tb::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "plan loaded: " << j.dump();
  return tb::ErrorCode::Io;
}

nlohmann::json minimal() {
  return nlohmann::json::parse(R"({
    "corpus": {"synthetic": {"tweets": 30, "topics": 2}},
    "embedders": [{"name": "synthetic", "dim": 8}]
  })");
}

}  // namespace

TEST(Config, ShippedSyntheticPlanIsTheFullStudy) {
  auto plan = tb::load_plan(source("configs/synthetic_plan.json"));
  EXPECT_EQ(plan.embedders.size(), 5u);
  EXPECT_EQ(plan.combinations(), 50u);
  EXPECT_EQ(plan.chunk.tweets.size(), 500u);
  EXPECT_EQ(plan.grid(ClustererId::JarvisPatrick).size(), 5005u);
  EXPECT_EQ(plan.seed, 20240915u);
}

TEST(Config, QuickPlanGrids) {
  auto plan = tb::load_plan(source("configs/quick_plan.json"));
  EXPECT_EQ(plan.grid(ClustererId::KMeans).size(), 7u);
  EXPECT_EQ(plan.grid(ClustererId::Dbscan).size(), 18u);
  EXPECT_EQ(plan.grid(ClustererId::Optics).size(), 3u);
  // k_t capped at k: 10 + 12 + 12
  EXPECT_EQ(plan.grid(ClustererId::JarvisPatrick).size(), 34u);
  EXPECT_EQ(std::get<tb::DbscanParams>(plan.grid(ClustererId::Dbscan)[3]).eps, 0.2);
}

TEST(Config, DefaultsAndPolicies) {
  auto j = minimal();
  auto plan = tb::load_plan(j, ".");
  EXPECT_EQ(plan.metrics.size(), 2u);
  EXPECT_EQ(plan.clusterers.size(), 5u);
  EXPECT_EQ(plan.noise_policy, tb::NoisePolicy::Exclude);
  EXPECT_EQ(plan.embedders[0]->spec().id, "synthetic");
  j["noise_policy"] = "as-singletons";
  EXPECT_EQ(tb::load_plan(j, ".").noise_policy, tb::NoisePolicy::AsSingletons);
}

TEST(Config, FileBackedEmbeddersResolveRelativePaths) {
  auto dir = scratch("files");
  tb::io::write_file_atomic(dir / "tweets.txt",
                            "id=1\ttext=vaccine dose trial today\tlang=en\n"
                            "id=2\ttext=school closed teachers today\tlang=en\n"
                            "id=3\ttext=vaccine school dose closed\tlang=en\n");
  auto tweets = tb::read_tweets(dir / "tweets.txt");
  auto chunks = tb::chunk_stream(tweets, tb::default_stopwords(), tb::ChunkOptions{500, 4}).chunks;
  tb::io::write_file_atomic(dir / "chunks.txt", tb::format_chunks(chunks));
  tb::io::write_file_atomic(dir / "vectors.txt",
                            "5 3\nvaccine 1 0 0\ndose 0.9 0.1 0\ntrial 1 0.2 0\nschool 0 1 0\nclosed 0 0.9 0.1\n");
  tb::io::write_file_atomic(dir / "sentences.tsv", "1\t1 0\n2\t0 1\n3\t0.5 0.5\n");
  tb::io::write_file_atomic(dir / "plan.json", R"({
    "corpus": {"chunks": "chunks.txt", "chunk": 0},
    "embedders": [
      {"name": "word2vec", "id": "w2v-tiny", "path": "vectors.txt", "check_published_dim": false},
      {"name": "bert", "id": "bert-tiny", "path": "sentences.tsv", "check_published_dim": false}
    ],
    "metrics": ["cosine"],
    "clusterers": ["k-means"],
    "grids": {"k-means": {"k": [2]}}
  })");
  auto plan = tb::load_plan(dir / "plan.json");
  EXPECT_EQ(plan.chunk.tweets.size(), 3u);
  EXPECT_EQ(plan.embedders[0]->spec().dim, 3u);
  EXPECT_EQ(plan.embedders[1]->spec().dim, 2u);
  EXPECT_NE(plan.provenance.find("source w2v-tiny="), std::string::npos);

  // the published dimension is enforced unless switched off
  auto j = nlohmann::json::parse(tb::io::read_file(dir / "plan.json"));
  j["embedders"][0].erase("check_published_dim");
  EXPECT_EQ(code_of(j, dir), tb::ErrorCode::DimensionMismatch);
  fs::remove_all(dir);
}

TEST(Config, Errors) {
  auto j = minimal();
  j["metrics"] = {"manhattan"};
  EXPECT_EQ(code_of(j, "."), tb::ErrorCode::Parse);
  j = minimal();
  j.erase("corpus");
  EXPECT_EQ(code_of(j, "."), tb::ErrorCode::Parse);
  j = minimal();
  j["grids"] = {{"k-means", {{"k", nlohmann::json::array()}}}};
  EXPECT_EQ(code_of(j, "."), tb::ErrorCode::Parse);
  j = minimal();
  j["grids"] = {{"dbscan", {{"eps", {0.0}}, {"min_pts", {3}}}}};
  EXPECT_EQ(code_of(j, "."), tb::ErrorCode::InvalidArgument);
  j = minimal();
  j["embedders"][0]["name"] = "elmo";
  EXPECT_EQ(code_of(j, "."), tb::ErrorCode::Parse);
  j = minimal();
  j["seed"] = "seven";
  EXPECT_EQ(code_of(j, "."), tb::ErrorCode::Parse);

  auto dir = scratch("broken");
  tb::io::write_file_atomic(dir / "plan.json", "{ not json");
  try {
    tb::load_plan(dir / "plan.json");
    FAIL();
  } catch (const tb::Error& e) {
    EXPECT_EQ(e.code(), tb::ErrorCode::Parse);
  }
  fs::remove_all(dir);
}

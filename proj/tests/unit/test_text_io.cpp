#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "topicbench/rng.hpp"
#include "topicbench/text_io.hpp"

namespace tb = topicbench;
namespace io = topicbench::io;

TEST(TextIo, FormatDoubleRoundTrips) {
  tb::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.index(20)) - 10.0);
    auto back = io::parse_double(io::format_double(v));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(-0.008437181), "-0.008437181");
}

TEST(TextIo, ParseDoubleRejectsGarbage) {
  EXPECT_FALSE(io::parse_double("").has_value());
  EXPECT_FALSE(io::parse_double("1.5x").has_value());
  EXPECT_FALSE(io::parse_double("abc").has_value());
  EXPECT_TRUE(std::isnan(*io::parse_double("NaN")));
  EXPECT_EQ(*io::parse_double("-inf"), -std::numeric_limits<double>::infinity());
}

TEST(TextIo, SplitKeepsEmptyFields) {
  auto f = io::split("a\t\tb\t", '\t');
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[3], "");
  auto w = io::split_ws("  a  b\tc ");
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[2], "c");
}

TEST(TextIo, EscapeRoundTrip) {
  const std::string raw = "tab\there\nnew\\line\rcr";
  auto esc = io::escape_field(raw);
  EXPECT_EQ(esc.find('\t'), std::string::npos);
  EXPECT_EQ(esc.find('\n'), std::string::npos);
  EXPECT_EQ(io::unescape_field(esc), raw);
}

TEST(TextIo, AtomicWriteCreatesParentsAndReplaces) {
  auto dir = std::filesystem::temp_directory_path() / "topicbench_text_io";
  std::filesystem::remove_all(dir);
  auto path = dir / "nested" / "file.txt";
  io::write_file_atomic(path, "one\r\ntwo\n");
  EXPECT_EQ(io::read_lines(path), (std::vector<std::string>{"one", "two"}));
  io::write_file_atomic(path, "three");
  EXPECT_EQ(io::read_file(path), "three");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "nested")) ++entries;
  EXPECT_EQ(entries, 1u);
  std::filesystem::remove_all(dir);
}

TEST(TextIo, ReadMissingFileIsIoError) {
  try {
    io::read_file("/nonexistent/topicbench/file");
    FAIL();
  } catch (const tb::Error& e) {
    EXPECT_EQ(e.code(), tb::ErrorCode::Io);
  }
}

TEST(Rng, ReproducibleAndSeedSensitive) {
  tb::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(tb::Rng(42).next(), tb::Rng(43).next());
  EXPECT_NE(tb::mix_seed(1, 2), tb::mix_seed(2, 1));
}

TEST(Rng, UniformAndIndexRanges) {
  tb::Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.index(3), 3u);
  }
}

TEST(Rng, NormalMoments) {
  tb::Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

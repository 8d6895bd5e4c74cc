#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/error.hpp"
#include "topicbench/rng.hpp"

namespace topicbench {

/// Topic vocabularies for generated pandemic-era tweets; ten content words each.
inline constexpr std::array<std::array<std::string_view, 10>, 8> kSyntheticTopics = {{
    {"vaccine", "dose", "pfizer", "moderna", "booster", "shot", "appointment", "clinic", "immunity", "jab"},
    {"lockdown", "quarantine", "restrictions", "curfew", "isolation", "indoors", "closure", "stayhome", "borders", "rules"},
    {"mask", "masks", "distancing", "sanitizer", "gloves", "hygiene", "washing", "spread", "droplets", "ventilation"},
    {"hospital", "icu", "nurses", "doctors", "ventilator", "patients", "beds", "ward", "frontline", "oxygen"},
    {"economy", "jobs", "unemployment", "stimulus", "business", "markets", "recession", "layoffs", "rent", "wages"},
    {"school", "students", "teachers", "remote", "classes", "exams", "campus", "zoom", "homework", "semester"},
    {"testing", "swab", "positive", "negative", "results", "antigen", "pcr", "symptoms", "fever", "cough"},
    {"travel", "flights", "airport", "passport", "tourism", "cruise", "border", "visa", "hotel", "cancelled"},
}};

/// Words that may appear in any topic.
inline constexpr std::array<std::string_view, 8> kSyntheticSharedWords = {
    "covid", "pandemic", "people", "today", "week", "news", "health", "world"};

inline constexpr std::array<std::string_view, 8> kSyntheticDecorations = {
    "#covid19", "@who", "https://t.co/x1y2z3", "!!", "😷", "2020", "#stayhome", "..."};

struct SyntheticCorpusOptions {
  std::size_t tweets = 500;
  std::size_t topics = 5;             // at most kSyntheticTopics.size()
  std::size_t vocabulary = 10;        // content words drawn from each topic list
  std::size_t min_words = 4;          // content words per tweet
  std::size_t max_words = 7;
  double shared_word_rate = 0.3;      // chance of adding one shared word
  double decoration_rate = 0.5;       // chance of adding a hashtag, mention, URL, emoji, ...
  std::uint64_t seed = 1;
};

/// Deterministic English tweets; tweet t belongs to topic t mod topics and draws distinct words from it.
inline std::vector<RawTweet> generate_synthetic_tweets(const SyntheticCorpusOptions& o) {
  if (o.topics == 0 || o.topics > kSyntheticTopics.size()) {
    throw Error(ErrorCode::InvalidArgument, "topics must be in 1.." + std::to_string(kSyntheticTopics.size()));
  }
  if (o.vocabulary < o.max_words || o.vocabulary > 10 || o.min_words == 0 || o.min_words > o.max_words) {
    throw Error(ErrorCode::InvalidArgument, "need 1 <= min_words <= max_words <= vocabulary <= 10");
  }
  Rng rng(o.seed);
  std::vector<RawTweet> out;
  out.reserve(o.tweets);
  std::vector<std::size_t> pick(o.vocabulary);
  for (std::size_t t = 0; t < o.tweets; ++t) {
    const auto& topic = kSyntheticTopics[t % o.topics];
    const std::size_t words = o.min_words + rng.index(o.max_words - o.min_words + 1);
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    for (std::size_t i = 0; i < words; ++i) std::swap(pick[i], pick[i + rng.index(pick.size() - i)]);

    std::vector<std::string> parts;
    for (std::size_t i = 0; i < words; ++i) parts.emplace_back(topic[pick[i]]);
    if (rng.uniform() < o.shared_word_rate) {
      parts.emplace_back(kSyntheticSharedWords[rng.index(kSyntheticSharedWords.size())]);
    }
    if (rng.uniform() < 0.5) parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(rng.index(parts.size())), "the");
    if (rng.uniform() < o.decoration_rate) parts.emplace_back(kSyntheticDecorations[rng.index(kSyntheticDecorations.size())]);

    RawTweet tweet;
    tweet.id = "syn" + std::to_string(o.seed) + "-" + std::to_string(t);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) tweet.text += ' ';
      tweet.text += parts[i];
    }
    tweet.lang = "en";
    out.push_back(std::move(tweet));
  }
  return out;
}

}  // namespace topicbench

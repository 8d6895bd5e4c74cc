#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "topicbench/error.hpp"
#include "topicbench/text_io.hpp"
#include "topicbench/utf8.hpp"

namespace topicbench {

struct RawTweet {
  std::string id;
  std::string text;
  std::optional<std::string> lang;
  std::optional<std::string> created_at;
};

enum class TokenTag { Word, Number, Punct, Emoji, Hashtag, Url, Mention, Other };

inline std::string_view to_string(TokenTag tag) {
  switch (tag) {
    case TokenTag::Word: return "Word";
    case TokenTag::Number: return "Number";
    case TokenTag::Punct: return "Punct";
    case TokenTag::Emoji: return "Emoji";
    case TokenTag::Hashtag: return "Hashtag";
    case TokenTag::Url: return "Url";
    case TokenTag::Mention: return "Mention";
    case TokenTag::Other: return "Other";
  }
  return "Other";
}

struct Token {
  std::string surface;
  TokenTag tag = TokenTag::Other;
  std::string lang;  // only set for Word tokens

  bool operator==(const Token&) const = default;
};

/// Language code guessed from a word's script. Latin is taken as an English candidate.
inline std::string_view script_language(utf8::Script script) {
  using utf8::Script;
  switch (script) {
    case Script::Latin: return "en";
    case Script::Greek: return "el";
    case Script::Cyrillic: return "ru";
    case Script::Hebrew: return "he";
    case Script::Arabic: return "ar";
    case Script::Devanagari: return "hi";
    case Script::Thai: return "th";
    case Script::Hangul: return "ko";
    case Script::Kana: return "ja";
    case Script::Han: return "zh";
    case Script::None: break;
  }
  return "und";
}

namespace detail {

inline bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = text[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c != prefix[i]) return false;
  }
  return true;
}

inline bool is_word_char(char32_t cp) {
  return utf8::letter_script(cp) != utf8::Script::None || utf8::is_digit(cp) || cp == '_' ||
         utf8::is_word_continuation(cp);
}

}  // namespace detail

/// Splits text into tagged tokens.
///
/// Rules, applied at each non-whitespace position in this order:
///   Url      "http://" or "https://" (ASCII case-insensitive) up to the next whitespace
///   Mention  "@" followed by one or more word characters (letters, digits, "_")
///   Hashtag  "#" followed by one or more word characters
///   Number   digits, optionally joined by single ".", "," or "-" to further digits
///   Word     a run of letters of one script (combining marks stay attached)
///   Emoji    an emoji codepoint plus trailing modifiers (VS16, ZWJ sequences, skin tones, tags)
///   Punct    a single punctuation codepoint
///   Other    any other single codepoint (or a malformed byte)
/// Whitespace only separates tokens, so the concatenated surfaces equal the input with whitespace removed.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  const std::size_t n = text.size();

  auto cp_at = [&](std::size_t p) { return p < n ? utf8::decode(text, p) : utf8::Decoded{utf8::kInvalid, 0}; };
  auto emit = [&](std::size_t start, std::size_t end, TokenTag tag, std::string lang = {}) {
    tokens.push_back(Token{std::string(text.substr(start, end - start)), tag, std::move(lang)});
  };

  while (pos < n) {
    auto cur = cp_at(pos);
    if (cur.cp != utf8::kInvalid && utf8::is_space(cur.cp)) {
      pos += cur.length;
      continue;
    }
    const std::size_t start = pos;

    if (detail::starts_with_ci(text, pos, "http://") || detail::starts_with_ci(text, pos, "https://")) {
      while (pos < n) {
        auto d = cp_at(pos);
        if (d.cp != utf8::kInvalid && utf8::is_space(d.cp)) break;
        pos += d.length;
      }
      emit(start, pos, TokenTag::Url);
      continue;
    }

    if (cur.cp == '@' || cur.cp == '#') {
      std::size_t p = pos + 1;
      while (p < n) {
        auto d = cp_at(p);
        if (d.cp == utf8::kInvalid || !detail::is_word_char(d.cp)) break;
        p += d.length;
      }
      if (p > pos + 1) {
        emit(start, p, cur.cp == '@' ? TokenTag::Mention : TokenTag::Hashtag);
        pos = p;
        continue;
      }
    }

    if (cur.cp != utf8::kInvalid && utf8::is_digit(cur.cp)) {
      auto skip_digits = [&](std::size_t p) {
        while (p < n) {
          auto d = cp_at(p);
          if (d.cp == utf8::kInvalid || !utf8::is_digit(d.cp)) break;
          p += d.length;
        }
        return p;
      };
      pos = skip_digits(pos);
      while (pos + 1 < n && (text[pos] == '.' || text[pos] == ',' || text[pos] == '-')) {
        auto next = cp_at(pos + 1);
        if (next.cp == utf8::kInvalid || !utf8::is_digit(next.cp)) break;
        pos = skip_digits(pos + 1);
      }
      emit(start, pos, TokenTag::Number);
      continue;
    }

    if (auto script = utf8::letter_script(cur.cp); script != utf8::Script::None) {
      pos += cur.length;
      while (pos < n) {
        auto d = cp_at(pos);
        if (d.cp == utf8::kInvalid) break;
        if (utf8::letter_script(d.cp) != script && !utf8::is_word_continuation(d.cp)) break;
        pos += d.length;
      }
      emit(start, pos, TokenTag::Word, std::string(script_language(script)));
      continue;
    }

    if (cur.cp != utf8::kInvalid && utf8::is_emoji(cur.cp)) {
      bool regional = cur.cp >= 0x1F1E6 && cur.cp <= 0x1F1FF;
      pos += cur.length;
      if (regional) {
        auto d = cp_at(pos);
        if (d.cp >= 0x1F1E6 && d.cp <= 0x1F1FF) pos += d.length;
      }
      while (pos < n) {
        auto d = cp_at(pos);
        if (d.cp == utf8::kInvalid || !utf8::is_emoji_modifier(d.cp)) break;
        pos += d.length;
        if (d.cp == 0x200D) {
          auto joined = cp_at(pos);
          if (joined.cp != utf8::kInvalid && utf8::is_emoji(joined.cp)) pos += joined.length;
        }
      }
      emit(start, pos, TokenTag::Emoji);
      continue;
    }

    pos += cur.length;
    bool punct = cur.cp != utf8::kInvalid && utf8::is_punct(cur.cp);
    emit(start, pos, punct ? TokenTag::Punct : TokenTag::Other);
  }
  return tokens;
}

using StopwordSet = std::unordered_set<std::string>;

/// Word-tagged surfaces, lowercased, with stopwords removed. Order is preserved.
inline std::vector<std::string> normalize_tokens(std::span<const Token> tokens, const StopwordSet& stopwords) {
  std::vector<std::string> words;
  for (const auto& token : tokens) {
    if (token.tag != TokenTag::Word) continue;
    std::string lower = utf8::to_lower(token.surface);
    if (stopwords.contains(lower)) continue;
    words.push_back(std::move(lower));
  }
  return words;
}

struct CleanTweet {
  std::string id;
  std::vector<std::string> word_tokens;
  std::string original_text;
  std::optional<std::string> lang;

  bool operator==(const CleanTweet&) const = default;
};

inline CleanTweet preprocess_tweet(const RawTweet& raw, const StopwordSet& stopwords) {
  auto tokens = tokenize(raw.text);
  return CleanTweet{raw.id, normalize_tokens(tokens, stopwords), raw.text, raw.lang};
}

enum class LanguagePolicy { Metadata, Heuristic, Off };

inline std::optional<LanguagePolicy> parse_language_policy(std::string_view text) {
  if (text == "metadata") return LanguagePolicy::Metadata;
  if (text == "heuristic") return LanguagePolicy::Heuristic;
  if (text == "off") return LanguagePolicy::Off;
  return std::nullopt;
}

enum class DropReason { TooShort, Language, DuplicateId, MissingId };

inline std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::TooShort: return "too_short";
    case DropReason::Language: return "language";
    case DropReason::DuplicateId: return "duplicate_id";
    case DropReason::MissingId: return "missing_id";
  }
  return "unknown";
}

struct FilterDecision {
  bool keep = true;
  std::optional<DropReason> reason;

  static FilterDecision kept() { return {}; }
  static FilterDecision dropped(DropReason r) { return {false, r}; }
};

inline constexpr double kLatinKeepFraction = 0.8;
inline constexpr std::size_t kDefaultMinWords = 4;
inline constexpr std::size_t kDefaultChunkSize = 500;

/// Share of word tokens written in Latin script; 0 for a tweet without words.
inline double latin_fraction(const CleanTweet& t) {
  if (t.word_tokens.empty()) return 0.0;
  std::size_t latin = 0;
  for (const auto& w : t.word_tokens) {
    if (utf8::first_letter_script(w) == utf8::Script::Latin) ++latin;
  }
  return static_cast<double>(latin) / static_cast<double>(t.word_tokens.size());
}

inline bool language_accepts(const CleanTweet& t, LanguagePolicy policy) {
  switch (policy) {
    case LanguagePolicy::Off: return true;
    case LanguagePolicy::Metadata:
      // "und" is the platform's undetermined marker and falls through to the heuristic.
      if (t.lang && !t.lang->empty() && *t.lang != "und") {
        std::string code = utf8::to_lower(*t.lang);
        return code == "en" || code.starts_with("en-") || code.starts_with("en_");
      }
      [[fallthrough]];
    case LanguagePolicy::Heuristic: return latin_fraction(t) >= kLatinKeepFraction;
  }
  return true;
}

inline FilterDecision filter_tweet(const CleanTweet& t, std::size_t min_words = kDefaultMinWords,
                                   LanguagePolicy policy = LanguagePolicy::Metadata) {
  if (t.word_tokens.size() < min_words) return FilterDecision::dropped(DropReason::TooShort);
  if (!language_accepts(t, policy)) return FilterDecision::dropped(DropReason::Language);
  return FilterDecision::kept();
}

struct Chunk {
  std::size_t chunk_id = 0;
  std::vector<CleanTweet> tweets;

  bool operator==(const Chunk&) const = default;
};

struct DropRecord {
  std::string id;
  DropReason reason;
};

struct ChunkOptions {
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t min_words = kDefaultMinWords;
  LanguagePolicy policy = LanguagePolicy::Metadata;
};

struct ChunkingResult {
  std::vector<Chunk> chunks;
  std::vector<DropRecord> drops;
  std::vector<std::string> warnings;
};

/// Preprocesses, filters and groups a tweet stream into chunks of `chunk_size` survivors (last may be short).
inline ChunkingResult chunk_stream(std::span<const RawTweet> tweets, const StopwordSet& stopwords,
                                   const ChunkOptions& options = {}) {
  if (options.chunk_size < 2) throw Error(ErrorCode::InvalidArgument, "chunk_size must be >= 2");
  ChunkingResult result;
  std::unordered_set<std::string> seen;
  Chunk current;
  for (const auto& raw : tweets) {
    if (raw.id.empty()) {
      result.drops.push_back({raw.id, DropReason::MissingId});
      continue;
    }
    if (!seen.insert(raw.id).second) {
      result.drops.push_back({raw.id, DropReason::DuplicateId});
      continue;
    }
    auto clean = preprocess_tweet(raw, stopwords);
    auto decision = filter_tweet(clean, options.min_words, options.policy);
    if (!decision.keep) {
      result.drops.push_back({raw.id, *decision.reason});
      continue;
    }
    current.tweets.push_back(std::move(clean));
    if (current.tweets.size() == options.chunk_size) {
      current.chunk_id = result.chunks.size();
      result.chunks.push_back(std::move(current));
      current = Chunk{};
    }
  }
  if (!current.tweets.empty()) {
    current.chunk_id = result.chunks.size();
    result.chunks.push_back(std::move(current));
  }
  if (result.chunks.empty()) result.warnings.push_back("no tweets survived filtering; zero chunks emitted");
  return result;
}

// --- tweet stream and chunk file formats -----------------------------------------------------------

namespace detail {

struct KeyValueLine {
  std::vector<std::pair<std::string_view, std::string>> fields;

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : fields) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

inline KeyValueLine parse_key_values(std::string_view line, std::size_t line_no) {
  KeyValueLine kv;
  for (auto field : io::split(line, '\t')) {
    if (field.empty()) continue;
    auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": field without '=': " + std::string(field));
    }
    kv.fields.emplace_back(field.substr(0, eq), io::unescape_field(field.substr(eq + 1)));
  }
  return kv;
}

inline bool is_skippable(std::string_view line) { return line.empty() || line.front() == '#'; }

}  // namespace detail

/// One record per line: tab-separated key=value fields (id, text, optional lang, created_at), backslash escapes.
inline RawTweet parse_tweet_line(std::string_view line, std::size_t line_no) {
  auto kv = detail::parse_key_values(line, line_no);
  const auto* id = kv.find("id");
  const auto* text = kv.find("text");
  if (!id || !text) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": missing id or text");
  RawTweet tweet{*id, *text, std::nullopt, std::nullopt};
  if (const auto* lang = kv.find("lang")) tweet.lang = *lang;
  if (const auto* created = kv.find("created_at")) tweet.created_at = *created;
  return tweet;
}

inline std::string format_tweet_line(const RawTweet& tweet) {
  std::string line = "id=" + io::escape_field(tweet.id);
  if (tweet.lang) line += "\tlang=" + io::escape_field(*tweet.lang);
  if (tweet.created_at) line += "\tcreated_at=" + io::escape_field(*tweet.created_at);
  line += "\ttext=" + io::escape_field(tweet.text);
  return line;
}

inline std::vector<RawTweet> read_tweets(const std::filesystem::path& path) {
  std::vector<RawTweet> tweets;
  auto lines = io::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_skippable(lines[i])) continue;
    tweets.push_back(parse_tweet_line(lines[i], i + 1));
  }
  return tweets;
}

inline std::string format_tweets(std::span<const RawTweet> tweets) {
  std::string out;
  for (const auto& t : tweets) out += format_tweet_line(t) + "\n";
  return out;
}

inline constexpr std::string_view kChunkFileHeader = "# topicbench chunks v1";

inline std::string format_chunks(std::span<const Chunk> chunks) {
  std::string out(kChunkFileHeader);
  out += '\n';
  for (const auto& chunk : chunks) {
    for (const auto& t : chunk.tweets) {
      std::string tokens;
      for (std::size_t i = 0; i < t.word_tokens.size(); ++i) {
        if (i) tokens += ' ';
        tokens += t.word_tokens[i];
      }
      out += "chunk=" + std::to_string(chunk.chunk_id) + "\tid=" + io::escape_field(t.id);
      if (t.lang) out += "\tlang=" + io::escape_field(*t.lang);
      out += "\ttokens=" + io::escape_field(tokens) + "\ttext=" + io::escape_field(t.original_text) + "\n";
    }
  }
  return out;
}

inline std::vector<Chunk> parse_chunks(std::span<const std::string> lines) {
  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_skippable(lines[i])) continue;
    auto kv = detail::parse_key_values(lines[i], i + 1);
    const auto* chunk = kv.find("chunk");
    const auto* id = kv.find("id");
    const auto* tokens = kv.find("tokens");
    if (!chunk || !id || !tokens) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(i + 1) + ": chunk record needs chunk, id and tokens");
    }
    auto chunk_id = io::parse_int<std::size_t>(*chunk);
    if (!chunk_id) throw Error(ErrorCode::Parse, "line " + std::to_string(i + 1) + ": bad chunk id");
    if (chunks.empty() || chunks.back().chunk_id != *chunk_id) {
      chunks.push_back(Chunk{*chunk_id, {}});
    }
    CleanTweet tweet;
    tweet.id = *id;
    for (auto w : io::split_ws(*tokens)) tweet.word_tokens.emplace_back(w);
    if (const auto* text = kv.find("text")) tweet.original_text = *text;
    if (const auto* lang = kv.find("lang")) tweet.lang = *lang;
    chunks.back().tweets.push_back(std::move(tweet));
  }
  return chunks;
}

inline std::vector<Chunk> read_chunks(const std::filesystem::path& path) {
  auto lines = io::read_lines(path);
  return parse_chunks(lines);
}

}  // namespace topicbench

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace topicbench::utf8 {

inline constexpr char32_t kInvalid = 0xFFFFFFFF;

struct Decoded {
  char32_t cp;
  std::size_t length;  // bytes consumed, >= 1
};

/// Decodes one codepoint at `pos`. Malformed input yields kInvalid with length 1.
inline Decoded decode(std::string_view s, std::size_t pos) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {kInvalid, 1};
  }
  if (pos + len > s.size()) return {kInvalid, 1};
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return {kInvalid, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  // reject overlong forms and surrogates
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    return {kInvalid, 1};
  }
  return {cp, len};
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

enum class Script { None, Latin, Greek, Cyrillic, Hebrew, Arabic, Devanagari, Thai, Hangul, Kana, Han };

inline bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

/// Script of a letter codepoint, or Script::None when cp is not a letter.
inline Script letter_script(char32_t cp) {
  if (in(cp, 'A', 'Z') || in(cp, 'a', 'z')) return Script::Latin;
  if (cp == 0xAA || cp == 0xBA) return Script::Latin;
  if (in(cp, 0xC0, 0x24F) && cp != 0xD7 && cp != 0xF7) return Script::Latin;
  if (in(cp, 0x1E00, 0x1EFF)) return Script::Latin;
  if (in(cp, 0x370, 0x3FF) && cp != 0x37E && cp != 0x387) return Script::Greek;
  if (in(cp, 0x400, 0x4FF)) return Script::Cyrillic;
  if (in(cp, 0x5D0, 0x5EA)) return Script::Hebrew;
  if (in(cp, 0x620, 0x64A) || in(cp, 0x66E, 0x6D3) || cp == 0x6D5 || in(cp, 0x6FA, 0x6FF)) return Script::Arabic;
  if (in(cp, 0x904, 0x939) || in(cp, 0x958, 0x961)) return Script::Devanagari;
  if (in(cp, 0xE01, 0xE30)) return Script::Thai;
  if (in(cp, 0xAC00, 0xD7AF) || in(cp, 0x1100, 0x11FF)) return Script::Hangul;
  if (in(cp, 0x3041, 0x309F) || in(cp, 0x30A0, 0x30FF)) return Script::Kana;
  if (in(cp, 0x4E00, 0x9FFF) || in(cp, 0x3400, 0x4DBF)) return Script::Han;
  return Script::None;
}

/// Marks that continue a word run (combining diacritics, Arabic harakat, ZWNJ, Indic signs).
inline bool is_word_continuation(char32_t cp) {
  return in(cp, 0x300, 0x36F) || in(cp, 0x64B, 0x65F) || cp == 0x670 || cp == 0x200C || in(cp, 0x93A, 0x94F) ||
         in(cp, 0xE31, 0xE3A) || in(cp, 0xE47, 0xE4E);
}

inline bool is_digit(char32_t cp) { return in(cp, '0', '9') || in(cp, 0x660, 0x669) || in(cp, 0x6F0, 0x6F9); }

inline bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' || cp == 0xA0 ||
         in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000 ||
         cp == 0xFEFF || cp == 0x200B;
}

inline bool is_emoji(char32_t cp) {
  return in(cp, 0x1F000, 0x1FAFF) || in(cp, 0x2600, 0x27BF) || in(cp, 0x2B05, 0x2B55) || cp == 0x231A ||
         cp == 0x231B || in(cp, 0x23E9, 0x23FA) || cp == 0x2764;
}

/// Codepoints that extend a preceding emoji: variation selector, ZWJ, skin tones, tag characters, keycap.
inline bool is_emoji_modifier(char32_t cp) {
  return cp == 0xFE0F || cp == 0x200D || in(cp, 0x1F3FB, 0x1F3FF) || in(cp, 0xE0020, 0xE007F) || cp == 0x20E3;
}

inline bool is_punct(char32_t cp) {
  if (cp < 0x80) return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
                        (cp >= 0x7B && cp <= 0x7E);
  return (in(cp, 0xA1, 0xBF) && cp != 0xAA && cp != 0xBA) || cp == 0xD7 || cp == 0xF7 || in(cp, 0x2010, 0x2027) ||
         in(cp, 0x2030, 0x205E) || in(cp, 0x20A0, 0x20CF) || in(cp, 0x3001, 0x303F) || cp == 0x60C || cp == 0x61B ||
         cp == 0x61F || in(cp, 0x66A, 0x66D) || cp == 0x6D4 || cp == 0x37E || cp == 0x387;
}

inline char32_t to_lower(char32_t cp) {
  if (in(cp, 'A', 'Z')) return cp + 32;
  if (cp < 0x80) return cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 32;
  if (in(cp, 0x100, 0x17F)) {
    // Latin Extended-A alternates upper/lower, with the parity flipping at U+0139..U+0148 and U+0179..U+017E.
    if (cp == 0x130) return 'i';
    if (cp == 0x178) return 0xFF;
    bool odd_upper = in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E);
    bool is_upper = odd_upper ? (cp % 2 == 1) : (cp % 2 == 0);
    if (cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    return is_upper ? cp + 1 : cp;
  }
  if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 32;
  if (in(cp, 0x410, 0x42F)) return cp + 32;
  if (in(cp, 0x400, 0x40F)) return cp + 80;
  return cp;
}

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto d = decode(s, pos);
    if (d.cp == kInvalid) {
      out += s[pos];
    } else {
      append(out, to_lower(d.cp));
    }
    pos += d.length;
  }
  return out;
}

/// Script of the first letter in `s`.
inline Script first_letter_script(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto d = decode(s, pos);
    auto script = letter_script(d.cp);
    if (script != Script::None) return script;
    pos += d.length;
  }
  return Script::None;
}

}  // namespace topicbench::utf8

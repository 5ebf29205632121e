/// @file readability.hpp
/// @brief Gunning Fog and Linsear Write grade levels.
///
/// Syllables come from a rule-based counter instead of a pronunciation
/// dictionary, so scores are reproducible on any machine:
///
///  1. Lowercase the word and keep letters only. Words without letters
///     (numbers, codes) count as one syllable.
///  2. Drop a silent "-ed" (not after t or d) and a silent "-es" (not after
///     s, x, z, ch, sh, c or g).
///  3. Drop a silent final "e", except in a consonant + "le" ending.
///  4. Count maximal groups of vowels (a e i o u, plus y when not first).
///  5. At least one syllable per word. Hyphenated words sum their parts.
///
/// Sentences end at '.', '!' or '?' followed by whitespace or end of line.
/// Every line break also ends a sentence, so unpunctuated Gherkin steps count
/// one sentence each.
#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/errors.hpp"
#include "requireceg/text.hpp"

namespace requireceg::metrics {

struct ReadabilityScores {
  double gunning_fog = 0.0;
  double linsear_write = 0.0;
  std::size_t word_count = 0;
  std::size_t sentence_count = 0;
  std::size_t complex_word_count = 0;
};

inline constexpr std::size_t kLinsearWindow = 100;

namespace detail {

inline bool is_vowel(std::string_view w, std::size_t i) {
  char c = w[i];
  if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
  return c == 'y' && i > 0;
}

inline bool consonant_at(std::string_view w, std::size_t i) { return i < w.size() && !is_vowel(w, i); }

inline std::size_t syllables_of_part(std::string_view raw) {
  std::string w;
  for (char c : raw)
    if (std::isalpha(static_cast<unsigned char>(c))) w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (w.empty()) return raw.empty() ? 0 : 1;
  if (w.size() <= 3) return 1;

  std::string_view s = w;
  if (s.ends_with("ed") && s.size() > 4) {
    char p = s[s.size() - 3];
    if (p != 't' && p != 'd') s.remove_suffix(2);
  } else if (s.ends_with("es") && s.size() > 4) {
    std::string_view stem = s.substr(0, s.size() - 2);
    bool sibilant = stem.ends_with("s") || stem.ends_with("x") || stem.ends_with("z") || stem.ends_with("ch") ||
                    stem.ends_with("sh") || stem.ends_with("c") || stem.ends_with("g");
    if (!sibilant) s.remove_suffix(1);  // "makes" -> "make", then the silent e rule applies
  }
  if (s.size() > 2 && s.back() == 'e') {
    bool le = s[s.size() - 2] == 'l' && consonant_at(s, s.size() - 3);
    if (!le) s.remove_suffix(1);
  }

  std::size_t n = 0;
  bool prev = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool v = is_vowel(s, i);
    if (v && !prev) ++n;
    prev = v;
  }
  return n == 0 ? 1 : n;
}

struct Word {
  std::string text;
  std::size_t syllables = 0;
  bool sentence_start = false;
};

struct Tokenized {
  std::vector<Word> words;
  std::vector<std::size_t> sentence_ends;  // index one past the last word of each sentence
};

inline bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-' || static_cast<unsigned char>(c) >= 0x80;
}

inline Tokenized tokenize(std::string_view t) {
  Tokenized out;
  bool start = true;
  auto close = [&] {
    if (!out.words.empty() && (out.sentence_ends.empty() || out.sentence_ends.back() != out.words.size()))
      out.sentence_ends.push_back(out.words.size());
    start = true;
  };
  for (const auto& line : text::split_lines(t)) {
    std::size_t i = 0;
    while (i < line.size()) {
      char c = line[i];
      if (word_char(c)) {
        std::size_t j = i;
        while (j < line.size() && word_char(line[j])) ++j;
        std::string tok = line.substr(i, j - i);
        bool has_alnum = false;
        for (char ch : tok) has_alnum |= std::isalnum(static_cast<unsigned char>(ch)) != 0;
        if (has_alnum) {
          std::size_t syl = 0;
          for (const auto& part : text::split(tok, '-')) syl += syllables_of_part(part);
          out.words.push_back({tok, syl == 0 ? 1 : syl, start});
          start = false;
        }
        i = j;
      } else if (c == '.' || c == '!' || c == '?') {
        std::size_t j = i;
        while (j < line.size() && (line[j] == '.' || line[j] == '!' || line[j] == '?')) ++j;
        if (j == line.size() || text::is_space(line[j])) close();
        i = j;
      } else {
        ++i;
      }
    }
    close();
  }
  return out;
}

/// Capitalized word that does not open a sentence.
inline bool proper_noun(const Word& w) {
  return !w.sentence_start && std::isupper(static_cast<unsigned char>(w.text[0]));
}

/// Three or more syllables that survive removing an -es, -ed or -ing ending.
inline bool complex_word(const Word& w) {
  if (w.syllables < 3 || proper_noun(w)) return false;
  std::string lw = text::to_lower(w.text);
  for (std::string_view suf : {"ing", "es", "ed"}) {
    if (lw.size() > suf.size() + 2 && lw.ends_with(suf)) {
      std::string base = w.text.substr(0, w.text.size() - suf.size());
      std::size_t syl = 0;
      for (const auto& part : text::split(base, '-')) syl += syllables_of_part(part);
      return syl >= 3;
    }
  }
  return true;
}

}  // namespace detail

/// Syllables of a single word per the rules at the top of this file.
inline std::size_t count_syllables(std::string_view word) {
  std::size_t n = 0;
  for (const auto& part : text::split(word, '-')) n += detail::syllables_of_part(part);
  return n == 0 ? 1 : n;
}

/// Linsear Write raw grade before clamping.
inline double linsear_raw(std::size_t easy, std::size_t hard, std::size_t sentences) {
  double r = static_cast<double>(easy + 3 * hard) / static_cast<double>(sentences);
  return r > 20.0 ? r / 2.0 : (r - 2.0) / 2.0;
}

inline ReadabilityScores readability(std::string_view text) {
  if (text::trim_view(text).empty()) throw EmptyText();
  auto tk = detail::tokenize(text);
  if (tk.words.empty()) throw EmptyText();
  ReadabilityScores r;
  r.word_count = tk.words.size();
  r.sentence_count = tk.sentence_ends.size();
  for (const auto& w : tk.words) r.complex_word_count += detail::complex_word(w);
  const double W = static_cast<double>(r.word_count);
  r.gunning_fog = 0.4 * (W / static_cast<double>(r.sentence_count) + 100.0 * static_cast<double>(r.complex_word_count) / W);

  // a sentence cut by the window still counts
  std::size_t window = std::min(kLinsearWindow, tk.words.size());
  std::size_t easy = 0, hard = 0, sentences = 0;
  for (std::size_t i = 0; i < window; ++i) (tk.words[i].syllables >= 3 ? hard : easy)++;
  for (std::size_t end : tk.sentence_ends) {
    ++sentences;
    if (end >= window) break;
  }
  r.linsear_write = std::max(0.0, linsear_raw(easy, hard, sentences));
  return r;
}

inline nlohmann::json to_json_value(const ReadabilityScores& r) {
  return {{"gunning_fog", r.gunning_fog},
          {"linsear_write", r.linsear_write},
          {"word_count", r.word_count},
          {"sentence_count", r.sentence_count},
          {"complex_word_count", r.complex_word_count}};
}

}  // namespace requireceg::metrics

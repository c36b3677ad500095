#include <algorithm>
#include <sstream>

#include "argq/textproc.hpp"
#include "json.hpp"

namespace argq::textproc {

namespace {

bool is_terminal(const Token& t) {
  if (t.kind != TokenKind::punctuation) return false;
  for (char32_t c : decode_utf8(t.surface)) {
    if (c != '.' && c != '!' && c != '?' && c != 0x2026) return false;
  }
  return true;
}

bool is_closer(const Token& t) {
  if (t.kind != TokenKind::punctuation) return false;
  static const std::vector<std::string> closers = {
      "\"", "'", ")", "]", "}", "\xE2\x80\x9D", "\xE2\x80\x99", "\xC2\xBB"};
  return std::find(closers.begin(), closers.end(), t.surface) != closers.end();
}

bool is_phrase_separator(const Token& t) {
  if (t.kind != TokenKind::punctuation) return false;
  for (char32_t c : decode_utf8(t.surface)) {
    if (c != ',' && c != ';' && c != ':' && c != '-' && c != 0x2013 && c != 0x2014) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool has_blank_line(std::string_view text, std::size_t from, std::size_t to) {
  int newlines = 0;
  for (std::size_t i = from; i < to && i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      if (++newlines >= 2) return true;
    } else if (c != ' ' && c != '\t' && c != '\r' && c != '\f' && c != '\v') {
      newlines = 0;
    }
  }
  return false;
}

std::vector<Range> split_sentences(std::string_view text, std::span<const Token> tokens,
                                   const std::unordered_set<std::string>& abbreviations) {
  std::vector<Range> sentences;
  std::size_t start = 0;
  auto close = [&](std::size_t end) {
    if (end > start) sentences.push_back({start, end});
    start = end;
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > start && has_blank_line(text, tokens[i - 1].span.second, tokens[i].span.first)) {
      close(i);
    }
    const Token& t = tokens[i];
    if (!is_terminal(t)) continue;
    if (t.surface == "." && i > start) {
      const Token& prev = tokens[i - 1];
      if (prev.kind == TokenKind::word && abbreviations.count(prev.lower)) continue;
      // List marker "1." opening a sentence.
      if (prev.kind == TokenKind::number && i - 1 == start) continue;
    }
    std::size_t end = i + 1;
    // Mixed runs such as "?!" and closing quotes or brackets stay with the sentence.
    while (end < tokens.size() && (is_terminal(tokens[end]) || is_closer(tokens[end])) &&
           !has_blank_line(text, tokens[end - 1].span.second, tokens[end].span.first)) {
      ++end;
    }
    close(end);
    i = end - 1;
  }
  close(tokens.size());
  return sentences;
}

std::vector<Range> split_paragraphs(std::string_view text, std::span<const Token> tokens,
                                    std::span<const Range> sentences) {
  std::vector<Range> paragraphs;
  std::size_t start = 0;
  for (std::size_t s = 1; s < sentences.size(); ++s) {
    const auto prev_end = tokens[sentences[s - 1].end - 1].span.second;
    const auto next_begin = tokens[sentences[s].begin].span.first;
    if (has_blank_line(text, prev_end, next_begin)) {
      paragraphs.push_back({start, s});
      start = s;
    }
  }
  if (!sentences.empty()) paragraphs.push_back({start, sentences.size()});
  return paragraphs;
}

std::vector<Range> split_phrases(std::span<const Token> tokens, std::span<const Range> sentences) {
  std::vector<Range> phrases;
  for (const Range& s : sentences) {
    std::size_t seg = s.begin;
    auto flush = [&](std::size_t end) {
      const bool content = std::any_of(tokens.begin() + static_cast<std::ptrdiff_t>(seg),
                                       tokens.begin() + static_cast<std::ptrdiff_t>(end),
                                       [](const Token& t) {
                                         return t.kind != TokenKind::punctuation;
                                       });
      if (content) phrases.push_back({seg, end});
    };
    for (std::size_t i = s.begin; i < s.end; ++i) {
      if (is_phrase_separator(tokens[i])) {
        flush(i);
        seg = i + 1;
      }
    }
    flush(s.end);
  }
  return phrases;
}

int count_syllables(std::string_view word) {
  bool any_letter = false;
  std::string letters;
  for (char32_t cp : decode_utf8(word)) {
    if (!is_letter(cp)) continue;
    any_letter = true;
    const char32_t lc = to_lower(cp);
    if (lc < 0x80) letters += static_cast<char>(lc);
  }
  if (!any_letter) return 0;

  auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool in_group = false;
  for (char c : letters) {
    if (vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  const std::size_t n = letters.size();
  if (groups > 1 && n >= 2 && letters[n - 1] == 'e' && !vowel(letters[n - 2])) {
    const bool consonant_le = letters[n - 2] == 'l' && n >= 3 && !vowel(letters[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

std::size_t DocumentAnalysis::word_count() const {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [](const Token& t) { return t.kind == TokenKind::word; }));
}

std::size_t DocumentAnalysis::char_count() const {
  std::size_t n = 0;
  for (auto c : char_counts) n += c;
  return n;
}

DocumentAnalysis Analyzer::analyze(std::string_view text) const {
  DocumentAnalysis a;
  a.text = std::string(text);
  a.tokens = tokenize(text);
  a.sentences = split_sentences(text, a.tokens, abbreviations);
  a.paragraphs = split_paragraphs(text, a.tokens, a.sentences);
  a.phrases = split_phrases(a.tokens, a.sentences);
  if (tagger) {
    a.pos_tags = tagger->tag(a.tokens);
  } else {
    a.pos_tags = RuleTagger({}, {}).tag(a.tokens);
  }
  a.syllables.reserve(a.tokens.size());
  for (const auto& t : a.tokens) {
    a.syllables.push_back(t.kind == TokenKind::word ? count_syllables(t.surface) : 0);
  }
  a.char_counts = classify_chars(text);
  return a;
}

std::string to_json(const DocumentAnalysis& a) {
  nlohmann::ordered_json j;
  auto ranges = [](const std::vector<Range>& rs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rs) arr.push_back({r.begin, r.end});
    return arr;
  };
  nlohmann::ordered_json toks = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    const auto& t = a.tokens[i];
    toks.push_back({t.surface, t.span.first, t.span.second, static_cast<int>(t.kind),
                    std::string(tag_name(a.pos_tags[i])), a.syllables[i]});
  }
  j["tokens"] = std::move(toks);
  j["sentences"] = ranges(a.sentences);
  j["paragraphs"] = ranges(a.paragraphs);
  j["phrases"] = ranges(a.phrases);
  j["chars"] = {a.char_counts[0], a.char_counts[1], a.char_counts[2], a.char_counts[3]};
  return j.dump();
}

}  // namespace argq::textproc

#include <algorithm>

#include "argq/textproc.hpp"

namespace argq::textproc {

namespace {

struct Cursor {
  // offsets is filled while cps is decoded, so it must be declared first.
  std::vector<std::size_t> offsets;  // byte offset of each scalar, plus end
  std::vector<char32_t> cps;

  explicit Cursor(std::string_view text) : cps(decode_utf8(text, &offsets)) {}

  std::size_t size() const { return cps.size(); }
  char32_t at(std::size_t i) const { return i < cps.size() ? cps[i] : 0; }
};

bool is_ascii_alpha(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }
bool is_alnum(char32_t c) { return is_letter(c) || is_digit(c); }
bool is_space(char32_t c) { return classify(c) == CharClass::whitespace; }

bool is_emoji_base(char32_t c) {
  return (c >= 0x1F000 && c <= 0x1FAFF) || (c >= 0x2600 && c <= 0x27BF) ||
         (c >= 0x2B00 && c <= 0x2BFF) || (c >= 0x231A && c <= 0x23FF) || c == 0x2764 ||
         c == 0x00A9 || c == 0x00AE || c == 0x203C || c == 0x2049 || c == 0x2122;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    switch (c) {
      case '!': case '"': case '#': case '%': case '&': case '\'': case '(': case ')':
      case '*': case ',': case '-': case '.': case '/': case ':': case ';': case '?':
      case '@': case '[': case '\\': case ']': case '_': case '{': case '}':
        return true;
      default:
        return false;
    }
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) || c == 0xA1 ||
         c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 || c == 0xBB || c == 0xBF ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011);
}

bool starts_with_ci(const Cursor& cur, std::size_t i, std::string_view prefix) {
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char32_t c = cur.at(i + k);
    if (c >= 'A' && c <= 'Z') c += 32;
    if (c != static_cast<unsigned char>(prefix[k])) return false;
  }
  return true;
}

std::size_t match_url(const Cursor& cur, std::size_t i) {
  if (!(starts_with_ci(cur, i, "http://") || starts_with_ci(cur, i, "https://") ||
        starts_with_ci(cur, i, "www."))) {
    return 0;
  }
  std::size_t j = i;
  while (j < cur.size() && !is_space(cur.at(j))) ++j;
  // Trailing sentence punctuation and closing brackets are not part of the URL.
  auto trailing = [](char32_t c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' ||
           c == ')' || c == ']' || c == '}' || c == '"' || c == '\'' || c == 0x201D ||
           c == 0x2019;
  };
  while (j > i && trailing(cur.at(j - 1))) --j;
  return j - i;
}

std::size_t match_emoticon(const Cursor& cur, std::size_t i) {
  std::size_t best = 0;
  for (const auto& e : ascii_emoticons()) {
    if (e.size() <= best || i + e.size() > cur.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < e.size() && ok; ++k) {
      ok = cur.at(i + k) == static_cast<unsigned char>(e[k]);
    }
    if (!ok || is_alnum(cur.at(i + e.size()))) continue;
    // "XD", "o_O" must not continue a word.
    const bool letter_start = is_ascii_alpha(static_cast<unsigned char>(e.front()));
    if (letter_start && i > 0 && is_alnum(cur.at(i - 1))) continue;
    best = e.size();
  }
  return best;
}

std::size_t match_emoji(const Cursor& cur, std::size_t i) {
  const char32_t c = cur.at(i);
  if (c >= 0x1F1E6 && c <= 0x1F1FF) {
    const char32_t n = cur.at(i + 1);
    return (n >= 0x1F1E6 && n <= 0x1F1FF) ? 2 : 1;
  }
  if (!is_emoji_base(c)) return 0;
  std::size_t j = i + 1;
  while (j < cur.size()) {
    const char32_t n = cur.at(j);
    if (n == 0xFE0F || n == 0xFE0E || n == 0x20E3 || (n >= 0x1F3FB && n <= 0x1F3FF)) {
      ++j;
    } else if (n == 0x200D && is_emoji_base(cur.at(j + 1))) {
      j += 2;
    } else {
      break;
    }
  }
  return j - i;
}

// "e.g.", "i.e.", "U.S.": single letters each followed by a period, at least twice.
std::size_t match_dotted(const Cursor& cur, std::size_t i) {
  if (i > 0 && is_alnum(cur.at(i - 1))) return 0;
  std::size_t j = i;
  int pairs = 0;
  while (is_letter(cur.at(j)) && cur.at(j + 1) == '.') {
    j += 2;
    ++pairs;
  }
  return pairs >= 2 ? j - i : 0;
}

bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

std::size_t match_word(const Cursor& cur, std::size_t i, bool& numeric) {
  std::size_t j = i;
  bool has_letter = false;
  while (j < cur.size()) {
    const char32_t c = cur.at(j);
    if (is_alnum(c)) {
      has_letter = has_letter || is_letter(c);
      ++j;
      continue;
    }
    const char32_t next = cur.at(j + 1);
    if (is_apostrophe(c) && j > i && is_letter(cur.at(j - 1)) && is_letter(next)) {
      j += 2;
      continue;
    }
    if (c == '-' && j > i && is_alnum(cur.at(j - 1)) && is_alnum(next)) {
      j += 2;
      has_letter = has_letter || is_letter(next);
      continue;
    }
    if ((c == '.' || c == ',') && j > i && is_digit(cur.at(j - 1)) && is_digit(next)) {
      j += 2;
      continue;
    }
    break;
  }
  numeric = !has_letter;
  return j - i;
}

}  // namespace

const std::vector<std::string>& ascii_emoticons() {
  static const std::vector<std::string> list = {
      ":)", ":-)", ":(", ":-(", ":D", ":-D", ";)", ";-)", ":P", ":-P", ":p", ":-p",
      ":o", ":-o", ":O", ":/", ":-/", ":|", ":-|", ":'(", ":*", ":-*", "<3", "</3",
      "XD", "xD", "=)", "=(", "^^", "^_^", "-_-", "o_O", ":]", ":["};
  return list;
}

std::vector<Token> tokenize(std::string_view text) {
  const Cursor cur(text);
  std::vector<Token> tokens;

  auto emit = [&](std::size_t from, std::size_t len, TokenKind kind) {
    Token t;
    const auto b = cur.offsets[from];
    const auto e = cur.offsets[from + len];
    t.surface = std::string(text.substr(b, e - b));
    t.lower = fold_case(t.surface);
    t.span = {b, e};
    t.kind = kind;
    tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < cur.size()) {
    const char32_t c = cur.at(i);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (std::size_t n = match_url(cur, i)) {
      emit(i, n, TokenKind::url);
      i += n;
      continue;
    }
    if (std::size_t n = match_emoticon(cur, i)) {
      emit(i, n, TokenKind::emoji);
      i += n;
      continue;
    }
    if (std::size_t n = match_emoji(cur, i)) {
      emit(i, n, TokenKind::emoji);
      i += n;
      continue;
    }
    if (is_letter(c)) {
      if (std::size_t n = match_dotted(cur, i)) {
        emit(i, n, TokenKind::word);
        i += n;
        continue;
      }
    }
    if (is_alnum(c)) {
      bool numeric = false;
      const std::size_t n = match_word(cur, i, numeric);
      emit(i, n, numeric ? TokenKind::number : TokenKind::word);
      i += n;
      continue;
    }
    if (is_punct(c)) {
      std::size_t n = 1;
      while (cur.at(i + n) == c) ++n;
      emit(i, n, TokenKind::punctuation);
      i += n;
      continue;
    }
    emit(i, 1, TokenKind::other);
    ++i;
  }
  return tokens;
}

}  // namespace argq::textproc

#include <algorithm>
#include <array>
#include <sstream>

#include "argq/errors.hpp"
#include "argq/textproc.hpp"
#include "argq/util.hpp"

namespace argq::textproc {

namespace {

constexpr std::array<std::string_view, kNumPosTags> kTagNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ", "PRT", "PUNCT", "X"};

PosTag parse_tag(std::string_view name, const std::filesystem::path& file) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) return static_cast<PosTag>(i);
  }
  throw ConfigError("unknown POS tag '" + std::string(name) + "' in " + file.string());
}

std::pair<std::string, std::string> two_fields(const std::string& line,
                                               const std::filesystem::path& file) {
  std::istringstream in(line);
  std::string a, b;
  if (!(in >> a >> b)) {
    throw ConfigError("malformed line '" + line + "' in " + file.string());
  }
  return {a, b};
}

bool triggers_verb(const std::string& lower) {
  static const std::array<std::string_view, 19> triggers = {
      "can", "could", "will", "would", "shall", "should", "may", "might", "must",
      "i",   "you",   "we",   "they", "do",    "does",   "did", "to",    "not", "n't"};
  return std::find(triggers.begin(), triggers.end(), lower) != triggers.end();
}

}  // namespace

std::string_view tag_name(PosTag t) { return kTagNames[static_cast<std::size_t>(t)]; }

RuleTagger::RuleTagger(std::unordered_map<std::string, PosTag> lexicon,
                       std::vector<std::pair<std::string, PosTag>> suffixes)
    : lexicon_(std::move(lexicon)), suffixes_(std::move(suffixes)) {
  std::stable_sort(suffixes_.begin(), suffixes_.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

RuleTagger RuleTagger::from_files(const std::filesystem::path& lexicon,
                                  const std::filesystem::path& suffixes) {
  std::unordered_map<std::string, PosTag> lex;
  for (const auto& line : util::read_list_file(lexicon)) {
    auto [word, tag] = two_fields(line, lexicon);
    lex.emplace(word, parse_tag(tag, lexicon));
  }
  std::vector<std::pair<std::string, PosTag>> suf;
  for (const auto& line : util::read_list_file(suffixes)) {
    auto [s, tag] = two_fields(line, suffixes);
    suf.emplace_back(s, parse_tag(tag, suffixes));
  }
  return RuleTagger(std::move(lex), std::move(suf));
}

std::vector<PosTag> RuleTagger::tag(std::span<const Token> tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    switch (t.kind) {
      case TokenKind::number:
        tags.push_back(PosTag::NUM);
        continue;
      case TokenKind::punctuation:
        tags.push_back(PosTag::PUNCT);
        continue;
      case TokenKind::url:
      case TokenKind::emoji:
      case TokenKind::other:
        tags.push_back(PosTag::X);
        continue;
      case TokenKind::word:
        break;
    }
    if (auto it = lexicon_.find(t.lower); it != lexicon_.end()) {
      tags.push_back(it->second);
      continue;
    }
    bool matched = false;
    for (const auto& [suffix, tag] : suffixes_) {
      if (t.lower.size() >= suffix.size() + 2 &&
          t.lower.compare(t.lower.size() - suffix.size(), suffix.size(), suffix) == 0) {
        tags.push_back(tag);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    const bool after_trigger = i > 0 && tokens[i - 1].kind == TokenKind::word &&
                               triggers_verb(tokens[i - 1].lower);
    tags.push_back(after_trigger ? PosTag::VERB : PosTag::NOUN);
  }
  return tags;
}

}  // namespace argq::textproc

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <set>

#include "argq/errors.hpp"
#include "argq/features.hpp"

#ifndef ARGQ_DEFAULT_DATA_DIR
#define ARGQ_DEFAULT_DATA_DIR "data"
#endif

namespace argq::features {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::string_view label;
};

constexpr std::array<FamilyInfo, kNumFamilies> kFamilies = {{
    {Family::content, "content", "Content"},
    {Family::embedding, "embedding", "Embedding"},
    {Family::style, "style", "Style"},
    {Family::structure, "structure", "Structure"},
    {Family::length, "length", "Length"},
    {Family::textquality, "textquality", "Text quality"},
    {Family::evidence, "evidence", "Evidence"},
    {Family::subjectivity, "subjectivity", "Subjectivity"},
}};

void check_fraction(double v, const char* key) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw ConfigError(std::string(key) + " must be in (0, 1], got " + std::to_string(v));
  }
}

}  // namespace

const std::array<Family, kNumFamilies>& all_families() {
  static const std::array<Family, kNumFamilies> fs = [] {
    std::array<Family, kNumFamilies> a{};
    for (std::size_t i = 0; i < kNumFamilies; ++i) a[i] = kFamilies[i].family;
    return a;
  }();
  return fs;
}

std::string_view family_name(Family f) { return kFamilies[static_cast<std::size_t>(f)].name; }
std::string_view family_label(Family f) { return kFamilies[static_cast<std::size_t>(f)].label; }

std::optional<Family> parse_family(std::string_view name) {
  for (const auto& info : kFamilies) {
    if (info.name == name) return info.family;
  }
  return std::nullopt;
}

std::size_t FamilySet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Family> FamilySet::members() const {
  std::vector<Family> out;
  for (Family f : all_families()) {
    if (contains(f)) out.push_back(f);
  }
  return out;
}

std::vector<std::string> FamilySet::names() const {
  std::vector<std::string> out;
  for (Family f : members()) out.emplace_back(family_name(f));
  return out;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("ARGQ_DATA_DIR"); env && *env) return env;
  return ARGQ_DEFAULT_DATA_DIR;
}

ExtractorConfig ExtractorConfig::with_data_dir(const std::filesystem::path& dir) {
  ExtractorConfig c;
  c.data_dir = dir;
  c.abbreviations = dir / "abbreviations.txt";
  c.pos_lexicon = dir / "pos_lexicon.txt";
  c.pos_suffixes = dir / "pos_suffixes.txt";
  c.positive = dir / "lexicon" / "positive.txt";
  c.negative = dir / "lexicon" / "negative.txt";
  c.hedging = dir / "lexicon" / "hedging.txt";
  c.enumeration = dir / "enumeration.txt";
  c.emoji = dir / "emoji.txt";
  c.pronouns = dir / "pronouns.txt";
  c.wordlist = dir / "wordlist.txt";
  c.adu_premise = dir / "adu_premise.txt";
  c.adu_conclusion = dir / "adu_conclusion.txt";
  c.spell_categories = dir / "spellcheck_categories.txt";
  c.readability.assign(readability_ids().begin(), readability_ids().end());
  return c;
}

void ExtractorConfig::validate() const {
  check_fraction(content_min_df, "content_min_df");
  check_fraction(style_pos_min_df, "style_pos_min_df");
  check_fraction(style_char_min_df, "style_char_min_df");
  if (structure_first_min_count < 1) {
    throw ConfigError("structure_first_min_count must be >= 1");
  }
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  if (readability.size() != kNumReadability) {
    throw ConfigError("readability must list exactly 10 score ids, got " +
                      std::to_string(readability.size()));
  }
  for (const auto& id : readability) {
    const auto& known = readability_ids();
    if (std::find(known.begin(), known.end(), id) == known.end()) {
      throw ConfigError("unknown readability score id '" + id + "'");
    }
  }
  auto sorted = readability;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("readability score ids must be distinct");
  }
  if (spellcheck == SpellMode::service && spellcheck_url.empty()) {
    throw ConfigError("spellcheck_url is required in service mode");
  }
}

PhraseMatcher::PhraseMatcher(const std::vector<std::string>& entries) {
  std::set<std::vector<std::string>> seen;
  for (const auto& e : entries) {
    const auto toks = textproc::tokenize(e);
    if (toks.empty()) continue;
    Entry entry;
    for (const auto& t : toks) entry.tokens.push_back(t.lower);
    if (!seen.insert(entry.tokens).second) continue;
    entry.starts_with_number = toks.front().kind == textproc::TokenKind::number;
    entries_.push_back(std::move(entry));
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.tokens.size() > b.tokens.size();
  });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    by_first_[entries_[i].tokens.front()].push_back(i);
  }
}

std::size_t PhraseMatcher::count(std::span<const textproc::Token> tokens, textproc::Range range,
                                 bool sentence_initial_numbers) const {
  std::size_t matches = 0;
  std::size_t i = range.begin;
  while (i < range.end) {
    std::size_t matched = 0;
    if (auto it = by_first_.find(tokens[i].lower); it != by_first_.end()) {
      for (std::size_t idx : it->second) {  // longest first
        const Entry& e = entries_[idx];
        if (sentence_initial_numbers && e.starts_with_number && i != range.begin) continue;
        if (i + e.tokens.size() > range.end) continue;
        bool ok = true;
        for (std::size_t k = 1; k < e.tokens.size() && ok; ++k) {
          ok = tokens[i + k].lower == e.tokens[k];
        }
        if (ok) {
          matched = e.tokens.size();
          break;
        }
      }
    }
    if (matched) {
      ++matches;
      i += matched;
    } else {
      ++i;
    }
  }
  return matches;
}

}  // namespace argq::features

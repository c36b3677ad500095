#include <algorithm>

#include "argq/errors.hpp"
#include "argq/features.hpp"
#include "argq/util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace argq::features {

using textproc::TokenKind;

namespace {

std::string normalize_apostrophes(std::string s) {
  const std::string curly = "\xE2\x80\x99";
  for (std::size_t pos; (pos = s.find(curly)) != std::string::npos;) s.replace(pos, 3, "'");
  return s;
}

bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool starts_lowercase(const std::string& surface) {
  const auto cps = textproc::decode_utf8(surface);
  return !cps.empty() && textproc::is_lower(cps.front());
}

}  // namespace

OfflineSpellChecker::OfflineSpellChecker(std::vector<std::string> words) {
  words_.reserve(words.size());
  for (auto& w : words) words_.emplace(textproc::fold_case(w), true);
}

bool OfflineSpellChecker::known(const std::string& lower) const {
  if (words_.count(lower)) return true;
  const std::string w = normalize_apostrophes(lower);
  if (words_.count(w)) return true;
  if (w.find('.') != std::string::npos) return true;  // dotted abbreviation
  for (std::string_view suffix : {"'s", "'"}) {
    if (w.size() > suffix.size() && w.ends_with(suffix) &&
        words_.count(w.substr(0, w.size() - suffix.size()))) {
      return true;
    }
  }
  if (w.find('-') != std::string::npos) {
    bool all = true;
    bool any = false;
    for (const auto& part : util::split(w, '-')) {
      if (part.empty()) continue;
      any = true;
      all = all && words_.count(part);
    }
    return any && all;
  }
  return false;
}

SpellCounts OfflineSpellChecker::check(const textproc::DocumentAnalysis& doc) const {
  SpellCounts c;
  c.tokens = doc.tokens.size();
  const textproc::Token* prev_word = nullptr;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const auto& t = doc.tokens[i];
    if (t.kind != TokenKind::word) {
      if (t.kind == TokenKind::punctuation) prev_word = nullptr;
      continue;
    }
    if (!has_digit(t.lower) && !known(t.lower)) c.unknown_words += 1;
    if (prev_word && prev_word->lower == t.lower) c.hints += 1;
    prev_word = &t;
  }
  for (const auto& s : doc.sentences) {
    for (std::size_t i = s.begin; i < s.end; ++i) {
      const auto& t = doc.tokens[i];
      if (t.kind == TokenKind::punctuation) continue;
      if (t.kind == TokenKind::word && starts_lowercase(t.surface)) c.hints += 1;
      break;
    }
  }
  return c;
}

ServiceSpellChecker::ServiceSpellChecker(std::string url, std::string language,
                                         std::map<std::string, std::string> category_buckets)
    : url_(std::move(url)), language_(std::move(language)), buckets_(std::move(category_buckets)) {}

SpellCounts ServiceSpellChecker::parse_response(std::string_view body, std::size_t tokens) const {
  SpellCounts c;
  c.tokens = tokens;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError(std::string("spell-check service returned invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("matches") || !j["matches"].is_array()) {
    throw ServiceError("spell-check service response has no \"matches\" array");
  }
  for (const auto& m : j["matches"]) {
    std::string category;
    if (m.contains("rule") && m["rule"].contains("category") &&
        m["rule"]["category"].contains("id") && m["rule"]["category"]["id"].is_string()) {
      category = m["rule"]["category"]["id"].get<std::string>();
    }
    const auto it = buckets_.find(category);
    const std::string bucket = it == buckets_.end() ? "other" : it->second;
    if (bucket == "hints") {
      c.hints += 1;
    } else if (bucket == "unknown_words") {
      c.unknown_words += 1;
    } else {
      c.other += 1;
    }
  }
  return c;
}

SpellCounts ServiceSpellChecker::check(const textproc::DocumentAnalysis& doc) const {
  const auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("spellcheck_url lacks a scheme: " + url_);
  const auto path_start = url_.find('/', scheme_end + 3);
  const std::string base = url_.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  const httplib::Params params = {{"text", doc.text}, {"language", language_}};
  const auto res = client.Post(path, params);
  if (!res) {
    throw ServiceError("spell-check service unreachable at " + url_ + ": " +
                       httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ServiceError("spell-check service returned HTTP " + std::to_string(res->status));
  }
  return parse_response(res->body, doc.tokens.size());
}

SpellCounts spell_errors(const textproc::DocumentAnalysis& doc, const SpellChecker& checker) {
  return checker.check(doc);
}

}  // namespace argq::features

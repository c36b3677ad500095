#include <algorithm>
#include <sstream>

#include "argq/errors.hpp"
#include "argq/features.hpp"
#include "argq/util.hpp"
#include "parallel.hpp"

namespace argq::features {

using textproc::TokenKind;

namespace {

constexpr std::array<std::string_view, 6> kLengthUnits = {
    "chars", "syllables", "tokens", "phrases", "sentences", "paragraphs"};
constexpr std::array<std::string_view, 6> kPronounClasses = {"1sg", "1pl", "2sg",
                                                             "2pl", "3sg", "3pl"};
constexpr std::array<std::string_view, 3> kSpellBuckets = {"hints", "unknown_words", "other"};

std::string hash_file(const std::filesystem::path& p) {
  return util::hex64(util::fnv1a(util::read_file(p)));
}

std::unordered_map<std::string, PronounClass> load_pronouns(const std::filesystem::path& p) {
  std::unordered_map<std::string, PronounClass> out;
  for (const auto& line : util::read_list_file(p)) {
    std::istringstream in(line);
    std::string word, cls;
    if (!(in >> word >> cls)) throw ConfigError("malformed pronoun line '" + line + "' in " + p.string());
    auto it = std::find(kPronounClasses.begin(), kPronounClasses.end(), cls);
    if (it == kPronounClasses.end()) {
      throw ConfigError("unknown pronoun class '" + cls + "' in " + p.string());
    }
    out[textproc::fold_case(word)] =
        static_cast<PronounClass>(std::distance(kPronounClasses.begin(), it));
  }
  return out;
}

std::map<std::string, std::string> load_categories(const std::filesystem::path& p) {
  std::map<std::string, std::string> out;
  for (const auto& line : util::read_list_file(p)) {
    std::istringstream in(line);
    std::string cat, bucket;
    if (!(in >> cat >> bucket)) {
      throw ConfigError("malformed category line '" + line + "' in " + p.string());
    }
    if (std::find(kSpellBuckets.begin(), kSpellBuckets.end(), bucket) == kSpellBuckets.end()) {
      throw ConfigError("unknown spell-check bucket '" + bucket + "' in " + p.string());
    }
    out[cat] = bucket;
  }
  return out;
}

void add_ngrams(const std::vector<std::string>& seq, char prefix,
                std::unordered_map<std::string, double>& counts, std::array<double, 3>& slots,
                const char* joiner) {
  const std::size_t n_items = seq.size();
  for (std::size_t n = 1; n <= 3; ++n) {
    if (n_items < n) continue;
    slots[n - 1] = static_cast<double>(n_items - n + 1);
    for (std::size_t i = 0; i + n <= n_items; ++i) {
      std::string key;
      key += prefix;
      key += static_cast<char>('0' + n);
      key += ':';
      for (std::size_t k = 0; k < n; ++k) {
        if (k) key += joiner;
        key += seq[i + k];
      }
      counts[key] += 1.0;
    }
  }
}

double ratio(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

}  // namespace

std::shared_ptr<const Resources> Resources::load(
    const ExtractorConfig& config,
    const std::unordered_map<std::string, bool>* embedding_vocabulary) {
  config.validate();
  auto r = std::make_shared<Resources>();
  std::string fp;
  auto track = [&fp](const std::filesystem::path& p) {
    fp += p.filename().string() + "=" + hash_file(p) + ";";
  };

  for (const auto& a : util::read_list_file(config.abbreviations)) {
    r->analyzer.abbreviations.insert(textproc::fold_case(a));
  }
  track(config.abbreviations);
  r->analyzer.tagger = std::make_shared<textproc::RuleTagger>(
      textproc::RuleTagger::from_files(config.pos_lexicon, config.pos_suffixes));
  track(config.pos_lexicon);
  track(config.pos_suffixes);

  r->positive = PhraseMatcher(util::read_list_file(config.positive));
  r->negative = PhraseMatcher(util::read_list_file(config.negative));
  r->hedging = PhraseMatcher(util::read_list_file(config.hedging));
  r->enumeration = PhraseMatcher(util::read_list_file(config.enumeration));
  for (const auto* p : {&config.positive, &config.negative, &config.hedging, &config.enumeration}) {
    track(*p);
  }

  r->emoji = util::read_list_file(config.emoji);
  if (r->emoji.empty()) throw ConfigError("emoji list " + config.emoji.string() + " is empty");
  {
    auto sorted = r->emoji;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("emoji list " + config.emoji.string() + " has duplicate entries");
    }
  }
  track(config.emoji);

  r->pronouns = load_pronouns(config.pronouns);
  track(config.pronouns);

  if (config.spellcheck == SpellMode::offline) {
    r->spell = std::make_shared<OfflineSpellChecker>(util::read_list_file(config.wordlist));
    track(config.wordlist);
    fp += "spell=offline;";
  } else {
    r->spell = std::make_shared<ServiceSpellChecker>(config.spellcheck_url,
                                                     config.spellcheck_language,
                                                     load_categories(config.spell_categories));
    track(config.spell_categories);
    fp += "spell=service:" + config.spellcheck_url + ";";
  }

  r->adu = std::make_shared<MarkerAduClassifier>(
      PhraseMatcher(util::read_list_file(config.adu_premise)),
      PhraseMatcher(util::read_list_file(config.adu_conclusion)));
  track(config.adu_premise);
  track(config.adu_conclusion);

  if (config.embedding_path) {
    auto table = EmbeddingTable::load(*config.embedding_path, embedding_vocabulary);
    if (table.dim() != static_cast<std::size_t>(config.embedding_dim)) {
      throw ConfigError("embedding file " + config.embedding_path->string() + " has dimension " +
                        std::to_string(table.dim()) + ", config says " +
                        std::to_string(config.embedding_dim));
    }
    r->embeddings = std::make_shared<EmbeddingTable>(std::move(table));
    track(*config.embedding_path);
  }
  r->fingerprint = util::hex64(util::fnv1a(fp));
  return r;
}

std::vector<std::string> fixed_feature_names(Family f, const Resources& r) {
  std::vector<std::string> names;
  const std::string prefix = std::string(family_name(f)) + ":";
  switch (f) {
    case Family::content:
    case Family::style:
      break;
    case Family::embedding:
      if (r.embeddings) {
        for (std::size_t k = 0; k < r.embeddings->dim(); ++k) {
          char buf[16];
          std::snprintf(buf, sizeof buf, "d%03zu", k);
          names.push_back(prefix + buf);
        }
      }
      break;
    case Family::structure:
      names = {prefix + "enum_count", prefix + "enum_per_sentence"};
      break;
    case Family::length:
      for (auto u : kLengthUnits) names.push_back(prefix + std::string(u));
      for (std::size_t i = 0; i < kLengthUnits.size(); ++i) {
        for (std::size_t j = i + 1; j < kLengthUnits.size(); ++j) {
          names.push_back(prefix + std::string(kLengthUnits[i]) + "/" + std::string(kLengthUnits[j]));
        }
      }
      break;
    case Family::textquality:
      for (auto b : kSpellBuckets) names.push_back(prefix + "spell_" + std::string(b));
      for (auto b : kSpellBuckets) names.push_back(prefix + "spell_" + std::string(b) + "_rel");
      for (auto id : readability_ids()) names.push_back(prefix + std::string(id));
      names.push_back(prefix + "readability_degenerate");
      break;
    case Family::evidence:
      for (auto l : {AduLabel::thesis, AduLabel::conclusion, AduLabel::premise, AduLabel::none}) {
        names.push_back(prefix + "share_" + std::string(adu_label_name(l)));
      }
      names.push_back(prefix + "links_per_sentence");
      break;
    case Family::subjectivity:
      for (auto c : kPronounClasses) names.push_back(prefix + "pron_" + std::string(c));
      names.push_back(prefix + "positive");
      names.push_back(prefix + "negative");
      names.push_back(prefix + "hedging");
      for (const auto& e : r.emoji) names.push_back(prefix + "emoji:" + e);
      names.push_back(prefix + "case_lower");
      names.push_back(prefix + "case_upper");
      names.push_back(prefix + "case_other");
      names.push_back(prefix + "char_letter");
      names.push_back(prefix + "char_digit");
      names.push_back(prefix + "char_whitespace");
      names.push_back(prefix + "char_other");
      break;
  }
  return names;
}

Extractor::Extractor(ExtractorConfig config, std::shared_ptr<const Resources> resources)
    : config_(std::move(config)), resources_(std::move(resources)) {
  if (!resources_) throw Error("Extractor requires loaded resources");
}

FamilySet Extractor::enabled_families() const {
  FamilySet s = FamilySet::all();
  if (!resources_->embeddings) s.erase(Family::embedding);
  return s;
}

DocumentFeatures Extractor::extract(const std::string& id, std::string_view text) const {
  const Resources& res = *resources_;
  DocumentFeatures d;
  d.id = id;
  d.analysis = res.analyzer.analyze(text);
  const auto& a = d.analysis;
  const auto& toks = a.tokens;
  const double n_tokens = static_cast<double>(toks.size());
  const double n_sentences = static_cast<double>(a.sentences.size());

  // Vocabulary families.
  std::vector<std::string> lowers;
  lowers.reserve(toks.size());
  for (const auto& t : toks) lowers.push_back(t.lower);
  add_ngrams(lowers, 'w', d.word_ngrams, d.word_slots, " ");

  std::vector<std::string> tags;
  tags.reserve(a.pos_tags.size());
  for (auto t : a.pos_tags) tags.emplace_back(textproc::tag_name(t));
  add_ngrams(tags, 'p', d.pos_ngrams, d.pos_slots, " ");

  std::vector<std::string> chars;
  for (char32_t cp : textproc::decode_utf8(textproc::fold_case(text))) {
    std::string s;
    textproc::append_utf8(s, cp);
    chars.push_back(std::move(s));
  }
  add_ngrams(chars, 'c', d.char_ngrams, d.char_slots, "");

  for (std::size_t n = 1; n <= 3 && n <= lowers.size(); ++n) {
    std::string key = "f" + std::to_string(n) + ":";
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key += ' ';
      key += lowers[k];
    }
    d.first_grams.push_back(std::move(key));
  }

  // Structure.
  double enums = 0;
  for (const auto& s : a.sentences) {
    enums += static_cast<double>(res.enumeration.count(toks, s, true));
  }
  d.fixed[Family::structure] = {enums, ratio(enums, n_sentences)};

  // Length.
  double syllables = 0;
  for (int s : a.syllables) syllables += s;
  const std::array<double, 6> counts = {static_cast<double>(a.char_count()),
                                        syllables,
                                        n_tokens,
                                        static_cast<double>(a.phrases.size()),
                                        n_sentences,
                                        static_cast<double>(a.paragraphs.size())};
  auto& len = d.fixed[Family::length];
  len.assign(counts.begin(), counts.end());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = i + 1; j < counts.size(); ++j) len.push_back(ratio(counts[i], counts[j]));
  }

  // Text quality.
  const SpellCounts sc = spell_errors(a, *res.spell);
  const ReadabilityScores rs = readability_scores(a);
  auto& tq = d.fixed[Family::textquality];
  tq = {sc.hints, sc.unknown_words, sc.other, sc.rel(sc.hints), sc.rel(sc.unknown_words),
        sc.rel(sc.other)};
  tq.insert(tq.end(), rs.values.begin(), rs.values.end());
  tq.push_back(rs.degenerate ? 1.0 : 0.0);

  // Evidence.
  std::array<double, 4> label_counts{};
  for (AduLabel l : res.adu->classify(a)) label_counts[static_cast<std::size_t>(l)] += 1;
  double links = 0;
  for (const auto& t : toks) links += t.kind == TokenKind::url ? 1 : 0;
  auto& ev = d.fixed[Family::evidence];
  for (double c : label_counts) ev.push_back(ratio(c, n_sentences));
  ev.push_back(ratio(links, n_sentences));

  // Subjectivity.
  std::array<double, 6> pron{};
  std::unordered_map<std::string, double> emoji_counts;
  double lower_words = 0, upper_words = 0, other_words = 0;
  for (const auto& t : toks) {
    if (auto it = res.pronouns.find(t.lower); it != res.pronouns.end()) {
      pron[static_cast<std::size_t>(it->second)] += 1;
    }
    if (t.kind == TokenKind::emoji) emoji_counts[t.surface] += 1;
    if (t.kind != TokenKind::word) continue;
    std::size_t letters = 0, upper = 0, lower = 0;
    for (char32_t cp : textproc::decode_utf8(t.surface)) {
      if (!textproc::is_letter(cp)) continue;
      ++letters;
      if (textproc::is_upper(cp)) ++upper;
      if (textproc::is_lower(cp)) ++lower;
    }
    if (letters > 0 && lower == letters) {
      lower_words += 1;
    } else if (letters >= 2 && upper == letters) {
      upper_words += 1;
    } else {
      other_words += 1;
    }
  }
  const textproc::Range all{0, toks.size()};
  auto& sub = d.fixed[Family::subjectivity];
  for (double p : pron) sub.push_back(ratio(p, n_tokens));
  sub.push_back(ratio(static_cast<double>(res.positive.count(toks, all)), n_tokens));
  sub.push_back(ratio(static_cast<double>(res.negative.count(toks, all)), n_tokens));
  sub.push_back(ratio(static_cast<double>(res.hedging.count(toks, all)), n_tokens));
  for (const auto& e : res.emoji) {
    auto it = emoji_counts.find(e);
    sub.push_back(it == emoji_counts.end() ? 0.0 : ratio(it->second, n_tokens));
  }
  const double words = lower_words + upper_words + other_words;
  sub.push_back(ratio(lower_words, words));
  sub.push_back(ratio(upper_words, words));
  sub.push_back(ratio(other_words, words));
  const double n_chars = static_cast<double>(a.char_count());
  for (std::size_t c : a.char_counts) sub.push_back(ratio(static_cast<double>(c), n_chars));

  // Embedding.
  if (res.embeddings) d.fixed[Family::embedding] = document_embedding(a, *res.embeddings);

  return d;
}

std::vector<DocumentFeatures> Extractor::extract_all(const corpus::Corpus& c, int jobs) const {
  const auto& args = c.arguments();
  std::vector<DocumentFeatures> out(args.size());
  detail::parallel_for(args.size(), jobs,
                       [&](std::size_t i) { out[i] = extract(args[i].id, args[i].text); });
  return out;
}

}  // namespace argq::features

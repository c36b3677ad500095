#ifndef ARGQ_FEATURES_HPP
#define ARGQ_FEATURES_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "argq/corpus.hpp"
#include "argq/textproc.hpp"

namespace argq::features {

enum class Family : std::uint8_t {
  content, embedding, style, structure, length, textquality, evidence, subjectivity
};
inline constexpr std::size_t kNumFamilies = 8;

const std::array<Family, kNumFamilies>& all_families();
std::string_view family_name(Family f);
// Table label, e.g. "Text quality".
std::string_view family_label(Family f);
std::optional<Family> parse_family(std::string_view name);

class FamilySet {
 public:
  constexpr FamilySet() = default;
  FamilySet(std::initializer_list<Family> fs) {
    for (Family f : fs) insert(f);
  }
  static FamilySet all() {
    FamilySet s;
    s.bits_ = 0xFF;
    return s;
  }
  static FamilySet all_but(Family f) {
    FamilySet s = all();
    s.erase(f);
    return s;
  }

  bool contains(Family f) const { return bits_ & mask(f); }
  void insert(Family f) { bits_ |= mask(f); }
  void erase(Family f) { bits_ &= static_cast<std::uint8_t>(~mask(f)); }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  FamilySet intersect(FamilySet o) const {
    FamilySet s;
    s.bits_ = bits_ & o.bits_;
    return s;
  }
  bool subset_of(FamilySet o) const { return (bits_ & o.bits_) == bits_; }
  std::vector<Family> members() const;
  std::vector<std::string> names() const;
  std::uint8_t bits() const { return bits_; }

  bool operator==(const FamilySet&) const = default;
  auto operator<=>(const FamilySet&) const = default;

 private:
  static constexpr std::uint8_t mask(Family f) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f));
  }
  std::uint8_t bits_ = 0;
};

// Sparse named-feature map; names are namespaced "family:...".
using FeatureVector = std::map<std::string, double>;

enum class SpellMode { offline, service };

struct ExtractorConfig {
  double content_min_df = 0.03;
  double style_pos_min_df = 0.10;
  double style_char_min_df = 0.03;
  int structure_first_min_count = 2;
  int embedding_dim = 300;

  // Shipped lexicons and tables; defaults resolve under data_dir.
  std::filesystem::path data_dir;
  std::filesystem::path abbreviations, pos_lexicon, pos_suffixes;
  std::filesystem::path positive, negative, hedging, enumeration, emoji, pronouns;
  std::filesystem::path wordlist, adu_premise, adu_conclusion, spell_categories;

  // Optional text vector file; the embedding family is disabled without it.
  std::optional<std::filesystem::path> embedding_path;

  SpellMode spellcheck = SpellMode::offline;
  std::string spellcheck_url = "http://localhost:8081/v2/check";
  std::string spellcheck_language = "en-US";

  std::vector<std::string> readability;  // exactly the 10 ids of readability_ids()

  // Config rooted at a data directory, with every path defaulted under it.
  static ExtractorConfig with_data_dir(const std::filesystem::path& dir);
  // Throws ConfigError naming the offending key.
  void validate() const;
};

// Directory of the shipped data files (compile-time default, overridable
// with the ARGQ_DATA_DIR environment variable).
std::filesystem::path default_data_dir();

// ---------------------------------------------------------------------------
// Lexicon matching

// Set of lower-case token sequences, matched greedily longest-first without
// overlap.
class PhraseMatcher {
 public:
  PhraseMatcher() = default;
  explicit PhraseMatcher(const std::vector<std::string>& entries);

  // Number of matches in tokens[range]. With sentence_initial_numbers,
  // entries whose first token is a number only match at range.begin.
  std::size_t count(std::span<const textproc::Token> tokens, textproc::Range range,
                    bool sentence_initial_numbers = false) const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::vector<std::string> tokens;
    bool starts_with_number = false;
  };
  std::vector<Entry> entries_;  // longest first
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
};

// ---------------------------------------------------------------------------
// Embeddings

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dim, std::unordered_map<std::string, std::vector<float>> vectors);

  // Reads "word v1 ... vd" lines with an optional "count dim" header. With a
  // vocabulary filter only the listed words are kept. Throws ConfigError on
  // non-uniform dimensions.
  static EmbeddingTable load(const std::filesystem::path& path,
                             const std::unordered_map<std::string, bool>* vocabulary = nullptr);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  // Exact surface first, then the case-folded form.
  const std::vector<float>* find(const std::string& surface, const std::string& lower) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Mean of in-vocabulary word vectors; zero vector if none.
std::vector<double> document_embedding(const textproc::DocumentAnalysis& doc,
                                       const EmbeddingTable& table);

// ---------------------------------------------------------------------------
// Text quality

inline constexpr std::size_t kNumReadability = 10;
const std::array<std::string_view, kNumReadability>& readability_ids();

struct ReadabilityScores {
  std::array<double, kNumReadability> values{};
  bool degenerate = false;
};

// Flesch Reading Ease, Flesch-Kincaid Grade, Gunning Fog, LIX, RIX, SMOG,
// Coleman-Liau, ARI, FORCAST and Linsear Write over the whole text.
ReadabilityScores readability_scores(const textproc::DocumentAnalysis& doc);

struct SpellCounts {
  double hints = 0;
  double unknown_words = 0;
  double other = 0;
  std::size_t tokens = 0;

  double rel(double abs) const { return tokens ? abs / static_cast<double>(tokens) : 0.0; }
};

class SpellChecker {
 public:
  virtual ~SpellChecker() = default;
  virtual SpellCounts check(const textproc::DocumentAnalysis& doc) const = 0;
};

// Unknown words by word-list lookup; hints are doubled words and
// sentence-initial lower-case words; "other" is always 0.
class OfflineSpellChecker final : public SpellChecker {
 public:
  explicit OfflineSpellChecker(std::vector<std::string> words);
  SpellCounts check(const textproc::DocumentAnalysis& doc) const override;

 private:
  std::unordered_map<std::string, bool> words_;
  bool known(const std::string& lower) const;
};

// Client of a LanguageTool-compatible check endpoint: POST form fields
// "text" and "language", JSON response with "matches[].rule.category.id".
class ServiceSpellChecker final : public SpellChecker {
 public:
  ServiceSpellChecker(std::string url, std::string language,
                      std::map<std::string, std::string> category_buckets);
  SpellCounts check(const textproc::DocumentAnalysis& doc) const override;

  // Maps a parsed response body to counts; exposed for testing.
  SpellCounts parse_response(std::string_view body, std::size_t tokens) const;

 private:
  std::string url_;
  std::string language_;
  std::map<std::string, std::string> buckets_;
};

SpellCounts spell_errors(const textproc::DocumentAnalysis& doc, const SpellChecker& checker);

// ---------------------------------------------------------------------------
// Evidence

enum class AduLabel : std::uint8_t { thesis, conclusion, premise, none };
std::string_view adu_label_name(AduLabel l);

class AduClassifier {
 public:
  virtual ~AduClassifier() = default;
  // One label per sentence.
  virtual std::vector<AduLabel> classify(const textproc::DocumentAnalysis& doc) const = 0;
};

// Premise markers win over conclusion markers; an unmarked first sentence is
// the thesis; everything else is none.
class MarkerAduClassifier final : public AduClassifier {
 public:
  MarkerAduClassifier(PhraseMatcher premise, PhraseMatcher conclusion);
  std::vector<AduLabel> classify(const textproc::DocumentAnalysis& doc) const override;

 private:
  PhraseMatcher premise_;
  PhraseMatcher conclusion_;
};

// ---------------------------------------------------------------------------

enum class PronounClass : std::uint8_t { first_sg, first_pl, second_sg, second_pl, third_sg, third_pl };

// Everything loaded from the config's files.
struct Resources {
  textproc::Analyzer analyzer;
  PhraseMatcher positive, negative, hedging, enumeration;
  std::vector<std::string> emoji;
  std::unordered_map<std::string, PronounClass> pronouns;
  std::shared_ptr<const SpellChecker> spell;
  std::shared_ptr<const AduClassifier> adu;
  std::shared_ptr<const EmbeddingTable> embeddings;  // null when disabled
  // Hash over the contents of every loaded file.
  std::string fingerprint;

  // Throws ConfigError for unreadable or malformed files. The optional
  // vocabulary restricts which embedding rows are kept in memory.
  static std::shared_ptr<const Resources> load(
      const ExtractorConfig& config,
      const std::unordered_map<std::string, bool>* embedding_vocabulary = nullptr);
};

// ---------------------------------------------------------------------------
// Per-document raw extraction (fold independent).

struct DocumentFeatures {
  std::string id;
  textproc::DocumentAnalysis analysis;
  // N-gram counts keyed "w1:good", "p2:DET NOUN", "c3:abc"; slot counts by order.
  std::unordered_map<std::string, double> word_ngrams, pos_ngrams, char_ngrams;
  std::array<double, 3> word_slots{}, pos_slots{}, char_slots{};
  // First 1-, 2-, 3-token grams of the text (fewer for short texts).
  std::vector<std::string> first_grams;
  // Fixed-dimension families, values aligned with fixed_feature_names().
  std::map<Family, std::vector<double>> fixed;
};

// Names of the fixed-dimension part of a family (empty for pure vocabulary
// families). Emoji and embedding names depend on the loaded resources.
std::vector<std::string> fixed_feature_names(Family f, const Resources& r);

class FittedPipeline;

class Extractor {
 public:
  Extractor(ExtractorConfig config, std::shared_ptr<const Resources> resources);

  const ExtractorConfig& config() const { return config_; }
  const Resources& resources() const { return *resources_; }
  // Families that can be fitted; embedding only with a loaded table.
  FamilySet enabled_families() const;

  DocumentFeatures extract(const std::string& id, std::string_view text) const;
  std::vector<DocumentFeatures> extract_all(const corpus::Corpus& c, int jobs = 1) const;

  // Vocabularies and standardization learned from `training` only.
  FittedPipeline fit(std::span<const DocumentFeatures* const> training) const;
  FittedPipeline fit(std::span<const DocumentFeatures> training) const;

 private:
  ExtractorConfig config_;
  std::shared_ptr<const Resources> resources_;
};

struct FamilySpace {
  std::vector<std::string> names;  // full names, e.g. "content:w1:good"
  std::vector<double> doc_freq;    // training document frequency (vocabulary features)
  std::vector<double> mean;
  std::vector<double> scale;       // stddev, or 1 for constant features
};

class FittedPipeline {
 public:
  FittedPipeline() = default;

  FamilySet enabled() const { return enabled_; }
  const std::vector<std::string>& training_ids() const { return training_ids_; }
  const std::string& resources_fingerprint() const { return resources_fingerprint_; }
  const FamilySpace& space(Family f) const;
  std::size_t dimension(FamilySet families) const;

  // Raw (unstandardized) values of one family, aligned with space(f).names.
  std::vector<double> raw(const DocumentFeatures& doc, Family f) const;
  // Standardized values: (raw - mean) / scale.
  std::vector<double> standardized(const DocumentFeatures& doc, Family f) const;

  // Standardized union of the selected families. Throws Error if a family
  // was not fitted.
  FeatureVector assemble(const DocumentFeatures& doc, FamilySet families) const;

  std::string to_json() const;
  static FittedPipeline from_json(std::string_view json);
  // Hash of to_json().
  std::string fingerprint() const;

 private:
  friend class Extractor;

  double content_min_df_ = 0, style_pos_min_df_ = 0, style_char_min_df_ = 0;
  int structure_first_min_count_ = 0;
  std::size_t embedding_dim_ = 0;
  std::string resources_fingerprint_;
  FamilySet enabled_;
  std::vector<std::string> training_ids_;
  std::map<Family, FamilySpace> spaces_;
};

// Raw partial vectors of single families (unstandardized), as named
// operations over an analysed document.
FeatureVector extract_family(const DocumentFeatures& doc, const FittedPipeline& p, Family f);

}  // namespace argq::features

#endif  // ARGQ_FEATURES_HPP

#ifndef ARGQ_TEXTPROC_HPP
#define ARGQ_TEXTPROC_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace argq::textproc {

// ---------------------------------------------------------------------------
// UTF-8 helpers. Invalid bytes decode as U+FFFD, one scalar per byte.

// With `offsets`, also records the byte offset of every scalar plus the end.
std::vector<char32_t> decode_utf8(std::string_view text,
                                  std::vector<std::size_t>* offsets = nullptr);
void append_utf8(std::string& out, char32_t cp);
std::size_t scalar_count(std::string_view text);

enum class CharClass : std::uint8_t { letter, digit, whitespace, other };
CharClass classify(char32_t cp);
bool is_letter(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
char32_t to_lower(char32_t cp);
// Simple case folding (ASCII, Latin-1, Latin Extended-A, Greek, Cyrillic).
std::string fold_case(std::string_view text);

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind : std::uint8_t { word, number, punctuation, url, emoji, other };

struct Token {
  std::string surface;
  std::string lower;
  // Byte offsets [begin, end) into the analysed text.
  std::pair<std::size_t, std::size_t> span;
  TokenKind kind;
};

std::vector<Token> tokenize(std::string_view text);

// Built-in ASCII emoticon inventory recognised as single emoji tokens.
const std::vector<std::string>& ascii_emoticons();

// Half-open index range.
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const Range&) const = default;
};

// Sentence boundaries follow . ! ? (and runs thereof) unless the preceding
// token is a listed abbreviation or the period closes a leading list number
// ("1."). A blank line in the text between two tokens also ends a sentence.
std::vector<Range> split_sentences(std::string_view text, std::span<const Token> tokens,
                                   const std::unordered_set<std::string>& abbreviations);

// Paragraphs as ranges of sentence indices; a boundary is a run of two or
// more newlines (possibly with whitespace between them).
std::vector<Range> split_paragraphs(std::string_view text, std::span<const Token> tokens,
                                    std::span<const Range> sentences);

// Intra-sentence segments delimited by , ; : and dash tokens. Segments without
// any non-punctuation token are dropped.
std::vector<Range> split_phrases(std::span<const Token> tokens, std::span<const Range> sentences);

// Vowel groups over [aeiouy], minus a silent final "e" (not after consonant+l),
// minimum 1 for a word with at least one letter; 0 otherwise.
int count_syllables(std::string_view word);

// True if the text boundary between two byte offsets holds a blank line.
bool has_blank_line(std::string_view text, std::size_t from, std::size_t to);

// ---------------------------------------------------------------------------
// Part-of-speech tagging over the 12-tag universal tagset.

enum class PosTag : std::uint8_t { NOUN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, CONJ, PRT, PUNCT, X };
inline constexpr std::size_t kNumPosTags = 12;
std::string_view tag_name(PosTag t);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // Must return exactly one tag per token.
  virtual std::vector<PosTag> tag(std::span<const Token> tokens) const = 0;
};

// Lexicon lookup, then longest-suffix rule, then NOUN. Two contextual
// corrections: a default-NOUN word after a modal/auxiliary, "to" or a subject
// pronoun becomes VERB.
class RuleTagger final : public PosTagger {
 public:
  RuleTagger(std::unordered_map<std::string, PosTag> lexicon,
             std::vector<std::pair<std::string, PosTag>> suffixes);
  static RuleTagger from_files(const std::filesystem::path& lexicon,
                               const std::filesystem::path& suffixes);

  std::vector<PosTag> tag(std::span<const Token> tokens) const override;

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
  std::vector<std::pair<std::string, PosTag>> suffixes_;  // longest first
};

// ---------------------------------------------------------------------------

using CharCounts = std::array<std::size_t, 4>;  // indexed by CharClass
CharCounts classify_chars(std::string_view text);

struct DocumentAnalysis {
  std::string text;
  std::vector<Token> tokens;
  std::vector<Range> sentences;   // token ranges
  std::vector<Range> paragraphs;  // sentence ranges
  std::vector<Range> phrases;     // token ranges
  std::vector<PosTag> pos_tags;   // aligned with tokens
  // Aligned with tokens; 0 for non-word tokens.
  std::vector<int> syllables;
  CharCounts char_counts{};

  std::size_t word_count() const;
  std::size_t char_count() const;  // Unicode scalar values
};

struct Analyzer {
  std::unordered_set<std::string> abbreviations;
  std::shared_ptr<const PosTagger> tagger;

  DocumentAnalysis analyze(std::string_view text) const;
};

// Serialized analysis, used for determinism checks and caching.
std::string to_json(const DocumentAnalysis& a);

}  // namespace argq::textproc

#endif  // ARGQ_TEXTPROC_HPP

#ifndef ARGQ_CORPUS_HPP
#define ARGQ_CORPUS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace argq::corpus {

// The 15 quality dimensions, in table column order.
enum class Dimension : std::uint8_t {
  Cog, LAc, LRe, LSu,            // logical
  Eff, Cla, Cre, App, Emo, Arr,  // rhetorical
  Rea, GAc, GRe, GSu,            // dialectical
  OvQ,                           // overall
};

inline constexpr std::size_t kNumDimensions = 15;
inline constexpr std::size_t kNumExperts = 3;

enum class DimensionGroup { logical, rhetorical, dialectical, overall };

const std::array<Dimension, kNumDimensions>& all_dimensions();
std::string_view abbreviation(Dimension d);
// Lower-case descriptive name, e.g. "local acceptability".
std::string_view long_name(Dimension d);
DimensionGroup group_of(Dimension d);
std::optional<Dimension> parse_dimension(std::string_view abbrev);

inline std::size_t index_of(Dimension d) { return static_cast<std::size_t>(d); }

// Integer scores of the three experts on all 15 dimensions, each in {1,2,3}.
class ScoreSheet {
 public:
  ScoreSheet();

  // expert is 1-based, as in the corpus documentation.
  int score(int expert, Dimension d) const;
  void set(int expert, Dimension d, int value);

  std::array<int, kNumExperts> scores(Dimension d) const;

  bool operator==(const ScoreSheet&) const = default;

 private:
  std::array<std::array<std::uint8_t, kNumDimensions>, kNumExperts> scores_;
};

struct Argument {
  std::string id;
  std::string topic;
  std::string text;
  ScoreSheet sheet;

  bool operator==(const Argument&) const = default;
};

double mean_score(const Argument& a, Dimension d);
// Mode of the three expert scores; the median when all three differ.
int majority_score(const Argument& a, Dimension d);

// Validated, id-sorted collection of arguments.
class Corpus {
 public:
  Corpus() = default;
  // Sorts by id and validates: unique non-empty ids, non-empty topic and text,
  // scores in {1,2,3}. Throws DataError.
  explicit Corpus(std::vector<Argument> arguments);

  const std::vector<Argument>& arguments() const { return arguments_; }
  const std::vector<std::string>& topics() const { return topics_; }
  std::size_t size() const { return arguments_.size(); }

  // Position of an id in arguments(); throws DataError if absent.
  std::size_t index_of(std::string_view id) const;
  const Argument& at(std::string_view id) const { return arguments_[index_of(id)]; }

  // Subset with the given ids, preserving id order.
  Corpus subset(const std::vector<std::string>& ids) const;

  bool operator==(const Corpus& other) const { return arguments_ == other.arguments_; }

 private:
  std::vector<Argument> arguments_;
  std::vector<std::string> topics_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

enum class Layout {
  wide,  // one row per argument, 45 score columns
  long_, // one row per (argument, expert), 15 score columns + annotator column
};

// Column mapping of a delimited corpus file.
struct ColumnMapping {
  Layout layout = Layout::wide;
  std::string id_column = "id";
  std::string topic_column = "topic";
  std::string text_column = "text";
  // Wide layout: name of the score column of (dimension, expert), built from
  // a pattern with "{dim}" (abbreviation), "{name}" (long name) and
  // "{expert}" (1..3) placeholders unless overridden per column.
  std::string score_pattern = "{dim}_{expert}";
  std::map<std::pair<Dimension, int>, std::string> score_overrides;
  // Long layout: annotator column and one column per dimension.
  std::string annotator_column = "annotator";
  std::map<Dimension, std::string> dimension_columns;  // default: long_name
  // Optional row filter: keep rows whose filter column equals filter_value.
  // In long layout an argument is kept only if all of its rows pass.
  std::string filter_column;
  std::string filter_value;
  // Field delimiter; 0 means auto-detect (tab if the header has one, else comma).
  char delimiter = 0;

  std::string score_column(Dimension d, int expert) const;
  std::string dimension_column(Dimension d) const;
};

Corpus load_corpus(const std::filesystem::path& path, const ColumnMapping& mapping);
// Same as load_corpus over in-memory file contents.
Corpus parse_corpus(std::string_view contents, const ColumnMapping& mapping);

// Canonical JSON-lines dump: one object per argument with id, topic, text and
// "scores": {"<dim>": [e1, e2, e3], ...}.
std::string to_jsonl(const Corpus& c);
Corpus from_jsonl(std::string_view contents);

// Content hash of the canonical dump.
std::string fingerprint(const Corpus& c);

struct TopicFold {
  std::string held_out_topic;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// One fold per topic, ordered by topic. Throws DataError for < 2 topics.
std::vector<TopicFold> loto_splits(const Corpus& c);

struct InnerSplit {
  std::string validation_topic;
  std::vector<std::string> train;
  std::vector<std::string> validation;
};

// Topic-wise folds over a training id list: one validation fold per topic
// present in `train`. Throws DataError for < 2 topics.
std::vector<InnerSplit> inner_cv_splits(const std::vector<std::string>& train,
                                        const Corpus& c);

}  // namespace argq::corpus

#endif  // ARGQ_CORPUS_HPP

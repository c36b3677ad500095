#include "argq/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "json.hpp"

#include "argq/errors.hpp"
#include "argq/util.hpp"
#include "corpus/csv.hpp"

namespace argq::corpus {

namespace {

constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

constexpr std::array<Dimension, kNumDimensions> kAll = {
    Dimension::Cog, Dimension::LAc, Dimension::LRe, Dimension::LSu,
    Dimension::Eff, Dimension::Cla, Dimension::Cre, Dimension::App,
    Dimension::Emo, Dimension::Arr, Dimension::Rea, Dimension::GAc,
    Dimension::GRe, Dimension::GSu, Dimension::OvQ};

constexpr std::array<std::string_view, kNumDimensions> kAbbrev = {
    "Cog", "LAc", "LRe", "LSu", "Eff", "Cla", "Cre", "App",
    "Emo", "Arr", "Rea", "GAc", "GRe", "GSu", "OvQ"};

constexpr std::array<std::string_view, kNumDimensions> kLongName = {
    "cogency",
    "local acceptability",
    "local relevance",
    "local sufficiency",
    "effectiveness",
    "clarity",
    "credibility",
    "appropriateness",
    "emotional appeal",
    "arrangement",
    "reasonableness",
    "global acceptability",
    "global relevance",
    "global sufficiency",
    "overall quality"};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos;
       pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
}

// Accepts "2" and the labelled form "2 (Average)".
std::optional<int> parse_score(std::string_view field) {
  field = util::trim(field);
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr == field.data()) return std::nullopt;
  std::string_view rest = util::trim(std::string_view(ptr, field.data() + field.size() - ptr));
  if (!rest.empty() && !(rest.front() == '(' && rest.back() == ')')) return std::nullopt;
  return value;
}

std::size_t column_index(const detail::Row& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("corpus schema: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

const std::string& field_at(const detail::Row& row, std::size_t col, std::size_t line) {
  if (col >= row.size()) {
    throw DataError("corpus row " + std::to_string(line) + ": expected at least " +
                    std::to_string(col + 1) + " fields, found " +
                    std::to_string(row.size()));
  }
  return row[col];
}

int checked_score(const std::string& field, const std::string& row_id,
                  const std::string& column) {
  const auto s = parse_score(field);
  if (!s || *s < 1 || *s > 3) {
    throw DataError("corpus row '" + row_id + "': score '" + field + "' in column '" +
                    column + "' is not in {1,2,3}");
  }
  return *s;
}

Corpus parse_wide(const std::vector<detail::Row>& rows, const ColumnMapping& m) {
  const auto& header = rows.front();
  const auto id_col = column_index(header, m.id_column);
  const auto topic_col = column_index(header, m.topic_column);
  const auto text_col = column_index(header, m.text_column);
  std::array<std::array<std::size_t, kNumDimensions>, kNumExperts> score_cols{};
  for (int e = 1; e <= 3; ++e) {
    for (Dimension d : kAll) {
      score_cols[e - 1][index_of(d)] = column_index(header, m.score_column(d, e));
    }
  }
  const std::size_t filter_col =
      m.filter_column.empty() ? kNoColumn : column_index(header, m.filter_column);

  std::vector<Argument> args;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (filter_col != kNoColumn && util::trim(field_at(row, filter_col, r)) != m.filter_value) continue;
    Argument a;
    a.id = std::string(util::trim(field_at(row, id_col, r)));
    a.topic = std::string(util::trim(field_at(row, topic_col, r)));
    a.text = field_at(row, text_col, r);
    for (int e = 1; e <= 3; ++e) {
      for (Dimension d : kAll) {
        const auto col = score_cols[e - 1][index_of(d)];
        a.sheet.set(e, d, checked_score(field_at(row, col, r), a.id, header[col]));
      }
    }
    args.push_back(std::move(a));
  }
  return Corpus(std::move(args));
}

Corpus parse_long(const std::vector<detail::Row>& rows, const ColumnMapping& m) {
  const auto& header = rows.front();
  const auto id_col = column_index(header, m.id_column);
  const auto topic_col = column_index(header, m.topic_column);
  const auto text_col = column_index(header, m.text_column);
  const auto ann_col = column_index(header, m.annotator_column);
  std::array<std::size_t, kNumDimensions> dim_cols{};
  for (Dimension d : kAll) dim_cols[index_of(d)] = column_index(header, m.dimension_column(d));
  const std::size_t filter_col =
      m.filter_column.empty() ? kNoColumn : column_index(header, m.filter_column);

  std::set<std::string> annotators;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    annotators.insert(std::string(util::trim(field_at(rows[r], ann_col, r))));
  }
  if (annotators.size() != kNumExperts) {
    throw DataError("corpus schema: long layout needs exactly 3 distinct annotators, found " +
                    std::to_string(annotators.size()));
  }
  const std::vector<std::string> experts(annotators.begin(), annotators.end());

  struct Pending {
    Argument arg;
    std::array<bool, kNumExperts> seen{};
    bool rejected = false;
  };
  std::map<std::string, Pending> pending;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string id(util::trim(field_at(row, id_col, r)));
    const std::string ann(util::trim(field_at(row, ann_col, r)));
    const auto e = static_cast<int>(
        std::find(experts.begin(), experts.end(), ann) - experts.begin()) + 1;
    auto& p = pending[id];
    if (p.seen[e - 1]) {
      throw DataError("corpus row '" + id + "': duplicate annotation by '" + ann + "'");
    }
    p.seen[e - 1] = true;
    if (p.arg.id.empty()) {
      p.arg.id = id;
      p.arg.topic = std::string(util::trim(field_at(row, topic_col, r)));
      p.arg.text = field_at(row, text_col, r);
    }
    if (filter_col != kNoColumn && util::trim(field_at(row, filter_col, r)) != m.filter_value) {
      p.rejected = true;
      continue;
    }
    for (Dimension d : kAll) {
      const auto col = dim_cols[index_of(d)];
      p.arg.sheet.set(e, d, checked_score(field_at(row, col, r), id, header[col]));
    }
  }

  std::vector<Argument> args;
  for (auto& [id, p] : pending) {
    if (p.rejected) continue;
    if (!std::all_of(p.seen.begin(), p.seen.end(), [](bool b) { return b; })) {
      throw DataError("corpus row '" + id + "': missing annotations (need 3 experts)");
    }
    args.push_back(std::move(p.arg));
  }
  return Corpus(std::move(args));
}

}  // namespace

const std::array<Dimension, kNumDimensions>& all_dimensions() { return kAll; }

std::string_view abbreviation(Dimension d) { return kAbbrev[index_of(d)]; }

std::string_view long_name(Dimension d) { return kLongName[index_of(d)]; }

DimensionGroup group_of(Dimension d) {
  const auto i = index_of(d);
  if (i < 4) return DimensionGroup::logical;
  if (i < 10) return DimensionGroup::rhetorical;
  if (i < 14) return DimensionGroup::dialectical;
  return DimensionGroup::overall;
}

std::optional<Dimension> parse_dimension(std::string_view abbrev) {
  for (Dimension d : kAll) {
    if (abbreviation(d) == abbrev) return d;
  }
  return std::nullopt;
}

ScoreSheet::ScoreSheet() {
  for (auto& row : scores_) row.fill(2);
}

int ScoreSheet::score(int expert, Dimension d) const {
  return scores_.at(static_cast<std::size_t>(expert - 1))[index_of(d)];
}

void ScoreSheet::set(int expert, Dimension d, int value) {
  if (value < 1 || value > 3) {
    throw DataError("score " + std::to_string(value) + " is not in {1,2,3}");
  }
  scores_.at(static_cast<std::size_t>(expert - 1))[index_of(d)] =
      static_cast<std::uint8_t>(value);
}

std::array<int, kNumExperts> ScoreSheet::scores(Dimension d) const {
  return {score(1, d), score(2, d), score(3, d)};
}

double mean_score(const Argument& a, Dimension d) {
  const auto s = a.sheet.scores(d);
  return (s[0] + s[1] + s[2]) / 3.0;
}

int majority_score(const Argument& a, Dimension d) {
  auto s = a.sheet.scores(d);
  std::sort(s.begin(), s.end());
  // With three sorted values the middle one is both the mode (if any pair
  // agrees, it includes the middle) and the median.
  return s[1];
}

Corpus::Corpus(std::vector<Argument> arguments) : arguments_(std::move(arguments)) {
  std::sort(arguments_.begin(), arguments_.end(),
            [](const Argument& a, const Argument& b) { return a.id < b.id; });
  std::set<std::string> topics;
  for (std::size_t i = 0; i < arguments_.size(); ++i) {
    const auto& a = arguments_[i];
    if (a.id.empty()) throw DataError("corpus: argument with empty id");
    if (a.topic.empty()) throw DataError("corpus row '" + a.id + "': empty topic");
    if (util::trim(a.text).empty()) throw DataError("corpus row '" + a.id + "': empty text");
    if (!index_.emplace(a.id, i).second) {
      throw DataError("corpus: duplicate argument id '" + a.id + "'");
    }
    topics.insert(a.topic);
  }
  topics_.assign(topics.begin(), topics.end());
}

std::size_t Corpus::index_of(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw DataError("corpus: unknown argument id '" + std::string(id) + "'");
  return it->second;
}

Corpus Corpus::subset(const std::vector<std::string>& ids) const {
  std::vector<Argument> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(at(id));
  return Corpus(std::move(out));
}

std::string ColumnMapping::score_column(Dimension d, int expert) const {
  if (auto it = score_overrides.find({d, expert}); it != score_overrides.end()) {
    return it->second;
  }
  std::string name = score_pattern;
  replace_all(name, "{dim}", abbreviation(d));
  replace_all(name, "{name}", long_name(d));
  replace_all(name, "{expert}", std::to_string(expert));
  return name;
}

std::string ColumnMapping::dimension_column(Dimension d) const {
  if (auto it = dimension_columns.find(d); it != dimension_columns.end()) return it->second;
  return std::string(long_name(d));
}

Corpus parse_corpus(std::string_view contents, const ColumnMapping& mapping) {
  const char delim = mapping.delimiter ? mapping.delimiter : detail::detect_delimiter(contents);
  const auto rows = detail::parse_delimited(contents, delim);
  if (rows.empty()) throw DataError("corpus schema: file has no header row");
  return mapping.layout == Layout::wide ? parse_wide(rows, mapping) : parse_long(rows, mapping);
}

Corpus load_corpus(const std::filesystem::path& path, const ColumnMapping& mapping) {
  if (!std::filesystem::exists(path)) {
    throw DataError("corpus file not found: " + path.string());
  }
  std::string contents;
  try {
    contents = util::read_file(path);
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  return parse_corpus(contents, mapping);
}

std::string to_jsonl(const Corpus& c) {
  std::string out;
  for (const auto& a : c.arguments()) {
    nlohmann::ordered_json j;
    j["id"] = a.id;
    j["topic"] = a.topic;
    j["text"] = a.text;
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (Dimension d : kAll) {
      const auto s = a.sheet.scores(d);
      scores[std::string(abbreviation(d))] = {s[0], s[1], s[2]};
    }
    j["scores"] = std::move(scores);
    out += j.dump();
    out += '\n';
  }
  return out;
}

Corpus from_jsonl(std::string_view contents) {
  std::vector<Argument> args;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Argument a;
      a.id = j.at("id").get<std::string>();
      a.topic = j.at("topic").get<std::string>();
      a.text = j.at("text").get<std::string>();
      const auto& scores = j.at("scores");
      for (Dimension d : kAll) {
        const auto& triple = scores.at(std::string(abbreviation(d)));
        if (!triple.is_array() || triple.size() != kNumExperts) {
          throw DataError("expected 3 scores for " + std::string(abbreviation(d)));
        }
        for (int e = 1; e <= 3; ++e) {
          const int v = triple[static_cast<std::size_t>(e - 1)].get<int>();
          if (v < 1 || v > 3) {
            throw DataError("corpus row '" + a.id + "': score " + std::to_string(v) +
                            " is not in {1,2,3}");
          }
          a.sheet.set(e, d, v);
        }
      }
      args.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("corpus dump line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return Corpus(std::move(args));
}

std::string fingerprint(const Corpus& c) { return util::hex64(util::fnv1a(to_jsonl(c))); }

std::vector<TopicFold> loto_splits(const Corpus& c) {
  if (c.topics().size() < 2) {
    throw DataError("leave-one-topic-out needs at least 2 topics, corpus has " +
                    std::to_string(c.topics().size()));
  }
  std::vector<TopicFold> folds;
  for (const auto& topic : c.topics()) {
    TopicFold f;
    f.held_out_topic = topic;
    for (const auto& a : c.arguments()) {
      (a.topic == topic ? f.test : f.train).push_back(a.id);
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

std::vector<InnerSplit> inner_cv_splits(const std::vector<std::string>& train,
                                        const Corpus& c) {
  std::vector<std::string> ids = train;
  std::sort(ids.begin(), ids.end());
  std::set<std::string> topics;
  for (const auto& id : ids) topics.insert(c.at(id).topic);
  if (topics.size() < 2) {
    throw DataError("inner cross-validation needs at least 2 training topics, found " +
                    std::to_string(topics.size()));
  }
  std::vector<InnerSplit> splits;
  for (const auto& topic : topics) {
    InnerSplit s;
    s.validation_topic = topic;
    for (const auto& id : ids) {
      (c.at(id).topic == topic ? s.validation : s.train).push_back(id);
    }
    splits.push_back(std::move(s));
  }
  return splits;
}

}  // namespace argq::corpus

#include "argq/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "argq/errors.hpp"
#include "argq/util.hpp"

namespace argq::config {

namespace {

namespace fs = std::filesystem;

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Option {
  Setter set;
  Getter get;
  std::string help;
};

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw ConfigError("config key '" + key + "': invalid value '" + value + "' (" + why + ")");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto s = util::trim(v);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(key, v, "expected a number");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto s = util::trim(v);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(key, v, "expected an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto s = util::trim(v);
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  bad(key, v, "expected true or false");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  for (const auto& part : util::split(v, ',')) {
    const auto t = util::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

fs::path resolve(const RunConfig& c, const std::string& v) {
  fs::path p(std::string(util::trim(v)));
  return (p.is_absolute() ? p : c.base_dir / p).lexically_normal();
}

// Paths under [features] default to the data directory; setting data_dir
// re-roots every path that has not been set explicitly.
using PathMember = fs::path features::ExtractorConfig::*;
const std::vector<std::pair<std::string, PathMember>>& lexicon_paths() {
  static const std::vector<std::pair<std::string, PathMember>> paths = {
      {"abbreviations", &features::ExtractorConfig::abbreviations},
      {"pos_lexicon", &features::ExtractorConfig::pos_lexicon},
      {"pos_suffixes", &features::ExtractorConfig::pos_suffixes},
      {"positive", &features::ExtractorConfig::positive},
      {"negative", &features::ExtractorConfig::negative},
      {"hedging", &features::ExtractorConfig::hedging},
      {"enumeration", &features::ExtractorConfig::enumeration},
      {"emoji", &features::ExtractorConfig::emoji},
      {"pronouns", &features::ExtractorConfig::pronouns},
      {"wordlist", &features::ExtractorConfig::wordlist},
      {"adu_premise", &features::ExtractorConfig::adu_premise},
      {"adu_conclusion", &features::ExtractorConfig::adu_conclusion},
      {"spellcheck_categories", &features::ExtractorConfig::spell_categories},
  };
  return paths;
}

std::string delimiter_name(char d) {
  switch (d) {
    case 0:
      return "auto";
    case ',':
      return "comma";
    case '\t':
      return "tab";
    case ';':
      return "semicolon";
    default:
      return std::string(1, d);
  }
}

const std::map<std::string, Option>& options() {
  static const std::map<std::string, Option> opts = [] {
    std::map<std::string, Option> o;
    auto mapping_str = [&o](const std::string& key, std::string corpus::ColumnMapping::*m,
                            std::string help) {
      o[key] = {[m](RunConfig& c, const std::string& v) { c.mapping.*m = std::string(util::trim(v)); },
                [m](const RunConfig& c) { return c.mapping.*m; }, std::move(help)};
    };

    // [corpus]
    o["corpus.path"] = {
        [](RunConfig& c, const std::string& v) {
          if (util::trim(v).empty()) {
            c.corpus_path.reset();
          } else {
            c.corpus_path = resolve(c, v);
          }
        },
        [](const RunConfig& c) { return c.corpus_path ? c.corpus_path->string() : std::string(); },
        "corpus file (CSV/TSV); required by run and validate"};
    o["corpus.layout"] = {
        [](RunConfig& c, const std::string& v) {
          const auto s = util::trim(v);
          if (s == "wide") {
            c.mapping.layout = corpus::Layout::wide;
          } else if (s == "long") {
            c.mapping.layout = corpus::Layout::long_;
          } else {
            bad("corpus.layout", v, "expected wide or long");
          }
        },
        [](const RunConfig& c) {
          return std::string(c.mapping.layout == corpus::Layout::wide ? "wide" : "long");
        },
        "wide: one row per argument; long: one row per (argument, annotator)"};
    mapping_str("corpus.id_column", &corpus::ColumnMapping::id_column, "argument id column");
    mapping_str("corpus.topic_column", &corpus::ColumnMapping::topic_column, "topic column");
    mapping_str("corpus.text_column", &corpus::ColumnMapping::text_column, "argument text column");
    mapping_str("corpus.score_pattern", &corpus::ColumnMapping::score_pattern,
                "wide layout score column pattern ({dim}, {name}, {expert})");
    mapping_str("corpus.annotator_column", &corpus::ColumnMapping::annotator_column,
                "long layout annotator column");
    mapping_str("corpus.filter_column", &corpus::ColumnMapping::filter_column,
                "optional row filter column");
    mapping_str("corpus.filter_value", &corpus::ColumnMapping::filter_value,
                "value the filter column must equal");
    o["corpus.delimiter"] = {
        [](RunConfig& c, const std::string& v) {
          const auto s = util::trim(v);
          if (s == "auto") {
            c.mapping.delimiter = 0;
          } else if (s == "comma") {
            c.mapping.delimiter = ',';
          } else if (s == "tab") {
            c.mapping.delimiter = '\t';
          } else if (s == "semicolon") {
            c.mapping.delimiter = ';';
          } else {
            bad("corpus.delimiter", v, "expected auto, comma, tab or semicolon");
          }
        },
        [](const RunConfig& c) { return delimiter_name(c.mapping.delimiter); },
        "field delimiter: auto, comma, tab or semicolon"};

    // [features]
    o["features.data_dir"] = {
        [](RunConfig& c, const std::string& v) {
          const fs::path dir = resolve(c, v);
          const auto fresh = features::ExtractorConfig::with_data_dir(dir);
          const auto old = features::ExtractorConfig::with_data_dir(c.extractor.data_dir);
          for (const auto& [name, member] : lexicon_paths()) {
            if (c.extractor.*member == old.*member) c.extractor.*member = fresh.*member;
          }
          c.extractor.data_dir = dir;
        },
        [](const RunConfig& c) { return c.extractor.data_dir.string(); },
        "directory of the shipped lexicons and word lists"};
    for (const auto& [name, member] : lexicon_paths()) {
      const PathMember m = member;
      o["features." + name] = {
          [m](RunConfig& c, const std::string& v) { c.extractor.*m = resolve(c, v); },
          [m](const RunConfig& c) { return (c.extractor.*m).string(); },
          "list file (defaults under data_dir)"};
    }
    o["features.content_min_df"] = {
        [](RunConfig& c, const std::string& v) { c.extractor.content_min_df = to_double("features.content_min_df", v); },
        [](const RunConfig& c) { return util::format_double(c.extractor.content_min_df); },
        "minimum training document frequency of word n-grams"};
    o["features.style_pos_min_df"] = {
        [](RunConfig& c, const std::string& v) { c.extractor.style_pos_min_df = to_double("features.style_pos_min_df", v); },
        [](const RunConfig& c) { return util::format_double(c.extractor.style_pos_min_df); },
        "minimum training document frequency of POS n-grams"};
    o["features.style_char_min_df"] = {
        [](RunConfig& c, const std::string& v) { c.extractor.style_char_min_df = to_double("features.style_char_min_df", v); },
        [](const RunConfig& c) { return util::format_double(c.extractor.style_char_min_df); },
        "minimum training document frequency of character n-grams"};
    o["features.structure_first_min_count"] = {
        [](RunConfig& c, const std::string& v) {
          c.extractor.structure_first_min_count = to_int("features.structure_first_min_count", v);
        },
        [](const RunConfig& c) { return std::to_string(c.extractor.structure_first_min_count); },
        "minimum training count of first-token n-grams"};
    o["features.embedding_path"] = {
        [](RunConfig& c, const std::string& v) {
          if (util::trim(v).empty()) {
            c.extractor.embedding_path.reset();
          } else {
            c.extractor.embedding_path = resolve(c, v);
          }
        },
        [](const RunConfig& c) {
          return c.extractor.embedding_path ? c.extractor.embedding_path->string() : std::string();
        },
        "text vector file; empty disables the embedding family"};
    o["features.embedding_dim"] = {
        [](RunConfig& c, const std::string& v) { c.extractor.embedding_dim = to_int("features.embedding_dim", v); },
        [](const RunConfig& c) { return std::to_string(c.extractor.embedding_dim); },
        "expected vector dimension"};
    o["features.spellcheck"] = {
        [](RunConfig& c, const std::string& v) {
          const auto s = util::trim(v);
          if (s == "offline") {
            c.extractor.spellcheck = features::SpellMode::offline;
          } else if (s == "service") {
            c.extractor.spellcheck = features::SpellMode::service;
          } else {
            bad("features.spellcheck", v, "expected offline or service");
          }
        },
        [](const RunConfig& c) {
          return std::string(c.extractor.spellcheck == features::SpellMode::offline ? "offline" : "service");
        },
        "offline word-list check or a LanguageTool-compatible service"};
    o["features.spellcheck_url"] = {
        [](RunConfig& c, const std::string& v) { c.extractor.spellcheck_url = std::string(util::trim(v)); },
        [](const RunConfig& c) { return c.extractor.spellcheck_url; },
        "service endpoint (env ARGQ_SPELLCHECK_URL overrides)"};
    o["features.spellcheck_language"] = {
        [](RunConfig& c, const std::string& v) { c.extractor.spellcheck_language = std::string(util::trim(v)); },
        [](const RunConfig& c) { return c.extractor.spellcheck_language; },
        "language code sent to the service"};
    o["features.readability"] = {
        [](RunConfig& c, const std::string& v) { c.extractor.readability = to_list(v); },
        [](const RunConfig& c) { return util::join(c.extractor.readability, ","); },
        "the 10 readability score ids"};

    // [learner]
    o["learner.c_grid"] = {
        [](RunConfig& c, const std::string& v) {
          c.train.c_grid.clear();
          for (const auto& x : to_list(v)) c.train.c_grid.push_back(to_double("learner.c_grid", x));
        },
        [](const RunConfig& c) {
          std::vector<std::string> parts;
          for (double x : c.train.c_grid) parts.push_back(util::format_double(x));
          return util::join(parts, ",");
        },
        "10 ascending C values"};
    o["learner.epsilon"] = {
        [](RunConfig& c, const std::string& v) { c.train.epsilon = to_double("learner.epsilon", v); },
        [](const RunConfig& c) { return util::format_double(c.train.epsilon); },
        "epsilon-insensitive loss margin"};
    o["learner.tolerance"] = {
        [](RunConfig& c, const std::string& v) { c.train.tolerance = to_double("learner.tolerance", v); },
        [](const RunConfig& c) { return util::format_double(c.train.tolerance); },
        "solver stopping tolerance"};
    o["learner.max_epochs"] = {
        [](RunConfig& c, const std::string& v) { c.train.max_epochs = to_int("learner.max_epochs", v); },
        [](const RunConfig& c) { return std::to_string(c.train.max_epochs); },
        "solver epoch limit"};
    o["learner.clamp"] = {
        [](RunConfig& c, const std::string& v) { c.train.clamp = to_bool("learner.clamp", v); },
        [](const RunConfig& c) { return bool_str(c.train.clamp); },
        "clamp predictions to [1, 3]"};

    // [eval]
    o["eval.suites"] = {
        [](RunConfig& c, const std::string& v) {
          c.suites.clear();
          for (const auto& s : to_list(v)) {
            const auto suite = eval::parse_suite(s);
            if (!suite) bad("eval.suites", v, "expected a list of q1, q2, q3");
            if (std::find(c.suites.begin(), c.suites.end(), *suite) == c.suites.end()) c.suites.push_back(*suite);
          }
          std::sort(c.suites.begin(), c.suites.end());
        },
        [](const RunConfig& c) {
          std::vector<std::string> parts;
          for (auto s : c.suites) parts.emplace_back(eval::suite_name(s));
          return util::join(parts, ",");
        },
        "suites to run"};
    o["eval.paired_ttest"] = {
        [](RunConfig& c, const std::string& v) { c.paired_ttest = to_bool("eval.paired_ttest", v); },
        [](const RunConfig& c) { return bool_str(c.paired_ttest); },
        "use the paired t-test (sensitivity analysis)"};
    o["eval.q3_train_on_majority"] = {
        [](RunConfig& c, const std::string& v) { c.q3_train_on_majority = to_bool("eval.q3_train_on_majority", v); },
        [](const RunConfig& c) { return bool_str(c.q3_train_on_majority); },
        "train the Q3 SVM on majority instead of mean scores"};

    // [run]
    o["run.output_dir"] = {
        [](RunConfig& c, const std::string& v) { c.output_dir = resolve(c, v); },
        [](const RunConfig& c) { return c.output_dir.string(); },
        "directory for reports and the run manifest"};
    o["run.jobs"] = {
        [](RunConfig& c, const std::string& v) { c.jobs = to_int("run.jobs", v); },
        [](const RunConfig& c) { return std::to_string(c.jobs); },
        "worker threads"};
    return o;
  }();
  return opts;
}

}  // namespace

RunConfig::RunConfig() : extractor(features::ExtractorConfig::with_data_dir(features::default_data_dir())) {}

void RunConfig::validate() const {
  extractor.validate();
  train.validate();
  if (jobs < 1) throw ConfigError("config key 'run.jobs' must be >= 1");
  if (suites.empty()) throw ConfigError("config key 'eval.suites' selects no suite");
  if (output_dir.empty()) throw ConfigError("config key 'run.output_dir' is empty");
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [key, opt] : options()) out += key + " = " + opt.get(*this) + "\n";
  for (const auto& [d, col] : mapping.dimension_columns) {
    out += "corpus.dimension_column." + std::string(corpus::abbreviation(d)) + " = " + col + "\n";
  }
  for (const auto& [de, col] : mapping.score_overrides) {
    out += "corpus.score_column." + std::string(corpus::abbreviation(de.first)) + "." +
           std::to_string(de.second) + " = " + col + "\n";
  }
  return out;
}

std::string RunConfig::hash() const {
  std::string relevant;
  for (const auto& line : util::split(canonical(), '\n')) {
    if (line.rfind("run.", 0) == 0 || line.rfind("eval.suites ", 0) == 0) continue;
    relevant += line + "\n";
  }
  return util::hex64(util::fnv1a(relevant));
}

void set_option(RunConfig& cfg, std::string_view key, std::string_view value) {
  const std::string k(key);
  const std::string v(value);
  if (const auto& o = options(); o.count(k)) {
    o.at(k).set(cfg, v);
    return;
  }
  // corpus.dimension_column.<Dim> and corpus.score_column.<Dim>.<expert>
  const auto parts = util::split(k, '.');
  if (parts.size() == 3 && parts[0] == "corpus" && parts[1] == "dimension_column") {
    const auto d = corpus::parse_dimension(parts[2]);
    if (!d) throw ConfigError("config key '" + k + "': unknown dimension '" + parts[2] + "'");
    cfg.mapping.dimension_columns[*d] = std::string(util::trim(v));
    return;
  }
  if (parts.size() == 4 && parts[0] == "corpus" && parts[1] == "score_column") {
    const auto d = corpus::parse_dimension(parts[2]);
    if (!d) throw ConfigError("config key '" + k + "': unknown dimension '" + parts[2] + "'");
    const int e = to_int(k, parts[3]);
    if (e < 1 || e > 3) throw ConfigError("config key '" + k + "': expert must be 1..3");
    cfg.mapping.score_overrides[{*d, e}] = std::string(util::trim(v));
    return;
  }
  throw ConfigError("unknown config key '" + k + "'");
}

RunConfig parse_run_config(std::string_view ini, const std::filesystem::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(ini)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  cfg.base_dir = base_dir;
  // data_dir first so explicit lexicon paths are not re-rooted afterwards.
  if (auto dd = tree.get_optional<std::string>(pt::ptree::path_type("features/data_dir", '/'))) {
    set_option(cfg, "features.data_dir", *dd);
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config key '" + section + "' appears outside a section");
    }
    for (const auto& [key, value] : body) {
      if (section == "features" && key == "data_dir") continue;
      set_option(cfg, section + "." + key, value.data());
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = util::read_file(path);
  // Absolute, so resolved paths stay valid when written into model directories.
  const auto base = std::filesystem::absolute(path).parent_path();
  RunConfig cfg = parse_run_config(text, base);
  if (const char* url = std::getenv("ARGQ_SPELLCHECK_URL"); url && *url) {
    cfg.extractor.spellcheck_url = url;
  }
  cfg.validate();
  return cfg;
}

std::string documented_defaults() {
  const RunConfig def;
  std::string out;
  std::string section;
  for (const auto& [key, opt] : options()) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "" : "\n") + std::string("[") + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + opt.get(def) + "    ; " + opt.help + "\n";
  }
  out +=
      "\nAlso accepted in [corpus]: dimension_column.<Dim> = <column> (long layout) and\n"
      "score_column.<Dim>.<expert> = <column> (wide layout overrides).\n";
  return out;
}

}  // namespace argq::config

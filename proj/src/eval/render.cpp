#include <cstdio>
#include <sstream>

#include "argq/errors.hpp"
#include "argq/eval.hpp"
#include "argq/util.hpp"
#include "json.hpp"

namespace argq::eval {

namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 3> kKindNames = {"svr", "baseline", "expert"};
constexpr std::array<std::string_view, 3> kSignificanceNames = {"none", "p05", "p01"};

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string title_of(Suite s) {
  switch (s) {
    case Suite::q1:
      return "Q1. Mean absolute error per feature type, ablation, all features and the mean "
             "baseline (mean-score target), averaged over all test topics.";
    case Suite::q2:
      return "Q2. Mean absolute error of the all-features SVM and the mean baseline, trained "
             "and evaluated per expert and on mean scores.";
    case Suite::q3:
      break;
  }
  return "Q3. Mean absolute error against majority scores: each expert's own scores versus "
         "the rounded all-features SVM.";
}

bool families_reduced(const ReportRow& row) {
  return row.approach.kind == ApproachKind::svr && !row.disabled &&
         row.effective_families != row.approach.families.names();
}

std::string row_key(Suite s, const ReportRow& row) {
  if (s == Suite::q2) return std::string(target_name(row.approach.target)) + ":" + row.approach.id;
  return row.approach.id;
}

template <std::size_t N>
std::size_t index_in(const std::array<std::string_view, N>& names, const std::string& v,
                     const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == v) return i;
  }
  throw Error(std::string("unknown ") + what + " '" + v + "' in report JSON");
}

}  // namespace

std::string render_markdown(const ExperimentReport& r) {
  std::ostringstream out;
  out << "# " << title_of(r.suite) << "\n\n";
  out << "Column groups: logical (Cog, LAc, LRe, LSu), rhetorical (Eff, Cla, Cre, App, Emo, Arr), "
         "dialectical (Rea, GAc, GRe, GSu), overall (OvQ).\n\n";

  const bool grouped = r.suite != Suite::q1;
  out << "|";
  if (grouped) out << " |";
  out << " # | Approach |";
  for (auto d : corpus::all_dimensions()) out << ' ' << corpus::abbreviation(d) << " |";
  out << "\n|";
  if (grouped) out << "---|";
  out << "---|---|";
  for (std::size_t i = 0; i < corpus::kNumDimensions; ++i) out << "---:|";
  out << "\n";

  std::string last_group;
  bool any_reduced = false;
  for (const auto& row : r.rows) {
    out << "|";
    if (grouped) {
      out << ' ' << (row.group != last_group ? row.group : "") << " |";
      last_group = row.group;
    }
    std::string label = row.approach.label;
    if (families_reduced(row)) {
      label += " \xC2\xB9";
      any_reduced = true;
    }
    out << ' ' << row.approach.id << " | " << label << " |";
    for (std::size_t d = 0; d < corpus::kNumDimensions; ++d) {
      if (row.disabled) {
        out << " disabled |";
        continue;
      }
      const auto& c = row.cells[d];
      std::string cell = std::string(mark(c.significance)) + fixed2(c.mean_mae);
      if (c.flagged) cell = "_" + cell + "_";
      if (c.best) cell = "**" + cell + "**";
      out << ' ' << cell << " |";
    }
    out << "\n";
  }
  out << "\n";
  switch (r.suite) {
    case Suite::q1:
      out << "Bold: best value in a column. For all features, significant improvements over the "
             "mean baseline are marked with \xE2\x80\xA0 (p < .05) and \xE2\x80\xA1 (p < .01).\n";
      break;
    case Suite::q2:
      out << "Bold: the most significant all-features value in a column. \xE2\x80\xA0 (p < .05) "
             "and \xE2\x80\xA1 (p < .01) mark improvements over the baseline of the same "
             "group.\n";
      break;
    case Suite::q3:
      out << "Bold: best value per dimension. Italic expert values are worse than the SVM; "
             "significant gains over the SVM are marked with \xE2\x80\xA0 (p < .05) and "
             "\xE2\x80\xA1 (p < .01).\n";
      break;
  }
  if (any_reduced) out << "\n\xC2\xB9 trained without unavailable feature families.\n";
  for (const auto& n : r.provenance.notes) out << "\nNote: " << n << "\n";
  out << "\nProvenance: config " << r.provenance.config_hash << ", corpus "
      << r.provenance.corpus_hash << ", resources " << r.provenance.resources_hash << "\n";
  return out.str();
}

std::string render_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "id";
  for (auto d : corpus::all_dimensions()) out << ',' << corpus::abbreviation(d);
  out << "\n";
  for (const auto& row : r.rows) {
    std::string key = row_key(r.suite, row);
    if (key.find_first_of(",\"\n") != std::string::npos) key = "\"" + key + "\"";
    out << key;
    for (std::size_t d = 0; d < corpus::kNumDimensions; ++d) {
      out << ',' << (row.disabled ? std::string("disabled") : util::format_double(row.cells[d].mean_mae));
    }
    out << "\n";
  }
  return out.str();
}

std::string render_json(const ExperimentReport& r) {
  json j;
  j["suite"] = suite_name(r.suite);
  j["provenance"] = {{"config_hash", r.provenance.config_hash},
                     {"corpus_hash", r.provenance.corpus_hash},
                     {"resources_hash", r.provenance.resources_hash},
                     {"notes", r.provenance.notes}};
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["group"] = row.group;
    jr["id"] = row.approach.id;
    jr["label"] = row.approach.label;
    jr["kind"] = kKindNames[static_cast<std::size_t>(row.approach.kind)];
    jr["families"] = row.approach.families.names();
    jr["effective_families"] = row.effective_families;
    jr["target"] = target_name(row.approach.target);
    jr["gold"] = target_name(row.approach.gold);
    jr["rounding"] = row.approach.rounding;
    jr["expert"] = row.approach.expert;
    jr["disabled"] = row.disabled;
    json cells = json::array();
    for (const auto& c : row.cells) {
      json jc;
      jc["dimension"] = corpus::abbreviation(c.dimension);
      jc["mean_mae"] = c.mean_mae;
      json folds = json::array();
      for (const auto& [topic, m] : c.fold_maes) folds.push_back({{"topic", topic}, {"mae", m}});
      jc["fold_maes"] = std::move(folds);
      jc["chosen_c"] = c.chosen_c;
      jc["p_value"] = c.p_value ? json(*c.p_value) : json(nullptr);
      jc["significance"] = kSignificanceNames[static_cast<std::size_t>(c.significance)];
      jc["best"] = c.best;
      jc["flagged"] = c.flagged;
      cells.push_back(std::move(jc));
    }
    jr["cells"] = std::move(cells);
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(std::string_view text) {
  ExperimentReport r;
  try {
    const json j = json::parse(text);
    const auto suite = parse_suite(j.at("suite").get<std::string>());
    if (!suite) throw Error("unknown suite in report JSON");
    r.suite = *suite;
    const auto& p = j.at("provenance");
    r.provenance.config_hash = p.at("config_hash").get<std::string>();
    r.provenance.corpus_hash = p.at("corpus_hash").get<std::string>();
    r.provenance.resources_hash = p.at("resources_hash").get<std::string>();
    r.provenance.notes = p.at("notes").get<std::vector<std::string>>();
    for (const auto& jr : j.at("rows")) {
      ReportRow row;
      row.group = jr.at("group").get<std::string>();
      row.approach.id = jr.at("id").get<std::string>();
      row.approach.label = jr.at("label").get<std::string>();
      row.approach.kind = static_cast<ApproachKind>(
          index_in(kKindNames, jr.at("kind").get<std::string>(), "approach kind"));
      for (const auto& f : jr.at("families")) {
        const auto fam = features::parse_family(f.get<std::string>());
        if (!fam) throw Error("unknown family in report JSON");
        row.approach.families.insert(*fam);
      }
      row.effective_families = jr.at("effective_families").get<std::vector<std::string>>();
      const auto target = parse_target(jr.at("target").get<std::string>());
      const auto gold = parse_target(jr.at("gold").get<std::string>());
      if (!target || !gold) throw Error("unknown target in report JSON");
      row.approach.target = *target;
      row.approach.gold = *gold;
      row.approach.rounding = jr.at("rounding").get<bool>();
      row.approach.expert = jr.at("expert").get<int>();
      row.disabled = jr.at("disabled").get<bool>();
      for (const auto& jc : jr.at("cells")) {
        DimensionResult c;
        const auto d = corpus::parse_dimension(jc.at("dimension").get<std::string>());
        if (!d) throw Error("unknown dimension in report JSON");
        c.dimension = *d;
        c.mean_mae = jc.at("mean_mae").get<double>();
        for (const auto& f : jc.at("fold_maes")) {
          c.fold_maes.emplace_back(f.at("topic").get<std::string>(), f.at("mae").get<double>());
        }
        c.chosen_c = jc.at("chosen_c").get<std::vector<double>>();
        if (!jc.at("p_value").is_null()) c.p_value = jc.at("p_value").get<double>();
        c.significance = static_cast<Significance>(
            index_in(kSignificanceNames, jc.at("significance").get<std::string>(), "significance"));
        c.best = jc.at("best").get<bool>();
        c.flagged = jc.at("flagged").get<bool>();
        row.cells.push_back(std::move(c));
      }
      r.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report JSON: ") + e.what());
  }
  return r;
}

}  // namespace argq::eval

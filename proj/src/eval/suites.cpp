#include <cmath>

#include "argq/errors.hpp"
#include "argq/eval.hpp"

namespace argq::eval {

using features::Family;
using features::FamilySet;

namespace {

constexpr std::array<std::string_view, 5> kTargetNames = {"mean", "expert1", "expert2", "expert3",
                                                          "majority"};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

FamilySet effective(const ApproachSpec& a, const Engine& e) {
  return a.families.intersect(e.available_families());
}

Job job_of(const ApproachSpec& a, const Engine& e, Dimension d) {
  Job j;
  j.dimension = d;
  j.target = a.target;
  if (a.kind == ApproachKind::baseline) {
    j.baseline = true;
  } else {
    j.families = effective(a, e);
  }
  return j;
}

bool is_disabled(const ApproachSpec& a, const Engine& e) {
  return a.kind == ApproachKind::svr && effective(a, e).empty();
}

ApproachSpec all_features(Target target, Target gold, bool rounding) {
  return {"A1-8", "All features", ApproachKind::svr, FamilySet::all(), target, gold, rounding, 0};
}

ApproachSpec baseline(Target target) {
  return {"B", "Baseline", ApproachKind::baseline, {}, target, target, false, 0};
}

ReportRow make_row(Engine& e, const ApproachSpec& a, std::string group) {
  ReportRow row;
  row.group = std::move(group);
  row.approach = a;
  row.disabled = is_disabled(a, e);
  if (a.kind == ApproachKind::svr) row.effective_families = effective(a, e).names();
  if (row.disabled) return row;
  for (Dimension d : corpus::all_dimensions()) row.cells.push_back(run_loto(e, a, d));
  return row;
}

std::vector<double> fold_values(const DimensionResult& r) {
  std::vector<double> v;
  for (const auto& [topic, m] : r.fold_maes) v.push_back(m);
  return v;
}

// Marks `a` with its one-tailed significance against `b`, per dimension.
void test_against(ReportRow& a, const ReportRow& b, bool paired) {
  if (a.disabled || b.disabled) return;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const double p = t_test_one_tailed(fold_values(a.cells[i]), fold_values(b.cells[i]), paired);
    a.cells[i].p_value = p;
    a.cells[i].significance = significance_of(p);
  }
}

// Bold = column minimum of the displayed (2-decimal) values.
void mark_minima(std::vector<ReportRow>& rows) {
  for (std::size_t d = 0; d < corpus::kNumDimensions; ++d) {
    double best = INFINITY;
    for (const auto& r : rows) {
      if (!r.disabled) best = std::min(best, round2(r.cells[d].mean_mae));
    }
    for (auto& r : rows) {
      if (!r.disabled && round2(r.cells[d].mean_mae) == best) r.cells[d].best = true;
    }
  }
}

Provenance provenance_of(Engine& e) {
  Provenance p;
  p.config_hash = e.options().config_hash;
  p.corpus_hash = corpus::fingerprint(e.corpus());
  p.resources_hash = e.extractor().resources().fingerprint;
  if (!e.available_families().contains(Family::embedding)) {
    p.notes.push_back(
        "embedding family disabled (no vector file configured): A2 is marked disabled and all "
        "other rows are trained without embedding features");
  }
  if (!e.train_config().clamp) p.notes.push_back("predictions are not clamped to [1, 3]");
  if (e.options().paired_ttest) p.notes.push_back("significance uses the paired t-test");
  return p;
}

}  // namespace

std::string_view target_name(Target t) { return kTargetNames[static_cast<std::size_t>(t)]; }

std::optional<Target> parse_target(std::string_view name) {
  for (std::size_t i = 0; i < kTargetNames.size(); ++i) {
    if (kTargetNames[i] == name) return static_cast<Target>(i);
  }
  return std::nullopt;
}

Target expert_target(int expert) {
  if (expert < 1 || expert > 3) throw Error("expert must be 1..3");
  return static_cast<Target>(expert);
}

double target_value(const corpus::Argument& a, Dimension d, Target t) {
  switch (t) {
    case Target::mean:
      return corpus::mean_score(a, d);
    case Target::majority:
      return corpus::majority_score(a, d);
    default:
      return a.sheet.score(static_cast<int>(t), d);
  }
}

std::string_view suite_name(Suite s) {
  switch (s) {
    case Suite::q1:
      return "q1";
    case Suite::q2:
      return "q2";
    case Suite::q3:
      break;
  }
  return "q3";
}

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "q1") return Suite::q1;
  if (name == "q2") return Suite::q2;
  if (name == "q3") return Suite::q3;
  return std::nullopt;
}

std::vector<ApproachSpec> q1_approaches() {
  std::vector<ApproachSpec> out;
  const auto& fams = features::all_families();
  for (std::size_t i = 0; i < fams.size(); ++i) {
    out.push_back({"A" + std::to_string(i + 1), std::string(features::family_label(fams[i])),
                   ApproachKind::svr, FamilySet{fams[i]}, Target::mean, Target::mean, false, 0});
  }
  for (std::size_t i = 0; i < fams.size(); ++i) {
    out.push_back({"A\\" + std::to_string(i + 1),
                   "w/o " + std::string(features::family_label(fams[i])), ApproachKind::svr,
                   FamilySet::all_but(fams[i]), Target::mean, Target::mean, false, 0});
  }
  out.push_back(all_features(Target::mean, Target::mean, false));
  out.push_back(baseline(Target::mean));
  return out;
}

std::vector<Job> jobs_for(Suite suite, const Engine& engine) {
  std::vector<ApproachSpec> approaches;
  switch (suite) {
    case Suite::q1:
      approaches = q1_approaches();
      break;
    case Suite::q2:
      for (Target t : {Target::expert1, Target::expert2, Target::expert3, Target::mean}) {
        approaches.push_back(all_features(t, t, false));
        approaches.push_back(baseline(t));
      }
      break;
    case Suite::q3:
      approaches.push_back(all_features(
          engine.options().q3_train_on_majority ? Target::majority : Target::mean,
          Target::majority, true));
      break;
  }
  std::vector<Job> jobs;
  for (const auto& a : approaches) {
    if (is_disabled(a, engine)) continue;
    for (Dimension d : corpus::all_dimensions()) jobs.push_back(job_of(a, engine, d));
  }
  return jobs;
}

DimensionResult run_loto(Engine& engine, const ApproachSpec& approach, Dimension d) {
  if (is_disabled(approach, engine)) {
    throw Error("approach " + approach.id + " has no available feature family");
  }
  const auto& folds = engine.folds();
  const auto& c = engine.corpus();
  const FoldPredictions* fp = nullptr;
  if (approach.kind != ApproachKind::expert) fp = &engine.predictions(job_of(approach, engine, d));

  DimensionResult r;
  r.dimension = d;
  std::vector<double> maes;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    const auto& fold = folds[k];
    std::vector<double> pred, gold;
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
      const auto& arg = c.at(fold.test[i]);
      double p = fp ? fp->predictions[k][i] : arg.sheet.score(approach.expert, d);
      if (approach.rounding) p = learner::round_score(p);
      pred.push_back(p);
      gold.push_back(target_value(arg, d, approach.gold));
    }
    const double m = mae(pred, gold);
    maes.push_back(m);
    r.fold_maes.emplace_back(fold.held_out_topic, m);
  }
  r.mean_mae = macro_mae(maes);
  if (fp && approach.kind == ApproachKind::svr) r.chosen_c = fp->chosen_c;
  return r;
}

ExperimentReport run_q1(Engine& engine) {
  engine.compute(jobs_for(Suite::q1, engine));
  ExperimentReport rep;
  rep.suite = Suite::q1;
  for (const auto& a : q1_approaches()) rep.rows.push_back(make_row(engine, a, ""));
  // A1-8 (second to last) against B (last).
  auto& all = rep.rows[rep.rows.size() - 2];
  test_against(all, rep.rows.back(), engine.options().paired_ttest);
  mark_minima(rep.rows);
  rep.provenance = provenance_of(engine);
  return rep;
}

ExperimentReport run_q2(Engine& engine) {
  engine.compute(jobs_for(Suite::q2, engine));
  ExperimentReport rep;
  rep.suite = Suite::q2;
  const std::array<std::pair<Target, std::string>, 4> groups = {{{Target::expert1, "Expert #1"},
                                                                  {Target::expert2, "Expert #2"},
                                                                  {Target::expert3, "Expert #3"},
                                                                  {Target::mean, "Mean score"}}};
  for (const auto& [t, label] : groups) {
    rep.rows.push_back(make_row(engine, all_features(t, t, false), label));
    rep.rows.push_back(make_row(engine, baseline(t), label));
    test_against(rep.rows[rep.rows.size() - 2], rep.rows.back(), engine.options().paired_ttest);
  }
  // Bold: the most significant All-features value per column.
  for (std::size_t d = 0; d < corpus::kNumDimensions; ++d) {
    ReportRow* best = nullptr;
    for (auto& row : rep.rows) {
      if (row.disabled || row.approach.kind != ApproachKind::svr) continue;
      const auto& cell = row.cells[d];
      if (!cell.p_value || *cell.p_value >= 0.05) continue;
      if (!best || *cell.p_value < *best->cells[d].p_value ||
          (*cell.p_value == *best->cells[d].p_value && cell.mean_mae < best->cells[d].mean_mae)) {
        best = &row;
      }
    }
    if (best) best->cells[d].best = true;
  }
  rep.provenance = provenance_of(engine);
  return rep;
}

ExperimentReport run_q3(Engine& engine) {
  engine.compute(jobs_for(Suite::q3, engine));
  ExperimentReport rep;
  rep.suite = Suite::q3;
  for (int e = 1; e <= 3; ++e) {
    ApproachSpec a{"E" + std::to_string(e), "Expert #" + std::to_string(e), ApproachKind::expert,
                   {}, Target::majority, Target::majority, false, e};
    rep.rows.push_back(make_row(engine, a, "Humans"));
  }
  const Target train = engine.options().q3_train_on_majority ? Target::majority : Target::mean;
  rep.rows.push_back(make_row(engine, all_features(train, Target::majority, true), "SVM"));
  const ReportRow& svm = rep.rows.back();
  for (std::size_t e = 0; e < 3; ++e) {
    auto& row = rep.rows[e];
    test_against(row, svm, engine.options().paired_ttest);
    if (svm.disabled) continue;
    for (std::size_t d = 0; d < corpus::kNumDimensions; ++d) {
      row.cells[d].flagged = row.cells[d].mean_mae > svm.cells[d].mean_mae;
    }
  }
  mark_minima(rep.rows);
  rep.provenance = provenance_of(engine);
  if (train == Target::majority) rep.provenance.notes.push_back("Q3 SVM trained on majority scores");
  return rep;
}

ExperimentReport run_suite(Engine& engine, Suite s) {
  switch (s) {
    case Suite::q1:
      return run_q1(engine);
    case Suite::q2:
      return run_q2(engine);
    case Suite::q3:
      break;
  }
  return run_q3(engine);
}

}  // namespace argq::eval

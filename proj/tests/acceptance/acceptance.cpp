// Acceptance suite: one line per criterion, PASS, FAIL or BLOCKED.
//
// Criteria 1-3 need the published 304-argument corpus, which is not bundled.
// Point ARGQ_CORPUS_CONFIG at an INI config for it (criterion 2 also needs
// features.embedding_path). Without it they are reported BLOCKED and the
// process exits with 77 so that ctest records a skip rather than a pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "argq/app.hpp"
#include "argq/config.hpp"
#include "argq/errors.hpp"
#include "argq/eval.hpp"
#include "argq/util.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace argq;
using corpus::Dimension;
using features::Family;
using nlohmann::json;

namespace {

enum class Status { pass, fail, blocked };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
};

// Collects failed checks of one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  Outcome outcome(const std::string& summary) const {
    if (failed_ == 0) return {Status::pass, summary};
    std::string d = std::to_string(failed_) + " of " + std::to_string(count_) + " checks failed";
    for (const auto& f : failures_) d += "; " + f;
    return {Status::fail, d};
  }

 private:
  std::size_t count_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json load_json(const std::string& name) {
  return json::parse(util::read_file(testing::test_data(name)));
}

// ---------------------------------------------------------------------------
// Criteria 1-3: published corpus.

// Table 1, row "Baseline", in dimension order.
constexpr std::array<double, corpus::kNumDimensions> kPaperBaseline = {
    0.44, 0.46, 0.47, 0.39, 0.39, 0.40, 0.33, 0.39, 0.31, 0.40, 0.43, 0.46, 0.43, 0.26, 0.45};

struct Published {
  std::unique_ptr<app::Session> session;
  bool has_embedding = false;
  std::string error;
};

Published open_published() {
  Published p;
  const char* path = std::getenv("ARGQ_CORPUS_CONFIG");
  if (!path || !*path) {
    p.error = "published corpus not available (set ARGQ_CORPUS_CONFIG)";
    return p;
  }
  try {
    const auto cfg = config::load_run_config(path);
    p.session = app::Session::open(cfg, [](const std::string& m) { std::fprintf(stderr, "  %s\n", m.c_str()); });
    p.has_embedding = p.session->engine().available_families().contains(Family::embedding);
  } catch (const std::exception& e) {
    p.error = std::string("cannot load ARGQ_CORPUS_CONFIG: ") + e.what();
  }
  return p;
}

eval::ApproachSpec approach(const std::string& id) {
  for (const auto& a : eval::q1_approaches()) {
    if (a.id == id) return a;
  }
  throw std::logic_error("no approach " + id);
}

std::vector<double> row_maes(eval::Engine& engine, const std::string& id) {
  std::vector<double> out;
  for (Dimension d : corpus::all_dimensions()) out.push_back(eval::run_loto(engine, approach(id), d).mean_mae);
  return out;
}

Outcome criterion1(Published& pub) {
  if (!pub.session) return {Status::blocked, pub.error};
  auto& engine = pub.session->engine();
  Checks c;
  c.expect(pub.session->corpus().size() == 304, "corpus has " + std::to_string(pub.session->corpus().size()) + " arguments, expected 304");
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = row_maes(engine, "B");
  const double secs = seconds_since(t0);
  std::string worst;
  double worst_dev = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::string dim(corpus::abbreviation(corpus::all_dimensions()[i]));
    const double dev = std::abs(b[i] - kPaperBaseline[i]);
    c.expect(dev <= 0.01 + 1e-12, dim + " " + fmt(b[i]) + " vs " + fmt(kPaperBaseline[i], 2));
    if (dev >= worst_dev) worst_dev = dev, worst = dim;
  }
  c.expect(secs < 10, "runtime " + fmt(secs, 1) + " s");
  return c.outcome("15/15 dimensions within 0.01 of Table 1 (largest deviation " + fmt(worst_dev) +
                   " on " + worst + "), " + fmt(secs, 2) + " s");
}

Outcome criterion2(Published& pub) {
  if (!pub.session) return {Status::blocked, pub.error};
  if (!pub.has_embedding) {
    return {Status::blocked, "the all-features SVM needs the embedding family; configure features.embedding_path"};
  }
  auto& engine = pub.session->engine();
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  engine.compute(eval::jobs_for(eval::Suite::q1, engine));
  const auto q1 = eval::run_q1(engine);
  const double secs = seconds_since(t0);
  const auto& all = q1.rows[q1.rows.size() - 2].cells;
  const auto& base = q1.rows.back().cells;
  int wins = 0;
  for (std::size_t d = 0; d < all.size(); ++d) wins += all[d].mean_mae <= base[d].mean_mae ? 1 : 0;
  const std::size_t ovq = corpus::index_of(Dimension::OvQ);
  const double gain = base[ovq].mean_mae - all[ovq].mean_mae;
  c.expect(wins >= 10, "all features <= baseline on " + std::to_string(wins) + "/15 dimensions");
  c.expect(gain >= 0.04, "OvQ gain " + fmt(gain) + " (" + fmt(base[ovq].mean_mae) + " -> " + fmt(all[ovq].mean_mae) + ")");
  c.expect(secs < 7200, "full Q1 took " + fmt(secs, 0) + " s");
  return c.outcome("all features <= baseline on " + std::to_string(wins) + "/15 dimensions, OvQ " +
                   fmt(base[ovq].mean_mae) + " -> " + fmt(all[ovq].mean_mae) + ", full Q1 " + fmt(secs, 0) + " s");
}

Outcome criterion3(Published& pub) {
  if (!pub.session) return {Status::blocked, pub.error};
  auto& engine = pub.session->engine();
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto len = eval::run_loto(engine, approach("A5"), Dimension::OvQ).mean_mae;
  const double secs = seconds_since(t0);
  const auto base = eval::run_loto(engine, approach("B"), Dimension::OvQ).mean_mae;
  c.expect(base - len >= 0.04, "OvQ length " + fmt(len) + " vs baseline " + fmt(base));
  c.expect(secs < 120, "length column took " + fmt(secs, 1) + " s");
  return c.outcome("OvQ length " + fmt(len) + " vs baseline " + fmt(base) + " (gain " + fmt(base - len) + ")");
}

// ---------------------------------------------------------------------------
// Criteria 4-6: oracles.

Outcome criterion4() {
  const auto data = load_json("svr_reference.json");
  Checks c;
  c.expect(data.size() == 200, "expected 200 problems");
  double worst = 0;
  std::size_t epochs_checked = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto& p = data[k];
    const auto x = p.at("x").get<std::vector<std::vector<double>>>();
    const auto y = p.at("y").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(x.size()), d = static_cast<Eigen::Index>(x[0].size());
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) X(i, j) = x[i][j];
    }
    learner::SolverOptions o;
    o.c = p.at("c").get<double>();
    o.epsilon = p.at("epsilon").get<double>();
    o.tolerance = 1e-12;
    o.max_epochs = 1000000;
    double last = -INFINITY;
    bool monotone = true;
    o.on_epoch = [&](int, double obj) {
      monotone = monotone && obj >= last - 1e-12 * (1 + std::abs(last));
      last = obj;
      ++epochs_checked;
    };
    const auto sol = learner::solve_svr_dual(X * X.transpose(), y, o);
    c.expect(monotone, "problem " + std::to_string(k) + ": dual objective decreased");
    c.expect(sol.converged, "problem " + std::to_string(k) + ": not converged");
    // Weights in feature space, then predictions on training and test points.
    const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(sol.beta.data(), n);
    const Eigen::VectorXd w = X.transpose() * beta;
    const double b = sol.offset + sol.beta_sum();
    auto check = [&](const char* xs, const char* want) {
      const auto rows = p.at(xs).get<std::vector<std::vector<double>>>();
      const auto ref = p.at(want).get<std::vector<double>>();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double f = b;
        for (Eigen::Index j = 0; j < d; ++j) f += w[j] * rows[i][j];
        const double err = std::abs(f - ref[i]);
        worst = std::max(worst, err);
        c.expect(err <= 1e-4, "problem " + std::to_string(k) + ": |error| " + fmt(err, 6));
      }
    };
    check("x", "pred_train");
    check("x_test", "pred_test");
  }
  std::ostringstream s;
  s << "200 problems, max |prediction error| " << worst << ", dual objective monotone over "
    << epochs_checked << " epochs";
  return c.outcome(s.str());
}

Outcome criterion5() {
  Checks c;
  const auto& an = testing::offline_resources()->analyzer;
  const auto data = load_json("readability_reference.json");
  double worst = 0;
  for (const auto& t : data) {
    const auto r = features::readability_scores(an.analyze(t.at("text").get<std::string>()));
    for (std::size_t i = 0; i < features::kNumReadability; ++i) {
      const std::string id(features::readability_ids()[i]);
      const double err = std::abs(r.values[i] - t.at("expected").at(id).get<double>());
      worst = std::max(worst, err);
      c.expect(err <= 1e-9, id + " on \"" + t.at("text").get<std::string>().substr(0, 20) + "\"");
    }
  }
  const auto cat = features::readability_scores(an.analyze("The cat sat on the mat."));
  c.expect(std::abs(cat.values[0] - 116.145) <= 1e-9, "Flesch reading ease " + fmt(cat.values[0], 6));
  c.expect(std::abs(cat.values[2] - 2.4) <= 1e-9, "Gunning fog " + fmt(cat.values[2], 6));
  c.expect(std::abs(cat.values[3] - 6.0) <= 1e-9, "LIX " + fmt(cat.values[3], 6));
  std::ostringstream s;
  s << data.size() << " texts x 10 formulas, max |error| " << worst
    << "; Flesch 116.145, Fog 2.4, LIX 6.0";
  return c.outcome(s.str());
}

Outcome criterion6() {
  Checks c;
  const auto data = load_json("ttest_reference.json");
  c.expect(data.size() == 20, "expected 20 pairs");
  double worst = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto a = data[k].at("a").get<std::vector<double>>();
    const auto b = data[k].at("b").get<std::vector<double>>();
    const double err = std::abs(eval::t_test_one_tailed(a, b) - data[k].at("p").get<double>());
    worst = std::max(worst, err);
    c.expect(err <= 1e-6, "pair " + std::to_string(k));
  }
  const std::vector<double> s = {0.41, 0.38, 0.45, 0.40};
  c.expect(eval::t_test_one_tailed(s, s) == 0.5, "identical samples");
  std::ostringstream out;
  out << "20 pairs, max |p error| " << worst << "; identical samples p = 0.5";
  return c.outcome(out.str());
}

// ---------------------------------------------------------------------------
// Criteria 7-8: mini corpus, no downloads.

struct MiniReports {
  std::string q1, q2, q3;
  eval::ExperimentReport r1, r2, r3;
};

MiniReports mini_run(const corpus::Corpus& c, const features::Extractor& ex, int jobs,
                     eval::Engine** keep = nullptr) {
  static std::vector<std::unique_ptr<eval::Engine>> engines;
  engines.push_back(std::make_unique<eval::Engine>(c, ex, learner::TrainConfig{},
                                                   eval::EngineOptions{jobs, false, false, "acceptance", {}}));
  auto& e = *engines.back();
  MiniReports m;
  m.r1 = eval::run_q1(e);
  m.r2 = eval::run_q2(e);
  m.r3 = eval::run_q3(e);
  m.q1 = eval::render_json(m.r1);
  m.q2 = eval::render_json(m.r2);
  m.q3 = eval::render_json(m.r3);
  if (keep) *keep = &e;
  return m;
}

Outcome criterion7(const corpus::Corpus& c, const features::Extractor& ex, const MiniReports& base) {
  Checks chk;
  const auto t0 = std::chrono::steady_clock::now();

  // Partitions.
  const auto folds = corpus::loto_splits(c);
  chk.expect(folds.size() == c.topics().size(), "one fold per topic");
  std::multiset<std::string> tested;
  for (const auto& f : folds) {
    tested.insert(f.test.begin(), f.test.end());
    chk.expect(f.train.size() + f.test.size() == c.size(), "fold " + f.held_out_topic + " covers the corpus");
    for (const auto& id : f.test) chk.expect(c.at(id).topic == f.held_out_topic, "test id " + id + " off topic");
    for (const auto& id : f.train) chk.expect(c.at(id).topic != f.held_out_topic, "train id " + id + " leaks");
    std::multiset<std::string> validated;
    const auto inner = corpus::inner_cv_splits(f.train, c);
    chk.expect(inner.size() == c.topics().size() - 1, "inner folds of " + f.held_out_topic);
    for (const auto& s : inner) {
      validated.insert(s.validation.begin(), s.validation.end());
      chk.expect(s.train.size() + s.validation.size() == f.train.size(), "inner split sizes");
    }
    chk.expect(validated == std::multiset<std::string>(f.train.begin(), f.train.end()), "inner validation partition");
  }
  std::multiset<std::string> all;
  for (const auto& a : c.arguments()) all.insert(a.id);
  chk.expect(tested == all, "each argument tested exactly once");

  // No leakage: altering one held-out text must leave the fold's predictions
  // for the other held-out documents bit-identical (vocabulary, scaling and
  // model all come from the training topics only).
  const eval::Job leak_job{false, ex.enabled_families(), eval::Target::mean, Dimension::OvQ};
  eval::Engine ref(c, ex, learner::TrainConfig{}, eval::EngineOptions{2, false, false, "", {}});
  const auto& before = ref.predictions(leak_job);
  for (std::size_t k = 0; k < folds.size(); ++k) {
    auto args = c.arguments();
    const auto& victim = folds[k].test.front();
    args[c.index_of(victim)].text = "Entirely new words 42 :) xylophone! Because zebras.";
    const corpus::Corpus altered(args);
    eval::Engine e(altered, ex, learner::TrainConfig{}, eval::EngineOptions{2, false, false, "", {}});
    const auto& after = e.predictions(leak_job);
    bool same = true;
    for (std::size_t i = 1; i < after.predictions[k].size(); ++i) {
      same = same && after.predictions[k][i] == before.predictions[k][i];
    }
    chk.expect(same, "fold " + folds[k].held_out_topic + " predictions depend on a held-out text");
    chk.expect(after.chosen_c[k] == before.chosen_c[k], "fold " + folds[k].held_out_topic + " C depends on a held-out text");
  }

  // Threshold boundary: 29/1000 excluded, 30/1000 included.
  auto with = [&](std::size_t k) {
    std::vector<features::DocumentFeatures> d;
    for (std::size_t i = 0; i < 1000; ++i) d.push_back(ex.extract("t" + std::to_string(i), i < k ? "rare marker" : "common"));
    const auto p = ex.fit(d);
    const auto& names = p.space(Family::content).names;
    return std::find(names.begin(), names.end(), "content:w1:rare") != names.end();
  };
  chk.expect(!with(29), "2.9% retained");
  chk.expect(with(30), "3.0% dropped");

  // Macro versus micro MAE.
  const std::vector<double> pa(10, 2.2), ga(10, 2.0), pb(2, 2.4), gb(2, 2.0);
  const double macro = eval::macro_mae(std::vector<double>{eval::mae(pa, ga), eval::mae(pb, gb)});
  std::vector<double> p = pa, g = ga;
  p.insert(p.end(), pb.begin(), pb.end());
  g.insert(g.end(), gb.begin(), gb.end());
  chk.expect(std::abs(macro - 0.3) < 1e-12, "macro MAE " + fmt(macro, 6));
  chk.expect(std::abs(eval::mae(p, g) - 2.8 / 12) < 1e-12, "micro MAE");

  // Determinism of full mini runs across degrees of parallelism.
  const auto serial = mini_run(c, ex, 1);
  chk.expect(serial.q1 == base.q1 && serial.q2 == base.q2 && serial.q3 == base.q3,
             "mini-run reports differ between 1 and 4 workers");

  const double secs = seconds_since(t0);
  chk.expect(secs < 60, "runtime " + fmt(secs, 1) + " s");
  return chk.outcome("partitions, no-leakage over " + std::to_string(folds.size()) +
                     " folds, 2.9%/3.0% boundary, macro 0.300 vs micro 0.233, byte-identical mini runs; " +
                     fmt(secs, 1) + " s");
}

Outcome criterion8(const corpus::Corpus& c, eval::Engine& engine, const MiniReports& m) {
  Checks chk;
  // Q2 "Mean score" rows against Q1 A1-8 and B, ignoring the table-specific bold flag.
  const auto& q1 = m.r1.rows;
  std::vector<const eval::ReportRow*> mean_rows;
  for (const auto& r : m.r2.rows) {
    if (r.group == "Mean score") mean_rows.push_back(&r);
  }
  chk.expect(mean_rows.size() == 2, "Q2 has two mean-score rows");
  if (mean_rows.size() == 2) {
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& a = mean_rows[k]->cells;
      const auto& b = q1[q1.size() - 2 + k].cells;
      for (std::size_t d = 0; d < a.size(); ++d) {
        auto x = a[d], y = b[d];
        x.best = y.best = false;
        chk.expect(x == y, "Q2 mean row " + std::to_string(k) + " differs from Q1 in column " + std::to_string(d));
      }
    }
  }

  // A synthetic expert that always gives the majority score.
  auto args = c.arguments();
  for (auto& a : args) {
    for (Dimension d : corpus::all_dimensions()) a.sheet.set(2, d, corpus::majority_score(a, d));
  }
  const corpus::Corpus synth(args);
  eval::Engine se(synth, engine.extractor(), learner::TrainConfig{}, eval::EngineOptions{});
  const eval::ApproachSpec e2{"E2", "Expert #2", eval::ApproachKind::expert, {}, eval::Target::majority,
                              eval::Target::majority, false, 2};
  for (Dimension d : corpus::all_dimensions()) {
    const auto r = eval::run_loto(se, e2, d);
    chk.expect(r.mean_mae == 0.0, "always-majority expert MAE " + fmt(r.mean_mae) + " on " + std::string(corpus::abbreviation(d)));
  }

  // Q3 SVM row: fold MAEs recomputed from rounded (integer) predictions.
  const auto& svm = m.r3.rows.back();
  chk.expect(svm.approach.rounding, "Q3 SVM row is rounded");
  const eval::Job job{false, engine.available_families(), eval::Target::mean, Dimension::Cog};
  for (std::size_t di = 0; di < corpus::kNumDimensions; ++di) {
    auto j = job;
    j.dimension = corpus::all_dimensions()[di];
    const auto& fp = engine.predictions(j);
    for (std::size_t k = 0; k < fp.predictions.size(); ++k) {
      std::vector<double> pred, gold;
      for (std::size_t i = 0; i < fp.predictions[k].size(); ++i) {
        const int r = learner::round_score(fp.predictions[k][i]);
        pred.push_back(r);
        gold.push_back(corpus::majority_score(c.at(engine.folds()[k].test[i]), j.dimension));
      }
      chk.expect(svm.cells[di].fold_maes[k].second == eval::mae(pred, gold), "Q3 SVM fold MAE not from integer predictions");
    }
  }
  return chk.outcome("Q2 mean rows equal Q1; always-majority expert MAE 0 on 15 dimensions; Q3 SVM MAEs "
                     "recomputed from integer predictions");
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {Status::fail, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  std::vector<std::pair<int, Outcome>> results;
  auto record = [&](int n, Outcome o) {
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "BLOCKED";
    std::printf("criterion %d: %s: %s\n", n, tag, o.detail.c_str());
    std::fflush(stdout);
    results.emplace_back(n, std::move(o));
  };

  auto pub = open_published();
  record(1, guarded([&] { return criterion1(pub); }));
  record(2, guarded([&] { return criterion2(pub); }));
  record(3, guarded([&] { return criterion3(pub); }));
  record(4, guarded(criterion4));
  record(5, guarded(criterion5));
  record(6, guarded(criterion6));

  const auto corpus = testing::mini_corpus();
  const features::Extractor ex(testing::offline_config(), testing::offline_resources());
  eval::Engine* engine = nullptr;
  MiniReports mini;
  const auto mini_ok = guarded([&] {
    mini = mini_run(corpus, ex, 4, &engine);
    return Outcome{};
  });
  if (mini_ok.status != Status::pass) {
    record(7, mini_ok);
    record(8, mini_ok);
  } else {
    record(7, guarded([&] { return criterion7(corpus, ex, mini); }));
    record(8, guarded([&] { return criterion8(corpus, *engine, mini); }));
  }

  int passed = 0, failed = 0, blocked = 0;
  for (const auto& [n, o] : results) {
    passed += o.status == Status::pass;
    failed += o.status == Status::fail;
    blocked += o.status == Status::blocked;
  }
  std::printf("summary: %d passed, %d failed, %d blocked\n", passed, failed, blocked);
  if (failed) return 1;
  return blocked ? 77 : 0;
}

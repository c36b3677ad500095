#include <algorithm>
#include <cmath>
#include <random>

#include "argq/errors.hpp"
#include "argq/eval.hpp"
#include "argq/util.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace argq;
using namespace argq::eval;
using features::Family;

namespace {

struct MiniRun {
  corpus::Corpus corpus = testing::mini_corpus();
  features::Extractor extractor{testing::offline_config(), testing::offline_resources()};
  Engine engine;
  ExperimentReport q1, q2, q3;

  explicit MiniRun(int jobs)
      : engine(corpus, extractor, learner::TrainConfig{}, EngineOptions{jobs, false, false, "test", {}}) {
    std::vector<Job> all;
    for (Suite s : {Suite::q1, Suite::q2, Suite::q3}) {
      const auto j = jobs_for(s, engine);
      all.insert(all.end(), j.begin(), j.end());
    }
    engine.compute(all);
    q1 = run_q1(engine);
    q2 = run_q2(engine);
    q3 = run_q3(engine);
  }
};

MiniRun& mini() {
  static MiniRun run(4);
  return run;
}

const ReportRow& row(const ExperimentReport& r, const std::string& group, const std::string& id) {
  for (const auto& x : r.rows) {
    if (x.group == group && x.approach.id == id) return x;
  }
  FAIL("no row " << group << "/" << id);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("mae") {
  CHECK(mae(std::vector<double>{1.5, 2.0}, std::vector<double>{2, 2}) == 0.25);
  CHECK(mae(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(mae(std::vector<double>{1, 3}, std::vector<double>{3, 1}) == 2.0);
  CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), Error);
  CHECK_THROWS_AS(mae(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("macro MAE is the unweighted fold mean, not the micro mean") {
  // Fold A: 10 docs at error 0.2; fold B: 2 docs at error 0.4.
  std::vector<double> pa(10, 2.2), ga(10, 2.0), pb(2, 2.4), gb(2, 2.0);
  const std::vector<double> folds = {mae(pa, ga), mae(pb, gb)};
  CHECK(macro_mae(folds) == doctest::Approx(0.3));
  std::vector<double> p = pa, g = ga;
  p.insert(p.end(), pb.begin(), pb.end());
  g.insert(g.end(), gb.begin(), gb.end());
  CHECK(mae(p, g) == doctest::Approx(2.8 / 12));
  CHECK(macro_mae(std::vector<double>{0.37}) == 0.37);
  CHECK(macro_mae(std::vector<double>{0.5, 0.5, 0.5}) == 0.5);
  std::vector<double> f = {0.1, 0.7, 0.3, 0.25, 0.9};
  const double m = macro_mae(f);
  std::sort(f.begin(), f.end());
  do {
    CHECK(macro_mae(f) == doctest::Approx(m).epsilon(1e-15));
  } while (std::next_permutation(f.begin(), f.end()));
}

TEST_CASE("t-test reproduces reference p-values") {
  const auto data = nlohmann::json::parse(util::read_file(testing::test_data("ttest_reference.json")));
  REQUIRE(data.size() == 20);
  for (const auto& c : data) {
    const auto a = c.at("a").get<std::vector<double>>();
    const auto b = c.at("b").get<std::vector<double>>();
    CHECK(std::abs(t_test_one_tailed(a, b) - c.at("p").get<double>()) <= 1e-6);
    if (c.at("p_paired").is_null()) {
      CHECK_THROWS_AS(t_test_one_tailed(a, b, true), Error);
    } else {
      CHECK(std::abs(t_test_one_tailed(a, b, true) - c.at("p_paired").get<double>()) <= 1e-6);
    }
  }
  CHECK(t_test_one_tailed(std::vector<double>{1, 2, 3, 4}, std::vector<double>{3, 4, 5, 6}) ==
        doctest::Approx(0.0353).epsilon(1e-3));
}

TEST_CASE("t-test degenerate cases and symmetry") {
  const std::vector<double> a = {0.3, 0.4, 0.5, 0.35};
  CHECK(t_test_one_tailed(a, a) == 0.5);
  CHECK(t_test_one_tailed(std::vector<double>{1, 1}, std::vector<double>{1, 1}) == 0.5);
  CHECK(t_test_one_tailed(std::vector<double>{1, 1}, std::vector<double>{2, 2}) == 0.0);
  CHECK(t_test_one_tailed(std::vector<double>{2, 2}, std::vector<double>{1, 1}) == 1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.4, 0.1);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(16), y(16);
    for (auto& v : x) v = nd(rng);
    for (auto& v : y) v = nd(rng) + 0.05;
    const double p = t_test_one_tailed(x, y), q = t_test_one_tailed(y, x);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p + q == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("significance marks") {
  CHECK(significance_of(0.001) == Significance::p01);
  CHECK(significance_of(0.03) == Significance::p05);
  CHECK(significance_of(0.05) == Significance::none);
  CHECK(significance_of(std::nullopt) == Significance::none);
  CHECK(mark(Significance::p05) == "\xE2\x80\xA0");
  CHECK(mark(Significance::p01) == "\xE2\x80\xA1");
  CHECK(mark(Significance::none).empty());
}

TEST_CASE("Q1 approaches: singles, ablations, all features, baseline") {
  const auto a = q1_approaches();
  REQUIRE(a.size() == 18);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(a[i].families.size() == 1);
    CHECK(a[8 + i].families.size() == 7);
    CHECK_FALSE(a[8 + i].families.contains(features::all_families()[i]));
  }
  CHECK(a[16].id == "A1-8");
  CHECK(a[16].families == features::FamilySet::all());
  CHECK(a[17].id == "B");
  CHECK(a[17].kind == ApproachKind::baseline);
}

TEST_CASE("Q1 report on the mini corpus") {
  const auto& r = mini().q1;
  REQUIRE(r.rows.size() == 18);
  const auto& a2 = r.rows[1];
  CHECK(a2.approach.id == "A2");
  CHECK(a2.disabled);  // no embedding file in the offline configuration
  for (const auto& x : r.rows) {
    if (x.disabled) continue;
    REQUIRE(x.cells.size() == 15);
    for (const auto& c : x.cells) {
      CHECK(c.fold_maes.size() == 4);
      CHECK(std::isfinite(c.mean_mae));
      if (x.approach.kind == ApproachKind::svr) CHECK(c.chosen_c.size() == 4);
    }
    if (x.approach.kind == ApproachKind::svr) {
      CHECK_FALSE(std::count(x.effective_families.begin(), x.effective_families.end(), "embedding"));
    }
  }
  // Ablation consistency from the recorded family sets.
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& abl = r.rows[8 + i];
    const std::string f(features::family_name(features::all_families()[i]));
    CHECK(std::count(abl.effective_families.begin(), abl.effective_families.end(), f) == 0);
    CHECK(abl.effective_families.size() == (i == 1 ? 7u : 6u));
  }
  CHECK(r.rows[16].effective_families.size() == 7);
  // Significance only on A1-8.
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.rows[i].disabled) continue;
    for (const auto& c : r.rows[i].cells) CHECK(c.p_value.has_value() == (i == 16));
  }
  // Bold is the column minimum of the displayed values.
  for (std::size_t d = 0; d < 15; ++d) {
    double best = 1e9;
    for (const auto& x : r.rows) {
      if (!x.disabled) best = std::min(best, std::round(x.cells[d].mean_mae * 100) / 100);
    }
    bool any = false;
    for (const auto& x : r.rows) {
      if (x.disabled) continue;
      const bool is_min = std::round(x.cells[d].mean_mae * 100) / 100 == best;
      CHECK(x.cells[d].best == is_min);
      any = any || is_min;
    }
    CHECK(any);
  }
  CHECK_FALSE(r.provenance.notes.empty());
}

TEST_CASE("baseline fold MAEs follow from train means and test golds") {
  auto& m = mini();
  const auto& b = m.q1.rows.back();
  for (const auto& cell : b.cells) {
    for (std::size_t k = 0; k < m.engine.folds().size(); ++k) {
      const auto& fold = m.engine.folds()[k];
      double sum = 0;
      for (const auto& id : fold.train) sum += corpus::mean_score(m.corpus.at(id), cell.dimension);
      const double pred = learner::clamp_score(sum / static_cast<double>(fold.train.size()));
      double err = 0;
      for (const auto& id : fold.test) err += std::abs(pred - corpus::mean_score(m.corpus.at(id), cell.dimension));
      CHECK(cell.fold_maes[k].first == fold.held_out_topic);
      CHECK(cell.fold_maes[k].second == doctest::Approx(err / static_cast<double>(fold.test.size())).epsilon(1e-12));
    }
  }
}

TEST_CASE("baseline on a constant corpus has zero error") {
  auto args = testing::mini_corpus().arguments();
  for (auto& a : args) {
    for (int e = 1; e <= 3; ++e) {
      for (auto d : corpus::all_dimensions()) a.sheet.set(e, d, 2);
    }
  }
  const corpus::Corpus c(args);
  const features::Extractor ex(testing::offline_config(), testing::offline_resources());
  Engine engine(c, ex, {}, {});
  const auto spec = q1_approaches().back();
  for (auto d : corpus::all_dimensions()) {
    const auto r = run_loto(engine, spec, d);
    CHECK(r.fold_maes.size() == c.topics().size());
    for (const auto& [topic, v] : r.fold_maes) CHECK(v == 0.0);
  }
}

TEST_CASE("Q2 mean-score rows equal the Q1 rows") {
  const auto& q1 = mini().q1;
  const auto& q2 = mini().q2;
  REQUIRE(q2.rows.size() == 8);
  const auto& all2 = row(q2, "Mean score", "A1-8");
  const auto& base2 = row(q2, "Mean score", "B");
  for (std::size_t d = 0; d < 15; ++d) {
    for (auto [x, y] : {std::pair{all2.cells[d], q1.rows[16].cells[d]}, std::pair{base2.cells[d], q1.rows[17].cells[d]}}) {
      x.best = y.best = false;  // bold rules differ between the tables
      CHECK(x == y);
    }
  }
  for (std::size_t d = 0; d < 15; ++d) {
    CHECK(all2.cells[d].mean_mae == q1.rows[16].cells[d].mean_mae);
    CHECK(all2.cells[d].p_value == q1.rows[16].cells[d].p_value);
  }
}

TEST_CASE("Q2 expert rows use integer gold") {
  auto& m = mini();
  // Baseline predictions are fold train means; with integer gold the fold
  // MAE is recomputed here from the expert's scores.
  for (int e = 1; e <= 3; ++e) {
    const auto& b = row(m.q2, "Expert #" + std::to_string(e), "B");
    for (const auto& cell : b.cells) {
      for (std::size_t k = 0; k < m.engine.folds().size(); ++k) {
        const auto& fold = m.engine.folds()[k];
        double sum = 0;
        for (const auto& id : fold.train) sum += m.corpus.at(id).sheet.score(e, cell.dimension);
        const double pred = sum / static_cast<double>(fold.train.size());
        double err = 0;
        for (const auto& id : fold.test) {
          const int g = m.corpus.at(id).sheet.score(e, cell.dimension);
          CHECK((g >= 1 && g <= 3));
          err += std::abs(learner::clamp_score(pred) - g);
        }
        CHECK(cell.fold_maes[k].second == doctest::Approx(err / static_cast<double>(fold.test.size())));
      }
    }
  }
}

TEST_CASE("Q3: always-majority expert scores 0 and the SVM row uses integer predictions") {
  auto& m = mini();
  const auto& q3 = m.q3;
  REQUIRE(q3.rows.size() == 4);
  // Expert #1 of the mini corpus always agrees with the majority.
  for (const auto& c : row(q3, "Humans", "E1").cells) {
    CHECK(c.mean_mae == 0.0);
    CHECK_FALSE(c.flagged);
  }
  const auto& svm = row(q3, "SVM", "A1-8");
  CHECK(svm.approach.rounding);
  for (const auto& c : svm.cells) {
    for (std::size_t k = 0; k < c.fold_maes.size(); ++k) {
      const double n = static_cast<double>(m.engine.folds()[k].test.size());
      const double total = c.fold_maes[k].second * n;  // sum of |int - int|
      CHECK(std::abs(total - std::round(total)) <= 1e-9);
    }
  }
  const Job job{false, m.engine.available_families(), Target::mean, Dimension::OvQ};
  const auto& fp = m.engine.predictions(job);
  const auto& ovq = svm.cells[corpus::index_of(Dimension::OvQ)];
  for (std::size_t k = 0; k < fp.predictions.size(); ++k) {
    std::vector<double> pred, gold;
    for (std::size_t i = 0; i < fp.predictions[k].size(); ++i) {
      pred.push_back(learner::round_score(fp.predictions[k][i]));
      gold.push_back(corpus::majority_score(m.corpus.at(m.engine.folds()[k].test[i]), Dimension::OvQ));
    }
    CHECK(ovq.fold_maes[k].second == mae(pred, gold));
  }
  for (std::size_t e = 0; e < 3; ++e) {
    for (std::size_t d = 0; d < 15; ++d) {
      const auto& c = q3.rows[e].cells[d];
      CHECK(c.flagged == (c.mean_mae > svm.cells[d].mean_mae));
      CHECK(c.p_value.has_value());
    }
  }
}

TEST_CASE("rendering: Markdown rows, CSV cell count, JSON round trip") {
  for (const auto* r : {&mini().q1, &mini().q2, &mini().q3}) {
    CHECK(report_from_json(render_json(*r)) == *r);
    CHECK(render_json(report_from_json(render_json(*r))) == render_json(*r));
    const auto csv = render_csv(*r);
    const auto lines = util::split(util::trim(csv), '\n');
    REQUIRE(lines.size() == r->rows.size() + 1);
    CHECK(lines[0].rfind("id,Cog,", 0) == 0);
    for (const auto& l : lines) {
      // Row key plus 15 dimension columns; disabled rows keep the columns.
      CHECK(std::count(l.begin(), l.end(), ',') == 15);
    }
  }
  const auto md = render_markdown(mini().q1);
  std::size_t table_rows = 0;
  for (const auto& l : util::split(md, '\n')) {
    if (l.rfind("| A", 0) == 0 || l.rfind("| B", 0) == 0) ++table_rows;
  }
  CHECK(table_rows == 18);
  CHECK(md.find("disabled") != std::string::npos);
  CHECK(md.find("**") != std::string::npos);
  CHECK(md.find("logical (Cog, LAc, LRe, LSu)") != std::string::npos);
  CHECK(md.find("dialectical (Rea, GAc, GRe, GSu)") != std::string::npos);
  CHECK_THROWS_AS(report_from_json("[]"), Error);
}

TEST_CASE("mini runs are identical for any degree of parallelism") {
  MiniRun serial(1);
  CHECK(render_json(serial.q1) == render_json(mini().q1));
  CHECK(render_json(serial.q2) == render_json(mini().q2));
  CHECK(render_json(serial.q3) == render_json(mini().q3));
  MiniRun again(3);
  CHECK(render_json(again.q1) == render_json(mini().q1));
}

#ifndef ARGQ_EVAL_HPP
#define ARGQ_EVAL_HPP

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argq/corpus.hpp"
#include "argq/features.hpp"
#include "argq/learner.hpp"

namespace argq::eval {

using corpus::Dimension;

// ---------------------------------------------------------------------------
// Metrics and significance

// Throws Error on empty or mismatched input.
double mae(std::span<const double> predictions, std::span<const double> gold);
// Unweighted mean over folds.
double macro_mae(std::span<const double> fold_maes);

// One-tailed p-value for mean(a) < mean(b). Student's pooled-variance
// two-sample test with df = na + nb - 2, or a paired test on a - b when
// `paired` is set. Zero variance: 0.5 for equal means, else 0 or 1.
double t_test_one_tailed(std::span<const double> a, std::span<const double> b,
                         bool paired = false);

enum class Significance { none, p05, p01 };
Significance significance_of(std::optional<double> p);
// "", "†" (dagger) or "‡" (double dagger).
std::string_view mark(Significance s);

// ---------------------------------------------------------------------------
// Experiment definitions

enum class Target { mean, expert1, expert2, expert3, majority };
std::string_view target_name(Target t);
std::optional<Target> parse_target(std::string_view name);
Target expert_target(int expert);
double target_value(const corpus::Argument& a, Dimension d, Target t);

enum class ApproachKind { svr, baseline, expert };

struct ApproachSpec {
  std::string id;     // A1..A8, A\1..A\8, A1-8, B, E1..E3
  std::string label;  // e.g. "Content", "w/o Content", "All features"
  ApproachKind kind = ApproachKind::svr;
  features::FamilySet families;  // ignored unless kind == svr
  Target target = Target::mean;  // training target
  Target gold = Target::mean;
  bool rounding = false;
  int expert = 0;  // kind == expert: predictions are this expert's scores

  bool operator==(const ApproachSpec&) const = default;
};

// A1..A8, A\1..A\8, A1-8, B in table order.
std::vector<ApproachSpec> q1_approaches();

enum class Suite { q1, q2, q3 };
std::string_view suite_name(Suite s);
std::optional<Suite> parse_suite(std::string_view name);

struct DimensionResult {
  Dimension dimension = Dimension::Cog;
  std::vector<std::pair<std::string, double>> fold_maes;  // by topic, topic-sorted
  double mean_mae = 0;
  std::vector<double> chosen_c;  // per fold (svr only)
  Significance significance = Significance::none;
  std::optional<double> p_value;
  bool best = false;     // rendered bold
  bool flagged = false;  // Q3: expert worse than the SVM (gray in the paper)

  bool operator==(const DimensionResult&) const = default;
};

struct ReportRow {
  std::string group;  // Q2/Q3 row group, e.g. "Expert #1"
  ApproachSpec approach;
  bool disabled = false;
  // Families the row was actually trained with (svr rows).
  std::vector<std::string> effective_families;
  std::vector<DimensionResult> cells;  // 15, or empty when disabled

  bool operator==(const ReportRow&) const = default;
};

struct Provenance {
  std::string config_hash;
  std::string corpus_hash;
  std::string resources_hash;
  std::vector<std::string> notes;

  bool operator==(const Provenance&) const = default;
};

struct ExperimentReport {
  Suite suite = Suite::q1;
  std::vector<ReportRow> rows;
  Provenance provenance;

  bool operator==(const ExperimentReport&) const = default;
};

// ---------------------------------------------------------------------------
// Engine: per-fold pipelines, kernels and predictions, cached per job.

struct EngineOptions {
  int jobs = 1;
  bool paired_ttest = false;
  // Q3 SVM trained on majority scores instead of mean scores.
  bool q3_train_on_majority = false;
  // Recorded in report provenance.
  std::string config_hash;
  // Progress messages (stderr in the CLI); may be empty.
  std::function<void(const std::string&)> log;
};

struct Job {
  bool baseline = false;
  features::FamilySet families;  // effective set; empty for baseline
  Target target = Target::mean;
  Dimension dimension = Dimension::Cog;

  auto operator<=>(const Job&) const = default;
};

struct FoldPredictions {
  // Per outer fold, predictions for the fold's test ids in order.
  std::vector<std::vector<double>> predictions;
  std::vector<double> chosen_c;  // per fold, svr only
};

class Engine {
 public:
  Engine(const corpus::Corpus& corpus, const features::Extractor& extractor,
         learner::TrainConfig train, EngineOptions options);
  ~Engine();

  const corpus::Corpus& corpus() const { return corpus_; }
  const std::vector<corpus::TopicFold>& folds() const { return folds_; }
  const features::Extractor& extractor() const { return extractor_; }
  const learner::TrainConfig& train_config() const { return train_; }
  const EngineOptions& options() const { return options_; }
  features::FamilySet available_families() const;

  // Computes every job not yet cached, fold by fold.
  void compute(const std::vector<Job>& jobs);
  // Cached result, computed on demand.
  const FoldPredictions& predictions(const Job& job);

  // Per-document features, extracted once.
  const std::vector<features::DocumentFeatures>& documents();

  // Deployment models trained on the whole corpus: one pipeline, and per
  // dimension an SVR whose C is chosen by topic-wise CV over all topics
  // (or the mean baseline).
  struct FinalModels {
    features::FittedPipeline pipeline;
    std::vector<learner::LinearModel> models;  // one per dimension
  };
  FinalModels fit_final(Target target, bool baseline);

  // SVR trainings so far and how many of them hit max_epochs.
  struct SolverStats {
    std::size_t trainings = 0;
    std::size_t unconverged = 0;
  };
  SolverStats solver_stats() const { return {trainings_.load(), unconverged_.load()}; }

 private:
  const corpus::Corpus& corpus_;
  const features::Extractor& extractor_;
  learner::TrainConfig train_;
  EngineOptions options_;
  std::vector<corpus::TopicFold> folds_;
  std::vector<features::DocumentFeatures> docs_;
  bool docs_ready_ = false;
  std::map<Job, FoldPredictions> cache_;
  std::atomic<std::size_t> trainings_{0};
  std::atomic<std::size_t> unconverged_{0};

  void count(std::size_t trainings, std::size_t unconverged);
};

// Jobs a suite needs; lets callers batch several suites in one pass.
std::vector<Job> jobs_for(Suite suite, const Engine& engine);

DimensionResult run_loto(Engine& engine, const ApproachSpec& approach, Dimension d);

ExperimentReport run_q1(Engine& engine);
ExperimentReport run_q2(Engine& engine);
ExperimentReport run_q3(Engine& engine);
ExperimentReport run_suite(Engine& engine, Suite s);

// ---------------------------------------------------------------------------
// Rendering

std::string render_markdown(const ExperimentReport& r);
std::string render_csv(const ExperimentReport& r);
std::string render_json(const ExperimentReport& r);
ExperimentReport report_from_json(std::string_view json);

}  // namespace argq::eval

#endif  // ARGQ_EVAL_HPP

#ifndef ARGQ_APP_HPP
#define ARGQ_APP_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "argq/config.hpp"
#include "argq/eval.hpp"

// Top-level operations shared by the C API and the command-line tool.
namespace argq::app {

using Log = std::function<void(const std::string&)>;

struct ValidateSummary {
  std::size_t arguments = 0;
  std::size_t topics = 0;
  // Per dimension: number of expert scores equal to 1, 2 and 3.
  std::map<corpus::Dimension, std::array<std::size_t, 3>> histogram;
  std::vector<std::string> enabled_families;
  std::size_t embedding_dim = 0;  // 0 when the embedding family is disabled
  std::string corpus_hash;
  std::string resources_hash;
  std::string config_hash;

  // "304 arguments, 16 topics"
  std::string headline() const;
  std::string to_json() const;
};

// Checks config, corpus schema, lexicon files and embedding dimension.
// Throws ConfigError or DataError.
ValidateSummary validate(const config::RunConfig& cfg, const Log& log = {});

// Corpus, resources, extractor and engine of one configuration. Heap-only,
// since the engine refers to the other members.
class Session {
 public:
  // Throws ConfigError or DataError.
  static std::unique_ptr<Session> open(const config::RunConfig& cfg, const Log& log = {});

  const corpus::Corpus& corpus() const { return corpus_; }
  const features::Resources& resources() const { return *resources_; }
  const features::Extractor& extractor() const { return *extractor_; }
  eval::Engine& engine() { return *engine_; }

 private:
  explicit Session(corpus::Corpus c) : corpus_(std::move(c)) {}

  corpus::Corpus corpus_;
  std::shared_ptr<const features::Resources> resources_;
  std::unique_ptr<features::Extractor> extractor_;
  std::unique_ptr<eval::Engine> engine_;
};

struct RunResult {
  std::vector<eval::ExperimentReport> reports;
  std::vector<std::filesystem::path> files;  // report files, then the manifest
};

// Runs the configured suites and writes report_<suite>.{md,csv,json} plus
// run_manifest.json into cfg.output_dir. Stale report files are removed first.
RunResult run(const config::RunConfig& cfg, const Log& log = {});

// Fits the pipeline on the whole corpus, selects C per dimension by topic-wise
// cross-validation and writes pipeline.json, model_<Dim>.json and scorer.json
// into `out_dir`. With `baseline` the models predict the training mean.
void train(const config::RunConfig& cfg, const std::filesystem::path& out_dir, bool baseline,
           const Log& log = {});

struct Scores {
  std::array<double, corpus::kNumDimensions> values{};
  std::array<int, corpus::kNumDimensions> rounded{};
  // Per dimension: bias and the summed weight*value of each family.
  std::array<std::map<std::string, double>, corpus::kNumDimensions> contributions;

  std::string to_json(bool include_rounded) const;
};

// Scores new texts with a directory written by train().
class Scorer {
 public:
  // Throws DataError for missing or malformed files, FingerprintError when
  // the models, pipeline and resources do not belong together.
  static std::unique_ptr<Scorer> open(const std::filesystem::path& model_dir);

  Scores score(std::string_view text) const;

  const features::FittedPipeline& pipeline() const { return pipeline_; }
  const std::vector<learner::LinearModel>& models() const { return models_; }

 private:
  Scorer() = default;

  std::unique_ptr<features::Extractor> extractor_;
  features::FittedPipeline pipeline_;
  std::vector<learner::LinearModel> models_;
  bool clamp_ = true;
};

}  // namespace argq::app

#endif  // ARGQ_APP_HPP

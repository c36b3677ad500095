#ifndef ARGQ_CONFIG_HPP
#define ARGQ_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argq/corpus.hpp"
#include "argq/eval.hpp"
#include "argq/features.hpp"
#include "argq/learner.hpp"

namespace argq::config {

// Everything a run needs. Loaded from an INI file with the sections
// [corpus], [features], [learner], [eval] and [run]; relative paths resolve
// against the directory of the file.
struct RunConfig {
  std::filesystem::path base_dir = ".";
  std::optional<std::filesystem::path> corpus_path;
  corpus::ColumnMapping mapping;
  std::vector<eval::Suite> suites = {eval::Suite::q1, eval::Suite::q2, eval::Suite::q3};
  features::ExtractorConfig extractor;
  learner::TrainConfig train;
  bool paired_ttest = false;
  bool q3_train_on_majority = false;
  std::filesystem::path output_dir = "runs/latest";
  int jobs = 1;

  RunConfig();

  // Throws ConfigError naming the offending key.
  void validate() const;
  // Sorted "section.key = value" lines of every effective setting.
  std::string canonical() const;
  // Hash of the settings that can change results: everything except the
  // [run] section and eval.suites.
  std::string hash() const;
};

// "section.key" assignment with the same parsing as the file loader.
void set_option(RunConfig& cfg, std::string_view key, std::string_view value);

RunConfig parse_run_config(std::string_view ini, const std::filesystem::path& base_dir);
// Applies the ARGQ_SPELLCHECK_URL environment override. Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

// Every key with its default, for --help.
std::string documented_defaults();

}  // namespace argq::config

#endif  // ARGQ_CONFIG_HPP

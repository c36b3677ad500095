#ifndef ARGQ_TEST_SUPPORT_HPP
#define ARGQ_TEST_SUPPORT_HPP

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "argq/corpus.hpp"
#include "argq/features.hpp"

namespace testing {

// "a|b|c", for readable doctest failure messages.
inline std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "|" : "") + v[i];
  return out;
}

inline std::filesystem::path test_data(const std::string& name) {
  return std::filesystem::path(ARGQ_TEST_DATA_DIR) / name;
}

inline std::filesystem::path shipped_data() { return ARGQ_SHIPPED_DATA_DIR; }

// Fresh directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::path(ARGQ_SCRATCH_DIR) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Argument with every expert score on every dimension set to `score`.
inline argq::corpus::Argument argument(std::string id, std::string topic, std::string text,
                                       int score = 2) {
  argq::corpus::Argument a{std::move(id), std::move(topic), std::move(text), {}};
  for (auto d : argq::corpus::all_dimensions()) {
    for (int e = 1; e <= 3; ++e) a.sheet.set(e, d, score);
  }
  return a;
}

inline argq::corpus::Corpus mini_corpus() {
  return argq::corpus::load_corpus(test_data("mini_corpus.csv"), {});
}

inline argq::features::ExtractorConfig offline_config() {
  return argq::features::ExtractorConfig::with_data_dir(shipped_data());
}

inline std::shared_ptr<const argq::features::Resources> offline_resources() {
  static auto r = argq::features::Resources::load(offline_config());
  return r;
}

}  // namespace testing

#endif  // ARGQ_TEST_SUPPORT_HPP

// Command-line front end. Links only the C API.
//
// Exit status: 0 success, 1 usage error, 2 config error, 3 data error,
// 4 runtime failure, 5 model fingerprint mismatch. Diagnostics go to stderr,
// machine-readable output (JSON) to stdout.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include "CLI11.hpp"
#include "argq/argq.h"

namespace {

void log_stderr(const char* message, void*) { std::fprintf(stderr, "argq: %s\n", message); }

int report(aq_status st) {
  if (st != AQ_OK) std::fprintf(stderr, "argq: error: %s\n", aq_last_error());
  return static_cast<int>(st);
}

// Prints and frees a string returned by the library.
void emit(char* s) {
  if (!s) return;
  std::fputs(s, stdout);
  aq_string_free(s);
}

std::string defaults_text() {
  char* s = nullptr;
  if (aq_config_defaults(&s) != AQ_OK) return {};
  std::string out = s;
  aq_string_free(s);
  return out;
}

struct ConfigHandle {
  aq_config* cfg = nullptr;
  ~ConfigHandle() { aq_config_free(cfg); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Argument quality assessment: experiment runner and scorer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", aq_version());
  app.footer(
      "Exit status: 0 ok, 1 usage, 2 config, 3 data, 4 runtime, 5 fingerprint mismatch.\n"
      "Environment: ARGQ_SPELLCHECK_URL overrides features.spellcheck_url; ARGQ_DATA_DIR "
      "overrides the data directory.\n\n"
      "Config file keys and defaults:\n\n" +
      defaults_text());

  std::string config_path, suites, models_dir, input_path, out_dir;
  int jobs = 0;
  bool rounded = false, baseline = false;

  auto* run = app.add_subcommand("run", "Run the experiment suites and write reports");
  run->add_option("--config", config_path, "INI config file")->required();
  run->add_option("--suites", suites, "Comma-separated subset of q1,q2,q3");
  run->add_option("--jobs", jobs, "Worker threads (overrides run.jobs)")->check(CLI::PositiveNumber);

  auto* score = app.add_subcommand("score", "Score a text with trained models");
  score->add_option("--models", models_dir, "Directory written by 'train'")->required();
  score->add_flag("--rounded", rounded, "Also print scores rounded to {1,2,3}");
  score->add_option("input", input_path, "Text file (default: stdin)");

  auto* validate = app.add_subcommand("validate", "Check config, corpus and resources");
  validate->add_option("--config", config_path, "INI config file")->required();

  auto* train = app.add_subcommand("train", "Train final models on the whole corpus");
  train->add_option("--config", config_path, "INI config file")->required();
  train->add_option("--out", out_dir, "Output model directory")->required();
  train->add_flag("--baseline", baseline, "Mean-baseline models instead of SVR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return AQ_INVALID_ARGUMENT;
  }

  if (*score) {
    std::string text;
    if (input_path.empty() || input_path == "-") {
      text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
      std::ifstream in(input_path, std::ios::binary);
      if (!in) {
        std::fprintf(stderr, "argq: error: cannot read input file %s\n", input_path.c_str());
        return AQ_DATA_ERROR;
      }
      text.assign(std::istreambuf_iterator<char>(in), {});
    }
    aq_scorer* scorer = nullptr;
    if (auto st = aq_scorer_open(models_dir.c_str(), &scorer); st != AQ_OK) return report(st);
    char* out = nullptr;
    const auto st = aq_scorer_score(scorer, text.data(), text.size(), rounded ? 1 : 0, &out);
    aq_scorer_free(scorer);
    if (st != AQ_OK) return report(st);
    emit(out);
    return 0;
  }

  ConfigHandle cfg;
  if (auto st = aq_config_load(config_path.c_str(), &cfg.cfg); st != AQ_OK) return report(st);

  if (*validate) {
    char* out = nullptr;
    if (auto st = aq_validate(cfg.cfg, log_stderr, nullptr, &out); st != AQ_OK) return report(st);
    emit(out);
    return 0;
  }
  if (*train) {
    return report(aq_train(cfg.cfg, out_dir.c_str(), baseline ? 1 : 0, log_stderr, nullptr));
  }
  char* manifest = nullptr;
  const auto st = aq_run(cfg.cfg, suites.empty() ? nullptr : suites.c_str(), jobs, log_stderr,
                         nullptr, &manifest);
  if (st != AQ_OK) return report(st);
  emit(manifest);
  return 0;
}

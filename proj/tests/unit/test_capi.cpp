// Exercises the shared library through its C interface only, and the
// command-line tool as a subprocess.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "argq/argq.h"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = ARGQ_TEST_DATA_DIR;

fs::path scratch(const std::string& name) {
  const auto p = fs::path(ARGQ_SCRATCH_DIR) / ("capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out = s;
  aq_string_free(s);
  return out;
}

struct Config {
  aq_config* cfg = nullptr;
  explicit Config(const fs::path& ini) { REQUIRE(aq_config_load(ini.c_str(), &cfg) == AQ_OK); }
  ~Config() { aq_config_free(cfg); }
  void set(const char* k, const std::string& v) { REQUIRE(aq_config_set(cfg, k, v.c_str()) == AQ_OK); }
};

// Mini config writing into its own output directory.
fs::path mini_ini(const fs::path& dir) {
  const auto ini = dir / "mini.ini";
  spit(ini, "[corpus]\npath = " + (kData / "mini_corpus.csv").string() + "\n[run]\noutput_dir = " +
                (dir / "run").string() + "\njobs = 2\n");
  return ini;
}

struct Proc {
  int status;
  std::string out;
};

Proc cli(const std::string& args, const std::string& stdin_text = "") {
  std::string cmd = std::string(ARGQ_CLI_PATH) + " " + args + " 2>/dev/null";
  if (!stdin_text.empty()) {
    const auto in = fs::path(ARGQ_SCRATCH_DIR) / "capi_stdin.txt";
    spit(in, stdin_text);
    cmd += " < " + in.string();
  } else {
    cmd += " < /dev/null";
  }
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int st = ::pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

}  // namespace

TEST_CASE("version, defaults and argument checks") {
  CHECK(std::string(aq_version()) == "1.0.0");
  char* s = nullptr;
  REQUIRE(aq_config_defaults(&s) == AQ_OK);
  CHECK(take(s).find("[learner]") != std::string::npos);
  CHECK(aq_config_new(nullptr) == AQ_INVALID_ARGUMENT);
  CHECK(std::string(aq_last_error()).find("NULL") != std::string::npos);
  CHECK(aq_config_load(nullptr, nullptr) == AQ_INVALID_ARGUMENT);
  CHECK(aq_validate(nullptr, nullptr, nullptr, nullptr) == AQ_INVALID_ARGUMENT);
  CHECK(aq_scorer_score(nullptr, "x", 1, 0, &s) == AQ_INVALID_ARGUMENT);
  aq_config_free(nullptr);
  aq_scorer_free(nullptr);
}

TEST_CASE("config handles") {
  aq_config* cfg = nullptr;
  REQUIRE(aq_config_new(&cfg) == AQ_OK);
  CHECK(aq_config_set(cfg, "run.jobs", "4") == AQ_OK);
  CHECK(aq_config_set(cfg, "run.jobs", "x") == AQ_CONFIG_ERROR);
  CHECK(std::string(aq_last_error()).find("run.jobs") != std::string::npos);
  CHECK(aq_config_set(cfg, "nope.key", "1") == AQ_CONFIG_ERROR);
  char* s = nullptr;
  REQUIRE(aq_config_canonical(cfg, &s) == AQ_OK);
  CHECK(take(s).find("run.jobs = 4") != std::string::npos);
  // No corpus configured.
  CHECK(aq_validate(cfg, nullptr, nullptr, nullptr) == AQ_CONFIG_ERROR);
  aq_config_free(cfg);
  CHECK(aq_config_load("/nonexistent.ini", &cfg) == AQ_CONFIG_ERROR);
}

TEST_CASE("validate reports counts and histogram") {
  const auto dir = scratch("validate");
  Config c(mini_ini(dir));
  std::vector<std::string> logs;
  char* s = nullptr;
  REQUIRE(aq_validate(c.cfg, [](const char* m, void* ud) { static_cast<std::vector<std::string>*>(ud)->push_back(m); },
                      &logs, &s) == AQ_OK);
  const auto j = json::parse(take(s));
  CHECK(j.at("summary") == "40 arguments, 4 topics");
  CHECK(j.at("score_histogram").size() == 15);
  const auto& h = j.at("score_histogram").at("OvQ");
  CHECK(h.at("1").get<int>() + h.at("2").get<int>() + h.at("3").get<int>() == 120);
  CHECK(j.at("embedding_dim") == 0);
  CHECK_FALSE(logs.empty());
}

TEST_CASE("data errors: missing corpus and corrupt scores") {
  const auto dir = scratch("data_errors");
  Config c(mini_ini(dir));
  c.set("corpus.path", (dir / "missing.csv").string());
  CHECK(aq_validate(c.cfg, nullptr, nullptr, nullptr) == AQ_DATA_ERROR);
  CHECK(std::string(aq_last_error()).find("missing.csv") != std::string::npos);
  CHECK(aq_run(c.cfg, nullptr, 0, nullptr, nullptr, nullptr) == AQ_DATA_ERROR);

  auto csv = slurp(kData / "mini_corpus.csv");
  const auto line2 = csv.find('\n') + 1;
  const auto comma = csv.find(",2,", line2);
  REQUIRE(comma != std::string::npos);
  csv.replace(comma, 3, ",7,");
  spit(dir / "corrupt.csv", csv);
  c.set("corpus.path", (dir / "corrupt.csv").string());
  CHECK(aq_validate(c.cfg, nullptr, nullptr, nullptr) == AQ_DATA_ERROR);
}

TEST_CASE("run writes all reports and is idempotent") {
  const auto dir = scratch("run");
  Config c(mini_ini(dir));
  char* s = nullptr;
  REQUIRE(aq_run(c.cfg, nullptr, 0, nullptr, nullptr, &s) == AQ_OK);
  const auto manifest = json::parse(take(s));
  CHECK(manifest.at("format") == "argq-run/1");
  CHECK(manifest.at("solver").at("trainings").get<int>() > 0);
  std::map<std::string, std::string> first;
  for (const char* q : {"q1", "q2", "q3"}) {
    for (const char* ext : {"md", "csv", "json"}) {
      const auto f = dir / "run" / (std::string("report_") + q + "." + ext);
      REQUIRE_MESSAGE(fs::exists(f), f.string());
      first[f.string()] = slurp(f);
    }
  }
  CHECK(first[(dir / "run" / "report_q1.md").string()].find("disabled") != std::string::npos);
  REQUIRE(aq_run(c.cfg, nullptr, 4, nullptr, nullptr, nullptr) == AQ_OK);
  for (const auto& [f, text] : first) CHECK_MESSAGE(slurp(f) == text, f);

  // A suite subset removes stale reports of the other suites.
  REQUIRE(aq_run(c.cfg, "q3", 0, nullptr, nullptr, nullptr) == AQ_OK);
  CHECK(fs::exists(dir / "run" / "report_q3.json"));
  CHECK_FALSE(fs::exists(dir / "run" / "report_q1.json"));
  CHECK(aq_run(c.cfg, "q9", 0, nullptr, nullptr, nullptr) == AQ_CONFIG_ERROR);
}

TEST_CASE("train and score") {
  const auto dir = scratch("train");
  Config c(mini_ini(dir));
  const auto svr = dir / "svr", base = dir / "base";
  REQUIRE(aq_train(c.cfg, svr.c_str(), 0, nullptr, nullptr) == AQ_OK);
  REQUIRE(aq_train(c.cfg, base.c_str(), 1, nullptr, nullptr) == AQ_OK);
  CHECK(fs::exists(svr / "pipeline.json"));
  CHECK(fs::exists(svr / "scorer.json"));
  CHECK(fs::exists(svr / "model_OvQ.json"));

  aq_scorer* sc = nullptr;
  REQUIRE(aq_scorer_open(base.c_str(), &sc) == AQ_OK);
  char* s = nullptr;
  const std::string text = "Zoos protect endangered species. Therefore they should stay open.";
  REQUIRE(aq_scorer_score(sc, text.data(), text.size(), 0, &s) == AQ_OK);
  const auto b = json::parse(take(s));
  for (const char* d : {"Cog", "OvQ"}) {
    const auto m = json::parse(slurp(base / (std::string("model_") + d + ".json")));
    CHECK(b.at("scores").at(d).get<double>() == m.at("bias").get<double>());
  }
  CHECK_FALSE(b.contains("rounded"));
  aq_scorer_free(sc);

  REQUIRE(aq_scorer_open(svr.c_str(), &sc) == AQ_OK);
  REQUIRE(aq_scorer_score(sc, text.data(), text.size(), 1, &s) == AQ_OK);
  const auto j = json::parse(take(s));
  CHECK(j.at("scores").size() == 15);
  for (const auto& [d, v] : j.at("scores").items()) {
    CHECK(v.get<double>() >= 1.0);
    CHECK(v.get<double>() <= 3.0);
    const int r = j.at("rounded").at(d).get<int>();
    CHECK((r >= 1 && r <= 3));
    CHECK(j.at("contributions").at(d).contains("bias"));
  }
  REQUIRE(aq_scorer_score(sc, nullptr, 0, 0, &s) == AQ_OK);  // empty text
  CHECK(json::parse(take(s)).at("scores").size() == 15);
  aq_scorer_free(sc);
}

TEST_CASE("scorer rejects mismatched or missing model files") {
  const auto dir = scratch("fingerprint");
  Config c(mini_ini(dir));
  const auto m = dir / "m";
  REQUIRE(aq_train(c.cfg, m.c_str(), 1, nullptr, nullptr) == AQ_OK);
  aq_scorer* sc = nullptr;

  auto model = json::parse(slurp(m / "model_Cog.json"));
  model["pipeline_fingerprint"] = "0000000000000000";
  spit(m / "model_Cog.json", model.dump());
  CHECK(aq_scorer_open(m.c_str(), &sc) == AQ_FINGERPRINT_ERROR);
  CHECK(std::string(aq_last_error()).find("Cog") != std::string::npos);

  // A pipeline from another training run does not match the models.
  REQUIRE(aq_train(c.cfg, m.c_str(), 1, nullptr, nullptr) == AQ_OK);
  REQUIRE(aq_scorer_open(m.c_str(), &sc) == AQ_OK);
  aq_scorer_free(sc);
  const auto other = dir / "other";
  c.set("features.content_min_df", "0.05");
  REQUIRE(aq_train(c.cfg, other.c_str(), 1, nullptr, nullptr) == AQ_OK);
  fs::copy_file(other / "pipeline.json", m / "pipeline.json", fs::copy_options::overwrite_existing);
  CHECK(aq_scorer_open(m.c_str(), &sc) == AQ_FINGERPRINT_ERROR);

  // Any edit of the pipeline changes its fingerprint.
  fs::copy_file(other / "pipeline.json", m / "pipeline.json", fs::copy_options::overwrite_existing);
  REQUIRE(aq_train(c.cfg, m.c_str(), 1, nullptr, nullptr) == AQ_OK);
  auto p = json::parse(slurp(m / "pipeline.json"));
  p["settings"]["content_min_df"] = 0.04;
  spit(m / "pipeline.json", p.dump());
  CHECK(aq_scorer_open(m.c_str(), &sc) == AQ_FINGERPRINT_ERROR);

  REQUIRE(aq_train(c.cfg, m.c_str(), 1, nullptr, nullptr) == AQ_OK);
  fs::remove(m / "model_OvQ.json");
  CHECK(aq_scorer_open(m.c_str(), &sc) == AQ_DATA_ERROR);
  CHECK(aq_scorer_open((dir / "nowhere").c_str(), &sc) == AQ_DATA_ERROR);
}

TEST_CASE("command-line tool") {
  const auto dir = scratch("cli");
  const auto ini = mini_ini(dir);

  CHECK(cli("").status == 1);
  CHECK(cli("frobnicate").status == 1);
  CHECK(cli("run").status == 1);  // --config is required
  const auto help = cli("--help");
  CHECK(help.status == 0);
  CHECK(help.out.find("Exit status") != std::string::npos);
  CHECK(help.out.find("content_min_df") != std::string::npos);
  CHECK(cli("--version").out.find("1.0.0") != std::string::npos);

  const auto v = cli("validate --config " + ini.string());
  CHECK(v.status == 0);
  CHECK(json::parse(v.out).at("summary") == "40 arguments, 4 topics");

  CHECK(cli("validate --config " + (dir / "none.ini").string()).status == 2);
  spit(dir / "bad.ini", "[run]\njobs = zero\n");
  CHECK(cli("validate --config " + (dir / "bad.ini").string()).status == 2);
  spit(dir / "missing.ini", "[corpus]\npath = nothere.csv\n");
  CHECK(cli("run --config " + (dir / "missing.ini").string()).status == 3);

  const auto r = cli("run --config " + ini.string() + " --suites q1 --jobs 3");
  CHECK(r.status == 0);
  CHECK(json::parse(r.out).at("suites") == json::array({"q1"}));
  CHECK(fs::exists(dir / "run" / "report_q1.md"));

  const auto models = dir / "models";
  CHECK(cli("train --config " + ini.string() + " --out " + models.string() + " --baseline").status == 0);
  const auto s = cli("score --models " + models.string() + " --rounded", "Uniforms are good.");
  REQUIRE(s.status == 0);
  const auto j = json::parse(s.out);
  CHECK(j.at("rounded").size() == 15);
  spit(dir / "input.txt", "");
  CHECK(cli("score --models " + models.string() + " " + (dir / "input.txt").string()).status == 0);
  CHECK(cli("score --models " + models.string() + " " + (dir / "nofile.txt").string()).status == 3);

  auto model = json::parse(slurp(models / "model_OvQ.json"));
  model["pipeline_fingerprint"] = "ffff";
  spit(models / "model_OvQ.json", model.dump());
  CHECK(cli("score --models " + models.string(), "text").status == 5);
}

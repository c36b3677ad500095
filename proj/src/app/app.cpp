#include "argq/app.hpp"

#include <chrono>
#include <ctime>
#include <set>
#include <unordered_map>

#include "argq/errors.hpp"
#include "argq/util.hpp"
#include "json.hpp"

namespace argq::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using features::Family;

namespace {

constexpr const char* kScorerFormat = "argq-scorer/1";
constexpr const char* kManifestFormat = "argq-run/1";

void say(const Log& log, const std::string& msg) {
  if (log) log(msg);
}

void warn_unconverged(const eval::Engine& engine, const config::RunConfig& cfg, const Log& log) {
  const auto st = engine.solver_stats();
  if (st.unconverged == 0) return;
  say(log, "warning: " + std::to_string(st.unconverged) + " of " + std::to_string(st.trainings) +
               " SVR trainings stopped at learner.max_epochs = " + std::to_string(cfg.train.max_epochs) +
               " before reaching learner.tolerance");
}

corpus::Corpus load_corpus(const config::RunConfig& cfg) {
  if (!cfg.corpus_path) throw ConfigError("config key 'corpus.path' is not set");
  return corpus::load_corpus(*cfg.corpus_path, cfg.mapping);
}

// Surface and lower-case forms of every corpus token, so that only the rows
// of a large vector file that can ever be looked up are kept in memory.
std::unordered_map<std::string, bool> corpus_vocabulary(const corpus::Corpus& c) {
  std::unordered_map<std::string, bool> vocab;
  for (const auto& a : c.arguments()) {
    for (const auto& t : textproc::tokenize(a.text)) {
      vocab.emplace(t.surface, true);
      vocab.emplace(t.lower, true);
    }
  }
  return vocab;
}

std::shared_ptr<const features::Resources> load_resources(const config::RunConfig& cfg,
                                                          const corpus::Corpus& c,
                                                          const Log& log) {
  if (!cfg.extractor.embedding_path) {
    say(log, "warning: no embedding file configured (features.embedding_path); the embedding "
             "family is disabled");
    return features::Resources::load(cfg.extractor);
  }
  const auto vocab = corpus_vocabulary(c);
  return features::Resources::load(cfg.extractor, &vocab);
}

eval::EngineOptions engine_options(const config::RunConfig& cfg, const Log& log) {
  eval::EngineOptions o;
  o.jobs = cfg.jobs;
  o.paired_ttest = cfg.paired_ttest;
  o.q3_train_on_majority = cfg.q3_train_on_majority;
  o.config_hash = cfg.hash();
  o.log = log;
  return o;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_directory(const fs::path& dir, const char* key) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError(std::string("config key '") + key + "': cannot create directory " +
                      dir.string());
  }
}

void write(const fs::path& path, std::string_view contents) {
  try {
    util::write_file(path, contents);
  } catch (const ConfigError& e) {
    throw Error(e.what());
  }
}

std::string model_file(corpus::Dimension d) {
  return "model_" + std::string(corpus::abbreviation(d)) + ".json";
}

json parse_json_file(const fs::path& path) {
  std::string text;
  try {
    text = util::read_file(path);
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

std::string ValidateSummary::headline() const {
  return std::to_string(arguments) + " arguments, " + std::to_string(topics) + " topics";
}

std::string ValidateSummary::to_json() const {
  json j;
  j["summary"] = headline();
  j["arguments"] = arguments;
  j["topics"] = topics;
  json hist = json::object();
  for (const auto& [d, counts] : histogram) {
    hist[std::string(corpus::abbreviation(d))] = {{"1", counts[0]}, {"2", counts[1]}, {"3", counts[2]}};
  }
  j["score_histogram"] = std::move(hist);
  j["enabled_families"] = enabled_families;
  j["embedding_dim"] = embedding_dim;
  j["corpus_hash"] = corpus_hash;
  j["resources_hash"] = resources_hash;
  j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

ValidateSummary validate(const config::RunConfig& cfg, const Log& log) {
  cfg.validate();
  const auto c = load_corpus(cfg);
  const auto resources = load_resources(cfg, c, log);
  const features::Extractor extractor(cfg.extractor, resources);

  ValidateSummary s;
  s.arguments = c.size();
  s.topics = c.topics().size();
  for (auto d : corpus::all_dimensions()) s.histogram[d] = {0, 0, 0};
  for (const auto& a : c.arguments()) {
    for (auto d : corpus::all_dimensions()) {
      for (int score : a.sheet.scores(d)) ++s.histogram[d][static_cast<std::size_t>(score - 1)];
    }
  }
  s.enabled_families = extractor.enabled_families().names();
  s.embedding_dim = resources->embeddings ? resources->embeddings->dim() : 0;
  s.corpus_hash = corpus::fingerprint(c);
  s.resources_hash = resources->fingerprint;
  s.config_hash = cfg.hash();
  say(log, s.headline());
  return s;
}

std::unique_ptr<Session> Session::open(const config::RunConfig& cfg, const Log& log) {
  cfg.validate();
  std::unique_ptr<Session> s(new Session(load_corpus(cfg)));
  s->resources_ = load_resources(cfg, s->corpus_, log);
  s->extractor_ = std::make_unique<features::Extractor>(cfg.extractor, s->resources_);
  s->engine_ = std::make_unique<eval::Engine>(s->corpus_, *s->extractor_, cfg.train,
                                              engine_options(cfg, log));
  return s;
}

RunResult run(const config::RunConfig& cfg, const Log& log) {
  cfg.validate();
  const auto session = Session::open(cfg, log);
  ensure_directory(cfg.output_dir, "run.output_dir");
  const auto& c = session->corpus();
  const auto& resources = session->resources();
  auto& engine = session->engine();

  // One batch over all suites so shared jobs run once.
  std::vector<eval::Job> jobs;
  for (auto s : cfg.suites) {
    const auto more = eval::jobs_for(s, engine);
    jobs.insert(jobs.end(), more.begin(), more.end());
  }
  say(log, "running " + std::to_string(c.size()) + " arguments, " +
               std::to_string(c.topics().size()) + " topics, " + std::to_string(jobs.size()) +
               " jobs");
  engine.compute(jobs);
  warn_unconverged(engine, cfg, log);

  for (const char* suite : {"q1", "q2", "q3"}) {
    for (const char* ext : {"md", "csv", "json"}) {
      fs::remove(cfg.output_dir / (std::string("report_") + suite + "." + ext));
    }
  }

  RunResult result;
  for (auto s : cfg.suites) {
    auto report = eval::run_suite(engine, s);
    const std::string stem = "report_" + std::string(eval::suite_name(s));
    const std::array<std::pair<std::string, std::string>, 3> outputs = {{
        {".md", eval::render_markdown(report)},
        {".csv", eval::render_csv(report)},
        {".json", eval::render_json(report)},
    }};
    for (const auto& [ext, text] : outputs) {
      const fs::path p = cfg.output_dir / (stem + ext);
      write(p, text);
      result.files.push_back(p);
    }
    result.reports.push_back(std::move(report));
  }

  json m;
  m["format"] = kManifestFormat;
  m["timestamp"] = utc_timestamp();
  m["config_hash"] = cfg.hash();
  m["corpus_hash"] = corpus::fingerprint(c);
  m["resources_hash"] = resources.fingerprint;
  json suites = json::array();
  for (auto s : cfg.suites) suites.push_back(eval::suite_name(s));
  m["suites"] = std::move(suites);
  m["enabled_families"] = engine.available_families().names();
  m["jobs"] = cfg.jobs;
  const auto st = engine.solver_stats();
  m["solver"] = {{"trainings", st.trainings}, {"unconverged", st.unconverged},
                 {"tolerance", cfg.train.tolerance}, {"max_epochs", cfg.train.max_epochs}};
  json files = json::array();
  for (const auto& f : result.files) files.push_back(f.filename().string());
  m["files"] = std::move(files);
  m["config"] = util::split(cfg.canonical(), '\n');
  m["config"].erase(m["config"].size() - 1);  // trailing empty line
  const fs::path manifest = cfg.output_dir / "run_manifest.json";
  write(manifest, m.dump(2) + "\n");
  result.files.push_back(manifest);
  return result;
}

void train(const config::RunConfig& cfg, const fs::path& out_dir, bool baseline, const Log& log) {
  const auto session = Session::open(cfg, log);
  ensure_directory(out_dir, "--out");
  const auto& c = session->corpus();
  auto& engine = session->engine();
  const auto final_models = engine.fit_final(eval::Target::mean, baseline);
  warn_unconverged(engine, cfg, log);

  write(out_dir / "pipeline.json", final_models.pipeline.to_json());
  for (std::size_t i = 0; i < corpus::kNumDimensions; ++i) {
    write(out_dir / model_file(corpus::all_dimensions()[i]), learner::to_json(final_models.models[i]));
  }

  // Extraction settings needed to rebuild the same resources at scoring time.
  json settings = json::object();
  for (const auto& line : util::split(cfg.canonical(), '\n')) {
    if (line.rfind("features.", 0) != 0) continue;
    const auto eq = line.find(" = ");
    settings[line.substr(0, eq)] = line.substr(eq + 3);
  }
  json s;
  s["format"] = kScorerFormat;
  s["baseline"] = baseline;
  s["target"] = "mean";
  s["clamp"] = cfg.train.clamp;
  s["pipeline_fingerprint"] = final_models.pipeline.fingerprint();
  s["corpus_hash"] = corpus::fingerprint(c);
  s["features"] = std::move(settings);
  write(out_dir / "scorer.json", s.dump(2) + "\n");
  say(log, "wrote pipeline and " + std::to_string(corpus::kNumDimensions) + " models to " +
               out_dir.string());
}

std::string Scores::to_json(bool include_rounded) const {
  json j;
  json scores = json::object();
  json rounded_scores = json::object();
  json contrib = json::object();
  for (std::size_t i = 0; i < corpus::kNumDimensions; ++i) {
    const std::string d(corpus::abbreviation(corpus::all_dimensions()[i]));
    scores[d] = values[i];
    rounded_scores[d] = rounded[i];
    contrib[d] = contributions[i];
  }
  j["scores"] = std::move(scores);
  if (include_rounded) j["rounded"] = std::move(rounded_scores);
  j["contributions"] = std::move(contrib);
  return j.dump(2) + "\n";
}

std::unique_ptr<Scorer> Scorer::open(const fs::path& model_dir) {
  const json s = parse_json_file(model_dir / "scorer.json");
  std::unique_ptr<Scorer> scorer(new Scorer());
  config::RunConfig cfg;
  try {
    if (s.at("format").get<std::string>() != kScorerFormat) {
      throw DataError("unsupported scorer format in " + (model_dir / "scorer.json").string());
    }
    scorer->clamp_ = s.at("clamp").get<bool>();
    cfg.base_dir = fs::absolute(model_dir);
    const auto& f = s.at("features");
    if (f.contains("features.data_dir")) {
      config::set_option(cfg, "features.data_dir", f.at("features.data_dir").get<std::string>());
    }
    for (const auto& [key, value] : f.items()) {
      if (key != "features.data_dir") config::set_option(cfg, key, value.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw DataError("malformed scorer.json: " + std::string(e.what()));
  }
  if (const char* url = std::getenv("ARGQ_SPELLCHECK_URL"); url && *url) {
    cfg.extractor.spellcheck_url = url;
  }

  const std::string pipeline_path = (model_dir / "pipeline.json").string();
  try {
    scorer->pipeline_ = features::FittedPipeline::from_json(parse_json_file(pipeline_path).dump());
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(pipeline_path + ": " + e.what());
  }
  const std::string fp = scorer->pipeline_.fingerprint();
  if (s.value("pipeline_fingerprint", std::string()) != fp) {
    throw FingerprintError("scorer.json does not belong to pipeline.json (fingerprint " + fp + ")");
  }
  for (auto d : corpus::all_dimensions()) {
    const fs::path p = model_dir / model_file(d);
    learner::LinearModel m;
    try {
      m = learner::model_from_json(parse_json_file(p).dump());
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError(p.string() + ": " + e.what());
    }
    if (m.pipeline_fingerprint != fp) {
      throw FingerprintError(p.string() + " was trained with pipeline " + m.pipeline_fingerprint +
                             ", but pipeline.json has fingerprint " + fp);
    }
    scorer->models_.push_back(std::move(m));
  }

  auto resources = features::Resources::load(cfg.extractor);
  if (resources->fingerprint != scorer->pipeline_.resources_fingerprint()) {
    throw FingerprintError("lexicon and resource files differ from the ones the pipeline was "
                           "fitted with (resources " + resources->fingerprint + " vs " +
                           scorer->pipeline_.resources_fingerprint() + ")");
  }
  scorer->extractor_ = std::make_unique<features::Extractor>(cfg.extractor, std::move(resources));
  return scorer;
}

Scores Scorer::score(std::string_view text) const {
  const auto doc = extractor_->extract("input", text);
  const auto x = pipeline_.assemble(doc, pipeline_.enabled());
  Scores out;
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const auto& m = models_[i];
    out.values[i] = learner::predict(m, x, clamp_);
    out.rounded[i] = learner::round_score(out.values[i]);
    auto& contrib = out.contributions[i];
    contrib["bias"] = m.bias;
    for (Family f : pipeline_.enabled().members()) contrib[std::string(features::family_name(f))] = 0;
    for (const auto& [name, w] : m.weights) {
      const auto it = x.find(name);
      if (it == x.end()) continue;
      contrib[name.substr(0, name.find(':'))] += w * it->second;
    }
  }
  return out;
}

}  // namespace argq::app

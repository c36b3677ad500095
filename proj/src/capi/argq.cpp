#include "argq/argq.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "argq/app.hpp"
#include "argq/errors.hpp"
#include "argq/util.hpp"

struct aq_config {
  argq::config::RunConfig cfg;
};

struct aq_scorer {
  std::unique_ptr<argq::app::Scorer> scorer;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

aq_status fail(aq_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Maps exceptions to status codes; the most derived class wins.
template <typename Fn>
aq_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return AQ_OK;
  } catch (const argq::FingerprintError& e) {
    return fail(AQ_FINGERPRINT_ERROR, e.what());
  } catch (const argq::ConfigError& e) {
    return fail(AQ_CONFIG_ERROR, e.what());
  } catch (const argq::DataError& e) {
    return fail(AQ_DATA_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(AQ_RUNTIME_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(AQ_RUNTIME_ERROR, e.what());
  } catch (...) {
    return fail(AQ_RUNTIME_ERROR, "unknown error");
  }
}

argq::app::Log make_log(aq_log_fn fn, void* user_data) {
  if (!fn) return {};
  return [fn, user_data](const std::string& msg) { fn(msg.c_str(), user_data); };
}

}  // namespace

extern "C" {

const char* aq_version(void) { return "1.0.0"; }

const char* aq_last_error(void) { return g_last_error.c_str(); }

void aq_string_free(char* s) { std::free(s); }

aq_status aq_config_new(aq_config** out) {
  if (!out) return fail(AQ_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] { *out = new aq_config(); });
}

aq_status aq_config_load(const char* path, aq_config** out) {
  if (!path || !out) return fail(AQ_INVALID_ARGUMENT, "path or out is NULL");
  return guarded([&] {
    auto cfg = std::make_unique<aq_config>();
    cfg->cfg = argq::config::load_run_config(path);
    *out = cfg.release();
  });
}

aq_status aq_config_set(aq_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(AQ_INVALID_ARGUMENT, "cfg, key or value is NULL");
  return guarded([&] { argq::config::set_option(cfg->cfg, key, value); });
}

aq_status aq_config_canonical(const aq_config* cfg, char** out) {
  if (!cfg || !out) return fail(AQ_INVALID_ARGUMENT, "cfg or out is NULL");
  return guarded([&] { *out = dup(cfg->cfg.canonical()); });
}

aq_status aq_config_defaults(char** out) {
  if (!out) return fail(AQ_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] { *out = dup(argq::config::documented_defaults()); });
}

void aq_config_free(aq_config* cfg) { delete cfg; }

aq_status aq_validate(const aq_config* cfg, aq_log_fn log, void* user_data, char** summary_json) {
  if (!cfg) return fail(AQ_INVALID_ARGUMENT, "cfg is NULL");
  return guarded([&] {
    const auto summary = argq::app::validate(cfg->cfg, make_log(log, user_data));
    if (summary_json) *summary_json = dup(summary.to_json());
  });
}

aq_status aq_run(const aq_config* cfg, const char* suites, int jobs, aq_log_fn log,
                 void* user_data, char** manifest_json) {
  if (!cfg) return fail(AQ_INVALID_ARGUMENT, "cfg is NULL");
  return guarded([&] {
    argq::config::RunConfig run_cfg = cfg->cfg;
    if (suites) argq::config::set_option(run_cfg, "eval.suites", suites);
    if (jobs > 0) run_cfg.jobs = jobs;
    const auto result = argq::app::run(run_cfg, make_log(log, user_data));
    if (manifest_json) *manifest_json = dup(argq::util::read_file(result.files.back()));
  });
}

aq_status aq_train(const aq_config* cfg, const char* out_dir, int baseline, aq_log_fn log,
                   void* user_data) {
  if (!cfg || !out_dir) return fail(AQ_INVALID_ARGUMENT, "cfg or out_dir is NULL");
  return guarded([&] { argq::app::train(cfg->cfg, out_dir, baseline != 0, make_log(log, user_data)); });
}

aq_status aq_scorer_open(const char* model_dir, aq_scorer** out) {
  if (!model_dir || !out) return fail(AQ_INVALID_ARGUMENT, "model_dir or out is NULL");
  return guarded([&] {
    auto s = std::make_unique<aq_scorer>();
    s->scorer = argq::app::Scorer::open(model_dir);
    *out = s.release();
  });
}

aq_status aq_scorer_score(const aq_scorer* scorer, const char* text, size_t length, int rounded,
                          char** result_json) {
  if (!scorer || !result_json || (!text && length > 0)) {
    return fail(AQ_INVALID_ARGUMENT, "scorer, text or result_json is NULL");
  }
  return guarded([&] {
    const auto scores = scorer->scorer->score(std::string_view(text ? text : "", length));
    *result_json = dup(scores.to_json(rounded != 0));
  });
}

void aq_scorer_free(aq_scorer* scorer) { delete scorer; }

}  // extern "C"

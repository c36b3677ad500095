#include <cmath>

#include "argq/errors.hpp"
#include "argq/features.hpp"
#include "argq/util.hpp"
#include "json.hpp"

namespace argq::features {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormat = "argq-pipeline/1";

// Document frequencies of every key over the training documents.
template <typename GetKeys>
std::map<std::string, double> doc_freq(std::span<const DocumentFeatures* const> docs,
                                       GetKeys get) {
  std::map<std::string, double> df;
  for (const auto* d : docs) get(*d, df);
  return df;
}

bool passes(double count, double n, double threshold) {
  // Inclusive "count / n >= threshold", robust to the rounding of the division.
  return count >= threshold * n - 1e-9;
}

void fit_standardization(FamilySpace& space, const std::vector<std::vector<double>>& rows) {
  const std::size_t d = space.names.size();
  const double n = static_cast<double>(rows.size());
  space.mean.assign(d, 0.0);
  space.scale.assign(d, 1.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) space.mean[k] += r[k];
  }
  for (auto& m : space.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = r[k] - space.mean[k];
      var[k] += dev * dev;
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double sd = std::sqrt(var[k] / n);
    // Rounding residue of a constant column is treated as zero variance.
    const double tiny = 1e-12 * std::max(1.0, std::abs(space.mean[k]));
    space.scale[k] = sd > tiny ? sd : 1.0;
  }
}

double lookup_ngram(const std::unordered_map<std::string, double>& counts,
                    const std::array<double, 3>& slots, std::string_view key) {
  const auto it = counts.find(std::string(key));
  if (it == counts.end()) return 0.0;
  const std::size_t n = static_cast<std::size_t>(key[1] - '0');
  const double s = slots[n - 1];
  return s > 0 ? it->second / s : 0.0;
}

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

FittedPipeline Extractor::fit(std::span<const DocumentFeatures> training) const {
  std::vector<const DocumentFeatures*> ptrs;
  ptrs.reserve(training.size());
  for (const auto& d : training) ptrs.push_back(&d);
  return fit(std::span<const DocumentFeatures* const>(ptrs));
}

FittedPipeline Extractor::fit(std::span<const DocumentFeatures* const> training) const {
  if (training.empty()) throw Error("cannot fit a pipeline on an empty training set");
  const double n = static_cast<double>(training.size());
  const Resources& res = *resources_;

  FittedPipeline p;
  p.content_min_df_ = config_.content_min_df;
  p.style_pos_min_df_ = config_.style_pos_min_df;
  p.style_char_min_df_ = config_.style_char_min_df;
  p.structure_first_min_count_ = config_.structure_first_min_count;
  p.embedding_dim_ = res.embeddings ? res.embeddings->dim() : 0;
  p.resources_fingerprint_ = res.fingerprint;
  p.enabled_ = enabled_families();
  for (const auto* d : training) p.training_ids_.push_back(d->id);
  std::sort(p.training_ids_.begin(), p.training_ids_.end());

  auto count_keys = [](const std::unordered_map<std::string, double>& m,
                       std::map<std::string, double>& df) {
    for (const auto& [k, v] : m) {
      if (v > 0) df[k] += 1;
    }
  };

  for (Family f : p.enabled_.members()) {
    FamilySpace space;
    const std::string prefix = std::string(family_name(f)) + ":";
    space.names = fixed_feature_names(f, res);
    space.doc_freq.assign(space.names.size(), 0.0);

    auto retain = [&](const std::map<std::string, double>& df, double threshold) {
      for (const auto& [k, c] : df) {
        if (passes(c, n, threshold)) {
          space.names.push_back(prefix + k);
          space.doc_freq.push_back(c);
        }
      }
    };

    if (f == Family::content) {
      retain(doc_freq(training, [&](const DocumentFeatures& d, auto& df) {
               count_keys(d.word_ngrams, df);
             }),
             config_.content_min_df);
    } else if (f == Family::style) {
      retain(doc_freq(training, [&](const DocumentFeatures& d, auto& df) {
               count_keys(d.pos_ngrams, df);
             }),
             config_.style_pos_min_df);
      retain(doc_freq(training, [&](const DocumentFeatures& d, auto& df) {
               count_keys(d.char_ngrams, df);
             }),
             config_.style_char_min_df);
    } else if (f == Family::structure) {
      const auto df = doc_freq(training, [](const DocumentFeatures& d, auto& m) {
        for (const auto& g : d.first_grams) m[g] += 1;
      });
      for (const auto& [k, c] : df) {
        if (c >= config_.structure_first_min_count) {
          space.names.push_back(prefix + k);
          space.doc_freq.push_back(c);
        }
      }
    }
    p.spaces_[f] = std::move(space);
  }

  for (auto& [f, space] : p.spaces_) {
    std::vector<std::vector<double>> rows;
    rows.reserve(training.size());
    for (const auto* d : training) rows.push_back(p.raw(*d, f));
    fit_standardization(space, rows);
  }
  return p;
}

const FamilySpace& FittedPipeline::space(Family f) const {
  auto it = spaces_.find(f);
  if (it == spaces_.end()) {
    throw Error("family '" + std::string(family_name(f)) + "' is not fitted in this pipeline");
  }
  return it->second;
}

std::size_t FittedPipeline::dimension(FamilySet families) const {
  std::size_t d = 0;
  for (Family f : families.members()) d += space(f).names.size();
  return d;
}

std::vector<double> FittedPipeline::raw(const DocumentFeatures& doc, Family f) const {
  const FamilySpace& s = space(f);
  std::vector<double> out(s.names.size(), 0.0);
  const std::size_t skip = family_name(f).size() + 1;
  std::size_t k = 0;

  if (auto it = doc.fixed.find(f); it != doc.fixed.end()) {
    const auto& fixed = it->second;
    for (; k < fixed.size() && k < out.size(); ++k) out[k] = fixed[k];
  }
  for (; k < s.names.size(); ++k) {
    const std::string_view key = std::string_view(s.names[k]).substr(skip);
    switch (key[0]) {
      case 'w':
        out[k] = lookup_ngram(doc.word_ngrams, doc.word_slots, key);
        break;
      case 'p':
        out[k] = lookup_ngram(doc.pos_ngrams, doc.pos_slots, key);
        break;
      case 'c':
        out[k] = lookup_ngram(doc.char_ngrams, doc.char_slots, key);
        break;
      case 'f':
        out[k] = std::find(doc.first_grams.begin(), doc.first_grams.end(), key) !=
                         doc.first_grams.end()
                     ? 1.0
                     : 0.0;
        break;
      default:
        throw Error("unrecognised feature name '" + s.names[k] + "'");
    }
  }
  return out;
}

std::vector<double> FittedPipeline::standardized(const DocumentFeatures& doc, Family f) const {
  const FamilySpace& s = space(f);
  auto v = raw(doc, f);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = (v[k] - s.mean[k]) / s.scale[k];
  return v;
}

FeatureVector FittedPipeline::assemble(const DocumentFeatures& doc, FamilySet families) const {
  FeatureVector out;
  for (Family f : families.members()) {
    const FamilySpace& s = space(f);
    const auto v = standardized(doc, f);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!std::isfinite(v[k])) {
        throw Error("non-finite value for feature '" + s.names[k] + "' of " + doc.id);
      }
      out.emplace_hint(out.end(), s.names[k], v[k]);
    }
  }
  return out;
}

FeatureVector extract_family(const DocumentFeatures& doc, const FittedPipeline& p, Family f) {
  const FamilySpace& s = p.space(f);
  const auto v = p.raw(doc, f);
  const bool vocabulary_only = f == Family::content || f == Family::style;
  FeatureVector out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const bool vocab = vocabulary_only || s.doc_freq[k] > 0;
    if (vocab && v[k] == 0.0) continue;
    out.emplace(s.names[k], v[k]);
  }
  return out;
}

std::string FittedPipeline::to_json() const {
  json j;
  j["format"] = kFormat;
  j["settings"] = {{"content_min_df", content_min_df_},
                   {"style_pos_min_df", style_pos_min_df_},
                   {"style_char_min_df", style_char_min_df_},
                   {"structure_first_min_count", structure_first_min_count_},
                   {"embedding_dim", embedding_dim_}};
  j["resources"] = resources_fingerprint_;
  j["enabled"] = enabled_.names();
  j["training_ids"] = training_ids_;
  json fams = json::object();
  for (const auto& [f, s] : spaces_) {
    fams[std::string(family_name(f))] = {{"names", s.names},
                                         {"doc_freq", vec_json(s.doc_freq)},
                                         {"mean", vec_json(s.mean)},
                                         {"scale", vec_json(s.scale)}};
  }
  j["families"] = std::move(fams);
  return j.dump();
}

FittedPipeline FittedPipeline::from_json(std::string_view text) {
  FittedPipeline p;
  try {
    const json j = json::parse(text);
    if (j.at("format") != kFormat) throw Error("unsupported pipeline format");
    const auto& st = j.at("settings");
    p.content_min_df_ = st.at("content_min_df").get<double>();
    p.style_pos_min_df_ = st.at("style_pos_min_df").get<double>();
    p.style_char_min_df_ = st.at("style_char_min_df").get<double>();
    p.structure_first_min_count_ = st.at("structure_first_min_count").get<int>();
    p.embedding_dim_ = st.at("embedding_dim").get<std::size_t>();
    p.resources_fingerprint_ = j.at("resources").get<std::string>();
    for (const auto& name : j.at("enabled")) {
      const auto f = parse_family(name.get<std::string>());
      if (!f) throw Error("unknown family in pipeline: " + name.get<std::string>());
      p.enabled_.insert(*f);
    }
    p.training_ids_ = j.at("training_ids").get<std::vector<std::string>>();
    for (const auto& [name, js] : j.at("families").items()) {
      const auto f = parse_family(name);
      if (!f) throw Error("unknown family in pipeline: " + name);
      FamilySpace s;
      s.names = js.at("names").get<std::vector<std::string>>();
      s.doc_freq = js.at("doc_freq").get<std::vector<double>>();
      s.mean = js.at("mean").get<std::vector<double>>();
      s.scale = js.at("scale").get<std::vector<double>>();
      if (s.doc_freq.size() != s.names.size() || s.mean.size() != s.names.size() ||
          s.scale.size() != s.names.size()) {
        throw Error("inconsistent family '" + name + "' in pipeline");
      }
      p.spaces_[*f] = std::move(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed pipeline JSON: ") + e.what());
  }
  return p;
}

std::string FittedPipeline::fingerprint() const { return util::hex64(util::fnv1a(to_json())); }

}  // namespace argq::features

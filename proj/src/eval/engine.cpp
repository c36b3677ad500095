#include <set>

#include "argq/errors.hpp"
#include "argq/eval.hpp"
#include "parallel.hpp"

namespace argq::eval {

using features::Family;
using features::FamilySet;

namespace {

// Documents of one split: training docs first, then evaluation docs.
struct SplitDocs {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
  std::size_t size() const { return train.size() + eval.size(); }
  std::size_t at(std::size_t k) const { return k < train.size() ? train[k] : eval[k - train.size()]; }
};

std::vector<std::size_t> indices(const corpus::Corpus& c, const std::vector<std::string>& ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(c.index_of(id));
  return out;
}

struct FoldWork {
  std::vector<SplitDocs> splits;  // inner splits, then the outer split last
  std::vector<features::FittedPipeline> pipelines;
  std::vector<std::vector<Eigen::MatrixXd>> grams;  // [split][family]
  std::vector<Family> families;
};

// Fits one pipeline per split on the split's training docs only, then the
// per-family Gram matrices over train + eval docs. Standardization is per
// feature, so the kernel of a family union is the sum of family kernels.
void prepare(FoldWork& w, const std::vector<features::DocumentFeatures>& docs,
             const features::Extractor& extractor, int jobs) {
  const std::size_t n_splits = w.splits.size();
  w.pipelines.assign(n_splits, {});
  detail::parallel_for(n_splits, jobs, [&](std::size_t s) {
    std::vector<const features::DocumentFeatures*> train;
    for (std::size_t i : w.splits[s].train) train.push_back(&docs[i]);
    w.pipelines[s] = extractor.fit(train);
  });
  const std::size_t nf = w.families.size();
  w.grams.assign(n_splits, std::vector<Eigen::MatrixXd>(nf));
  detail::parallel_for(n_splits * nf, jobs, [&](std::size_t task) {
    const std::size_t s = task / nf;
    const std::size_t fi = task % nf;
    const auto& sd = w.splits[s];
    const auto& pipe = w.pipelines[s];
    const auto dim = static_cast<Eigen::Index>(pipe.space(w.families[fi]).names.size());
    Eigen::MatrixXd X(static_cast<Eigen::Index>(sd.size()), dim);
    for (std::size_t r = 0; r < sd.size(); ++r) {
      const auto v = pipe.standardized(docs[sd.at(r)], w.families[fi]);
      for (Eigen::Index c = 0; c < dim; ++c) X(static_cast<Eigen::Index>(r), c) = v[static_cast<std::size_t>(c)];
    }
    w.grams[s][fi] = X * X.transpose();
  });
}

std::vector<learner::KernelSplit> kernels_for(const FoldWork& w, FamilySet fs, int jobs) {
  std::vector<learner::KernelSplit> kernels(w.splits.size());
  detail::parallel_for(w.splits.size(), jobs, [&](std::size_t s) {
    const auto n = static_cast<Eigen::Index>(w.splits[s].size());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t fi = 0; fi < w.families.size(); ++fi) {
      if (fs.contains(w.families[fi])) sum += w.grams[s][fi];
    }
    const auto nt = static_cast<Eigen::Index>(w.splits[s].train.size());
    kernels[s].train_kernel = sum.topLeftCorner(nt, nt);
    kernels[s].eval_kernel = sum.bottomLeftCorner(n - nt, nt);
  });
  return kernels;
}

learner::SplitTargets targets_of(const SplitDocs& sd, const std::vector<corpus::Argument>& args,
                                 Dimension d, Target t) {
  learner::SplitTargets out;
  for (std::size_t i : sd.train) out.train.push_back(target_value(args[i], d, t));
  for (std::size_t i : sd.eval) out.eval_gold.push_back(target_value(args[i], d, t));
  return out;
}

}  // namespace

Engine::Engine(const corpus::Corpus& corpus, const features::Extractor& extractor,
               learner::TrainConfig train, EngineOptions options)
    : corpus_(corpus),
      extractor_(extractor),
      train_(std::move(train)),
      options_(std::move(options)),
      folds_(corpus::loto_splits(corpus)) {
  train_.validate();
}

Engine::~Engine() = default;

FamilySet Engine::available_families() const { return extractor_.enabled_families(); }

const std::vector<features::DocumentFeatures>& Engine::documents() {
  if (!docs_ready_) {
    if (options_.log) options_.log("extracting features for " + std::to_string(corpus_.size()) + " arguments");
    docs_ = extractor_.extract_all(corpus_, options_.jobs);
    docs_ready_ = true;
  }
  return docs_;
}

const FoldPredictions& Engine::predictions(const Job& job) {
  if (!cache_.count(job)) compute({job});
  return cache_.at(job);
}

void Engine::compute(const std::vector<Job>& requested) {
  std::set<Job> pending;
  for (const auto& j : requested) {
    if (!cache_.count(j)) pending.insert(j);
  }
  if (pending.empty()) return;

  const auto& args = corpus_.arguments();
  const std::size_t n_folds = folds_.size();

  // Baselines need no features.
  std::map<FamilySet, std::vector<Job>> groups;
  for (const auto& job : pending) {
    if (!job.baseline) {
      if (job.families.empty()) throw Error("SVR job without feature families");
      if (!job.families.subset_of(available_families())) {
        throw Error("SVR job requests a family that is not available");
      }
      groups[job.families].push_back(job);
      continue;
    }
    FoldPredictions fp;
    for (const auto& fold : folds_) {
      double sum = 0;
      for (const auto& id : fold.train) sum += target_value(corpus_.at(id), job.dimension, job.target);
      const double mean = sum / static_cast<double>(fold.train.size());
      fp.predictions.emplace_back(fold.test.size(), mean);
    }
    cache_.emplace(job, std::move(fp));
  }
  if (groups.empty()) return;

  const auto& docs = documents();
  FamilySet needed;
  for (const auto& [fs, jobs] : groups) {
    for (Family f : fs.members()) needed.insert(f);
  }
  const std::vector<Family> families = needed.members();

  std::map<Job, FoldPredictions> results;
  for (const auto& [fs, jobs] : groups) {
    for (const auto& job : jobs) {
      results[job].predictions.resize(n_folds);
      results[job].chosen_c.resize(n_folds);
    }
  }

  for (std::size_t k = 0; k < n_folds; ++k) {
    const auto& fold = folds_[k];
    if (options_.log) {
      options_.log("fold " + std::to_string(k + 1) + "/" + std::to_string(n_folds) + " (" +
                   fold.held_out_topic + "): " + std::to_string(pending.size()) + " jobs");
    }
    FoldWork work;
    for (const auto& sp : corpus::inner_cv_splits(fold.train, corpus_)) {
      work.splits.push_back({indices(corpus_, sp.train), indices(corpus_, sp.validation)});
    }
    work.splits.push_back({indices(corpus_, fold.train), indices(corpus_, fold.test)});
    work.families = families;
    prepare(work, docs, extractor_, options_.jobs);
    const std::size_t outer = work.splits.size() - 1;

    for (const auto& [fs, jobs] : groups) {
      const auto kernels = kernels_for(work, fs, options_.jobs);
      const std::span<const learner::KernelSplit> inner_kernels(kernels.data(), outer);
      detail::parallel_for(jobs.size(), options_.jobs, [&](std::size_t ji) {
        const Job& job = jobs[ji];
        std::vector<learner::SplitTargets> inner_targets;
        for (std::size_t s = 0; s < outer; ++s) {
          inner_targets.push_back(targets_of(work.splits[s], args, job.dimension, job.target));
        }
        const auto sel = learner::select_c(inner_kernels, inner_targets, train_);
        const auto outer_targets = targets_of(work.splits[outer], args, job.dimension, job.target);
        learner::SolverOptions opt;
        opt.c = sel.chosen_c;
        opt.epsilon = train_.epsilon;
        opt.tolerance = train_.tolerance;
        opt.max_epochs = train_.max_epochs;
        const auto sol = learner::solve_svr_dual(kernels[outer].train_kernel, outer_targets.train, opt);
        count(sel.trainings + 1, sel.unconverged + (sol.converged ? 0 : 1));
        auto& slot = results.at(job);
        slot.predictions[k] = learner::predict_dual(sol, kernels[outer].eval_kernel, train_.clamp);
        slot.chosen_c[k] = sel.chosen_c;
      });
    }
  }
  for (auto& [job, fp] : results) cache_.emplace(job, std::move(fp));
}

void Engine::count(std::size_t trainings, std::size_t unconverged) {
  trainings_ += trainings;
  unconverged_ += unconverged;
}

Engine::FinalModels Engine::fit_final(Target target, bool baseline) {
  const auto& docs = documents();
  const auto& args = corpus_.arguments();
  std::vector<std::string> all_ids;
  for (const auto& a : args) all_ids.push_back(a.id);

  FoldWork work;
  for (const auto& sp : corpus::inner_cv_splits(all_ids, corpus_)) {
    work.splits.push_back({indices(corpus_, sp.train), indices(corpus_, sp.validation)});
  }
  work.splits.push_back({indices(corpus_, all_ids), {}});
  const FamilySet fs = available_families();
  work.families = fs.members();
  const std::size_t outer = work.splits.size() - 1;

  FinalModels out;
  out.models.resize(corpus::kNumDimensions);
  if (baseline) {
    std::vector<const features::DocumentFeatures*> all;
    for (const auto& d : docs) all.push_back(&d);
    out.pipeline = extractor_.fit(all);
    for (Dimension d : corpus::all_dimensions()) {
      const auto t = targets_of(work.splits[outer], args, d, target);
      out.models[corpus::index_of(d)] = learner::train_baseline(t.train);
    }
  } else {
    if (options_.log) options_.log("fitting final models on " + std::to_string(args.size()) + " arguments");
    prepare(work, docs, extractor_, options_.jobs);
    out.pipeline = work.pipelines[outer];
    const auto kernels = kernels_for(work, fs, options_.jobs);
    const std::span<const learner::KernelSplit> inner_kernels(kernels.data(), outer);
    std::vector<features::FeatureVector> vectors;
    for (const auto& d : docs) vectors.push_back(out.pipeline.assemble(d, fs));
    detail::parallel_for(corpus::kNumDimensions, options_.jobs, [&](std::size_t di) {
      const Dimension d = corpus::all_dimensions()[di];
      std::vector<learner::SplitTargets> inner_targets;
      for (std::size_t s = 0; s < outer; ++s) inner_targets.push_back(targets_of(work.splits[s], args, d, target));
      const auto sel = learner::select_c(inner_kernels, inner_targets, train_);
      const auto t = targets_of(work.splits[outer], args, d, target);
      out.models[di] = learner::train_svr(vectors, t.train, sel.chosen_c, train_);
      count(sel.trainings, sel.unconverged);
    });
  }
  const std::string fp = out.pipeline.fingerprint();
  for (std::size_t di = 0; di < out.models.size(); ++di) {
    auto& m = out.models[di];
    m.pipeline_fingerprint = fp;
    m.labels["dimension"] = std::string(corpus::abbreviation(corpus::all_dimensions()[di]));
    m.labels["target"] = std::string(target_name(target));
  }
  return out;
}

}  // namespace argq::eval

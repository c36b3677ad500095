#include <algorithm>
#include <cmath>
#include <numeric>

#include "argq/errors.hpp"
#include "argq/learner.hpp"
#include "json.hpp"

namespace argq::learner {

namespace {

using json = nlohmann::ordered_json;

std::string_view kind_name(ModelKind k) { return k == ModelKind::svr ? "svr" : "mean_baseline"; }

}  // namespace

LinearModel train_svr(std::span<const features::FeatureVector> vectors,
                      std::span<const double> targets, double c, const TrainConfig& config,
                      const SolverOptions* solver_overrides) {
  if (vectors.empty()) throw Error("SVR needs at least one training example");
  if (vectors.size() != targets.size()) throw Error("vector and target counts differ");

  // Dense design matrix over the union of feature names.
  std::map<std::string, Eigen::Index> column;
  for (const auto& v : vectors) {
    for (const auto& [name, value] : v) {
      if (!std::isfinite(value)) throw Error("non-finite value for feature '" + name + "'");
      column.emplace(name, 0);
    }
  }
  for (double y : targets) {
    if (!std::isfinite(y)) throw Error("non-finite training target");
  }
  Eigen::Index next = 0;
  for (auto& [name, idx] : column) idx = next++;

  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, next);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& [name, value] : vectors[static_cast<std::size_t>(i)]) {
      X(i, column.at(name)) = value;
    }
  }
  const Eigen::MatrixXd K = X * X.transpose();

  SolverOptions opt;
  if (solver_overrides) opt = *solver_overrides;
  opt.c = c;
  if (!solver_overrides) {
    opt.epsilon = config.epsilon;
    opt.tolerance = config.tolerance;
    opt.max_epochs = config.max_epochs;
  }
  const DualSolution sol = solve_svr_dual(K, targets, opt);

  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(sol.beta.data(), n);
  const Eigen::VectorXd w = X.transpose() * beta;

  LinearModel m;
  m.kind = ModelKind::svr;
  m.chosen_c = c;
  m.bias = sol.offset + sol.beta_sum();
  for (const auto& [name, idx] : column) {
    if (w[idx] != 0.0) m.weights.emplace(name, w[idx]);
  }
  return m;
}

LinearModel train_baseline(std::span<const double> targets) {
  if (targets.empty()) throw Error("baseline needs at least one target");
  LinearModel m;
  m.kind = ModelKind::mean_baseline;
  m.bias = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
  return m;
}

double clamp_score(double score) { return std::clamp(score, 1.0, 3.0); }

int round_score(double score) {
  return static_cast<int>(std::clamp(std::floor(score + 0.5), 1.0, 3.0));
}

double predict(const LinearModel& model, const features::FeatureVector& x, bool clamp) {
  double s = model.bias;
  if (model.weights.size() < x.size()) {
    for (const auto& [name, w] : model.weights) {
      if (auto it = x.find(name); it != x.end()) s += w * it->second;
    }
  } else {
    for (const auto& [name, v] : x) {
      if (auto it = model.weights.find(name); it != model.weights.end()) s += it->second * v;
    }
  }
  return clamp ? clamp_score(s) : s;
}

std::string to_json(const LinearModel& model) {
  json j;
  j["kind"] = kind_name(model.kind);
  j["chosen_C"] = model.chosen_c;
  j["bias"] = model.bias;
  json w = json::object();
  for (const auto& [name, v] : model.weights) w[name] = v;
  j["weights"] = std::move(w);
  j["pipeline_fingerprint"] = model.pipeline_fingerprint;
  if (!model.labels.empty()) j["labels"] = model.labels;
  return j.dump();
}

LinearModel model_from_json(std::string_view text) {
  LinearModel m;
  try {
    const json j = json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "svr") {
      m.kind = ModelKind::svr;
    } else if (kind == "mean_baseline") {
      m.kind = ModelKind::mean_baseline;
    } else {
      throw Error("unknown model kind '" + kind + "'");
    }
    m.chosen_c = j.at("chosen_C").get<double>();
    m.bias = j.at("bias").get<double>();
    for (const auto& [name, v] : j.at("weights").items()) m.weights.emplace(name, v.get<double>());
    m.pipeline_fingerprint = j.at("pipeline_fingerprint").get<std::string>();
    if (j.contains("labels")) m.labels = j["labels"].get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
  if (!std::isfinite(m.bias)) throw Error("model bias is not finite");
  for (const auto& [name, v] : m.weights) {
    if (!std::isfinite(v)) throw Error("model weight '" + name + "' is not finite");
  }
  return m;
}

std::size_t argmin_first(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

std::vector<double> predict_dual(const DualSolution& sol, const Eigen::MatrixXd& eval_kernel,
                                 bool clamp) {
  const Eigen::VectorXd beta =
      Eigen::Map<const Eigen::VectorXd>(sol.beta.data(), static_cast<Eigen::Index>(sol.beta.size()));
  const Eigen::VectorXd scores = eval_kernel * beta;
  const double shift = sol.offset + sol.beta_sum();
  std::vector<double> out(static_cast<std::size_t>(scores.size()));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double p = scores[static_cast<Eigen::Index>(k)] + shift;
    out[k] = clamp ? clamp_score(p) : p;
  }
  return out;
}

CSelection select_c(std::span<const KernelSplit> splits, std::span<const SplitTargets> targets,
                    const TrainConfig& config) {
  if (splits.empty()) throw Error("C selection needs at least one inner split");
  if (splits.size() != targets.size()) throw Error("split and target counts differ");
  const std::size_t g = config.c_grid.size();
  CSelection sel;
  sel.mean_mae.assign(g, 0.0);

  for (std::size_t s = 0; s < splits.size(); ++s) {
    const auto& split = splits[s];
    const auto& tg = targets[s];
    std::vector<double> warm;
    for (std::size_t ci = 0; ci < g; ++ci) {
      SolverOptions opt;
      opt.c = config.c_grid[ci];
      opt.epsilon = config.epsilon;
      opt.tolerance = config.tolerance;
      opt.max_epochs = config.max_epochs;
      const DualSolution sol =
          solve_svr_dual(split.train_kernel, tg.train, opt, warm.empty() ? nullptr : &warm);
      warm = sol.beta;
      ++sel.trainings;
      if (!sol.converged) ++sel.unconverged;
      const auto pred = predict_dual(sol, split.eval_kernel, config.clamp);
      double abs_err = 0;
      for (std::size_t k = 0; k < pred.size(); ++k) abs_err += std::abs(pred[k] - tg.eval_gold[k]);
      sel.mean_mae[ci] += pred.empty() ? 0.0 : abs_err / static_cast<double>(pred.size());
    }
  }
  for (auto& m : sel.mean_mae) m /= static_cast<double>(splits.size());
  sel.chosen_index = argmin_first(sel.mean_mae);
  sel.chosen_c = config.c_grid[sel.chosen_index];
  return sel;
}

}  // namespace argq::learner

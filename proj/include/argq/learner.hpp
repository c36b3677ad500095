#ifndef ARGQ_LEARNER_HPP
#define ARGQ_LEARNER_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argq/features.hpp"

namespace argq::learner {

// {1e-4 * 2^j : 7 <= j <= 16}, ascending.
std::vector<double> default_c_grid();

struct TrainConfig {
  std::vector<double> c_grid = default_c_grid();
  double epsilon = 0.1;
  double tolerance = 1e-4;
  int max_epochs = 1000;
  // Clamp predictions to [1, 3]; off only for sensitivity analysis.
  bool clamp = true;

  // Throws ConfigError.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Dual coordinate descent for L2-regularized, L1-loss epsilon-SVR.
//
// The model is f(x) = w.x + b0 + ybar with ybar the training target mean and
// b0 a regularized bias (an implicit constant feature of value 1). With
// Q = K + 1 and t = y - ybar the solver minimizes
//   0.5 b'Qb - t'b + eps |b|_1   subject to -C <= b_i <= C
// cyclically over coordinates 0..n-1, each step solved exactly.

struct SolverOptions {
  double c = 1.0;
  double epsilon = 0.1;
  double tolerance = 1e-4;
  int max_epochs = 1000;
  // Called after every epoch with the epoch number (1-based) and the dual
  // objective -(0.5 b'Qb - t'b + eps |b|_1), which never decreases.
  std::function<void(int, double)> on_epoch;
};

struct DualSolution {
  std::vector<double> beta;
  double offset = 0;  // ybar
  int epochs = 0;
  bool converged = false;
  double dual_objective = 0;

  // sum_i beta_i (k_i + 1) + offset for a row of kernel values against the
  // training examples.
  double decision(std::span<const double> kernel_row) const;
  double beta_sum() const;
};

// K is the n x n Gram matrix of the training vectors.
DualSolution solve_svr_dual(const Eigen::MatrixXd& K, std::span<const double> targets,
                            const SolverOptions& options,
                            const std::vector<double>* warm_start = nullptr);

// ---------------------------------------------------------------------------

enum class ModelKind { svr, mean_baseline };

struct LinearModel {
  ModelKind kind = ModelKind::mean_baseline;
  features::FeatureVector weights;
  double bias = 0;
  double chosen_c = 0;
  std::string pipeline_fingerprint;
  // Free-form labels carried through serialization (e.g. dimension, target).
  std::map<std::string, std::string> labels;

  bool operator==(const LinearModel&) const = default;
};

// Throws Error for empty input, mismatched sizes or non-finite values.
LinearModel train_svr(std::span<const features::FeatureVector> vectors,
                      std::span<const double> targets, double c, const TrainConfig& config,
                      const SolverOptions* solver_overrides = nullptr);
LinearModel train_baseline(std::span<const double> targets);

double clamp_score(double score);
// Half-up rounding into {1, 2, 3}.
int round_score(double score);

// w.x + b; clamped to [1, 3] unless disabled.
double predict(const LinearModel& model, const features::FeatureVector& x, bool clamp = true);

std::string to_json(const LinearModel& model);
LinearModel model_from_json(std::string_view json);

// ---------------------------------------------------------------------------
// C selection by inner cross-validation over precomputed kernels.

struct KernelSplit {
  Eigen::MatrixXd train_kernel;  // n_train x n_train
  Eigen::MatrixXd eval_kernel;   // n_eval x n_train
};

struct SplitTargets {
  std::vector<double> train;
  std::vector<double> eval_gold;
};

struct CSelection {
  double chosen_c = 0;
  std::size_t chosen_index = 0;
  std::vector<double> mean_mae;  // one per grid value
  std::size_t trainings = 0;
  std::size_t unconverged = 0;  // stopped at max_epochs
};

// Mean validation MAE over the splits per C (warm-started along the grid);
// argmin with ties broken toward the smaller C.
CSelection select_c(std::span<const KernelSplit> splits, std::span<const SplitTargets> targets,
                    const TrainConfig& config);

// Predictions of a dual solution for the rows of an eval kernel, clamped
// unless disabled.
std::vector<double> predict_dual(const DualSolution& sol, const Eigen::MatrixXd& eval_kernel,
                                 bool clamp);

// Index of the smallest value, first one on ties.
std::size_t argmin_first(std::span<const double> values);

}  // namespace argq::learner

#endif  // ARGQ_LEARNER_HPP

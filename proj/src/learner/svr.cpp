#include <algorithm>
#include <cmath>
#include <numeric>

#include "argq/errors.hpp"
#include "argq/learner.hpp"

namespace argq::learner {

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int j = 7; j <= 16; ++j) grid.push_back(1e-4 * std::ldexp(1.0, j));
  return grid;
}

void TrainConfig::validate() const {
  if (c_grid.size() != 10) {
    throw ConfigError("c_grid must have exactly 10 values, got " + std::to_string(c_grid.size()));
  }
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > 0) || !std::isfinite(c_grid[i])) throw ConfigError("c_grid values must be positive");
    if (i && !(c_grid[i] > c_grid[i - 1])) throw ConfigError("c_grid must be strictly increasing");
  }
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be >= 0");
  if (!(tolerance > 0)) throw ConfigError("tolerance must be > 0");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
}

double DualSolution::beta_sum() const { return std::accumulate(beta.begin(), beta.end(), 0.0); }

double DualSolution::decision(std::span<const double> kernel_row) const {
  double s = offset;
  for (std::size_t i = 0; i < beta.size(); ++i) s += beta[i] * (kernel_row[i] + 1.0);
  return s;
}

DualSolution solve_svr_dual(const Eigen::MatrixXd& K, std::span<const double> targets,
                            const SolverOptions& opt, const std::vector<double>* warm_start) {
  const auto n = static_cast<Eigen::Index>(targets.size());
  if (n == 0) throw Error("SVR needs at least one training example");
  if (K.rows() != n || K.cols() != n) throw Error("kernel size does not match the targets");

  DualSolution sol;
  sol.offset = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);
  std::vector<double> t(targets.begin(), targets.end());
  for (auto& v : t) v -= sol.offset;

  sol.beta.assign(static_cast<std::size_t>(n), 0.0);
  if (warm_start && warm_start->size() == sol.beta.size()) {
    for (std::size_t i = 0; i < sol.beta.size(); ++i) {
      sol.beta[i] = std::clamp((*warm_start)[i], -opt.c, opt.c);
    }
  }
  // kb = K beta, sb = sum beta; (Q beta)_j = kb_j + sb.
  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(sol.beta.data(), n);
  Eigen::VectorXd kb = K * beta;
  double sb = beta.sum();

  auto objective = [&] {
    double f = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      f += 0.5 * beta[j] * (kb[j] + sb) - t[static_cast<std::size_t>(j)] * beta[j] +
           opt.epsilon * std::abs(beta[j]);
    }
    return -f;
  };

  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    double max_violation = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double qii = K(i, i) + 1.0;
      const double grad = kb[i] + sb - t[static_cast<std::size_t>(i)];
      const double old = beta[i];
      // Minimize 0.5 qii b^2 + (grad - qii old) b + eps |b| over [-C, C].
      const double b = std::clamp(soft_threshold(qii * old - grad, opt.epsilon) / qii, -opt.c, opt.c);
      const double delta = b - old;
      if (delta == 0.0) continue;
      max_violation = std::max(max_violation, std::abs(delta) * qii);
      beta[i] = b;
      kb.noalias() += delta * K.col(i);
      sb += delta;
    }
    sol.epochs = epoch;
    if (opt.on_epoch) opt.on_epoch(epoch, objective());
    if (max_violation <= opt.tolerance) {
      sol.converged = true;
      break;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) sol.beta[static_cast<std::size_t>(i)] = beta[i];
  sol.dual_objective = objective();
  return sol;
}

}  // namespace argq::learner

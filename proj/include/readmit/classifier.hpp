#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "readmit/matrix.hpp"

namespace readmit {

struct LogregOptions {
  double lambda = 1.0;
  double tol = 1e-6;  // gradient infinity-norm stopping threshold
  int max_iter = 1000;
  uint64_t seed = 0;  // reserved; fitting is deterministic from zero init
  bool record_history = false;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 0.0;
  bool converged = false;
  int iterations_used = 0;
  std::vector<double> loss_history;  // filled when record_history is set
};

// Overflow-safe logistic function, clamped into the open interval (0, 1).
double sigmoid(double z);

// Minimizes (1/n) sum log-loss + (lambda/2n) ||w||^2 (bias unpenalized) by
// full-batch gradient descent with Armijo backtracking. Deterministic.
LogisticModel fit_logreg(const Matrix& x, const std::vector<int>& y,
                         const LogregOptions& options = {});

double predict_proba(const LogisticModel& model, std::span<const double> x);

// Exact objective and its gradient; the last gradient entry is the bias.
std::pair<double, std::vector<double>> loss_and_gradient(const LogisticModel& model,
                                                         const Matrix& x,
                                                         const std::vector<int>& y, double lambda);

}  // namespace readmit

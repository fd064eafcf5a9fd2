#include "readmit/classifier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace readmit {

namespace {

constexpr double kMinProb = std::numeric_limits<double>::min();
const double kMaxProb = 1.0 - std::numeric_limits<double>::epsilon() / 2;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// log(1 + e^z), stable for large |z|.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void validate_shapes(const Matrix& x, const std::vector<int>& y) {
  if (x.rows() != y.size()) {
    throw std::invalid_argument("logreg: X has " + std::to_string(x.rows()) + " rows but y has " +
                                std::to_string(y.size()) + " labels");
  }
  if (x.cols() == 0) throw std::invalid_argument("logreg: X has no columns");
}

struct Objective {
  const Matrix& x;
  const std::vector<int>& y;
  double lambda;
  double n;

  // Loss from cached logits plus the ridge term of the given weights.
  double loss(const std::vector<double>& z, const std::vector<double>& w) const {
    double total = 0.0;
    for (size_t i = 0; i < z.size(); ++i) total += softplus(z[i]) - y[i] * z[i];
    double wsq = 0.0;
    for (double wi : w) wsq += wi * wi;
    return total / n + lambda / (2.0 * n) * wsq;
  }

  // Gradient at the cached logits; writes d weight components + bias.
  void gradient(const std::vector<double>& z, const std::vector<double>& w,
                std::vector<double>& grad_w, double& grad_b) const {
    grad_w.assign(w.size(), 0.0);
    grad_b = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
      const double r = sigmoid(z[i]) - y[i];
      const auto row = x.row(i);
      for (size_t j = 0; j < w.size(); ++j) grad_w[j] += r * row[j];
      grad_b += r;
    }
    for (size_t j = 0; j < w.size(); ++j) grad_w[j] = grad_w[j] / n + lambda / n * w[j];
    grad_b /= n;
  }
};

}  // namespace

double sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  if (p < kMinProb) return kMinProb;
  if (p > kMaxProb) return kMaxProb;
  return p;
}

LogisticModel fit_logreg(const Matrix& x, const std::vector<int>& y, const LogregOptions& options) {
  validate_shapes(x, y);
  if (x.rows() < 2) throw std::invalid_argument("logreg: need at least 2 training rows");

  size_t positives = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("logreg: labels must be 0 or 1");
    positives += static_cast<size_t>(label);
  }
  if (positives == 0 || positives == y.size()) {
    throw std::runtime_error("logreg: training labels contain a single class");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw std::runtime_error("logreg: X contains NaN or Inf");
  }

  const size_t n = x.rows(), d = x.cols();
  LogisticModel model;
  model.weights.assign(d, 0.0);
  model.lambda = options.lambda;

  Objective obj{x, y, options.lambda, static_cast<double>(n)};

  std::vector<double> z(n, 0.0);  // cached logits X w + b
  std::vector<double> grad_w(d), dir_proj(n), z_new(n), w_new(d);
  double grad_b = 0.0;
  double loss = obj.loss(z, model.weights);
  if (options.record_history) model.loss_history.push_back(loss);

  double step = 1.0;
  constexpr double kArmijo = 1e-4;

  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    obj.gradient(z, model.weights, grad_w, grad_b);

    double grad_inf = std::abs(grad_b);
    double grad_sq = grad_b * grad_b;
    for (double g : grad_w) {
      grad_inf = std::max(grad_inf, std::abs(g));
      grad_sq += g * g;
    }
    if (grad_inf < options.tol) {
      model.converged = true;
      break;
    }

    // Projection of the descent direction onto each row, so line-search
    // trials only cost O(n + d).
    for (size_t i = 0; i < n; ++i) dir_proj[i] = dot(x.row(i), grad_w);

    double t = std::min(1.0, step * 2.0);
    bool accepted = false;
    while (t > 1e-20) {
      for (size_t j = 0; j < d; ++j) w_new[j] = model.weights[j] - t * grad_w[j];
      const double b_new = model.bias - t * grad_b;
      for (size_t i = 0; i < n; ++i) z_new[i] = z[i] - t * (dir_proj[i] + grad_b);
      const double trial = obj.loss(z_new, w_new);
      if (trial <= loss - kArmijo * t * grad_sq) {
        model.weights.swap(w_new);
        model.bias = b_new;
        z.swap(z_new);
        loss = trial;
        step = t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no representable step makes progress
    if (options.record_history) model.loss_history.push_back(loss);
  }
  model.iterations_used = iter;
  return model;
}

double predict_proba(const LogisticModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size()) {
    throw std::invalid_argument("predict_proba: feature vector has " + std::to_string(x.size()) +
                                " entries, model expects " + std::to_string(model.weights.size()));
  }
  return sigmoid(dot(x, model.weights) + model.bias);
}

std::pair<double, std::vector<double>> loss_and_gradient(const LogisticModel& model,
                                                         const Matrix& x,
                                                         const std::vector<int>& y, double lambda) {
  validate_shapes(x, y);
  if (model.weights.size() != x.cols()) {
    throw std::invalid_argument("loss_and_gradient: weight/feature dimension mismatch");
  }
  const size_t n = x.rows(), d = x.cols();
  Objective obj{x, y, lambda, static_cast<double>(n)};

  std::vector<double> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = dot(x.row(i), model.weights) + model.bias;

  std::vector<double> grad_w;
  double grad_b = 0.0;
  obj.gradient(z, model.weights, grad_w, grad_b);
  grad_w.push_back(grad_b);
  return {obj.loss(z, model.weights), std::move(grad_w)};
}

}  // namespace readmit

#include "readmit/explain.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace readmit {

DiReport compute_di(const Matrix& x, const std::vector<int>& y, const std::vector<double>& theta) {
  if (x.rows() != y.size()) throw std::invalid_argument("compute_di: X/y row mismatch");
  if (theta.size() != x.cols()) {
    throw std::invalid_argument("compute_di: theta has " + std::to_string(theta.size()) +
                                " entries, X has " + std::to_string(x.cols()) + " columns");
  }

  size_t n_true = 0, n_false = 0;
  for (int label : y) (label == 1 ? n_true : n_false) += 1;
  if (n_true == 0 || n_false == 0) {
    throw std::runtime_error("compute_di: both cohorts must be non-empty");
  }

  const size_t k = x.cols();
  std::vector<double> mean_true(k, 0.0), mean_false(k, 0.0);
  for (size_t i = 0; i < x.rows(); ++i) {
    auto& acc = y[i] == 1 ? mean_true : mean_false;
    const auto row = x.row(i);
    for (size_t j = 0; j < k; ++j) acc[j] += row[j];
  }
  for (size_t j = 0; j < k; ++j) {
    mean_true[j] /= static_cast<double>(n_true);
    mean_false[j] /= static_cast<double>(n_false);
  }

  DiReport report;
  report.wx_true.resize(k);
  report.wx_false.resize(k);
  report.di.resize(k);
  for (size_t j = 0; j < k; ++j) {
    report.wx_true[j] = theta[j] * mean_true[j];
    report.wx_false[j] = theta[j] * mean_false[j];
    report.di[j] = std::abs(report.wx_true[j] - report.wx_false[j]);
  }

  report.order.resize(k);
  for (size_t j = 0; j < k; ++j) report.order[j] = j;
  std::sort(report.order.begin(), report.order.end(), [&](size_t a, size_t b) {
    if (report.di[a] != report.di[b]) return report.di[a] > report.di[b];
    return a < b;
  });
  return report;
}

std::vector<TopFeature> top_features(const DiReport& report, const std::vector<std::string>& names,
                                     size_t k) {
  const size_t total = report.di.size();
  if (names.size() != total) {
    throw std::invalid_argument("top_features: got " + std::to_string(names.size()) +
                                " names for " + std::to_string(total) + " features");
  }
  if (k > total) {
    std::cerr << "warning: top-k " << k << " exceeds feature count " << total << ", clamping\n";
    k = total;
  }

  double lo = 0.0, hi = 0.0;
  if (total > 0) {
    lo = *std::min_element(report.di.begin(), report.di.end());
    hi = *std::max_element(report.di.begin(), report.di.end());
  }
  const double range = hi - lo;

  std::vector<TopFeature> rows;
  rows.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    const size_t idx = report.order[i];
    TopFeature row;
    row.index = idx;
    row.name = names[idx];
    row.score = range > 0.0 ? (report.di[idx] - lo) / range : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

ExplainResult explain_ensemble(const EnsembleModel& model,
                               const std::vector<ModalityDataset>& datasets,
                               const std::vector<int>& y, size_t top_k) {
  if (model.kind != FusionKind::AvgSig) {
    throw std::invalid_argument("explain_ensemble: model must use averaged-sigmoids fusion");
  }

  ExplainResult result;
  for (const auto& name : model.modality_order) {
    const auto dataset = std::find_if(datasets.begin(), datasets.end(),
                                      [&](const ModalityDataset& d) { return d.name == name; });
    if (dataset == datasets.end()) {
      throw std::invalid_argument("explain_ensemble: no dataset for modality \"" + name + "\"");
    }
    const auto& weights = model.models.at(name).weights;
    if (weights.size() != dataset->dimension()) {
      throw std::invalid_argument("explain_ensemble: dataset \"" + name +
                                  "\" does not match the model dimension");
    }

    size_t n_avail = 0;
    for (uint8_t a : dataset->available) n_avail += a ? 1 : 0;
    Matrix sub(n_avail, dataset->dimension());
    std::vector<int> sub_y;
    sub_y.reserve(n_avail);
    for (size_t i = 0; i < y.size(); ++i) {
      if (!dataset->available[i]) continue;
      sub.set_row(sub_y.size(), dataset->x.row(i));
      sub_y.push_back(y[i]);
    }

    try {
      DiReport report = compute_di(sub, sub_y, weights);
      report.modality = name;
      report.top = top_features(report, dataset->feature_names, top_k);
      result.reports.push_back(std::move(report));
    } catch (const std::exception& e) {
      result.errors.emplace(name, e.what());
    }
  }
  return result;
}

}  // namespace readmit

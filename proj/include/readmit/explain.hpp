#pragma once

#include <map>
#include <string>
#include <vector>

#include "readmit/ensemble.hpp"
#include "readmit/matrix.hpp"

namespace readmit {

struct TopFeature {
  size_t index = 0;
  std::string name;
  double score = 0.0;  // DI min-max normalized over all features
};

struct DiReport {
  std::string modality;
  std::vector<double> wx_true;   // theta_k * mean feature over the positive cohort
  std::vector<double> wx_false;  // likewise over the negative cohort
  std::vector<double> di;        // |wx_true - wx_false|
  std::vector<size_t> order;     // descending DI, ties by ascending feature index
  std::vector<TopFeature> top;
};

// Cohort-contrastive feature importance: per-class column means, scaled
// elementwise by the model weights, ranked by the absolute gap.
DiReport compute_di(const Matrix& x, const std::vector<int>& y, const std::vector<double>& theta);

// First k of the sorted order with DI min-max normalized over all features;
// all-equal DI yields all-zero scores. k beyond the feature count is clamped
// with a warning on stderr.
std::vector<TopFeature> top_features(const DiReport& report, const std::vector<std::string>& names,
                                     size_t k);

struct ExplainResult {
  std::vector<DiReport> reports;              // model modality order, failures omitted
  std::map<std::string, std::string> errors;  // modality -> reason
};

// Runs compute_di per modality of an averaged-sigmoids model, using each
// modality's available rows only. A modality whose available cohort is
// single-class is reported as an error without blocking the others.
ExplainResult explain_ensemble(const EnsembleModel& model,
                               const std::vector<ModalityDataset>& datasets,
                               const std::vector<int>& y, size_t top_k);

}  // namespace readmit

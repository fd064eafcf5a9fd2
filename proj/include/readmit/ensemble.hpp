#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "readmit/classifier.hpp"
#include "readmit/matrix.hpp"

namespace readmit {

enum class ModalityKind { Structured, Tfidf, Lda };
enum class FusionKind { Concat, AvgSig };

struct ModalityDataset {
  std::string name;  // "structured", "tfidf:progress", "lda:consultations", ...
  ModalityKind kind{};
  Matrix x;                        // one row per patient
  std::vector<uint8_t> available;  // rows with available=0 are never read by AvgSig
  std::vector<std::string> feature_names;

  size_t dimension() const { return x.cols(); }
};

// Neutral placeholder for a missing modality: zeros for tfidf (empty
// document) and structured (standardized mean), uniform 1/K for lda.
std::vector<double> impute_modality(ModalityKind kind, size_t dim);

struct EnsembleModel {
  FusionKind kind{};
  std::vector<std::string> modality_order;

  // Concat: one model over the column-wise concatenation.
  LogisticModel concat_model;
  std::vector<std::vector<double>> imputation;  // per modality, order as above
  std::vector<size_t> dims;

  // AvgSig: one model per modality.
  std::map<std::string, LogisticModel> models;
};

// Missing rows are replaced by the modality's imputation vector, matrices
// concatenated in list order, and a single model fit on the result.
EnsembleModel fit_concat(const std::vector<ModalityDataset>& modalities, const std::vector<int>& y,
                         const LogregOptions& options = {});

// One model per modality, fit only on that modality's available patients.
// No imputation anywhere.
EnsembleModel fit_avgsig(const std::vector<ModalityDataset>& modalities, const std::vector<int>& y,
                         const LogregOptions& options = {});

// Absent key or nullopt value both mean the modality is missing.
using FeatureMap = std::map<std::string, std::optional<std::vector<double>>>;

// Concat: sigmoid over the imputed concatenation. AvgSig: arithmetic mean of
// the per-modality sigmoids over present modalities only.
double ensemble_predict(const EnsembleModel& model, const FeatureMap& features);

}  // namespace readmit

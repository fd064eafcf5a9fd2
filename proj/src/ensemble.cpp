#include "readmit/ensemble.hpp"

#include <stdexcept>

namespace readmit {

namespace {

void validate_alignment(const std::vector<ModalityDataset>& modalities, const std::vector<int>& y) {
  if (modalities.empty()) throw std::invalid_argument("ensemble: no modalities given");
  for (const auto& m : modalities) {
    if (m.x.rows() != y.size() || m.available.size() != y.size()) {
      throw std::invalid_argument("ensemble: modality \"" + m.name +
                                  "\" is not aligned with the patient list");
    }
  }
}

}  // namespace

std::vector<double> impute_modality(ModalityKind kind, size_t dim) {
  if (dim == 0) throw std::invalid_argument("impute_modality: dimension must be >= 1");
  switch (kind) {
    case ModalityKind::Lda:
      return std::vector<double>(dim, 1.0 / static_cast<double>(dim));
    case ModalityKind::Tfidf:
    case ModalityKind::Structured:
      return std::vector<double>(dim, 0.0);
  }
  return std::vector<double>(dim, 0.0);
}

EnsembleModel fit_concat(const std::vector<ModalityDataset>& modalities, const std::vector<int>& y,
                         const LogregOptions& options) {
  validate_alignment(modalities, y);

  EnsembleModel model;
  model.kind = FusionKind::Concat;

  size_t total_dim = 0;
  for (const auto& m : modalities) {
    model.modality_order.push_back(m.name);
    model.dims.push_back(m.dimension());
    model.imputation.push_back(impute_modality(m.kind, m.dimension()));
    total_dim += m.dimension();
  }

  const size_t n = y.size();
  Matrix concat(n, total_dim);
  size_t offset = 0;
  for (size_t mi = 0; mi < modalities.size(); ++mi) {
    const auto& m = modalities[mi];
    for (size_t i = 0; i < n; ++i) {
      const double* src = m.available[i] ? m.x.row(i).data() : model.imputation[mi].data();
      double* dst = concat.row(i).data() + offset;
      for (size_t j = 0; j < m.dimension(); ++j) dst[j] = src[j];
    }
    offset += m.dimension();
  }

  model.concat_model = fit_logreg(concat, y, options);
  return model;
}

EnsembleModel fit_avgsig(const std::vector<ModalityDataset>& modalities, const std::vector<int>& y,
                         const LogregOptions& options) {
  validate_alignment(modalities, y);

  EnsembleModel model;
  model.kind = FusionKind::AvgSig;

  for (const auto& m : modalities) {
    model.modality_order.push_back(m.name);

    size_t n_avail = 0;
    for (size_t i = 0; i < y.size(); ++i) n_avail += m.available[i] ? 1 : 0;
    Matrix sub(n_avail, m.dimension());
    std::vector<int> sub_y;
    sub_y.reserve(n_avail);
    for (size_t i = 0; i < y.size(); ++i) {
      if (!m.available[i]) continue;
      sub.set_row(sub_y.size(), m.x.row(i));
      sub_y.push_back(y[i]);
    }

    try {
      model.models.emplace(m.name, fit_logreg(sub, sub_y, options));
    } catch (const std::exception& e) {
      throw std::runtime_error("modality \"" + m.name + "\": " + e.what());
    }
  }
  return model;
}

double ensemble_predict(const EnsembleModel& model, const FeatureMap& features) {
  auto lookup = [&](const std::string& name) -> const std::vector<double>* {
    const auto it = features.find(name);
    if (it == features.end() || !it->second.has_value()) return nullptr;
    return &*it->second;
  };

  if (model.kind == FusionKind::Concat) {
    std::vector<double> concat;
    concat.reserve(model.concat_model.weights.size());
    for (size_t mi = 0; mi < model.modality_order.size(); ++mi) {
      const auto* vec = lookup(model.modality_order[mi]);
      if (vec && vec->size() != model.dims[mi]) {
        throw std::invalid_argument("predict: modality \"" + model.modality_order[mi] +
                                    "\" has dimension " + std::to_string(vec->size()) +
                                    ", expected " + std::to_string(model.dims[mi]));
      }
      const auto& block = vec ? *vec : model.imputation[mi];
      concat.insert(concat.end(), block.begin(), block.end());
    }
    return predict_proba(model.concat_model, concat);
  }

  double sum = 0.0;
  size_t present = 0;
  for (const auto& name : model.modality_order) {
    const auto* vec = lookup(name);
    if (!vec) continue;
    sum += predict_proba(model.models.at(name), *vec);
    ++present;
  }
  if (present == 0) {
    throw std::runtime_error("predict: no modality present for an averaged-sigmoids model");
  }
  return sum / static_cast<double>(present);
}

}  // namespace readmit

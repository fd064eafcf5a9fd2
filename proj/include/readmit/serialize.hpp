#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "readmit/ensemble.hpp"
#include "readmit/pipeline.hpp"

namespace readmit {

inline constexpr int kFormatVersion = 1;

// Write-to-temp-then-rename; partial files never appear under the target name.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Self-contained model bundle: fusion kind, modality order, every fitted
// vectorizer, and the per-modality (or concatenated) logistic models.
struct ModelFile {
  int format_version = kFormatVersion;
  std::string method;
  uint64_t seed = 0;
  int lda_infer_iterations = 200;
  EnsembleModel ensemble;
  StructuredEncoder encoder{StructuredEncoder::from_parts({}, {}, {})};
  std::map<NoteType, TfidfModel> tfidf;
  std::map<NoteType, LdaModel> lda;
  nlohmann::json config;  // resolved run configuration
};

void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

nlohmann::json logistic_to_json(const LogisticModel& m);
LogisticModel logistic_from_json(const nlohmann::json& j);

}  // namespace readmit

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "readmit/corpus.hpp"
#include "readmit/ensemble.hpp"
#include "readmit/rng.hpp"
#include "readmit/structured.hpp"
#include "readmit/topicmodel.hpp"
#include "readmit/vectorspace.hpp"

namespace readmit {

struct PipelineParams {
  TfidfOptions tfidf;
  LdaOptions lda;
  int lda_infer_iterations = 200;
  LogregOptions logreg;
};

struct FitSetRecord {
  std::vector<std::string> ids;  // sorted patient ids the vectorizer was fit on
  uint64_t hash = 0;             // FNV-1a over the ids joined with ','
};

uint64_t hash_id_set(const std::vector<std::string>& sorted_ids);

// One fold's fitted vectorizers: the structured encoder and, per note type,
// the TF-IDF model and the LDA model with the chain's final document-topic
// distributions for the training patients.
struct VectorizerSet {
  StructuredEncoder encoder{StructuredEncoder::from_parts({}, {}, {})};
  std::map<NoteType, TfidfModel> tfidf;
  std::map<NoteType, LdaModel> lda;
  std::map<NoteType, std::map<std::string, TopicDistribution>> train_theta;
  std::map<std::string, FitSetRecord> fit_sets;
};

// The paper's fixed modality order; dataset and serialization indices
// depend on it: structured, tfidf x 3 note types, lda x 3 note types.
std::vector<std::string> canonical_modality_names();
std::string modality_name(ModalityKind kind, NoteType type);

// Inverse of modality_name; throws on unknown names.
std::pair<ModalityKind, NoteType> parse_modality_name(const std::string& name);

// Fits on exactly the given training patients. LDA fit streams derive from
// `stream` as child("lda:<note>/fit"). When include_notes is false only the
// structured encoder is fit.
VectorizerSet fit_vectorizers(const Corpus& corpus, const std::vector<std::string>& train_ids,
                              const PipelineParams& params, const Rng& stream,
                              bool include_notes = true);

// Builds the named modality datasets over every corpus patient, in the
// given order. LDA rows use the training-chain theta when the patient is in
// train_theta and fold-in inference otherwise, seeded per patient as
// child("lda:<note>/infer/<patient_id>").
std::vector<ModalityDataset> build_modalities(const Corpus& corpus, const VectorizerSet& fitted,
                                              const PipelineParams& params, const Rng& stream,
                                              const std::vector<std::string>& names);

// Row-subset of a dataset (used to restrict to a fold's training rows).
ModalityDataset subset_rows(const ModalityDataset& dataset, const std::vector<size_t>& rows);

// Feature map for one patient row: available modalities from the given
// datasets, absent ones nullopt.
FeatureMap features_for_row(const std::vector<const ModalityDataset*>& datasets, size_t row);
FeatureMap features_for_row(const std::vector<ModalityDataset>& datasets, size_t row);

std::vector<int> corpus_labels(const Corpus& corpus);
std::vector<std::string> corpus_ids(const Corpus& corpus);

}  // namespace readmit

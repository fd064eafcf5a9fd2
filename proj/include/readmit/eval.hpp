#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "readmit/corpus.hpp"
#include "readmit/pipeline.hpp"

namespace readmit {

struct FoldPlan {
  int k = 0;
  uint64_t seed = 0;
  bool stratified = true;
  std::vector<std::vector<std::string>> test_ids;  // disjoint; union = all patients
};

// Mann-Whitney c-statistic: over all (positive, negative) pairs, credit 1
// when the positive scores higher, 0.5 on ties.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Seeded shuffle, then round-robin dealing; stratified mode deals positives
// and negatives separately so per-fold prevalence tracks the global rate.
FoldPlan kfold_split(const std::vector<std::string>& ids, const std::vector<int>& labels, int k,
                     uint64_t seed, bool stratified);

// Normal-approximation interval: mean +- 1.96 * s / sqrt(m), sample std.
std::pair<double, double> confidence_interval(const std::vector<double>& values);

struct MethodReport {
  std::string name;
  std::string display;
  std::vector<double> fold_cstats;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double delta = 0.0;  // mean - baseline mean
  bool is_baseline = false;
};

struct FoldRecord {
  int fold = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::map<std::string, FitSetRecord> fit_sets;  // vectorizer name -> training ids it saw
  std::map<std::string, size_t> vocab_sizes;     // note type key -> |V_n|
  std::map<std::string, double> method_auc;
};

struct CvConfig {
  int k = 5;
  uint64_t seed = 0;
  bool stratified = true;
  int jobs = 1;
  PipelineParams pipeline;
};

struct CvResult {
  FoldPlan plan;
  std::vector<FoldRecord> folds;
  std::vector<MethodReport> methods;
  std::string baseline;
};

// Known methods: structured_only, tfidf_lda_concat, tfidf_lda_avgsig.
struct MethodSpec {
  std::string name;
  std::string display;
  std::vector<std::string> modalities;  // canonical modality names
  FusionKind fusion{};
};
const MethodSpec& method_by_name(const std::string& name);
std::vector<std::string> known_method_names();

// Per fold: fit encoder, TF-IDF and LDA on the fold's training patients
// only, build all seven modality datasets, fit each method on training
// rows, and score the held-out rows. Aggregates folds into method reports
// with the structured-only baseline (first listed method when absent).
CvResult cross_validate(const Corpus& corpus, const std::vector<std::string>& methods,
                        const CvConfig& config);

}  // namespace readmit

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "readmit/corpus.hpp"

namespace readmit {

struct StructuredGenConfig {
  // Defaults reproduce the cohort arithmetic: 80 raw predictors expanding
  // to 92 features (74 numeric + 6 categorical x 3 levels).
  int n_numeric = 74;
  int n_categorical = 6;
  int levels = 3;
  // Positives shift the first half of the numeric columns by this amount;
  // categorical level frequencies skew by the same factor.
  double signal_strength = 1.0;
};

struct NoteGenConfig {
  double missing_rate = 0.3;  // patient has no notes of this type at all
  std::pair<int, int> doc_length_range = {40, 120};
  int n_latent_topics = 10;
  int n_signal_topics = 2;  // class-dependent prior mass lands here
  int vocab_size = 400;
  double signal_strength = 1.0;
};

struct SynthConfig {
  int n_patients = 500;
  double positive_rate = 0.307;
  uint64_t seed = 1;  // required; there is no ambient randomness
  StructuredGenConfig structured;
  std::map<NoteType, NoteGenConfig> notes;  // defaults mirror the per-type coverage gaps
};

SynthConfig default_synth_config();
SynthConfig load_synth_config(const std::string& path);
std::string synth_config_json(const SynthConfig& config);

// Writes the structured CSV and notes JSONL in the corpus wire formats.
// Deterministic: the same config yields bit-identical files.
void generate(const SynthConfig& config, const std::string& structured_path,
              const std::string& notes_path);

struct DescribeRow {
  std::string modality;
  size_t patients = 0;
  std::optional<size_t> notes;  // nullopt renders as N.A.
  size_t common = 0;            // patients shared with the structured table
};

std::vector<DescribeRow> describe(const std::string& structured_path,
                                  const std::string& notes_path);

}  // namespace readmit

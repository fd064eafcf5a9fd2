#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "readmit/rng.hpp"

namespace readmit {

struct LdaOptions {
  int n_topics = 50;
  double alpha = -1.0;  // negative -> 5 / n_topics
  double beta = 0.01;
  int iterations = 3000;
  uint64_t seed = 0;
  bool check_counts = false;  // verify count consistency after every sweep
};

struct LdaModel {
  int n_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<std::string> vocabulary;  // lexicographic
  std::map<std::string, uint32_t> token_index;
  std::vector<int32_t> topic_word;  // [word * n_topics + topic]
  std::vector<int64_t> topic_totals;
  int train_iterations = 0;
  uint64_t seed = 0;

  size_t vocab_size() const { return vocabulary.size(); }
  int32_t word_topic_count(size_t word, int topic) const {
    return topic_word[word * static_cast<size_t>(n_topics) + static_cast<size_t>(topic)];
  }
};

struct TopicDistribution {
  std::vector<double> probabilities;  // length n_topics, sums to 1
};

struct LdaFit {
  LdaModel model;
  std::vector<TopicDistribution> doc_topics;  // aligned with train_docs
};

// Collapsed Gibbs sampling. Topic assignments are resampled for `iterations`
// full sweeps; the document-topic distributions are read off the final state
// as (n_dk + alpha) / (N_d + K*alpha). Empty documents get the uniform
// distribution.
LdaFit fit_lda(const std::vector<std::vector<std::string>>& train_docs, const LdaOptions& options);

// Fold-in inference for a held-out document: topic-word counts stay frozen
// at their trained values, only the document's own assignments move.
// Out-of-vocabulary tokens are skipped; an empty or all-OOV document gets
// the uniform distribution.
TopicDistribution infer_topics(const LdaModel& model, const std::vector<std::string>& doc,
                               int iterations, uint64_t seed);

// The n highest-count words of a topic, ties broken lexicographically.
std::vector<std::string> top_words(const LdaModel& model, int topic, size_t n);

// Unnormalized full conditional for one token given the count state with the
// token removed: (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta).
// Exposed so tests can check the sampler against the analytic distribution.
void lda_conditional(const int32_t* word_topics, const int32_t* doc_topics,
                     const double* topic_denoms, double alpha, double beta, int n_topics,
                     std::vector<double>& weights);

// Draw an index proportional to the given nonnegative weights.
size_t sample_discrete(Rng& rng, const std::vector<double>& weights);

}  // namespace readmit

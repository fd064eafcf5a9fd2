#include "readmit/topicmodel.hpp"

#include <algorithm>
#include <stdexcept>

namespace readmit {

namespace {

double resolve_alpha(const LdaOptions& options) {
  return options.alpha < 0.0 ? 5.0 / static_cast<double>(options.n_topics) : options.alpha;
}

void validate(const LdaOptions& options) {
  if (options.n_topics < 1) throw std::invalid_argument("lda: n_topics must be >= 1");
  if (options.iterations < 1) throw std::invalid_argument("lda: iterations must be >= 1");
  if (options.beta <= 0.0) throw std::invalid_argument("lda: beta must be > 0");
}

TopicDistribution uniform_distribution(int k) {
  return TopicDistribution{std::vector<double>(static_cast<size_t>(k), 1.0 / k)};
}

TopicDistribution theta_from_counts(const int32_t* doc_topics, int k, size_t doc_len, double alpha) {
  if (doc_len == 0) return uniform_distribution(k);
  TopicDistribution theta;
  theta.probabilities.resize(static_cast<size_t>(k));
  const double denom = static_cast<double>(doc_len) + k * alpha;
  for (int t = 0; t < k; ++t) {
    theta.probabilities[static_cast<size_t>(t)] = (doc_topics[t] + alpha) / denom;
  }
  return theta;
}

struct GibbsState {
  std::vector<std::vector<uint32_t>> docs;  // token ids
  std::vector<std::vector<int>> assignments;
  std::vector<int32_t> doc_topic;   // [doc * K + topic]
  std::vector<int32_t> topic_word;  // [word * K + topic]
  std::vector<int64_t> topic_totals;
  std::vector<double> topic_denoms;  // topic_totals[k] + V*beta
};

void check_count_consistency(const GibbsState& s, int k) {
  const size_t kk = static_cast<size_t>(k);
  for (size_t d = 0; d < s.docs.size(); ++d) {
    int64_t sum = 0;
    for (size_t t = 0; t < kk; ++t) {
      const int32_t c = s.doc_topic[d * kk + t];
      if (c < 0) throw std::logic_error("lda: negative doc-topic count");
      sum += c;
    }
    if (sum != static_cast<int64_t>(s.docs[d].size())) {
      throw std::logic_error("lda: doc-topic counts do not sum to the document length");
    }
  }
  std::vector<int64_t> totals(kk, 0);
  for (size_t w = 0; w * kk < s.topic_word.size(); ++w) {
    for (size_t t = 0; t < kk; ++t) {
      const int32_t c = s.topic_word[w * kk + t];
      if (c < 0) throw std::logic_error("lda: negative topic-word count");
      totals[t] += c;
    }
  }
  for (size_t t = 0; t < kk; ++t) {
    if (totals[t] != s.topic_totals[t]) {
      throw std::logic_error("lda: topic totals do not match topic-word counts");
    }
  }
}

}  // namespace

void lda_conditional(const int32_t* word_topics, const int32_t* doc_topics,
                     const double* topic_denoms, double alpha, double beta, int n_topics,
                     std::vector<double>& weights) {
  weights.resize(static_cast<size_t>(n_topics));
  for (int t = 0; t < n_topics; ++t) {
    weights[static_cast<size_t>(t)] =
        (doc_topics[t] + alpha) * (word_topics[t] + beta) / topic_denoms[t];
  }
}

size_t sample_discrete(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) return rng.uniform_int(weights.size());
  double u = rng.uniform() * total;
  for (size_t i = 0; i + 1 < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

LdaFit fit_lda(const std::vector<std::vector<std::string>>& train_docs, const LdaOptions& options) {
  validate(options);
  const int k = options.n_topics;
  const size_t kk = static_cast<size_t>(k);
  const double alpha = resolve_alpha(options);
  const double beta = options.beta;

  LdaFit fit;
  LdaModel& model = fit.model;
  model.n_topics = k;
  model.alpha = alpha;
  model.beta = beta;
  model.train_iterations = options.iterations;
  model.seed = options.seed;

  std::map<std::string, uint32_t> vocab;
  for (const auto& doc : train_docs) {
    for (const auto& tok : doc) vocab.emplace(tok, 0);
  }
  uint32_t next_id = 0;
  for (auto& [tok, id] : vocab) {
    id = next_id++;
    model.vocabulary.push_back(tok);
  }
  model.token_index = vocab;
  const size_t v = model.vocabulary.size();

  GibbsState s;
  s.docs.resize(train_docs.size());
  size_t total_tokens = 0;
  for (size_t d = 0; d < train_docs.size(); ++d) {
    s.docs[d].reserve(train_docs[d].size());
    for (const auto& tok : train_docs[d]) s.docs[d].push_back(vocab.at(tok));
    total_tokens += s.docs[d].size();
  }
  if (total_tokens == 0) throw std::runtime_error("fit_lda: all documents are empty");

  s.doc_topic.assign(s.docs.size() * kk, 0);
  s.topic_word.assign(v * kk, 0);
  s.topic_totals.assign(kk, 0);
  s.topic_denoms.assign(kk, 0.0);
  s.assignments.resize(s.docs.size());

  Rng rng(options.seed);
  for (size_t d = 0; d < s.docs.size(); ++d) {
    s.assignments[d].resize(s.docs[d].size());
    for (size_t j = 0; j < s.docs[d].size(); ++j) {
      const int t = static_cast<int>(rng.uniform_int(kk));
      s.assignments[d][j] = t;
      ++s.doc_topic[d * kk + t];
      ++s.topic_word[s.docs[d][j] * kk + t];
      ++s.topic_totals[t];
    }
  }
  const double v_beta = static_cast<double>(v) * beta;
  for (size_t t = 0; t < kk; ++t) s.topic_denoms[t] = s.topic_totals[t] + v_beta;

  std::vector<double> weights(kk);
  for (int iter = 0; iter < options.iterations; ++iter) {
    for (size_t d = 0; d < s.docs.size(); ++d) {
      int32_t* doc_counts = s.doc_topic.data() + d * kk;
      for (size_t j = 0; j < s.docs[d].size(); ++j) {
        const uint32_t w = s.docs[d][j];
        int32_t* word_counts = s.topic_word.data() + w * kk;
        const int old_t = s.assignments[d][j];

        --doc_counts[old_t];
        --word_counts[old_t];
        --s.topic_totals[old_t];
        s.topic_denoms[old_t] -= 1.0;

        lda_conditional(word_counts, doc_counts, s.topic_denoms.data(), alpha, beta, k, weights);
        const int new_t = static_cast<int>(sample_discrete(rng, weights));

        s.assignments[d][j] = new_t;
        ++doc_counts[new_t];
        ++word_counts[new_t];
        ++s.topic_totals[new_t];
        s.topic_denoms[new_t] += 1.0;
      }
    }
    if (options.check_counts) check_count_consistency(s, k);
  }

  model.topic_word = std::move(s.topic_word);
  model.topic_totals = std::move(s.topic_totals);

  fit.doc_topics.reserve(s.docs.size());
  for (size_t d = 0; d < s.docs.size(); ++d) {
    fit.doc_topics.push_back(theta_from_counts(s.doc_topic.data() + d * kk, k, s.docs[d].size(), alpha));
  }
  return fit;
}

TopicDistribution infer_topics(const LdaModel& model, const std::vector<std::string>& doc,
                               int iterations, uint64_t seed) {
  const int k = model.n_topics;
  const size_t kk = static_cast<size_t>(k);

  std::vector<uint32_t> ids;
  ids.reserve(doc.size());
  for (const auto& tok : doc) {
    const auto it = model.token_index.find(tok);
    if (it != model.token_index.end()) ids.push_back(it->second);
  }
  if (ids.empty()) return uniform_distribution(k);

  const double v_beta = static_cast<double>(model.vocab_size()) * model.beta;
  std::vector<double> denoms(kk);
  for (size_t t = 0; t < kk; ++t) denoms[t] = static_cast<double>(model.topic_totals[t]) + v_beta;

  Rng rng(seed);
  std::vector<int32_t> doc_counts(kk, 0);
  std::vector<int> assignments(ids.size());
  for (size_t j = 0; j < ids.size(); ++j) {
    const int t = static_cast<int>(rng.uniform_int(kk));
    assignments[j] = t;
    ++doc_counts[t];
  }

  std::vector<double> weights(kk);
  for (int iter = 0; iter < iterations; ++iter) {
    for (size_t j = 0; j < ids.size(); ++j) {
      const int old_t = assignments[j];
      --doc_counts[old_t];
      lda_conditional(model.topic_word.data() + ids[j] * kk, doc_counts.data(), denoms.data(),
                      model.alpha, model.beta, k, weights);
      const int new_t = static_cast<int>(sample_discrete(rng, weights));
      assignments[j] = new_t;
      ++doc_counts[new_t];
    }
  }
  return theta_from_counts(doc_counts.data(), k, ids.size(), model.alpha);
}

std::vector<std::string> top_words(const LdaModel& model, int topic, size_t n) {
  if (topic < 0 || topic >= model.n_topics) {
    throw std::invalid_argument("top_words: topic " + std::to_string(topic) + " out of range [0, " +
                                std::to_string(model.n_topics) + ")");
  }
  std::vector<size_t> order(model.vocab_size());
  for (size_t w = 0; w < order.size(); ++w) order[w] = w;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const int32_t ca = model.word_topic_count(a, topic);
    const int32_t cb = model.word_topic_count(b, topic);
    if (ca != cb) return ca > cb;
    return model.vocabulary[a] < model.vocabulary[b];
  });
  std::vector<std::string> out;
  const size_t take = std::min(n, order.size());
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) out.push_back(model.vocabulary[order[i]]);
  return out;
}

}  // namespace readmit

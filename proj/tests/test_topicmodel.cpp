#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "readmit/rng.hpp"
#include "readmit/topicmodel.hpp"

using namespace readmit;

namespace {

// Two topics with disjoint vocabularies; documents are pure single-topic.
struct DisjointCorpus {
  std::vector<std::vector<std::string>> docs;
  std::vector<int> generating_topic;
  std::vector<std::string> vocab_a, vocab_b;
};

DisjointCorpus make_disjoint_corpus(int n_docs, int doc_len, uint64_t seed) {
  DisjointCorpus out;
  for (int w = 0; w < 20; ++w) {
    out.vocab_a.push_back("alpha" + std::to_string(w));
    out.vocab_b.push_back("bravo" + std::to_string(w));
  }
  Rng rng(seed);
  for (int d = 0; d < n_docs; ++d) {
    const int topic = d % 2;
    const auto& vocab = topic == 0 ? out.vocab_a : out.vocab_b;
    std::vector<std::string> doc;
    for (int j = 0; j < doc_len; ++j) doc.push_back(vocab[rng.uniform_int(vocab.size())]);
    out.docs.push_back(std::move(doc));
    out.generating_topic.push_back(topic);
  }
  return out;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("a single topic gives every document theta [1.0]") {
  LdaOptions opts;
  opts.n_topics = 1;
  opts.iterations = 5;
  opts.seed = 1;
  const auto fit = fit_lda({{"kidney", "graft"}, {"renal"}}, opts);
  for (const auto& theta : fit.doc_topics) {
    REQUIRE(theta.probabilities.size() == 1);
    CHECK(theta.probabilities[0] == doctest::Approx(1.0));
  }
  CHECK(infer_topics(fit.model, {"kidney"}, 10, 3).probabilities[0] == doctest::Approx(1.0));
}

TEST_CASE("empty documents get the uniform prior distribution") {
  LdaOptions opts;
  opts.n_topics = 4;
  opts.iterations = 10;
  opts.seed = 2;
  const auto fit = fit_lda({{"kidney", "graft"}, {}}, opts);
  for (double p : fit.doc_topics[1].probabilities) CHECK(p == doctest::Approx(0.25));

  CHECK(infer_topics(fit.model, {}, 10, 1).probabilities ==
        std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(infer_topics(fit.model, {"neverseen"}, 10, 1).probabilities ==
        std::vector<double>{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("fit_lda rejects an all-empty corpus and bad options") {
  LdaOptions opts;
  opts.n_topics = 2;
  opts.iterations = 5;
  CHECK_THROWS_AS(fit_lda({{}, {}}, opts), std::runtime_error);

  LdaOptions bad = opts;
  bad.n_topics = 0;
  CHECK_THROWS_AS(fit_lda({{"a"}}, bad), std::invalid_argument);
  bad = opts;
  bad.iterations = 0;
  CHECK_THROWS_AS(fit_lda({{"a"}}, bad), std::invalid_argument);
}

TEST_CASE("alpha defaults to 5/K and theta sums to one") {
  LdaOptions opts;
  opts.n_topics = 10;
  opts.iterations = 20;
  opts.seed = 3;
  const auto fit = fit_lda({{"a", "b", "c"}, {"c", "d"}, {"e"}}, opts);
  CHECK(fit.model.alpha == doctest::Approx(0.5));
  for (const auto& theta : fit.doc_topics) {
    CHECK(sum(theta.probabilities) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("generate-and-recover: disjoint vocabularies separate cleanly") {
  const auto corpus = make_disjoint_corpus(100, 30, 11);
  LdaOptions opts;
  opts.n_topics = 2;
  opts.iterations = 300;
  opts.seed = 7;
  opts.check_counts = true;  // count invariants verified after every sweep
  const auto fit = fit_lda(corpus.docs, opts);

  // Align topics to vocabularies by where topic 0's mass lives.
  int64_t mass_a = 0, mass_b = 0;
  for (const auto& word : corpus.vocab_a) {
    mass_a += fit.model.word_topic_count(fit.model.token_index.at(word), 0);
  }
  for (const auto& word : corpus.vocab_b) {
    mass_b += fit.model.word_topic_count(fit.model.token_index.at(word), 0);
  }
  const int topic_of_a = mass_a >= mass_b ? 0 : 1;

  int recovered = 0;
  for (size_t d = 0; d < corpus.docs.size(); ++d) {
    const int expected = corpus.generating_topic[d] == 0 ? topic_of_a : 1 - topic_of_a;
    if (fit.doc_topics[d].probabilities[expected] >= 0.9) ++recovered;
  }
  CHECK(recovered >= 95);

  // Topic-vocabulary alignment is a permutation: each topic's top words
  // come from a single synthetic vocabulary.
  const auto top_a = top_words(fit.model, topic_of_a, 5);
  for (const auto& w : top_a) CHECK(w.substr(0, 5) == "alpha");
  const auto top_b = top_words(fit.model, 1 - topic_of_a, 5);
  for (const auto& w : top_b) CHECK(w.substr(0, 5) == "bravo");
}

TEST_CASE("fold-in inference tracks the training distribution") {
  const auto corpus = make_disjoint_corpus(60, 40, 13);
  LdaOptions opts;
  opts.n_topics = 2;
  opts.iterations = 300;
  opts.seed = 5;
  const auto fit = fit_lda(corpus.docs, opts);

  const auto inferred = infer_topics(fit.model, corpus.docs[0], 500, 99);
  double tv = 0.0;
  for (size_t t = 0; t < 2; ++t) {
    tv += std::abs(inferred.probabilities[t] - fit.doc_topics[0].probabilities[t]);
  }
  CHECK(tv / 2.0 <= 0.15);
  CHECK(sum(inferred.probabilities) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fitting and inference are bit-deterministic at a fixed seed") {
  const auto corpus = make_disjoint_corpus(30, 20, 17);
  LdaOptions opts;
  opts.n_topics = 3;
  opts.iterations = 50;
  opts.seed = 21;
  const auto a = fit_lda(corpus.docs, opts);
  const auto b = fit_lda(corpus.docs, opts);
  CHECK(a.model.topic_word == b.model.topic_word);
  for (size_t d = 0; d < a.doc_topics.size(); ++d) {
    CHECK(a.doc_topics[d].probabilities == b.doc_topics[d].probabilities);
  }
  CHECK(infer_topics(a.model, corpus.docs[1], 100, 4).probabilities ==
        infer_topics(b.model, corpus.docs[1], 100, 4).probabilities);
}

TEST_CASE("top_words ranks by count with lexicographic tie-break") {
  LdaModel model;
  model.n_topics = 1;
  model.alpha = 1.0;
  model.beta = 0.01;
  model.vocabulary = {"a", "b", "c"};
  for (uint32_t i = 0; i < 3; ++i) model.token_index.emplace(model.vocabulary[i], i);
  model.topic_word = {5, 5, 1};  // a:5, b:5, c:1
  model.topic_totals = {11};

  CHECK(top_words(model, 0, 2) == std::vector<std::string>{"a", "b"});
  CHECK(top_words(model, 0, 0).empty());
  CHECK(top_words(model, 0, 10) == std::vector<std::string>{"a", "b", "c"});
  CHECK_THROWS_AS(top_words(model, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(top_words(model, -1, 3), std::invalid_argument);
}

TEST_CASE("resampling frequencies match the analytic conditional within 3 sigma") {
  // Frozen count state for one token; check the sampler, not the chain.
  const int k = 4;
  const std::vector<int32_t> word_topics{3, 0, 7, 1};
  const std::vector<int32_t> doc_topics{1, 2, 0, 5};
  const std::vector<double> denoms{40.0, 25.0, 60.0, 30.0};
  const double alpha = 0.5, beta = 0.01;

  std::vector<double> weights;
  lda_conditional(word_topics.data(), doc_topics.data(), denoms.data(), alpha, beta, k, weights);
  double total = 0.0;
  for (double w : weights) total += w;

  Rng rng(12345);
  const int draws = 100000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < draws; ++i) ++counts[sample_discrete(rng, weights)];

  for (int t = 0; t < k; ++t) {
    const double p = weights[t] / total;
    const double sigma = std::sqrt(p * (1.0 - p) * draws);
    CHECK(std::abs(counts[t] - p * draws) <= 3.0 * sigma);
  }
}

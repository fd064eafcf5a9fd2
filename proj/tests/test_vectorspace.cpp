#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "readmit/rng.hpp"
#include "readmit/vectorspace.hpp"

using namespace readmit;

namespace {

const std::vector<std::vector<std::string>> kTwoDocs{{"kidney", "transplant"},
                                                     {"kidney", "failure"}};

std::vector<double> dense(const TfidfModel& model, const std::vector<std::string>& doc) {
  std::vector<double> out(model.dimension(), 0.0);
  scatter_sparse(transform_tfidf(model, doc), out);
  return out;
}

// Brute-force oracle: count every vocabulary token with plain loops, weight,
// normalize. Independent of the sparse implementation path.
std::vector<double> oracle_transform(const TfidfModel& model, const std::vector<std::string>& doc) {
  std::vector<double> weights(model.dimension(), 0.0);
  for (size_t v = 0; v < model.vocabulary.size(); ++v) {
    double count = 0.0;
    for (const auto& tok : doc) {
      if (tok == model.vocabulary[v]) count += 1.0;
    }
    weights[v] = count * model.idf[v];
  }
  double norm = 0.0;
  for (double w : weights) norm += w * w;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& w : weights) w /= norm;
  }
  return weights;
}

}  // namespace

TEST_CASE("fit_tfidf builds a lexicographic vocabulary with smoothed idf") {
  const auto model = fit_tfidf(kTwoDocs);
  CHECK(model.vocabulary == std::vector<std::string>{"failure", "kidney", "transplant"});
  CHECK(model.n_train_docs == 2);
  CHECK(model.idf[model.token_index.at("kidney")] == doctest::Approx(1.0));
  CHECK(model.idf[model.token_index.at("transplant")] ==
        doctest::Approx(std::log(3.0 / 2.0) + 1.0));
}

TEST_CASE("single-document and all-document tokens get idf 1") {
  const auto single = fit_tfidf({{"kidney", "graft"}});
  for (double idf : single.idf) CHECK(idf == doctest::Approx(1.0));

  const auto model = fit_tfidf(kTwoDocs);
  CHECK(model.idf[model.token_index.at("kidney")] == doctest::Approx(1.0));
}

TEST_CASE("transform reproduces the hand-computed two-document weights") {
  const auto model = fit_tfidf(kTwoDocs);
  const auto v = dense(model, {"kidney", "transplant"});
  CHECK(v[model.token_index.at("kidney")] == doctest::Approx(0.5797).epsilon(1e-3));
  CHECK(v[model.token_index.at("transplant")] == doctest::Approx(0.8148).epsilon(1e-3));
  CHECK(v == oracle_transform(model, {"kidney", "transplant"}));
}

TEST_CASE("empty and out-of-vocabulary documents map to the zero vector") {
  const auto model = fit_tfidf(kTwoDocs);
  CHECK(transform_tfidf(model, {}).empty());
  CHECK(transform_tfidf(model, {"unseen", "tokens"}).empty());
}

TEST_CASE("transform norms are 0 or 1 and token order does not matter") {
  Rng rng(23);
  const std::vector<std::string> pool{"a", "b", "c", "d", "e", "f", "g"};
  std::vector<std::vector<std::string>> docs;
  for (int i = 0; i < 10; ++i) {
    std::vector<std::string> doc;
    const size_t len = rng.uniform_int(12);
    for (size_t j = 0; j < len; ++j) doc.push_back(pool[rng.uniform_int(pool.size())]);
    docs.push_back(std::move(doc));
  }
  const auto model = fit_tfidf(docs);

  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> doc;
    const size_t len = rng.uniform_int(15);
    for (size_t j = 0; j < len; ++j) doc.push_back(pool[rng.uniform_int(pool.size())]);

    const auto v = transform_tfidf(model, doc);
    double norm = 0.0;
    for (const auto& [_, w] : v) norm += w * w;
    norm = std::sqrt(norm);
    CHECK((norm == 0.0 || std::abs(norm - 1.0) < 1e-9));

    auto shuffled = doc;
    rng.shuffle(shuffled);
    CHECK(transform_tfidf(model, shuffled) == v);

    const auto got = dense(model, doc);
    const auto want = oracle_transform(model, doc);
    REQUIRE(got.size() == want.size());
    for (size_t j = 0; j < got.size(); ++j) {
      CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("fitting must never observe test documents") {
  const auto model = fit_tfidf(kTwoDocs);
  auto extended = kTwoDocs;
  extended.push_back({"graft", "rejection"});
  const auto refit = fit_tfidf(extended);
  CHECK(refit.dimension() != model.dimension());
  CHECK(refit.idf[refit.token_index.at("kidney")] != model.idf[model.token_index.at("kidney")]);
}

TEST_CASE("fit_tfidf rejects an empty corpus and honors pruning flags") {
  CHECK_THROWS_AS(fit_tfidf({}), std::runtime_error);

  TfidfOptions opts;
  opts.min_df = 2;
  const auto pruned = fit_tfidf(kTwoDocs, opts);
  CHECK(pruned.vocabulary == std::vector<std::string>{"kidney"});

  TfidfOptions cap;
  cap.max_df_ratio = 0.5;
  const auto capped = fit_tfidf(kTwoDocs, cap);
  CHECK(capped.vocabulary == std::vector<std::string>{"failure", "transplant"});
}

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace readmit {

// (index, value) pairs with ascending indices.
using SparseVec = std::vector<std::pair<uint32_t, double>>;

struct TfidfOptions {
  size_t min_df = 1;          // keep tokens with document frequency >= min_df
  double max_df_ratio = 1.0;  // drop tokens appearing in more than this fraction of docs
};

struct TfidfModel {
  std::vector<std::string> vocabulary;  // lexicographic; position = feature index
  std::map<std::string, uint32_t> token_index;
  std::vector<double> idf;  // ln((1+N)/(1+df)) + 1
  size_t n_train_docs = 0;

  size_t dimension() const { return vocabulary.size(); }
};

TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& train_docs,
                     const TfidfOptions& options = {});

// Raw term counts restricted to the vocabulary, weighted by idf, then
// L2-normalized. Out-of-vocabulary tokens are ignored; a document with no
// in-vocabulary tokens maps to the zero vector.
SparseVec transform_tfidf(const TfidfModel& model, const std::vector<std::string>& doc);

void scatter_sparse(const SparseVec& v, std::span<double> out);

}  // namespace readmit

#include "readmit/vectorspace.hpp"

#include <cmath>
#include <stdexcept>

namespace readmit {

TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& train_docs,
                     const TfidfOptions& options) {
  if (train_docs.empty()) throw std::runtime_error("fit_tfidf: no training documents");

  std::map<std::string, size_t> df;
  for (const auto& doc : train_docs) {
    std::map<std::string, bool> seen;
    for (const auto& tok : doc) seen.emplace(tok, true);
    for (const auto& [tok, _] : seen) ++df[tok];
  }

  const double n = static_cast<double>(train_docs.size());
  const double max_df = options.max_df_ratio * n;

  TfidfModel model;
  model.n_train_docs = train_docs.size();
  for (const auto& [tok, count] : df) {  // std::map iteration is lexicographic
    if (count < options.min_df || static_cast<double>(count) > max_df) continue;
    model.token_index.emplace(tok, static_cast<uint32_t>(model.vocabulary.size()));
    model.vocabulary.push_back(tok);
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

SparseVec transform_tfidf(const TfidfModel& model, const std::vector<std::string>& doc) {
  std::map<uint32_t, double> counts;
  for (const auto& tok : doc) {
    const auto it = model.token_index.find(tok);
    if (it != model.token_index.end()) counts[it->second] += 1.0;
  }

  SparseVec out;
  out.reserve(counts.size());
  double norm_sq = 0.0;
  for (const auto& [idx, count] : counts) {
    const double w = count * model.idf[idx];
    norm_sq += w * w;
    out.emplace_back(idx, w);
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [_, w] : out) w *= inv;
  }
  return out;
}

void scatter_sparse(const SparseVec& v, std::span<double> out) {
  for (const auto& [idx, w] : v) out[idx] = w;
}

}  // namespace readmit

#include "readmit/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace readmit {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: score/label size mismatch");
  size_t n_pos = 0;
  for (int label : labels) n_pos += label == 1 ? 1 : 0;
  const size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::runtime_error("auc: labels contain a single class");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Rank-sum with average ranks over ties; all quantities are exact halves,
  // so the result matches the pairwise count bit for bit.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

FoldPlan kfold_split(const std::vector<std::string>& ids, const std::vector<int>& labels, int k,
                     uint64_t seed, bool stratified) {
  if (ids.size() != labels.size()) throw std::invalid_argument("kfold_split: id/label size mismatch");
  if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
  if (static_cast<size_t>(k) > ids.size()) {
    throw std::invalid_argument("kfold_split: k exceeds the patient count");
  }

  std::vector<size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng(seed).child("kfold");
  rng.shuffle(order);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.test_ids.resize(static_cast<size_t>(k));

  if (stratified) {
    size_t dealt = 0;
    for (int cls : {1, 0}) {
      for (size_t idx : order) {
        if (labels[idx] != cls) continue;
        plan.test_ids[dealt % static_cast<size_t>(k)].push_back(ids[idx]);
        ++dealt;
      }
    }
  } else {
    size_t dealt = 0;
    for (size_t idx : order) {
      plan.test_ids[dealt % static_cast<size_t>(k)].push_back(ids[idx]);
      ++dealt;
    }
  }
  return plan;
}

std::pair<double, double> confidence_interval(const std::vector<double>& values) {
  if (values.size() < 2) {
    throw std::invalid_argument("confidence_interval: need at least 2 values");
  }
  const double m = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / (m - 1.0));
  const double half = 1.96 * s / std::sqrt(m);
  return {mean - half, mean + half};
}

namespace {

const std::vector<MethodSpec>& method_registry() {
  static const std::vector<MethodSpec> methods = [] {
    std::vector<MethodSpec> out;
    const auto all = canonical_modality_names();
    out.push_back({"structured_only", "Structured Only", {"structured"}, FusionKind::Concat});
    out.push_back({"tfidf_lda_concat", "TFIDF-LDA (Concat)", all, FusionKind::Concat});
    out.push_back({"tfidf_lda_avgsig", "TFIDF-LDA (Avg.Sig.)", all, FusionKind::AvgSig});
    return out;
  }();
  return methods;
}

}  // namespace

const MethodSpec& method_by_name(const std::string& name) {
  for (const auto& m : method_registry()) {
    if (m.name == name) return m;
  }
  throw std::invalid_argument("unknown method \"" + name + "\" (known: structured_only, "
                              "tfidf_lda_concat, tfidf_lda_avgsig)");
}

std::vector<std::string> known_method_names() {
  std::vector<std::string> names;
  for (const auto& m : method_registry()) names.push_back(m.name);
  return names;
}

namespace {

std::vector<std::string> needed_modalities(const std::vector<std::string>& methods) {
  std::unordered_set<std::string> wanted;
  for (const auto& name : methods) {
    for (const auto& m : method_by_name(name).modalities) wanted.insert(m);
  }
  std::vector<std::string> ordered;
  for (const auto& m : canonical_modality_names()) {
    if (wanted.count(m)) ordered.push_back(m);
  }
  return ordered;
}

FoldRecord run_fold(const Corpus& corpus, const std::vector<std::string>& methods,
                    const CvConfig& config, const FoldPlan& plan, int fold) {
  FoldRecord record;
  record.fold = fold;
  record.test_ids = plan.test_ids[static_cast<size_t>(fold)];

  std::unordered_set<std::string> test_set(record.test_ids.begin(), record.test_ids.end());
  for (const auto& p : corpus.patients) {
    if (!test_set.count(p.patient_id)) record.train_ids.push_back(p.patient_id);
  }

  const auto needed = needed_modalities(methods);
  const bool include_notes = needed.size() > 1 || (needed.size() == 1 && needed[0] != "structured");

  const Rng stream = Rng(config.seed).child("fold/" + std::to_string(fold));
  const auto fitted = fit_vectorizers(corpus, record.train_ids, config.pipeline, stream, include_notes);
  record.fit_sets = fitted.fit_sets;
  for (const auto& [type, model] : fitted.tfidf) {
    record.vocab_sizes.emplace(note_type_key(type), model.dimension());
  }

  const auto datasets = build_modalities(corpus, fitted, config.pipeline, stream, needed);
  auto dataset_by_name = [&](const std::string& name) -> const ModalityDataset& {
    for (const auto& ds : datasets) {
      if (ds.name == name) return ds;
    }
    throw std::logic_error("dataset \"" + name + "\" was not built");
  };

  const auto labels = corpus_labels(corpus);
  std::vector<size_t> train_rows, test_rows;
  for (size_t i = 0; i < corpus.patients.size(); ++i) {
    (test_set.count(corpus.patients[i].patient_id) ? test_rows : train_rows).push_back(i);
  }
  std::vector<int> train_y, test_y;
  for (size_t r : train_rows) train_y.push_back(labels[r]);
  for (size_t r : test_rows) test_y.push_back(labels[r]);

  for (const auto& method_name : methods) {
    const MethodSpec& spec = method_by_name(method_name);
    try {
      std::vector<ModalityDataset> train_sets;
      std::vector<const ModalityDataset*> method_sets;
      for (const auto& m : spec.modalities) {
        train_sets.push_back(subset_rows(dataset_by_name(m), train_rows));
        method_sets.push_back(&dataset_by_name(m));
      }

      const EnsembleModel model = spec.fusion == FusionKind::Concat
                                      ? fit_concat(train_sets, train_y, config.pipeline.logreg)
                                      : fit_avgsig(train_sets, train_y, config.pipeline.logreg);

      std::vector<double> scores;
      scores.reserve(test_rows.size());
      for (size_t r : test_rows) {
        scores.push_back(ensemble_predict(model, features_for_row(method_sets, r)));
      }
      record.method_auc[method_name] = auc(scores, test_y);
    } catch (const std::exception& e) {
      throw std::runtime_error("fold " + std::to_string(fold) + ", method " + method_name + ": " +
                               e.what());
    }
  }
  return record;
}

}  // namespace

CvResult cross_validate(const Corpus& corpus, const std::vector<std::string>& methods,
                        const CvConfig& config) {
  if (methods.empty()) throw std::invalid_argument("cross_validate: no methods requested");
  for (const auto& m : methods) method_by_name(m);  // validate early

  CvResult result;
  result.plan = kfold_split(corpus_ids(corpus), corpus_labels(corpus), config.k, config.seed,
                            config.stratified);
  result.folds.resize(static_cast<size_t>(config.k));

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (int f = 0; f < config.k; ++f) {
      result.folds[static_cast<size_t>(f)] = run_fold(corpus, methods, config, result.plan, f);
    }
  } else {
    std::vector<std::exception_ptr> errors(static_cast<size_t>(config.k));
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    const int worker_count = std::min(jobs, config.k);
    for (int w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const int f = next.fetch_add(1);
          if (f >= config.k) return;
          try {
            result.folds[static_cast<size_t>(f)] = run_fold(corpus, methods, config, result.plan, f);
          } catch (...) {
            errors[static_cast<size_t>(f)] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  result.baseline = "structured_only";
  if (std::find(methods.begin(), methods.end(), result.baseline) == methods.end()) {
    result.baseline = methods.front();
  }

  double baseline_mean = 0.0;
  for (const auto& name : methods) {
    MethodReport report;
    report.name = name;
    report.display = method_by_name(name).display;
    for (const auto& fold : result.folds) report.fold_cstats.push_back(fold.method_auc.at(name));
    report.mean = std::accumulate(report.fold_cstats.begin(), report.fold_cstats.end(), 0.0) /
                  static_cast<double>(report.fold_cstats.size());
    std::tie(report.ci_lo, report.ci_hi) = confidence_interval(report.fold_cstats);
    report.is_baseline = name == result.baseline;
    if (report.is_baseline) baseline_mean = report.mean;
    result.methods.push_back(std::move(report));
  }
  for (auto& report : result.methods) report.delta = report.mean - baseline_mean;
  return result;
}

}  // namespace readmit

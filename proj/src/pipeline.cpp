#include "readmit/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace readmit {

uint64_t hash_id_set(const std::vector<std::string>& sorted_ids) {
  std::string joined;
  for (const auto& id : sorted_ids) {
    joined += id;
    joined.push_back(',');
  }
  return fnv1a64(joined);
}

std::string modality_name(ModalityKind kind, NoteType type) {
  switch (kind) {
    case ModalityKind::Structured: return "structured";
    case ModalityKind::Tfidf: return std::string("tfidf:") + note_type_key(type);
    case ModalityKind::Lda: return std::string("lda:") + note_type_key(type);
  }
  return "";
}

std::pair<ModalityKind, NoteType> parse_modality_name(const std::string& name) {
  if (name == "structured") return {ModalityKind::Structured, NoteType::Consultations};
  for (NoteType t : kNoteTypes) {
    if (name == modality_name(ModalityKind::Tfidf, t)) return {ModalityKind::Tfidf, t};
    if (name == modality_name(ModalityKind::Lda, t)) return {ModalityKind::Lda, t};
  }
  throw std::invalid_argument("unknown modality \"" + name + "\"");
}

std::vector<std::string> canonical_modality_names() {
  std::vector<std::string> names{"structured"};
  for (NoteType t : kNoteTypes) names.push_back(modality_name(ModalityKind::Tfidf, t));
  for (NoteType t : kNoteTypes) names.push_back(modality_name(ModalityKind::Lda, t));
  return names;
}

namespace {

FitSetRecord make_fit_record(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  FitSetRecord rec;
  rec.hash = hash_id_set(ids);
  rec.ids = std::move(ids);
  return rec;
}

}  // namespace

VectorizerSet fit_vectorizers(const Corpus& corpus, const std::vector<std::string>& train_ids,
                              const PipelineParams& params, const Rng& stream,
                              bool include_notes) {
  VectorizerSet fitted;

  std::unordered_set<std::string> train_set(train_ids.begin(), train_ids.end());
  std::vector<const PatientRecord*> train_patients;
  train_patients.reserve(train_ids.size());
  for (const auto& p : corpus.patients) {
    if (train_set.count(p.patient_id)) train_patients.push_back(&p);
  }
  if (train_patients.size() != train_ids.size()) {
    throw std::invalid_argument("fit_vectorizers: training ids missing from the corpus");
  }

  {
    std::vector<const std::vector<std::string>*> rows;
    std::vector<const std::vector<std::string>*> all_rows;
    std::vector<std::string> ids;
    for (const auto& p : corpus.patients) {
      if (!p.structured) throw std::runtime_error("patient " + p.patient_id + " has no structured row");
      all_rows.push_back(&*p.structured);
    }
    for (const auto* p : train_patients) {
      rows.push_back(&*p->structured);
      ids.push_back(p->patient_id);
    }
    const auto schema = detect_schema(corpus.structured_columns, all_rows);
    fitted.encoder = StructuredEncoder::fit(schema, rows);
    fitted.fit_sets.emplace("structured", make_fit_record(std::move(ids)));
  }

  if (!include_notes) return fitted;

  for (NoteType type : corpus.note_types) {
    std::vector<std::vector<std::string>> docs;
    std::vector<std::string> doc_ids;
    for (const auto* p : train_patients) {
      const auto it = p->documents.find(type);
      if (it == p->documents.end()) continue;
      docs.push_back(it->second);
      doc_ids.push_back(p->patient_id);
    }

    const std::string tfidf_name = modality_name(ModalityKind::Tfidf, type);
    const std::string lda_name = modality_name(ModalityKind::Lda, type);
    if (docs.empty()) {
      throw std::runtime_error("no training documents for modality \"" + tfidf_name + "\"");
    }

    fitted.tfidf.emplace(type, fit_tfidf(docs, params.tfidf));

    LdaOptions lda_opts = params.lda;
    lda_opts.seed = stream.child(lda_name + "/fit").seed();
    auto lda_fit = fit_lda(docs, lda_opts);
    auto& theta_by_id = fitted.train_theta[type];
    for (size_t i = 0; i < doc_ids.size(); ++i) {
      theta_by_id.emplace(doc_ids[i], std::move(lda_fit.doc_topics[i]));
    }
    fitted.lda.emplace(type, std::move(lda_fit.model));

    auto record = make_fit_record(std::move(doc_ids));
    fitted.fit_sets.emplace(tfidf_name, record);
    fitted.fit_sets.emplace(lda_name, std::move(record));
  }

  return fitted;
}

namespace {

ModalityDataset build_structured_dataset(const Corpus& corpus, const StructuredEncoder& encoder) {
  const size_t n = corpus.patients.size();
  ModalityDataset ds;
  ds.name = "structured";
  ds.kind = ModalityKind::Structured;
  ds.feature_names = encoder.feature_names();
  ds.x = Matrix(n, encoder.dimension());
  ds.available.assign(n, 1);
  for (size_t i = 0; i < n; ++i) ds.x.set_row(i, encoder.encode(*corpus.patients[i].structured));
  return ds;
}

ModalityDataset build_tfidf_dataset(const Corpus& corpus, NoteType type, const TfidfModel& tfidf) {
  const size_t n = corpus.patients.size();
  ModalityDataset ds;
  ds.name = modality_name(ModalityKind::Tfidf, type);
  ds.kind = ModalityKind::Tfidf;
  ds.feature_names = tfidf.vocabulary;
  ds.x = Matrix(n, tfidf.dimension());
  ds.available.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    const auto it = corpus.patients[i].documents.find(type);
    if (it == corpus.patients[i].documents.end()) continue;
    ds.available[i] = 1;
    scatter_sparse(transform_tfidf(tfidf, it->second), ds.x.row(i));
  }
  return ds;
}

ModalityDataset build_lda_dataset(const Corpus& corpus, NoteType type, const LdaModel& lda,
                                  const std::map<std::string, TopicDistribution>* train_theta,
                                  int infer_iterations, const Rng& stream) {
  const size_t n = corpus.patients.size();
  ModalityDataset ds;
  ds.name = modality_name(ModalityKind::Lda, type);
  ds.kind = ModalityKind::Lda;
  for (int t = 0; t < lda.n_topics; ++t) {
    auto words = top_words(lda, t, 3);
    std::string label;
    for (const auto& w : words) {
      if (!label.empty()) label.push_back('/');
      label += w;
    }
    ds.feature_names.push_back(label);
  }
  ds.x = Matrix(n, static_cast<size_t>(lda.n_topics));
  ds.available.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    const auto& patient = corpus.patients[i];
    const auto it = patient.documents.find(type);
    if (it == patient.documents.end()) continue;
    ds.available[i] = 1;
    const auto cached = train_theta ? train_theta->find(patient.patient_id)
                                    : std::map<std::string, TopicDistribution>::const_iterator{};
    if (train_theta && cached != train_theta->end()) {
      ds.x.set_row(i, cached->second.probabilities);
    } else {
      const uint64_t seed = stream.child(ds.name + "/infer/" + patient.patient_id).seed();
      ds.x.set_row(i, infer_topics(lda, it->second, infer_iterations, seed).probabilities);
    }
  }
  return ds;
}

}  // namespace

std::vector<ModalityDataset> build_modalities(const Corpus& corpus, const VectorizerSet& fitted,
                                              const PipelineParams& params, const Rng& stream,
                                              const std::vector<std::string>& names) {
  std::vector<ModalityDataset> datasets;
  datasets.reserve(names.size());
  for (const auto& name : names) {
    const auto [kind, type] = parse_modality_name(name);
    switch (kind) {
      case ModalityKind::Structured:
        datasets.push_back(build_structured_dataset(corpus, fitted.encoder));
        break;
      case ModalityKind::Tfidf: {
        const auto it = fitted.tfidf.find(type);
        if (it == fitted.tfidf.end()) throw std::runtime_error("no fitted TF-IDF model for " + name);
        datasets.push_back(build_tfidf_dataset(corpus, type, it->second));
        break;
      }
      case ModalityKind::Lda: {
        const auto it = fitted.lda.find(type);
        if (it == fitted.lda.end()) throw std::runtime_error("no fitted LDA model for " + name);
        const auto theta = fitted.train_theta.find(type);
        datasets.push_back(build_lda_dataset(
            corpus, type, it->second,
            theta == fitted.train_theta.end() ? nullptr : &theta->second,
            params.lda_infer_iterations, stream));
        break;
      }
    }
  }
  return datasets;
}

ModalityDataset subset_rows(const ModalityDataset& dataset, const std::vector<size_t>& rows) {
  ModalityDataset out;
  out.name = dataset.name;
  out.kind = dataset.kind;
  out.feature_names = dataset.feature_names;
  out.x = Matrix(rows.size(), dataset.dimension());
  out.available.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.x.set_row(i, dataset.x.row(rows[i]));
    out.available[i] = dataset.available[rows[i]];
  }
  return out;
}

FeatureMap features_for_row(const std::vector<const ModalityDataset*>& datasets, size_t row) {
  FeatureMap features;
  for (const auto* ds : datasets) {
    if (ds->available[row]) {
      const auto span = ds->x.row(row);
      features.emplace(ds->name, std::vector<double>(span.begin(), span.end()));
    } else {
      features.emplace(ds->name, std::nullopt);
    }
  }
  return features;
}

FeatureMap features_for_row(const std::vector<ModalityDataset>& datasets, size_t row) {
  std::vector<const ModalityDataset*> ptrs;
  ptrs.reserve(datasets.size());
  for (const auto& ds : datasets) ptrs.push_back(&ds);
  return features_for_row(ptrs, row);
}

std::vector<int> corpus_labels(const Corpus& corpus) {
  std::vector<int> labels;
  labels.reserve(corpus.patients.size());
  for (const auto& p : corpus.patients) labels.push_back(p.label);
  return labels;
}

std::vector<std::string> corpus_ids(const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.patients.size());
  for (const auto& p : corpus.patients) ids.push_back(p.patient_id);
  return ids;
}

}  // namespace readmit

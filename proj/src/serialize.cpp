#include "readmit/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace readmit {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json logistic_to_json(const LogisticModel& m) {
  return {{"weights", m.weights},
          {"bias", m.bias},
          {"lambda", m.lambda},
          {"converged", m.converged},
          {"iterations_used", m.iterations_used}};
}

LogisticModel logistic_from_json(const nlohmann::json& j) {
  LogisticModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.iterations_used = j.at("iterations_used").get<int>();
  return m;
}

namespace {

nlohmann::json encoder_to_json(const StructuredEncoder& enc) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& col : enc.schema()) {
    nlohmann::json c{{"name", col.name}};
    switch (col.kind) {
      case ColumnKind::Numeric: c["kind"] = "numeric"; break;
      case ColumnKind::Binary: c["kind"] = "binary"; break;
      case ColumnKind::Categorical: c["kind"] = "categorical"; break;
    }
    if (col.kind == ColumnKind::Categorical) c["levels"] = col.levels;
    else c["raw_mean"] = col.raw_mean;
    columns.push_back(std::move(c));
  }
  return {{"columns", columns},
          {"means", enc.means()},
          {"stds", enc.stds()},
          {"feature_names", enc.feature_names()}};
}

StructuredEncoder encoder_from_json(const nlohmann::json& j) {
  std::vector<ColumnSpec> schema;
  for (const auto& c : j.at("columns")) {
    ColumnSpec col;
    col.name = c.at("name").get<std::string>();
    const std::string kind = c.at("kind").get<std::string>();
    if (kind == "numeric") col.kind = ColumnKind::Numeric;
    else if (kind == "binary") col.kind = ColumnKind::Binary;
    else if (kind == "categorical") col.kind = ColumnKind::Categorical;
    else throw std::runtime_error("model file: unknown column kind \"" + kind + "\"");
    if (col.kind == ColumnKind::Categorical) col.levels = c.at("levels").get<std::vector<std::string>>();
    else col.raw_mean = c.at("raw_mean").get<double>();
    schema.push_back(std::move(col));
  }
  return StructuredEncoder::from_parts(std::move(schema), j.at("means").get<std::vector<double>>(),
                                       j.at("stds").get<std::vector<double>>());
}

nlohmann::json tfidf_to_json(const TfidfModel& m) {
  return {{"vocabulary", m.vocabulary}, {"idf", m.idf}, {"n_train_docs", m.n_train_docs}};
}

TfidfModel tfidf_from_json(const nlohmann::json& j) {
  TfidfModel m;
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.idf = j.at("idf").get<std::vector<double>>();
  m.n_train_docs = j.at("n_train_docs").get<size_t>();
  for (uint32_t i = 0; i < m.vocabulary.size(); ++i) m.token_index.emplace(m.vocabulary[i], i);
  if (m.idf.size() != m.vocabulary.size()) throw std::runtime_error("model file: tfidf idf/vocabulary mismatch");
  return m;
}

nlohmann::json lda_to_json(const LdaModel& m) {
  return {{"n_topics", m.n_topics},
          {"alpha", m.alpha},
          {"beta", m.beta},
          {"vocabulary", m.vocabulary},
          {"topic_word", m.topic_word},
          {"topic_totals", m.topic_totals},
          {"train_iterations", m.train_iterations},
          {"seed", m.seed}};
}

LdaModel lda_from_json(const nlohmann::json& j) {
  LdaModel m;
  m.n_topics = j.at("n_topics").get<int>();
  m.alpha = j.at("alpha").get<double>();
  m.beta = j.at("beta").get<double>();
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.topic_word = j.at("topic_word").get<std::vector<int32_t>>();
  m.topic_totals = j.at("topic_totals").get<std::vector<int64_t>>();
  m.train_iterations = j.at("train_iterations").get<int>();
  m.seed = j.at("seed").get<uint64_t>();
  for (uint32_t i = 0; i < m.vocabulary.size(); ++i) m.token_index.emplace(m.vocabulary[i], i);
  if (m.topic_word.size() != m.vocabulary.size() * static_cast<size_t>(m.n_topics)) {
    throw std::runtime_error("model file: lda count matrix shape mismatch");
  }
  return m;
}

nlohmann::json ensemble_to_json(const EnsembleModel& e) {
  nlohmann::json j;
  j["kind"] = e.kind == FusionKind::Concat ? "concat" : "avgsig";
  j["modality_order"] = e.modality_order;
  if (e.kind == FusionKind::Concat) {
    j["model"] = logistic_to_json(e.concat_model);
    j["imputation"] = e.imputation;
    j["dims"] = e.dims;
  } else {
    nlohmann::json models;
    for (const auto& [name, model] : e.models) models[name] = logistic_to_json(model);
    j["models"] = models;
  }
  return j;
}

EnsembleModel ensemble_from_json(const nlohmann::json& j) {
  EnsembleModel e;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "concat") e.kind = FusionKind::Concat;
  else if (kind == "avgsig") e.kind = FusionKind::AvgSig;
  else throw std::runtime_error("model file: unknown ensemble kind \"" + kind + "\"");
  e.modality_order = j.at("modality_order").get<std::vector<std::string>>();
  if (e.kind == FusionKind::Concat) {
    e.concat_model = logistic_from_json(j.at("model"));
    e.imputation = j.at("imputation").get<std::vector<std::vector<double>>>();
    e.dims = j.at("dims").get<std::vector<size_t>>();
  } else {
    for (const auto& [name, model] : j.at("models").items()) {
      e.models.emplace(name, logistic_from_json(model));
    }
  }
  return e;
}

}  // namespace

void save_model(const std::string& path, const ModelFile& model) {
  nlohmann::json j;
  j["format_version"] = model.format_version;
  j["method"] = model.method;
  j["seed"] = model.seed;
  j["lda_infer_iterations"] = model.lda_infer_iterations;
  j["ensemble"] = ensemble_to_json(model.ensemble);
  j["structured_encoder"] = encoder_to_json(model.encoder);
  nlohmann::json tfidf, lda;
  for (const auto& [type, m] : model.tfidf) tfidf[note_type_key(type)] = tfidf_to_json(m);
  for (const auto& [type, m] : model.lda) lda[note_type_key(type)] = lda_to_json(m);
  j["tfidf"] = tfidf;
  j["lda"] = lda;
  j["config"] = model.config;
  atomic_write(path, j.dump(2) + "\n");
}

ModelFile load_model(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": invalid model file: " + e.what());
  }
  ModelFile model;
  try {
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != kFormatVersion) {
      throw std::runtime_error("unsupported format_version " + std::to_string(model.format_version));
    }
    model.method = j.at("method").get<std::string>();
    model.seed = j.at("seed").get<uint64_t>();
    model.lda_infer_iterations = j.at("lda_infer_iterations").get<int>();
    model.ensemble = ensemble_from_json(j.at("ensemble"));
    model.encoder = encoder_from_json(j.at("structured_encoder"));
    for (NoteType type : kNoteTypes) {
      const char* key = note_type_key(type);
      if (j.at("tfidf").contains(key)) model.tfidf.emplace(type, tfidf_from_json(j.at("tfidf").at(key)));
      if (j.at("lda").contains(key)) model.lda.emplace(type, lda_from_json(j.at("lda").at(key)));
    }
    if (j.contains("config")) model.config = j.at("config");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed model file: " + e.what());
  }
  return model;
}

}  // namespace readmit

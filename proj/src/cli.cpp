#include "readmit/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "readmit/eval.hpp"
#include "readmit/report.hpp"
#include "readmit/serialize.hpp"
#include "readmit/synth.hpp"

namespace readmit::cli {

namespace {

namespace fs = std::filesystem;

struct DataFlags {
  std::string dir;
  bool no_date_cutoff = false;
  bool cutoff_progress_only = false;
  std::string stopword_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", dir, "Data directory with structured.csv and notes.jsonl")
        ->required();
    cmd->add_flag("--no-date-cutoff", no_date_cutoff,
                  "Keep notes dated after the patient's discharge date");
    cmd->add_flag("--cutoff-progress-only", cutoff_progress_only,
                  "Apply the discharge cutoff to Progress notes only");
    cmd->add_option("--stopwords", stopword_file, "Replace the bundled stopword list");
  }

  LoadResult load() const {
    LoadOptions options;
    options.apply_discharge_cutoff = !no_date_cutoff;
    options.cutoff_progress_only = cutoff_progress_only;
    if (!stopword_file.empty()) options.stopword_file = stopword_file;
    const auto result = load_corpus(structured_path(), notes_path(), options);
    if (result.notes_only_patients > 0) {
      std::cerr << "warning: " << result.notes_only_patients
                << " patient(s) present only in the notes file were dropped\n";
    }
    return result;
  }

  std::string structured_path() const { return (fs::path(dir) / "structured.csv").string(); }
  std::string notes_path() const { return (fs::path(dir) / "notes.jsonl").string(); }

  nlohmann::json to_json() const {
    return {{"data", dir},
            {"no_date_cutoff", no_date_cutoff},
            {"cutoff_progress_only", cutoff_progress_only},
            {"stopwords", stopword_file}};
  }
};

struct HyperFlags {
  int lda_topics = 50;
  double lda_alpha = -1.0;  // negative -> 5 / topics
  double lda_beta = 0.01;
  int lda_iterations = 3000;
  int lda_infer_iterations = 200;
  double lambda = 1.0;
  double tol = 1e-6;
  int max_iter = 1000;
  size_t min_df = 1;
  double max_df = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lda-topics", lda_topics, "LDA topic count")->capture_default_str();
    cmd->add_option("--lda-alpha", lda_alpha, "LDA document-topic prior (default 5/topics)");
    cmd->add_option("--lda-beta", lda_beta, "LDA topic-word prior")->capture_default_str();
    cmd->add_option("--lda-iterations", lda_iterations, "LDA training sweeps")->capture_default_str();
    cmd->add_option("--lda-infer-iterations", lda_infer_iterations, "LDA fold-in sweeps")
        ->capture_default_str();
    cmd->add_option("--lambda", lambda, "Logistic regression L2 strength")->capture_default_str();
    cmd->add_option("--tol", tol, "Gradient stopping threshold")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "Gradient descent iteration cap")->capture_default_str();
    cmd->add_option("--min-df", min_df, "TF-IDF minimum document frequency")->capture_default_str();
    cmd->add_option("--max-df", max_df, "TF-IDF maximum document-frequency ratio")
        ->capture_default_str();
  }

  PipelineParams params() const {
    PipelineParams p;
    p.tfidf.min_df = min_df;
    p.tfidf.max_df_ratio = max_df;
    p.lda.n_topics = lda_topics;
    p.lda.alpha = lda_alpha;
    p.lda.beta = lda_beta;
    p.lda.iterations = lda_iterations;
    p.lda_infer_iterations = lda_infer_iterations;
    p.logreg.lambda = lambda;
    p.logreg.tol = tol;
    p.logreg.max_iter = max_iter;
    return p;
  }

  nlohmann::json to_json() const {
    return {{"lda",
             {{"topics", lda_topics},
              {"alpha", lda_alpha < 0 ? 5.0 / lda_topics : lda_alpha},
              {"beta", lda_beta},
              {"iterations", lda_iterations},
              {"infer_iterations", lda_infer_iterations}}},
            {"logreg", {{"lambda", lambda}, {"tol", tol}, {"max_iter", max_iter}}},
            {"tfidf", {{"min_df", min_df}, {"max_df", max_df}}}};
  }
};

std::string hash_hex(uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              std::optional<int> n_override, std::optional<uint64_t> seed_override,
              std::optional<double> rate_override) {
  SynthConfig config = config_path.empty() ? default_synth_config() : load_synth_config(config_path);
  if (n_override) config.n_patients = *n_override;
  if (seed_override) config.seed = *seed_override;
  if (rate_override) config.positive_rate = *rate_override;

  const fs::path out(out_dir);
  generate(config, (out / "structured.csv").string(), (out / "notes.jsonl").string());
  atomic_write((out / "synth_config.json").string(), synth_config_json(config));
  std::cout << "wrote " << (out / "structured.csv").string() << ", " << (out / "notes.jsonl").string()
            << "\n";
  return 0;
}

int cmd_describe(const std::string& data_dir, const std::string& out_dir) {
  const fs::path dir(data_dir);
  const auto rows = describe((dir / "structured.csv").string(), (dir / "notes.jsonl").string());
  const std::string table = render_describe_table(rows);
  std::cout << table;
  if (!out_dir.empty()) {
    atomic_write((fs::path(out_dir) / "describe.txt").string(), table);
  }
  return 0;
}

nlohmann::json fold_to_json(const FoldRecord& fold) {
  nlohmann::json fit_sets;
  for (const auto& [name, rec] : fold.fit_sets) {
    fit_sets[name] = {{"count", rec.ids.size()}, {"fnv1a64", hash_hex(rec.hash)}};
  }
  std::vector<std::string> sorted_test = fold.test_ids;
  std::sort(sorted_test.begin(), sorted_test.end());
  return {{"fold", fold.fold},
          {"n_train", fold.train_ids.size()},
          {"n_test", fold.test_ids.size()},
          {"test_ids_fnv1a64", hash_hex(hash_id_set(sorted_test))},
          {"fit_sets", fit_sets},
          {"vocab_sizes", fold.vocab_sizes},
          {"c_stats", fold.method_auc}};
}

int cmd_evaluate(const DataFlags& data, const HyperFlags& hyper, std::vector<std::string> methods,
                 int k, uint64_t seed, bool no_stratify, int jobs, const std::string& out_dir) {
  const auto loaded = data.load();

  CvConfig config;
  config.k = k;
  config.seed = seed;
  config.stratified = !no_stratify;
  config.jobs = jobs;
  config.pipeline = hyper.params();

  const CvResult result = cross_validate(loaded.corpus, methods, config);

  for (const auto& fold : result.folds) {
    if (fold.vocab_sizes.empty()) continue;
    std::cerr << "fold " << fold.fold << " vocabulary sizes:";
    for (const auto& [note, size] : fold.vocab_sizes) std::cerr << ' ' << note << '=' << size;
    std::cerr << '\n';
  }

  const std::string table = render_method_table(result.methods);
  std::cout << table;

  nlohmann::json report;
  report["format_version"] = kFormatVersion;
  report["config"] = {{"command", "evaluate"},
                      {"k", k},
                      {"seed", seed},
                      {"stratified", !no_stratify},
                      {"jobs", jobs},
                      {"methods", methods},
                      {"input", data.to_json()},
                      {"hyper", hyper.to_json()}};
  report["baseline"] = result.baseline;
  nlohmann::json method_rows = nlohmann::json::array();
  for (const auto& m : result.methods) {
    method_rows.push_back({{"name", m.name},
                           {"display", m.display},
                           {"fold_cstats", m.fold_cstats},
                           {"mean", m.mean},
                           {"ci", {m.ci_lo, m.ci_hi}},
                           {"delta", m.delta},
                           {"baseline", m.is_baseline}});
  }
  report["methods"] = method_rows;
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& fold : result.folds) folds.push_back(fold_to_json(fold));
  report["folds"] = folds;

  const fs::path out(out_dir);
  atomic_write((out / "report.json").string(), report.dump(2) + "\n");
  atomic_write((out / "table.txt").string(), table);
  return 0;
}

int cmd_train(const DataFlags& data, const HyperFlags& hyper, const std::string& method_name,
              uint64_t seed, const std::string& out_path) {
  const MethodSpec& spec = method_by_name(method_name);
  const auto loaded = data.load();
  const Corpus& corpus = loaded.corpus;

  const PipelineParams params = hyper.params();
  const Rng stream = Rng(seed).child("train");
  const bool include_notes = spec.modalities.size() > 1;
  const auto fitted = fit_vectorizers(corpus, corpus_ids(corpus), params, stream, include_notes);
  const auto datasets = build_modalities(corpus, fitted, params, stream, spec.modalities);
  const auto labels = corpus_labels(corpus);

  ModelFile model;
  model.method = method_name;
  model.seed = seed;
  model.lda_infer_iterations = params.lda_infer_iterations;
  model.ensemble = spec.fusion == FusionKind::Concat ? fit_concat(datasets, labels, params.logreg)
                                                     : fit_avgsig(datasets, labels, params.logreg);
  model.encoder = fitted.encoder;
  model.tfidf = fitted.tfidf;
  model.lda = fitted.lda;
  model.config = {{"command", "train"},
                  {"method", method_name},
                  {"seed", seed},
                  {"input", data.to_json()},
                  {"hyper", hyper.to_json()}};
  save_model(out_path, model);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

VectorizerSet vectorizers_from_model(const ModelFile& model) {
  VectorizerSet fitted;
  fitted.encoder = model.encoder;
  fitted.tfidf = model.tfidf;
  fitted.lda = model.lda;
  return fitted;  // no cached train thetas: every document is folded in
}

int cmd_predict(const std::string& model_path, const DataFlags& data, const std::string& out_path) {
  const ModelFile model = load_model(model_path);
  const auto loaded = data.load();
  const Corpus& corpus = loaded.corpus;

  PipelineParams params;
  params.lda_infer_iterations = model.lda_infer_iterations;
  const Rng stream = Rng(model.seed).child("predict");
  const auto datasets =
      build_modalities(corpus, vectorizers_from_model(model), params, stream,
                       model.ensemble.modality_order);

  std::ostringstream csv;
  csv << "patient_id,probability\n";
  for (size_t i = 0; i < corpus.patients.size(); ++i) {
    const double p = ensemble_predict(model.ensemble, features_for_row(datasets, i));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", p);
    csv << corpus.patients[i].patient_id << ',' << buf << '\n';
  }
  atomic_write(out_path, csv.str());

  nlohmann::json meta{{"format_version", kFormatVersion},
                      {"config",
                       {{"command", "predict"},
                        {"model", model_path},
                        {"input", data.to_json()},
                        {"model_config", model.config}}}};
  atomic_write(out_path + ".meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

std::string safe_filename(std::string name) {
  for (char& c : name) {
    if (c == ':' || c == '/' || c == ' ') c = '_';
  }
  return name;
}

int cmd_explain(const std::string& model_path, const DataFlags& data, size_t top_k,
                const std::string& out_dir, bool charts) {
  const ModelFile model = load_model(model_path);
  if (model.ensemble.kind != FusionKind::AvgSig) {
    throw std::runtime_error(
        "explain requires an averaged-sigmoids model (train with --method tfidf_lda_avgsig)");
  }
  const auto loaded = data.load();
  const Corpus& corpus = loaded.corpus;

  PipelineParams params;
  params.lda_infer_iterations = model.lda_infer_iterations;
  const Rng stream = Rng(model.seed).child("explain");
  const auto datasets =
      build_modalities(corpus, vectorizers_from_model(model), params, stream,
                       model.ensemble.modality_order);

  const auto result = explain_ensemble(model.ensemble, datasets, corpus_labels(corpus), top_k);

  const fs::path out(out_dir);
  nlohmann::json report;
  report["format_version"] = kFormatVersion;
  report["config"] = {{"command", "explain"},
                      {"model", model_path},
                      {"top_k", top_k},
                      {"input", data.to_json()}};

  nlohmann::json modalities = nlohmann::json::array();
  for (const auto& di : result.reports) {
    const std::string table = render_di_table(di);
    std::cout << table << "\n";
    atomic_write((out / ("di_" + safe_filename(di.modality) + ".txt")).string(), table);

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : di.top) {
      rows.push_back({{"feature", row.name}, {"index", row.index}, {"score", row.score}});
    }
    modalities.push_back({{"modality", di.modality}, {"top_features", rows}});

    if (charts) {
      std::ostringstream tsv;
      for (const auto& row : di.top) tsv << row.name << '\t' << row.score << '\n';
      atomic_write((out / ("chart_" + safe_filename(di.modality) + ".tsv")).string(), tsv.str());
    }
  }
  report["modalities"] = modalities;
  nlohmann::json errors = nlohmann::json::object();
  for (const auto& [name, message] : result.errors) {
    std::cerr << "warning: modality " << name << ": " << message << "\n";
    errors[name] = message;
  }
  report["errors"] = errors;
  atomic_write((out / "explain.json").string(), report.dump(2) + "\n");
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Multimodal 30-day readmission pipeline: TF-IDF and LDA note vectorization,\n"
               "per-modality logistic regression, and missing-modality-robust late fusion."};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic multimodal dataset");
  std::string synth_config_path, synth_out;
  std::optional<int> synth_n;
  std::optional<uint64_t> synth_seed;
  std::optional<double> synth_rate;
  synth->add_option("--config", synth_config_path, "JSON generator config");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--n", synth_n, "Override patient count");
  synth->add_option("--seed", synth_seed, "Override generator seed");
  synth->add_option("--positive-rate", synth_rate, "Override positive label rate");

  // describe
  auto* describe_cmd = app.add_subcommand("describe", "Summarize a dataset per modality");
  std::string describe_data, describe_out;
  describe_cmd->add_option("--data", describe_data, "Data directory")->required();
  describe_cmd->add_option("--out", describe_out, "Also write describe.txt to this directory");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "K-fold cross-validated c-statistics");
  DataFlags eval_data;
  HyperFlags eval_hyper;
  eval_data.attach(evaluate);
  eval_hyper.attach(evaluate);
  std::vector<std::string> eval_methods = known_method_names();
  int eval_k = 5;
  uint64_t eval_seed = 0;
  bool eval_no_stratify = false;
  int eval_jobs = 1;
  std::string eval_out;
  evaluate->add_option("--methods", eval_methods, "Methods to evaluate")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--k", eval_k, "Fold count")->capture_default_str();
  evaluate->add_option("--seed", eval_seed, "Root seed")->capture_default_str();
  evaluate->add_flag("--no-stratify", eval_no_stratify, "Disable stratified splitting");
  evaluate->add_option("--jobs", eval_jobs, "Parallel fold workers")->capture_default_str();
  evaluate->add_option("--out", eval_out, "Output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Fit one method on the full dataset");
  DataFlags train_data;
  HyperFlags train_hyper;
  train_data.attach(train);
  train_hyper.attach(train);
  std::string train_method = "tfidf_lda_avgsig";
  uint64_t train_seed = 0;
  std::string train_out;
  train->add_option("--method", train_method, "Method to fit")->capture_default_str();
  train->add_option("--seed", train_seed, "Root seed")->capture_default_str();
  train->add_option("--out", train_out, "Model file path")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "Score patients with a trained model");
  DataFlags predict_data;
  std::string predict_model, predict_out;
  predict->add_option("--model", predict_model, "Model file")->required();
  predict_data.attach(predict);
  predict->add_option("--out", predict_out, "Output scores.csv path")->required();

  // explain
  auto* explain = app.add_subcommand("explain", "Per-modality feature importance");
  DataFlags explain_data;
  std::string explain_model, explain_out;
  size_t explain_top_k = 10;
  bool explain_charts = false;
  explain->add_option("--model", explain_model, "Model file (averaged-sigmoids)")->required();
  explain_data.attach(explain);
  explain->add_option("--top-k", explain_top_k, "Rows per modality")->capture_default_str();
  explain->add_option("--out", explain_out, "Output directory")->required();
  explain->add_flag("--charts", explain_charts, "Also write bar-chart data files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_config_path, synth_out, synth_n, synth_seed, synth_rate);
    if (describe_cmd->parsed()) return cmd_describe(describe_data, describe_out);
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_data, eval_hyper, eval_methods, eval_k, eval_seed, eval_no_stratify,
                          eval_jobs, eval_out);
    }
    if (train->parsed()) return cmd_train(train_data, train_hyper, train_method, train_seed, train_out);
    if (predict->parsed()) return cmd_predict(predict_model, predict_data, predict_out);
    if (explain->parsed()) return cmd_explain(explain_model, explain_data, explain_top_k, explain_out,
                                              explain_charts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace readmit::cli

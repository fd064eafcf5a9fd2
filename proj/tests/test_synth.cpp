#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "helpers.hpp"
#include "readmit/corpus.hpp"
#include "readmit/pipeline.hpp"
#include "readmit/synth.hpp"

using namespace readmit;
using testutil::TempDir;

TEST_CASE("generation is bit-identical at a fixed seed") {
  TempDir a, b;
  SynthConfig config = default_synth_config();
  config.n_patients = 80;
  config.seed = 99;
  generate(config, a.file("structured.csv"), a.file("notes.jsonl"));
  generate(config, b.file("structured.csv"), b.file("notes.jsonl"));
  CHECK(testutil::slurp(a.file("structured.csv")) == testutil::slurp(b.file("structured.csv")));
  CHECK(testutil::slurp(a.file("notes.jsonl")) == testutil::slurp(b.file("notes.jsonl")));

  SynthConfig other = config;
  other.seed = 100;
  generate(other, b.file("structured.csv"), b.file("notes.jsonl"));
  CHECK(testutil::slurp(a.file("structured.csv")) != testutil::slurp(b.file("structured.csv")));
}

TEST_CASE("the empirical positive rate stays within 3-sigma binomial bounds") {
  TempDir dir;
  SynthConfig config = default_synth_config();
  config.n_patients = 500;
  config.seed = 7;
  generate(config, dir.file("structured.csv"), dir.file("notes.jsonl"));
  const auto corpus = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")).corpus;

  CHECK(corpus.patients.size() == 500);
  size_t positives = 0;
  for (const auto& p : corpus.patients) positives += static_cast<size_t>(p.label);
  const double expected = 500 * 0.307;
  const double sigma = std::sqrt(500 * 0.307 * (1.0 - 0.307));
  CHECK(std::abs(static_cast<double>(positives) - expected) <= 3.0 * sigma);
}

TEST_CASE("missing_rate controls per-type coverage") {
  TempDir dir;
  SynthConfig config = default_synth_config();
  config.n_patients = 500;
  config.seed = 13;
  config.notes[NoteType::Progress].missing_rate = 0.3;
  generate(config, dir.file("structured.csv"), dir.file("notes.jsonl"));

  const auto rows = describe(dir.file("structured.csv"), dir.file("notes.jsonl"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].modality == "Structured");
  CHECK(rows[0].patients == 500);
  CHECK_FALSE(rows[0].notes.has_value());
  CHECK(rows[2].modality == "Progress");

  const double expected = 500 * 0.7;
  const double sigma = std::sqrt(500 * 0.7 * 0.3);
  CHECK(std::abs(static_cast<double>(rows[2].patients) - expected) <= 3.0 * sigma);
  CHECK(rows[2].common == rows[2].patients);  // every note patient has a structured row
  CHECK(*rows[2].notes >= rows[2].patients);
}

TEST_CASE("default structured shape encodes to 92 features") {
  TempDir dir;
  SynthConfig config = default_synth_config();
  config.n_patients = 120;
  config.seed = 21;
  generate(config, dir.file("structured.csv"), dir.file("notes.jsonl"));
  const auto corpus = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")).corpus;
  CHECK(corpus.structured_columns.size() == 80);

  const auto fitted = fit_vectorizers(corpus, corpus_ids(corpus), {}, Rng(1), false);
  CHECK(fitted.encoder.dimension() == 92);
}

TEST_CASE("generated vocabulary survives tokenization untouched") {
  TempDir dir;
  SynthConfig config = default_synth_config();
  config.n_patients = 40;
  config.seed = 31;
  generate(config, dir.file("structured.csv"), dir.file("notes.jsonl"));
  const auto corpus = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")).corpus;

  size_t tokens = 0;
  for (const auto& p : corpus.patients) {
    for (const auto& [type, doc] : p.documents) {
      for (const auto& tok : doc) {
        ++tokens;
        CHECK(tok.size() == 5);
        CHECK(tok[0] == 'q');
        CHECK(default_stopwords().count(tok) == 0);
      }
    }
  }
  CHECK(tokens > 0);
}

TEST_CASE("impossible configs are rejected") {
  TempDir dir;
  SynthConfig config = default_synth_config();
  config.notes[NoteType::Progress].vocab_size = 3;
  config.notes[NoteType::Progress].n_latent_topics = 10;
  CHECK_THROWS_WITH_AS(generate(config, dir.file("s.csv"), dir.file("n.jsonl")),
                       doctest::Contains("vocab_size"), std::runtime_error);

  SynthConfig bad_rate = default_synth_config();
  bad_rate.positive_rate = 1.5;
  CHECK_THROWS_AS(generate(bad_rate, dir.file("s.csv"), dir.file("n.jsonl")), std::runtime_error);
}

TEST_CASE("describe handles an empty notes file") {
  TempDir dir;
  testutil::write_file(dir.file("structured.csv"), "patient_id,label,age\np1,1,4\np2,0,5\n");
  testutil::write_file(dir.file("notes.jsonl"), "");
  const auto rows = describe(dir.file("structured.csv"), dir.file("notes.jsonl"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].patients == 2);
  for (size_t r = 1; r < 4; ++r) {
    CHECK(rows[r].patients == 0);
    CHECK(*rows[r].notes == 0);
    CHECK(rows[r].common == 0);
  }
}

TEST_CASE("config round-trips through JSON") {
  TempDir dir;
  SynthConfig config = default_synth_config();
  config.n_patients = 77;
  config.seed = 1234;
  config.structured.signal_strength = 0.25;
  config.notes[NoteType::Progress].vocab_size = 111;
  testutil::write_file(dir.file("config.json"), synth_config_json(config));

  const auto loaded = load_synth_config(dir.file("config.json"));
  CHECK(loaded.n_patients == 77);
  CHECK(loaded.seed == 1234);
  CHECK(loaded.structured.signal_strength == 0.25);
  CHECK(loaded.notes.at(NoteType::Progress).vocab_size == 111);
  CHECK(loaded.notes.at(NoteType::Consultations).missing_rate == doctest::Approx(0.34));
}

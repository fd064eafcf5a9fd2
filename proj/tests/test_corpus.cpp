#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <fstream>

#include "helpers.hpp"
#include "readmit/corpus.hpp"
#include "readmit/rng.hpp"

using namespace readmit;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("tokenize splits on every non-alphabetic byte and lowercases") {
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("Kidney transplant, HbA1c=7.2") ==
        std::vector<std::string>{"kidney", "transplant", "hba", "c"});
  CHECK(tokenize("The THE the") == std::vector<std::string>{"the", "the", "the"});
  CHECK(tokenize("naïve") == std::vector<std::string>{"na", "ve"});
}

TEST_CASE("tokenize is idempotent on its own output") {
  Rng rng(99);
  const std::string pool = "abcXYZ 0189_.;-\n\t!";
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const size_t len = rng.uniform_int(60);
    for (size_t i = 0; i < len; ++i) text.push_back(pool[rng.uniform_int(pool.size())]);
    const auto tokens = tokenize(text);
    std::string joined;
    for (const auto& t : tokens) {
      if (!joined.empty()) joined.push_back(' ');
      joined += t;
    }
    CHECK(tokenize(joined) == tokens);
  }
}

TEST_CASE("remove_stopwords filters by membership, preserving order") {
  CHECK(remove_stopwords({"the", "kidney", "of"}, default_stopwords()) ==
        std::vector<std::string>{"kidney"});
  CHECK(remove_stopwords({}, default_stopwords()).empty());
  CHECK(remove_stopwords({"kidney"}, Stopwords{}) == std::vector<std::string>{"kidney"});
}

TEST_CASE("bundled stopword list has 179 entries and matches the data file") {
  CHECK(default_stopwords().size() == 179);
  const auto from_file = load_stopwords_file(std::string(READMIT_DATA_DIR) + "/stopwords_en.txt");
  CHECK(from_file == default_stopwords());
  CHECK(default_stopwords().count("the") == 1);
  CHECK(default_stopwords().count("kidney") == 0);
}

namespace {

RawNote note(const std::string& id, NoteType type, const char* date, const std::string& text) {
  RawNote n;
  n.patient_id = id;
  n.note_type = type;
  if (date) n.date = parse_date(date);
  n.text = text;
  return n;
}

}  // namespace

TEST_CASE("merge_patient_notes concatenates, tokenizes and filters") {
  const std::vector<RawNote> notes{note("p1", NoteType::Progress, nullptr, "renal graft"),
                                   note("p1", NoteType::Progress, nullptr, "graft stable")};
  const auto doc = merge_patient_notes(notes, "p1", NoteType::Progress, std::nullopt, Stopwords{});
  REQUIRE(doc.has_value());
  CHECK(*doc == std::vector<std::string>{"renal", "graft", "graft", "stable"});
}

TEST_CASE("merge_patient_notes drops notes after the cutoff") {
  const std::vector<RawNote> notes{note("p1", NoteType::Progress, "2020-06-02", "late note")};
  const auto cutoff = parse_date("2020-06-01");
  CHECK_FALSE(merge_patient_notes(notes, "p1", NoteType::Progress, cutoff, Stopwords{}).has_value());
  CHECK_FALSE(merge_patient_notes({}, "p1", NoteType::Progress, std::nullopt, Stopwords{}).has_value());
}

TEST_CASE("merge_patient_notes orders by date, undated last, stable") {
  const std::vector<RawNote> notes{note("p1", NoteType::Progress, nullptr, "undated"),
                                   note("p1", NoteType::Progress, "2020-03-02", "second"),
                                   note("p1", NoteType::Progress, "2020-03-01", "first"),
                                   note("p1", NoteType::Progress, nullptr, "tail")};
  const auto doc = merge_patient_notes(notes, "p1", NoteType::Progress, std::nullopt, Stopwords{});
  REQUIRE(doc.has_value());
  CHECK(*doc == std::vector<std::string>{"first", "second", "undated", "tail"});

  // Undated notes are kept even when a cutoff is set.
  const auto with_cutoff =
      merge_patient_notes(notes, "p1", NoteType::Progress, parse_date("2020-03-01"), Stopwords{});
  REQUIRE(with_cutoff.has_value());
  CHECK(*with_cutoff == std::vector<std::string>{"first", "undated", "tail"});
}

TEST_CASE("merge_patient_notes is deterministic") {
  const std::vector<RawNote> notes{note("p1", NoteType::Progress, "2020-01-01", "alpha beta"),
                                   note("p1", NoteType::Progress, "2020-01-01", "gamma")};
  const auto a = merge_patient_notes(notes, "p1", NoteType::Progress, std::nullopt, Stopwords{});
  const auto b = merge_patient_notes(notes, "p1", NoteType::Progress, std::nullopt, Stopwords{});
  CHECK(*a == *b);
}

namespace {

const char* kStructuredCsv =
    "patient_id,label,discharge_date,age,diagnosis\n"
    "p1,1,2020-05-01,61,diabetes\n"
    "p2,0,2020-05-02,47,nephritis\n"
    "p3,0,,55,diabetes\n"
    "p4,1,2020-05-04,70,other\n";

std::string jsonl_line(const std::string& id, const std::string& type, const char* date,
                       const std::string& text) {
  std::string out = "{\"patient_id\": \"" + id + "\", \"note_type\": \"" + type + "\"";
  if (date) out += ", \"date\": \"" + std::string(date) + "\"";
  out += ", \"text\": \"" + text + "\"}";
  return out;
}

}  // namespace

TEST_CASE("load_corpus joins notes onto structured rows") {
  TempDir dir;
  write_file(dir.file("structured.csv"), kStructuredCsv);
  write_file(dir.file("notes.jsonl"),
             jsonl_line("p1", "progress", "2020-04-20", "renal graft stable") + "\n" +
                 jsonl_line("p1", "consultations", "2020-04-01", "the consult") + "\n" +
                 jsonl_line("p2", "progress", "2020-04-25", "fever and chills") + "\n" +
                 jsonl_line("p3", "selection_conference", nullptr, "listed for transplant") + "\n" +
                 jsonl_line("p9", "progress", "2020-04-01", "orphan note") + "\n");

  const auto result = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl"));
  const Corpus& corpus = result.corpus;

  CHECK(corpus.patients.size() == 4);
  CHECK(result.notes_only_patients == 1);
  CHECK(corpus.structured_columns == std::vector<std::string>{"age", "diagnosis"});

  const auto* p1 = corpus.find("p1");
  REQUIRE(p1 != nullptr);
  CHECK(p1->label == 1);
  CHECK(p1->has_document(NoteType::Progress));
  CHECK(p1->has_document(NoteType::Consultations));
  CHECK_FALSE(p1->has_document(NoteType::SelectionConference));
  CHECK(p1->discharge_date == parse_date("2020-05-01"));
  REQUIRE(p1->structured.has_value());
  CHECK(*p1->structured == std::vector<std::string>{"61", "diabetes"});

  size_t with_docs = 0;
  for (const auto& p : corpus.patients) with_docs += p.documents.empty() ? 0 : 1;
  CHECK(with_docs == 3);

  // Every stored token is lowercase alphabetic and not a stopword.
  for (const auto& p : corpus.patients) {
    for (const auto& [type, doc] : p.documents) {
      for (const auto& tok : doc) {
        CHECK_FALSE(tok.empty());
        CHECK(std::all_of(tok.begin(), tok.end(), [](char c) { return c >= 'a' && c <= 'z'; }));
        CHECK(corpus.stopwords.count(tok) == 0);
      }
    }
  }
}

TEST_CASE("load_corpus applies the discharge cutoff uniformly by default") {
  TempDir dir;
  write_file(dir.file("structured.csv"), kStructuredCsv);
  write_file(dir.file("notes.jsonl"),
             jsonl_line("p1", "progress", "2020-05-02", "written after discharge") + "\n" +
                 jsonl_line("p1", "consultations", "2020-05-03", "also after") + "\n");

  const auto result = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl"));
  CHECK(result.notes_after_discharge == 2);
  CHECK_FALSE(result.corpus.find("p1")->has_document(NoteType::Progress));
  CHECK_FALSE(result.corpus.find("p1")->has_document(NoteType::Consultations));

  LoadOptions progress_only;
  progress_only.cutoff_progress_only = true;
  const auto scoped = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl"), progress_only);
  CHECK_FALSE(scoped.corpus.find("p1")->has_document(NoteType::Progress));
  CHECK(scoped.corpus.find("p1")->has_document(NoteType::Consultations));

  LoadOptions no_cutoff;
  no_cutoff.apply_discharge_cutoff = false;
  const auto kept = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl"), no_cutoff);
  CHECK(kept.corpus.find("p1")->has_document(NoteType::Progress));
}

TEST_CASE("load_corpus rejects duplicate ids and malformed rows") {
  TempDir dir;
  write_file(dir.file("notes.jsonl"), "");

  write_file(dir.file("structured.csv"), "patient_id,label,age\np1,1,61\np1,0,47\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")),
                       doctest::Contains("duplicate patient_id"), std::runtime_error);

  write_file(dir.file("structured.csv"), "patient_id,label,age\np1,1,61\np2,2,47\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")),
                       doctest::Contains(":3"), std::runtime_error);

  write_file(dir.file("structured.csv"), "patient_id,label,age\np1,1\n");
  CHECK_THROWS_AS(load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")),
                  std::runtime_error);

  write_file(dir.file("structured.csv"), "patient_id,label,age\np1,1,61\n");
  write_file(dir.file("notes.jsonl"), "{not json}\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")),
                       doctest::Contains(":1"), std::runtime_error);

  write_file(dir.file("notes.jsonl"),
             jsonl_line("p1", "unknown_type", "2020-01-01", "text") + "\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl")),
                       doctest::Contains("note_type"), std::runtime_error);
}

TEST_CASE("a note whose text tokenizes to nothing still counts as a surviving note") {
  TempDir dir;
  write_file(dir.file("structured.csv"), "patient_id,label,age\np1,1,61\np2,0,50\n");
  write_file(dir.file("notes.jsonl"), jsonl_line("p1", "progress", nullptr, "123 456 !!") + "\n");
  const auto result = load_corpus(dir.file("structured.csv"), dir.file("notes.jsonl"));
  const auto* p1 = result.corpus.find("p1");
  REQUIRE(p1->has_document(NoteType::Progress));
  CHECK(p1->documents.at(NoteType::Progress).empty());
}

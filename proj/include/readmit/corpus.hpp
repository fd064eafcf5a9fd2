#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "readmit/dates.hpp"

namespace readmit {

enum class NoteType { Consultations, Progress, SelectionConference };

inline constexpr NoteType kNoteTypes[] = {NoteType::Consultations, NoteType::Progress,
                                          NoteType::SelectionConference};

const char* note_type_key(NoteType t);      // wire name: "consultations" ...
const char* note_type_display(NoteType t);  // table name: "Consultations", "Selection Conf. Ref." ...
std::optional<NoteType> parse_note_type(std::string_view s);

struct RawNote {
  std::string patient_id;
  NoteType note_type{};
  std::optional<Date> date;
  std::string text;
};

struct PatientRecord {
  std::string patient_id;
  int label = 0;  // 1 = readmitted within 30 days
  std::optional<std::vector<std::string>> structured;  // raw cells, header order
  std::optional<Date> discharge_date;
  // Only note types with at least one surviving note appear here.
  std::map<NoteType, std::vector<std::string>> documents;

  bool has_document(NoteType t) const { return documents.count(t) > 0; }
};

using Stopwords = std::unordered_set<std::string>;

// The bundled list of 179 common English stopwords (data/stopwords_en.txt,
// compiled in so the binary is self-contained).
const Stopwords& default_stopwords();
Stopwords load_stopwords_file(const std::string& path);

// Maximal runs of ASCII letters, lowercased. Digits, punctuation and any
// non-ASCII byte end a run. Stopwords are not removed here.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const Stopwords& stopwords);

// Merge one patient's notes of one note type into a single document:
// drop notes dated after `cutoff` (undated notes are kept), concatenate the
// survivors in ascending date order (undated last, input order preserved),
// then tokenize and stopword-filter. Returns nullopt when nothing survives.
std::optional<std::vector<std::string>> merge_patient_notes(const std::vector<RawNote>& notes,
                                                            const std::string& patient_id,
                                                            NoteType note_type,
                                                            std::optional<Date> cutoff,
                                                            const Stopwords& stopwords);

struct Corpus {
  std::vector<PatientRecord> patients;
  std::vector<NoteType> note_types;             // fixed order; modality indices rely on it
  std::vector<std::string> structured_columns;  // feature column names from the CSV header
  Stopwords stopwords;

  const PatientRecord* find(const std::string& patient_id) const;
};

struct LoadOptions {
  // Drop notes dated after the patient's discharge date (when the structured
  // file carries a discharge_date column).
  bool apply_discharge_cutoff = true;
  // Paper is silent on whether the cutoff covers all note types; default is
  // all, this restricts it to Progress notes.
  bool cutoff_progress_only = false;
  std::optional<std::string> stopword_file;
};

struct LoadResult {
  Corpus corpus;
  size_t notes_only_patients = 0;  // ids seen in notes but missing from the structured table
  size_t notes_read = 0;
  size_t notes_after_discharge = 0;  // excluded by the cutoff
};

// Reads the notes JSONL file; shared by load_corpus and describe.
std::vector<RawNote> read_notes_jsonl(const std::string& path);

// structured CSV: header `patient_id,label,<features...>`; an optional
// `discharge_date` column is pulled out of the feature set.
LoadResult load_corpus(const std::string& structured_path, const std::string& notes_path,
                       const LoadOptions& options = {});

}  // namespace readmit

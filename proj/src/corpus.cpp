#include "readmit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "readmit/csv.hpp"

namespace readmit {

namespace detail {
extern const char* kDefaultStopwordsText;  // generated from data/stopwords_en.txt
}

const char* note_type_key(NoteType t) {
  switch (t) {
    case NoteType::Consultations: return "consultations";
    case NoteType::Progress: return "progress";
    case NoteType::SelectionConference: return "selection_conference";
  }
  return "";
}

const char* note_type_display(NoteType t) {
  switch (t) {
    case NoteType::Consultations: return "Consultations";
    case NoteType::Progress: return "Progress";
    case NoteType::SelectionConference: return "Selection Conf. Ref.";
  }
  return "";
}

std::optional<NoteType> parse_note_type(std::string_view s) {
  for (NoteType t : kNoteTypes) {
    if (s == note_type_key(t)) return t;
  }
  return std::nullopt;
}

namespace {

Stopwords parse_stopword_text(std::string_view text) {
  Stopwords out;
  std::string word;
  std::istringstream in{std::string(text)};
  while (std::getline(in, word)) {
    if (!word.empty() && word.back() == '\r') word.pop_back();
    if (!word.empty()) out.insert(word);
  }
  return out;
}

}  // namespace

const Stopwords& default_stopwords() {
  static const Stopwords words = parse_stopword_text(detail::kDefaultStopwordsText);
  return words;
}

Stopwords load_stopwords_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open stopword file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_stopword_text(buf.str());
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c + 32));
    } else if (c >= 'a' && c <= 'z') {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const Stopwords& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stopwords.count(t)) out.push_back(t);
  }
  return out;
}

std::optional<std::vector<std::string>> merge_patient_notes(const std::vector<RawNote>& notes,
                                                            const std::string& patient_id,
                                                            NoteType note_type,
                                                            std::optional<Date> cutoff,
                                                            const Stopwords& stopwords) {
  std::vector<const RawNote*> selected;
  for (const auto& note : notes) {
    if (note.patient_id != patient_id || note.note_type != note_type) continue;
    if (cutoff && note.date && *note.date > *cutoff) continue;
    selected.push_back(&note);
  }
  if (selected.empty()) return std::nullopt;

  // Ascending by date, undated last; stable so equal dates keep input order.
  std::stable_sort(selected.begin(), selected.end(), [](const RawNote* a, const RawNote* b) {
    if (a->date && b->date) return *a->date < *b->date;
    return a->date.has_value() && !b->date.has_value();
  });

  std::string merged;
  for (const RawNote* note : selected) {
    if (!merged.empty()) merged.push_back(' ');
    merged += note->text;
  }
  return remove_stopwords(tokenize(merged), stopwords);
}

const PatientRecord* Corpus::find(const std::string& patient_id) const {
  for (const auto& p : patients) {
    if (p.patient_id == patient_id) return &p;
  }
  return nullptr;
}

std::vector<RawNote> read_notes_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");

  std::vector<RawNote> notes;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(where + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(where + ": expected a JSON object");

    RawNote note;
    if (!j.contains("patient_id") || !j["patient_id"].is_string() ||
        j["patient_id"].get<std::string>().empty()) {
      throw std::runtime_error(where + ": missing or empty \"patient_id\"");
    }
    note.patient_id = j["patient_id"].get<std::string>();

    if (!j.contains("note_type") || !j["note_type"].is_string()) {
      throw std::runtime_error(where + ": missing \"note_type\"");
    }
    const auto type = parse_note_type(j["note_type"].get<std::string>());
    if (!type) {
      throw std::runtime_error(where + ": unknown note_type \"" +
                               j["note_type"].get<std::string>() + "\"");
    }
    note.note_type = *type;

    if (j.contains("date") && !j["date"].is_null()) {
      if (!j["date"].is_string()) throw std::runtime_error(where + ": \"date\" must be a string");
      const auto date = parse_date(j["date"].get<std::string>());
      if (!date) {
        throw std::runtime_error(where + ": invalid date \"" + j["date"].get<std::string>() +
                                 "\" (expected YYYY-MM-DD)");
      }
      note.date = date;
    }

    if (!j.contains("text") || !j["text"].is_string()) {
      throw std::runtime_error(where + ": missing \"text\"");
    }
    note.text = j["text"].get<std::string>();
    notes.push_back(std::move(note));
  }
  return notes;
}

LoadResult load_corpus(const std::string& structured_path, const std::string& notes_path,
                       const LoadOptions& options) {
  LoadResult result;
  Corpus& corpus = result.corpus;
  corpus.note_types = {NoteType::Consultations, NoteType::Progress, NoteType::SelectionConference};
  corpus.stopwords =
      options.stopword_file ? load_stopwords_file(*options.stopword_file) : default_stopwords();

  const CsvTable table = read_csv(structured_path);
  if (table.header.size() < 2 || table.header[0] != "patient_id" || table.header[1] != "label") {
    throw std::runtime_error(structured_path + ":1: header must start with patient_id,label");
  }

  // discharge_date is a reserved column, not a feature.
  std::optional<size_t> discharge_col;
  for (size_t c = 2; c < table.header.size(); ++c) {
    if (table.header[c] == "discharge_date") {
      if (discharge_col) {
        throw std::runtime_error(structured_path + ":1: duplicate discharge_date column");
      }
      discharge_col = c;
    } else {
      corpus.structured_columns.push_back(table.header[c]);
    }
  }

  std::unordered_map<std::string, size_t> index_by_id;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = structured_path + ":" + std::to_string(table.line_numbers[r]);

    PatientRecord patient;
    patient.patient_id = row[0];
    if (patient.patient_id.empty()) throw std::runtime_error(where + ": empty patient_id");
    if (index_by_id.count(patient.patient_id)) {
      throw std::runtime_error(where + ": duplicate patient_id \"" + patient.patient_id + "\"");
    }

    if (row[1] == "0") patient.label = 0;
    else if (row[1] == "1") patient.label = 1;
    else throw std::runtime_error(where + ": label must be 0 or 1, got \"" + row[1] + "\"");

    std::vector<std::string> cells;
    cells.reserve(corpus.structured_columns.size());
    for (size_t c = 2; c < row.size(); ++c) {
      if (discharge_col && c == *discharge_col) {
        if (!row[c].empty()) {
          const auto date = parse_date(row[c]);
          if (!date) {
            throw std::runtime_error(where + ": invalid discharge_date \"" + row[c] + "\"");
          }
          patient.discharge_date = date;
        }
        continue;
      }
      cells.push_back(row[c]);
    }
    patient.structured = std::move(cells);

    index_by_id.emplace(patient.patient_id, corpus.patients.size());
    corpus.patients.push_back(std::move(patient));
  }

  const auto all_notes = read_notes_jsonl(notes_path);
  result.notes_read = all_notes.size();

  std::unordered_map<std::string, std::map<NoteType, std::vector<RawNote>>> grouped;
  std::unordered_set<std::string> orphan_ids;
  for (const auto& note : all_notes) {
    if (!index_by_id.count(note.patient_id)) {
      orphan_ids.insert(note.patient_id);
      continue;
    }
    grouped[note.patient_id][note.note_type].push_back(note);
  }
  result.notes_only_patients = orphan_ids.size();

  for (auto& [id, by_type] : grouped) {
    PatientRecord& patient = corpus.patients[index_by_id[id]];
    for (auto& [type, notes] : by_type) {
      std::optional<Date> cutoff;
      if (options.apply_discharge_cutoff && patient.discharge_date &&
          (!options.cutoff_progress_only || type == NoteType::Progress)) {
        cutoff = patient.discharge_date;
        for (const auto& note : notes) {
          if (note.date && *note.date > *cutoff) ++result.notes_after_discharge;
        }
      }
      auto doc = merge_patient_notes(notes, id, type, cutoff, corpus.stopwords);
      if (doc) patient.documents.emplace(type, std::move(*doc));
    }
  }

  return result;
}

}  // namespace readmit

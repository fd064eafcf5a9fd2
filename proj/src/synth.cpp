#include "readmit/synth.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "readmit/csv.hpp"
#include "readmit/rng.hpp"
#include "readmit/serialize.hpp"

namespace readmit {

SynthConfig default_synth_config() {
  SynthConfig config;
  // Coverage gaps shaped like the real cohort: consultations and progress
  // notes missing for roughly a third of patients, selection conference
  // notes nearly complete.
  config.notes[NoteType::Consultations] = NoteGenConfig{.missing_rate = 0.34};
  config.notes[NoteType::Progress] = NoteGenConfig{.missing_rate = 0.31};
  config.notes[NoteType::SelectionConference] = NoteGenConfig{.missing_rate = 0.013};
  return config;
}

namespace {

void validate(const SynthConfig& config) {
  auto fail = [](const std::string& msg) { throw std::runtime_error("synth config: " + msg); };
  if (config.n_patients < 1) fail("n_patients must be >= 1");
  if (config.positive_rate < 0.0 || config.positive_rate > 1.0) fail("positive_rate must be in [0,1]");
  if (config.structured.n_numeric < 0 || config.structured.n_categorical < 0) {
    fail("column counts must be >= 0");
  }
  if (config.structured.n_numeric + config.structured.n_categorical < 1) {
    fail("at least one structured feature column is required");
  }
  if (config.structured.n_categorical > 0 &&
      (config.structured.levels < 2 || config.structured.levels > 26)) {
    fail("levels must be in [2, 26]");
  }
  for (const auto& [type, note] : config.notes) {
    const std::string key = note_type_key(type);
    if (note.missing_rate < 0.0 || note.missing_rate > 1.0) fail(key + ": missing_rate must be in [0,1]");
    if (note.doc_length_range.first < 1 || note.doc_length_range.second < note.doc_length_range.first) {
      fail(key + ": doc_length_range must be a positive ascending pair");
    }
    if (note.n_latent_topics < 1) fail(key + ": n_latent_topics must be >= 1");
    if (note.n_signal_topics < 0 || note.n_signal_topics > note.n_latent_topics) {
      fail(key + ": n_signal_topics must be in [0, n_latent_topics]");
    }
    if (note.vocab_size < note.n_latent_topics) {
      fail(key + ": vocab_size must be >= n_latent_topics");
    }
  }
}

NoteGenConfig note_config_from_json(const nlohmann::json& j, const NoteGenConfig& base) {
  NoteGenConfig out = base;
  if (j.contains("missing_rate")) out.missing_rate = j.at("missing_rate").get<double>();
  if (j.contains("doc_length_range")) {
    const auto& r = j.at("doc_length_range");
    out.doc_length_range = {r.at(0).get<int>(), r.at(1).get<int>()};
  }
  if (j.contains("n_latent_topics")) out.n_latent_topics = j.at("n_latent_topics").get<int>();
  if (j.contains("n_signal_topics")) out.n_signal_topics = j.at("n_signal_topics").get<int>();
  if (j.contains("vocab_size")) out.vocab_size = j.at("vocab_size").get<int>();
  if (j.contains("signal_strength")) out.signal_strength = j.at("signal_strength").get<double>();
  return out;
}

nlohmann::json note_config_to_json(const NoteGenConfig& c) {
  return {{"missing_rate", c.missing_rate},
          {"doc_length_range", {c.doc_length_range.first, c.doc_length_range.second}},
          {"n_latent_topics", c.n_latent_topics},
          {"n_signal_topics", c.n_signal_topics},
          {"vocab_size", c.vocab_size},
          {"signal_strength", c.signal_strength}};
}

// Synthetic vocabulary word: "q" + four base-26 letters. Purely alphabetic
// so the tokenizer keeps it whole, and no English stopword starts with q.
std::string word_string(int index) {
  char buf[6] = {'q', 'a', 'a', 'a', 'a', 0};
  for (int pos = 4; pos >= 1; --pos) {
    buf[pos] = static_cast<char>('a' + index % 26);
    index /= 26;
  }
  return buf;
}

std::string patient_id_string(int index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "p%0*d", width, index + 1);
  return buf;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }

  SynthConfig config = default_synth_config();
  try {
    if (j.contains("n_patients")) config.n_patients = j.at("n_patients").get<int>();
    if (j.contains("positive_rate")) config.positive_rate = j.at("positive_rate").get<double>();
    if (j.contains("seed")) config.seed = j.at("seed").get<uint64_t>();
    if (j.contains("structured")) {
      const auto& s = j.at("structured");
      if (s.contains("n_numeric")) config.structured.n_numeric = s.at("n_numeric").get<int>();
      if (s.contains("n_categorical")) config.structured.n_categorical = s.at("n_categorical").get<int>();
      if (s.contains("levels")) config.structured.levels = s.at("levels").get<int>();
      if (s.contains("signal_strength")) config.structured.signal_strength = s.at("signal_strength").get<double>();
    }
    if (j.contains("notes")) {
      for (NoteType t : kNoteTypes) {
        const char* key = note_type_key(t);
        if (j.at("notes").contains(key)) {
          config.notes[t] = note_config_from_json(j.at("notes").at(key), config.notes[t]);
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad config value: " + e.what());
  }
  return config;
}

std::string synth_config_json(const SynthConfig& config) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["n_patients"] = config.n_patients;
  j["positive_rate"] = config.positive_rate;
  j["seed"] = config.seed;
  j["structured"] = {{"n_numeric", config.structured.n_numeric},
                     {"n_categorical", config.structured.n_categorical},
                     {"levels", config.structured.levels},
                     {"signal_strength", config.structured.signal_strength}};
  nlohmann::json notes;
  for (const auto& [type, note] : config.notes) notes[note_type_key(type)] = note_config_to_json(note);
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

void generate(const SynthConfig& config, const std::string& structured_path,
              const std::string& notes_path) {
  validate(config);

  const int n = config.n_patients;
  int width = 1;
  for (int v = n; v >= 10; v /= 10) ++width;
  width = std::max(width + 1, 4);

  Rng rng(config.seed);
  Rng label_rng = rng.child("labels");
  Rng date_rng = rng.child("dates");

  std::vector<std::string> ids(static_cast<size_t>(n));
  std::vector<int> labels(static_cast<size_t>(n));
  std::vector<Date> discharge(static_cast<size_t>(n));
  const Date base = *parse_date("2020-01-01");
  for (int i = 0; i < n; ++i) {
    ids[i] = patient_id_string(i, width);
    labels[i] = label_rng.uniform() < config.positive_rate ? 1 : 0;
    discharge[i] = base.plus_days(static_cast<int>(date_rng.uniform_int(365)));
  }

  // Structured CSV. Signal numerics are the first half; positives are
  // shifted by signal_strength. Categorical levels skew toward level 0 for
  // positives.
  const auto& sg = config.structured;
  const int n_signal_numeric = (sg.n_numeric + 1) / 2;
  Rng structured_rng = rng.child("structured");
  std::ostringstream csv;
  csv << "patient_id,label,discharge_date";
  for (int c = 0; c < sg.n_numeric; ++c) {
    char name[24];
    std::snprintf(name, sizeof(name), "num_%02d%s", c, c < n_signal_numeric ? "s" : "");
    csv << ',' << name;
  }
  for (int c = 0; c < sg.n_categorical; ++c) {
    char name[24];
    std::snprintf(name, sizeof(name), "cat_%02d", c);
    csv << ',' << name;
  }
  csv << '\n';
  for (int i = 0; i < n; ++i) {
    csv << ids[i] << ',' << labels[i] << ',' << to_string(discharge[i]);
    for (int c = 0; c < sg.n_numeric; ++c) {
      double v = structured_rng.normal();
      if (c < n_signal_numeric && labels[i] == 1) v += sg.signal_strength;
      csv << ',' << format_number(v);
    }
    for (int c = 0; c < sg.n_categorical; ++c) {
      const int l = static_cast<int>(sg.levels);
      double u = structured_rng.uniform();
      int level;
      if (labels[i] == 1 && sg.signal_strength > 0.0) {
        const double w0 = 1.0 + sg.signal_strength;
        const double total = w0 + static_cast<double>(l - 1);
        level = u * total < w0 ? 0 : 1 + static_cast<int>((u * total - w0) / 1.0);
        level = std::min(level, l - 1);
      } else {
        level = static_cast<int>(u * l);
        level = std::min(level, l - 1);
      }
      csv << ',' << static_cast<char>('a' + level);
    }
    csv << '\n';
  }
  atomic_write(structured_path, csv.str());

  // Notes JSONL. Each note type follows an LDA-style generative process:
  // per-document Dirichlet topic mixture whose prior puts extra mass on the
  // signal topics for positive patients; topics draw 90% of their words
  // from a private vocabulary slice and 10% from the whole vocabulary.
  std::ostringstream jsonl;
  for (NoteType type : kNoteTypes) {
    const auto it = config.notes.find(type);
    if (it == config.notes.end()) continue;
    const NoteGenConfig& nc = it->second;
    const std::string key = note_type_key(type);
    Rng note_rng = rng.child("notes/" + key);

    const int slice = nc.vocab_size / nc.n_latent_topics;
    auto sample_word = [&](int topic) {
      if (note_rng.uniform() < 0.9) {
        const int lo = topic * slice;
        const int hi = topic + 1 == nc.n_latent_topics ? nc.vocab_size : lo + slice;
        return static_cast<int>(lo + note_rng.uniform_int(static_cast<uint64_t>(hi - lo)));
      }
      return static_cast<int>(note_rng.uniform_int(static_cast<uint64_t>(nc.vocab_size)));
    };

    for (int i = 0; i < n; ++i) {
      if (note_rng.uniform() < nc.missing_rate) continue;

      std::vector<double> alpha(static_cast<size_t>(nc.n_latent_topics), 1.0);
      if (labels[i] == 1) {
        for (int t = 0; t < nc.n_signal_topics; ++t) alpha[t] += nc.signal_strength;
      }
      const auto theta = note_rng.dirichlet(alpha);

      const int span = nc.doc_length_range.second - nc.doc_length_range.first + 1;
      const int length = nc.doc_length_range.first +
                         static_cast<int>(note_rng.uniform_int(static_cast<uint64_t>(span)));
      std::vector<int> tokens(static_cast<size_t>(length));
      for (int j = 0; j < length; ++j) {
        double u = note_rng.uniform();
        int topic = nc.n_latent_topics - 1;
        for (int t = 0; t < nc.n_latent_topics; ++t) {
          u -= theta[t];
          if (u < 0.0) {
            topic = t;
            break;
          }
        }
        tokens[j] = sample_word(topic);
      }

      // Split the document into 1-3 notes; each note is independently dated
      // after discharge 5% of the time, which the loader's cutoff drops.
      const int n_notes = 1 + static_cast<int>(note_rng.uniform_int(3));
      const int chunk = std::max(1, length / n_notes);
      for (int s = 0; s < n_notes; ++s) {
        const int begin = s * chunk;
        const int end = s + 1 == n_notes ? length : std::min(length, begin + chunk);
        if (begin >= end) break;
        std::string text;
        for (int j = begin; j < end; ++j) {
          if (!text.empty()) text.push_back(' ');
          text += word_string(tokens[j]);
        }
        Date date = note_rng.uniform() < 0.05
                        ? discharge[i].plus_days(1 + static_cast<int>(note_rng.uniform_int(30)))
                        : discharge[i].plus_days(-static_cast<int>(note_rng.uniform_int(365)));
        nlohmann::json note{{"patient_id", ids[i]},
                            {"note_type", key},
                            {"date", to_string(date)},
                            {"text", text}};
        jsonl << note.dump() << '\n';
      }
    }
  }
  atomic_write(notes_path, jsonl.str());
}

std::vector<DescribeRow> describe(const std::string& structured_path,
                                  const std::string& notes_path) {
  const CsvTable table = read_csv(structured_path);
  std::unordered_set<std::string> structured_ids;
  for (const auto& row : table.rows) {
    if (!row.empty()) structured_ids.insert(row[0]);
  }

  std::map<NoteType, std::set<std::string>> note_patients;
  std::map<NoteType, size_t> note_counts;
  for (const auto& note : read_notes_jsonl(notes_path)) {
    note_patients[note.note_type].insert(note.patient_id);
    ++note_counts[note.note_type];
  }

  std::vector<DescribeRow> rows;
  rows.push_back({"Structured", structured_ids.size(), std::nullopt, structured_ids.size()});
  for (NoteType type : kNoteTypes) {
    DescribeRow row;
    row.modality = note_type_display(type);
    row.patients = note_patients[type].size();
    row.notes = note_counts[type];
    size_t common = 0;
    for (const auto& id : note_patients[type]) common += structured_ids.count(id);
    row.common = common;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace readmit

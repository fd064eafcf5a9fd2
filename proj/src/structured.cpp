#include "readmit/structured.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace readmit {

namespace {

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && std::isfinite(out);
}

}  // namespace

std::vector<ColumnSpec> detect_schema(const std::vector<std::string>& names,
                                      const std::vector<const std::vector<std::string>*>& rows) {
  std::vector<ColumnSpec> schema(names.size());
  for (size_t c = 0; c < names.size(); ++c) {
    schema[c].name = names[c];
    bool numeric = true;
    bool binary = true;
    bool any_value = false;
    for (const auto* row : rows) {
      if (c >= row->size()) throw std::runtime_error("row shorter than header");
      const std::string& cell = (*row)[c];
      if (cell.empty()) continue;
      any_value = true;
      double v;
      if (!parse_double(cell, v)) {
        numeric = false;
        break;
      }
      if (v != 0.0 && v != 1.0) binary = false;
    }
    if (!any_value) numeric = true;  // undecidable; fit will reject the column
    schema[c].kind = !numeric           ? ColumnKind::Categorical
                     : (binary && any_value) ? ColumnKind::Binary
                                             : ColumnKind::Numeric;
  }
  return schema;
}

void StructuredEncoder::build_layout() {
  feature_names_.clear();
  offsets_.clear();
  for (const auto& col : schema_) {
    offsets_.push_back(feature_names_.size());
    if (col.kind == ColumnKind::Categorical) {
      for (const auto& level : col.levels) feature_names_.push_back(col.name + "=" + level);
    } else {
      feature_names_.push_back(col.name);
    }
  }
}

StructuredEncoder StructuredEncoder::fit(std::vector<ColumnSpec> schema,
                                         const std::vector<const std::vector<std::string>*>& train_rows) {
  if (train_rows.size() < 2) {
    throw std::runtime_error("structured encoder needs at least 2 training rows, got " +
                             std::to_string(train_rows.size()));
  }

  StructuredEncoder enc;
  enc.schema_ = std::move(schema);

  for (auto& col : enc.schema_) {
    const size_t c = static_cast<size_t>(&col - enc.schema_.data());
    if (col.kind == ColumnKind::Categorical) {
      std::set<std::string> levels;
      for (const auto* row : train_rows) {
        const std::string& cell = (*row)[c];
        if (!cell.empty()) levels.insert(cell);
      }
      if (levels.empty()) {
        throw std::runtime_error("column \"" + col.name + "\" has no values in the training rows");
      }
      col.levels.assign(levels.begin(), levels.end());
    } else {
      double sum = 0.0;
      size_t count = 0;
      for (const auto* row : train_rows) {
        const std::string& cell = (*row)[c];
        if (cell.empty()) continue;
        double v;
        if (!parse_double(cell, v)) {
          throw std::runtime_error("column \"" + col.name + "\": cannot parse \"" + cell +
                                   "\" as a number");
        }
        sum += v;
        ++count;
      }
      if (count == 0) {
        throw std::runtime_error("column \"" + col.name + "\" has no values in the training rows");
      }
      col.raw_mean = sum / static_cast<double>(count);
    }
  }
  enc.build_layout();

  // Mean and population std of the expanded training rows.
  const size_t d = enc.dimension();
  const double n = static_cast<double>(train_rows.size());
  std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
  for (const auto* row : train_rows) {
    const auto raw = enc.expand(*row);
    for (size_t j = 0; j < d; ++j) {
      sum[j] += raw.values[j];
      sumsq[j] += raw.values[j] * raw.values[j];
    }
  }
  enc.mean_.resize(d);
  enc.std_.resize(d);
  for (size_t j = 0; j < d; ++j) {
    enc.mean_[j] = sum[j] / n;
    const double var = std::max(0.0, sumsq[j] / n - enc.mean_[j] * enc.mean_[j]);
    enc.std_[j] = std::sqrt(var);
  }
  return enc;
}

RawExpansion StructuredEncoder::expand(const std::vector<std::string>& row) const {
  if (row.size() != schema_.size()) {
    throw std::runtime_error("structured row has " + std::to_string(row.size()) +
                             " cells, schema expects " + std::to_string(schema_.size()));
  }
  RawExpansion out;
  out.values.reserve(dimension());
  for (size_t c = 0; c < schema_.size(); ++c) {
    const auto& col = schema_[c];
    const std::string& cell = row[c];
    if (col.kind == ColumnKind::Categorical) {
      const size_t begin = out.values.size();
      const auto it = std::find(col.levels.begin(), col.levels.end(), cell);
      const bool seen = !cell.empty() && it != col.levels.end();
      for (size_t l = 0; l < col.levels.size(); ++l) {
        out.values.push_back(seen && col.levels[l] == cell ? 1.0 : 0.0);
      }
      if (!seen) out.neutral_blocks.emplace_back(begin, out.values.size());
    } else {
      if (cell.empty()) {
        out.values.push_back(col.raw_mean);
      } else {
        double v;
        if (!parse_double(cell, v)) {
          throw std::runtime_error("column \"" + col.name + "\": cannot parse \"" + cell +
                                   "\" as a number");
        }
        out.values.push_back(v);
      }
    }
  }
  return out;
}

std::vector<double> StructuredEncoder::encode(const std::vector<std::string>& row) const {
  const auto raw = expand(row);
  std::vector<double> out(raw.values.size());
  for (size_t j = 0; j < out.size(); ++j) {
    out[j] = std_[j] == 0.0 ? 0.0 : (raw.values[j] - mean_[j]) / std_[j];
  }
  // Unseen or missing levels map to the neutral point (all zeros).
  for (const auto& [begin, end] : raw.neutral_blocks) {
    for (size_t j = begin; j < end; ++j) out[j] = 0.0;
  }
  return out;
}

StructuredEncoder StructuredEncoder::from_parts(std::vector<ColumnSpec> schema,
                                                std::vector<double> means,
                                                std::vector<double> stds) {
  StructuredEncoder enc;
  enc.schema_ = std::move(schema);
  enc.build_layout();
  if (means.size() != enc.dimension() || stds.size() != enc.dimension()) {
    throw std::runtime_error("encoder statistics do not match the feature layout");
  }
  enc.mean_ = std::move(means);
  enc.std_ = std::move(stds);
  return enc;
}

}  // namespace readmit

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace readmit {

enum class ColumnKind { Numeric, Binary, Categorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<std::string> levels;  // categorical: levels seen in training, sorted
  double raw_mean = 0.0;            // numeric: training mean, used for missing cells
};

// Column kinds are a structural property of the file, detected over every
// row: numeric when all non-empty cells parse as decimal floats, binary when
// those values are all 0/1, categorical otherwise. Level lists and training
// statistics come from StructuredEncoder::fit and training rows only.
std::vector<ColumnSpec> detect_schema(const std::vector<std::string>& names,
                                      const std::vector<const std::vector<std::string>*>& rows);

struct RawExpansion {
  std::vector<double> values;  // one-hot expanded, missing numerics mean-imputed, pre-standardization
  // [begin, end) output ranges of categorical blocks whose level is missing
  // or was never seen in training; they encode to zero after standardization.
  std::vector<std::pair<size_t, size_t>> neutral_blocks;
};

// Dummy-binary expansion of categoricals plus per-feature standardization
// with training-set mean and population standard deviation.
class StructuredEncoder {
 public:
  static StructuredEncoder fit(std::vector<ColumnSpec> schema,
                               const std::vector<const std::vector<std::string>*>& train_rows);

  RawExpansion expand(const std::vector<std::string>& row) const;
  std::vector<double> encode(const std::vector<std::string>& row) const;

  size_t dimension() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<ColumnSpec>& schema() const { return schema_; }
  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& stds() const { return std_; }

  // For deserialization.
  static StructuredEncoder from_parts(std::vector<ColumnSpec> schema, std::vector<double> means,
                                      std::vector<double> stds);

 private:
  StructuredEncoder() = default;
  void build_layout();

  std::vector<ColumnSpec> schema_;
  std::vector<double> mean_, std_;  // per output feature
  std::vector<std::string> feature_names_;
  std::vector<size_t> offsets_;  // output offset of each input column
};

}  // namespace readmit

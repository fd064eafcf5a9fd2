#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace readmit {

// Dense row-major matrix; rows are patients, columns are features.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  double& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
  double operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(size_t i) const { return {data_.data() + i * cols_, cols_}; }

  void set_row(size_t i, std::span<const double> values) {
    auto r = row(i);
    for (size_t j = 0; j < cols_; ++j) r[j] = values[j];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

}  // namespace readmit

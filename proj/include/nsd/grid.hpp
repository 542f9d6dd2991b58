#ifndef NSD_GRID_HPP
#define NSD_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd {

// Dense row-major 2-D array of doubles. The shared carrier for kernels,
// image planes and loss maps.
class Grid2D {
 public:
  Grid2D() = default;

  Grid2D(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) throw ContractError("Grid2D: zero dimension");
  }

  Grid2D(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (rows == 0 || cols == 0) throw ContractError("Grid2D: zero dimension");
    if (data_.size() != rows * cols)
      throw ContractError("Grid2D: data length does not match dimensions");
    for (double v : data_)
      if (!std::isfinite(v))
        throw ContractError("Grid2D: non-finite value");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Grid2D& a, const Grid2D& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class ComplexGrid2D {
 public:
  using value_type = std::complex<double>;

  ComplexGrid2D() = default;

  ComplexGrid2D(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0)
      throw ContractError("ComplexGrid2D: zero dimension");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  value_type& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  value_type operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::vector<value_type>& data() { return data_; }
  const std::vector<value_type>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<value_type> data_;
};

}  // namespace nsd

#endif  // NSD_GRID_HPP

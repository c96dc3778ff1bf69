#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hpde {

// Column-major dense matrix. Also serves as the n x d node-feature matrix,
// so each feature column is a contiguous span.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  // Single-column matrix holding v.
  static DenseMatrix column(std::span<const double> v);
  // Row-major nested initializer, convenient in tests.
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const DenseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b, double beta = 1.0);
DenseMatrix scaled(const DenseMatrix& a, double s);

double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double norm1(const DenseMatrix& a);  // max column sum
double asymmetry(const DenseMatrix& a);  // max |a(i,j) - a(j,i)|
bool all_finite(const DenseMatrix& a);

// LU factorization with partial pivoting. Throws NumericError when a pivot
// falls below the singularity threshold.
class LuFactor {
 public:
  explicit LuFactor(const DenseMatrix& a);

  double determinant() const;
  std::vector<double> solve(std::span<const double> b) const;
  DenseMatrix solve(const DenseMatrix& b) const;
  DenseMatrix inverse() const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

}  // namespace hpde

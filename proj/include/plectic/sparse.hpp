#pragma once

// Compressed sparse row matrices over any scalar with +, * and conj.

#include "plectic/dense.hpp"

#include <algorithm>
#include <tuple>

namespace plectic {

template <class T>
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Builds from (row, col, value) triplets; duplicates are summed and exact
  /// zeros dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<std::tuple<std::size_t, std::size_t, T>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b) : std::get<1>(a) < std::get<1>(b);
    });
    SparseMatrix m(rows, cols);
    for (std::size_t i = 0; i < t.size();) {
      auto [r, c, v] = t[i];
      if (r >= rows || c >= cols) throw DimensionError("sparse triplet out of range");
      std::size_t k = i + 1;
      for (; k < t.size() && std::get<0>(t[k]) == r && std::get<1>(t[k]) == c; ++k) v += std::get<2>(t[k]);
      if (v != T(0)) {
        m.col_.push_back(c);
        m.val_.push_back(v);
        ++m.row_ptr_[r + 1];
      }
      i = k;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      m.col_.push_back(i);
      m.val_.push_back(T(1));
      m.row_ptr_[i + 1] = i + 1;
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_index() const { return col_; }
  const std::vector<T>& values() const { return val_; }

  T at(std::size_t r, std::size_t c) const {
    auto b = col_.begin() + row_ptr_[r], e = col_.begin() + row_ptr_[r + 1];
    auto it = std::lower_bound(b, e, c);
    return (it != e && *it == c) ? val_[it - col_.begin()] : T(0);
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) f(r, col_[p], val_[p]);
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    if (x.size() != cols_) throw DimensionError("sparse apply: size mismatch");
    std::vector<T> y(rows_, T(0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) y[r] += val_[p] * x[col_[p]];
    return y;
  }

  SparseMatrix adjoint() const {
    std::vector<std::tuple<std::size_t, std::size_t, T>> t;
    t.reserve(nnz());
    for_each([&](std::size_t r, std::size_t c, const T& v) { t.emplace_back(c, r, conj_of(v)); });
    return from_triplets(cols_, rows_, std::move(t));
  }

  /// Multiplies entry (r, c) by f(r, c).
  template <class F>
  SparseMatrix scaled(F&& f) const {
    SparseMatrix m = *this;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) m.val_[p] *= f(r, col_[p]);
    return m;
  }

  SparseMatrix operator*(const T& s) const {
    return scaled([&](std::size_t, std::size_t) { return s; });
  }

  SparseMatrix operator+(const SparseMatrix& o) const { return combine(o, false); }
  SparseMatrix operator-(const SparseMatrix& o) const { return combine(o, true); }

  SparseMatrix operator*(const SparseMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionError("sparse product: inner dimensions differ");
    SparseMatrix m(rows_, o.cols_);
    std::vector<T> acc(o.cols_, T(0));
    std::vector<std::size_t> mark(o.cols_, static_cast<std::size_t>(-1));
    std::vector<std::size_t> touched;
    for (std::size_t r = 0; r < rows_; ++r) {
      touched.clear();
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        const std::size_t k = col_[p];
        for (std::size_t q = o.row_ptr_[k]; q < o.row_ptr_[k + 1]; ++q) {
          const std::size_t c = o.col_[q];
          if (mark[c] != r) {
            mark[c] = r;
            acc[c] = T(0);
            touched.push_back(c);
          }
          acc[c] += val_[p] * o.val_[q];
        }
      }
      std::sort(touched.begin(), touched.end());
      for (std::size_t c : touched)
        if (acc[c] != T(0)) {
          m.col_.push_back(c);
          m.val_.push_back(acc[c]);
        }
      m.row_ptr_[r + 1] = m.col_.size();
    }
    return m;
  }

  Matrix<T> to_dense() const {
    Matrix<T> d(rows_, cols_);
    for_each([&](std::size_t r, std::size_t c, const T& v) { d(r, c) = v; });
    return d;
  }

  /// The submatrix on the given (sorted or not) row and column index lists.
  Matrix<T> dense_block(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    std::vector<std::size_t> pos(cols_, static_cast<std::size_t>(-1));
    for (std::size_t j = 0; j < cs.size(); ++j) pos[cs[j]] = j;
    Matrix<T> d(rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t p = row_ptr_[rs[i]]; p < row_ptr_[rs[i] + 1]; ++p)
        if (pos[col_[p]] != static_cast<std::size_t>(-1)) d(i, pos[col_[p]]) = val_[p];
    return d;
  }

 private:
  SparseMatrix combine(const SparseMatrix& o, bool subtract) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("sparse sum: shapes differ");
    SparseMatrix m(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::size_t p = row_ptr_[r], q = o.row_ptr_[r];
      const std::size_t pe = row_ptr_[r + 1], qe = o.row_ptr_[r + 1];
      while (p < pe || q < qe) {
        std::size_t c;
        T v(0);
        if (q == qe || (p < pe && col_[p] < o.col_[q])) {
          c = col_[p];
          v = val_[p++];
        } else if (p == pe || o.col_[q] < col_[p]) {
          c = o.col_[q];
          v = subtract ? T(-o.val_[q]) : o.val_[q];
          ++q;
        } else {
          c = col_[p];
          v = subtract ? T(val_[p] - o.val_[q]) : T(val_[p] + o.val_[q]);
          ++p;
          ++q;
        }
        if (v != T(0)) {
          m.col_.push_back(c);
          m.val_.push_back(v);
        }
      }
      m.row_ptr_[r + 1] = m.col_.size();
    }
    return m;
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<T> val_;
};

/// max |entry|.
template <class T>
RealOf<T> max_abs(const SparseMatrix<T>& m) {
  RealOf<T> best(0);
  for (const auto& v : m.values()) {
    RealOf<T> a = abs_of(v);
    if (a > best) best = a;
  }
  return best;
}

/// Upper bound sqrt(||A||_1 ||A||_inf) for the spectral norm of D A D^{-1},
/// D = diag(sqrt(weight)). With unit weights this bounds ||A||_2.
template <class T>
RealOf<T> operator_norm_bound(const SparseMatrix<T>& m, const std::vector<RealOf<T>>& weight = {}) {
  using R = RealOf<T>;
  std::vector<R> colsum(m.cols(), R(0));
  R rowmax(0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    R s(0);
    for (std::size_t p = m.row_ptr()[r]; p < m.row_ptr()[r + 1]; ++p) {
      const std::size_t c = m.col_index()[p];
      R a = abs_of(m.values()[p]);
      if (!weight.empty()) {
        using std::sqrt;
        a *= sqrt(weight[r] / weight[c]);
      }
      s += a;
      colsum[c] += a;
    }
    if (s > rowmax) rowmax = s;
  }
  R colmax(0);
  for (const auto& c : colsum)
    if (c > colmax) colmax = c;
  using std::sqrt;
  return sqrt(rowmax * colmax);
}

}  // namespace plectic

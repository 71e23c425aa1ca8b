#pragma once

#include <flagalg/numeric.hpp>

#include <cassert>
#include <optional>
#include <stdexcept>
#include <vector>

namespace flagalg {

// Dense exact-rational matrix.  Convention: columns are inputs, rows are
// outputs; a map is applied as y = M x.
class RatMatrix {
 public:
  RatMatrix() : rows_(0), cols_(0) {}
  RatMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Rat(0)) {}

  static RatMatrix identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rat& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const RatMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  RatMatrix operator*(const RatMatrix& o) const {
    assert(cols_ == o.rows_);
    RatMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        if (at(i, k) == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
      }
    return r;
  }

  RatMatrix operator+(const RatMatrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    RatMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
    return r;
  }
  RatMatrix operator-(const RatMatrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    RatMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
    return r;
  }

  std::vector<Rat> apply(const std::vector<Rat>& x) const {
    assert(x.size() == cols_);
    std::vector<Rat> y(rows_, Rat(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (at(i, j) != 0) y[i] += at(i, j) * x[j];
    return y;
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != 0) return false;
    return true;
  }

  static RatMatrix hstack(const RatMatrix& a, const RatMatrix& b) {
    assert(a.rows() == b.rows() || a.cols() == 0 || b.cols() == 0);
    std::size_t rows = a.cols() ? a.rows() : b.rows();
    RatMatrix m(rows, a.cols() + b.cols());
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
      for (std::size_t j = 0; j < b.cols(); ++j) m.at(i, a.cols() + j) = b.at(i, j);
    }
    return m;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Rat> data_;
};

namespace linalg {

// reduced row echelon form in place; returns pivot column indices
inline std::vector<std::size_t> rref(RatMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t prow = 0;
  for (std::size_t col = 0; col < m.cols() && prow < m.rows(); ++col) {
    std::size_t sel = m.rows();
    for (std::size_t i = prow; i < m.rows(); ++i)
      if (m.at(i, col) != 0) { sel = i; break; }
    if (sel == m.rows()) continue;
    if (sel != prow)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(sel, j), m.at(prow, j));
    Rat inv = Rat(1) / m.at(prow, col);
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(prow, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == prow || m.at(i, col) == 0) continue;
      Rat f = m.at(i, col);
      for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) -= f * m.at(prow, j);
    }
    pivots.push_back(col);
    ++prow;
  }
  return pivots;
}

inline std::size_t rank(RatMatrix m) { return rref(m).size(); }

// basis of the kernel {x : Mx = 0}, as columns
inline RatMatrix kernel(RatMatrix m) {
  std::size_t n = m.cols();
  auto pivots = rref(m);
  std::vector<bool> is_pivot(n, false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < n; ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  RatMatrix k(n, free_cols.size());
  for (std::size_t fi = 0; fi < free_cols.size(); ++fi) {
    std::size_t f = free_cols[fi];
    k.at(f, fi) = 1;
    for (std::size_t pi = 0; pi < pivots.size(); ++pi) k.at(pivots[pi], fi) = -m.at(pi, f);
  }
  return k;
}

// is v in the column span of m?
inline bool in_column_span(const RatMatrix& m, const std::vector<Rat>& v) {
  RatMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols()) = v[i];
  }
  return rank(aug) == rank(m);
}

// column span of a contained in column span of b
inline bool span_subset(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() == 0) return true;
  RatMatrix joint = RatMatrix::hstack(b, a);
  return rank(joint) == rank(b);
}

inline bool span_equal(const RatMatrix& a, const RatMatrix& b) {
  return span_subset(a, b) && span_subset(b, a);
}

// basis (columns) of the intersection of two column spans
inline RatMatrix span_intersection(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() == 0 || b.cols() == 0) return RatMatrix(a.rows(), 0);
  // solve a x = b y: kernel of [a | -b]
  RatMatrix joint(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) joint.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) joint.at(i, a.cols() + j) = -b.at(i, j);
  }
  RatMatrix k = kernel(joint);
  RatMatrix out(a.rows(), k.cols());
  for (std::size_t c = 0; c < k.cols(); ++c)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      Rat s(0);
      for (std::size_t j = 0; j < a.cols(); ++j) s += a.at(i, j) * k.at(j, c);
      out.at(i, c) = s;
    }
  return out;
}

// any solution x of Mx = v, if one exists
inline std::optional<std::vector<Rat>> solve(const RatMatrix& m, const std::vector<Rat>& v) {
  RatMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols()) = v[i];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  std::vector<Rat> x(m.cols(), Rat(0));
  for (std::size_t pi = 0; pi < pivots.size(); ++pi) x[pivots[pi]] = aug.at(pi, m.cols());
  return x;
}

// inverse of a square invertible matrix
inline std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  std::size_t n = m.rows();
  if (n == 0) return RatMatrix(0, 0);
  RatMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = 1;
  }
  auto pivots = rref(aug);
  if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
  return inv;
}

// prune columns to a basis of the column span (first independent columns)
inline RatMatrix column_basis(const RatMatrix& m) {
  RatMatrix copy = m;
  auto pivots = rref(copy);
  RatMatrix out(m.rows(), pivots.size());
  for (std::size_t c = 0; c < pivots.size(); ++c)
    for (std::size_t i = 0; i < m.rows(); ++i) out.at(i, c) = m.at(i, pivots[c]);
  return out;
}

}  // namespace linalg

}  // namespace flagalg

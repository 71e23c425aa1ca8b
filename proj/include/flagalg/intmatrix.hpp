#pragma once

#include <flagalg/numeric.hpp>

#include <algorithm>
#include <cassert>
#include <optional>
#include <stdexcept>
#include <vector>

namespace flagalg {

// Dense matrix of arbitrary-precision integers, row-major.  Rows are the
// natural unit here: lattices are stored as row spans.
class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Int(0)) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : init) {
      if (r.size() != cols_) throw std::invalid_argument("ragged initializer");
      for (long long v : r) data_.emplace_back(v);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const IntMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const IntMatrix& o) const { return !(*this == o); }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  IntMatrix transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  IntMatrix operator*(const IntMatrix& o) const {
    assert(cols_ == o.rows_);
    IntMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        if (at(i, k) == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
      }
    return r;
  }

  std::vector<Int> row(std::size_t i) const {
    std::vector<Int> r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
    return r;
  }

  void set_row(std::size_t i, const std::vector<Int>& r) {
    assert(r.size() == cols_);
    for (std::size_t j = 0; j < cols_; ++j) at(i, j) = r[j];
  }

  // rows of `a` followed by rows of `b`
  static IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
    assert(a.cols() == b.cols() || a.rows() == 0 || b.rows() == 0);
    std::size_t c = a.rows() ? a.cols() : b.cols();
    IntMatrix m(a.rows() + b.rows(), c);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < c; ++j) m.at(i, j) = a.at(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < c; ++j) m.at(a.rows() + i, j) = b.at(i, j);
    return m;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Int& v) { return v == 0; });
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Int> data_;
};

namespace detail {

inline void negate_row(IntMatrix& m, std::size_t i) {
  for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = -m.at(i, j);
}

inline void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(a, j), m.at(b, j));
}

// row[i] -= q * row[p]
inline void submul_row(IntMatrix& m, std::size_t i, std::size_t p, const Int& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) -= q * m.at(p, j);
}

}  // namespace detail

struct HnfResult {
  IntMatrix h;          // canonical HNF, zero rows dropped
  IntMatrix transform;  // unimodular u with u * input = [h; zero rows]
  std::size_t rank = 0;
};

// Canonical row Hermite normal form: echelon, positive pivots, entries above
// each pivot reduced into [0, pivot).  Unique per row lattice.
inline HnfResult hnf_with_transform(const IntMatrix& input) {
  IntMatrix a = input;
  IntMatrix u = IntMatrix::identity(a.rows());
  std::size_t r = a.rows(), c = a.cols();
  std::size_t row = 0;
  for (std::size_t col = 0; col < c && row < r; ++col) {
    // eliminate below (row, col) by gcd steps
    while (true) {
      std::size_t best = r;
      for (std::size_t i = row; i < r; ++i) {
        if (a.at(i, col) == 0) continue;
        if (best == r || int_abs(a.at(i, col)) < int_abs(a.at(best, col))) best = i;
      }
      if (best == r) break;  // column clear
      detail::swap_rows(a, row, best);
      detail::swap_rows(u, row, best);
      bool clean = true;
      for (std::size_t i = row + 1; i < r; ++i) {
        if (a.at(i, col) == 0) continue;
        Int q = floor_div(a.at(i, col), a.at(row, col));
        detail::submul_row(a, i, row, q);
        detail::submul_row(u, i, row, q);
        if (a.at(i, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (a.at(row, col) == 0) continue;
    if (a.at(row, col) < 0) {
      detail::negate_row(a, row);
      detail::negate_row(u, row);
    }
    for (std::size_t i = 0; i < row; ++i) {
      Int q = floor_div(a.at(i, col), a.at(row, col));
      detail::submul_row(a, i, row, q);
      detail::submul_row(u, i, row, q);
    }
    ++row;
  }
  HnfResult out;
  out.rank = row;
  out.transform = u;
  IntMatrix h(row, c);
  for (std::size_t i = 0; i < row; ++i)
    for (std::size_t j = 0; j < c; ++j) h.at(i, j) = a.at(i, j);
  out.h = h;
  return out;
}

inline IntMatrix hnf(const IntMatrix& m) { return hnf_with_transform(m).h; }

inline std::size_t int_rank(const IntMatrix& m) { return hnf_with_transform(m).rank; }

// Basis (rows) of { x : x * m = 0 } as a lattice in Z^rows(m).
inline IntMatrix kernel_left(const IntMatrix& m) {
  HnfResult res = hnf_with_transform(m);
  std::size_t r = m.rows();
  IntMatrix k(r - res.rank, r);
  for (std::size_t i = res.rank; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) k.at(i - res.rank, j) = res.transform.at(i, j);
  return hnf(k);
}

// Does v lie in the row lattice of h?  h must be in HNF.
inline bool hnf_contains(const IntMatrix& h, std::vector<Int> v) {
  assert(v.size() == h.cols() || h.rows() == 0);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    std::size_t p = 0;
    while (p < h.cols() && h.at(i, p) == 0) ++p;
    if (p == h.cols()) continue;
    if (v[p] % h.at(i, p) != 0) return false;
    Int q = v[p] / h.at(i, p);
    for (std::size_t j = 0; j < h.cols(); ++j) v[j] -= q * h.at(i, j);
  }
  return std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
}

// Rational solve y * a = b; returns coefficients or nullopt when b is not in
// the rational row span of a.
inline std::optional<std::vector<Rat>> solve_left_rational(const IntMatrix& a,
                                                           const std::vector<Int>& b) {
  std::size_t r = a.rows(), c = a.cols();
  // Gaussian elimination on the c x (r+1) system a^T y^T = b^T.
  std::vector<std::vector<Rat>> m(c, std::vector<Rat>(r + 1));
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < r; ++j) m[i][j] = Rat(a.at(j, i));
    m[i][r] = Rat(b[i]);
  }
  std::vector<std::size_t> pivot_col;
  std::size_t prow = 0;
  for (std::size_t col = 0; col < r && prow < c; ++col) {
    std::size_t sel = c;
    for (std::size_t i = prow; i < c; ++i)
      if (m[i][col] != 0) { sel = i; break; }
    if (sel == c) continue;
    std::swap(m[prow], m[sel]);
    Rat inv = Rat(1) / m[prow][col];
    for (auto& x : m[prow]) x *= inv;
    for (std::size_t i = 0; i < c; ++i) {
      if (i == prow || m[i][col] == 0) continue;
      Rat f = m[i][col];
      for (std::size_t j = 0; j <= r; ++j) m[i][j] -= f * m[prow][j];
    }
    pivot_col.push_back(col);
    ++prow;
  }
  for (std::size_t i = prow; i < c; ++i)
    if (m[i][r] != 0) return std::nullopt;
  std::vector<Rat> y(r, Rat(0));
  for (std::size_t i = 0; i < pivot_col.size(); ++i) y[pivot_col[i]] = m[i][r];
  return y;
}

inline Rat det_rational(const IntMatrix& a) {
  assert(a.rows() == a.cols());
  std::size_t n = a.rows();
  std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = Rat(a.at(i, j));
  Rat det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = n;
    for (std::size_t i = col; i < n; ++i)
      if (m[i][col] != 0) { sel = i; break; }
    if (sel == n) return Rat(0);
    if (sel != col) { std::swap(m[sel], m[col]); det = -det; }
    det *= m[col][col];
    Rat inv = Rat(1) / m[col][col];
    for (std::size_t j = col; j < n; ++j) m[col][j] *= inv;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (m[i][col] == 0) continue;
      Rat f = m[i][col];
      for (std::size_t j = col; j < n; ++j) m[i][j] -= f * m[col][j];
    }
  }
  return det;
}

// Diagonal of the Smith normal form (nonnegative, each dividing the next,
// padded with zeros up to min(rows, cols)).
inline std::vector<Int> smith_diagonal(IntMatrix a) {
  std::size_t r = a.rows(), c = a.cols();
  std::size_t n = std::min(r, c);
  std::vector<Int> diag;
  std::size_t top = 0;
  while (top < std::min(r, c)) {
    // find a nonzero entry in the remaining block
    std::size_t pi = r, pj = c;
    for (std::size_t i = top; i < r && pi == r; ++i)
      for (std::size_t j = top; j < c; ++j)
        if (a.at(i, j) != 0) { pi = i; pj = j; break; }
    if (pi == r) break;
    detail::swap_rows(a, top, pi);
    for (std::size_t i = 0; i < r; ++i) std::swap(a.at(i, top), a.at(i, pj));
    bool again = true;
    while (again) {
      again = false;
      // clear column below/above with row ops
      for (std::size_t i = top + 1; i < r; ++i) {
        while (a.at(i, top) != 0) {
          Int q = floor_div(a.at(i, top), a.at(top, top));
          detail::submul_row(a, i, top, q);
          if (a.at(i, top) != 0) {
            detail::swap_rows(a, top, i);
            again = true;
          }
        }
      }
      // clear row with column ops
      for (std::size_t j = top + 1; j < c; ++j) {
        while (a.at(top, j) != 0) {
          Int q = floor_div(a.at(top, j), a.at(top, top));
          for (std::size_t i = 0; i < r; ++i) a.at(i, j) -= q * a.at(i, top);
          if (a.at(top, j) != 0) {
            for (std::size_t i = 0; i < r; ++i) std::swap(a.at(i, top), a.at(i, j));
            again = true;
          }
        }
      }
      // divisibility fix-up: pivot must divide every remaining entry
      if (!again) {
        for (std::size_t i = top + 1; i < r && !again; ++i)
          for (std::size_t j = top + 1; j < c && !again; ++j)
            if (a.at(i, j) % a.at(top, top) != 0) {
              for (std::size_t jj = 0; jj < c; ++jj) a.at(top, jj) += a.at(i, jj);
              again = true;
            }
      }
    }
    diag.push_back(int_abs(a.at(top, top)));
    ++top;
  }
  diag.resize(n, Int(0));
  return diag;
}

}  // namespace flagalg

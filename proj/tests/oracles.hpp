#pragma once

// Brute-force reference computations for the test suites.  These stay
// independent of the library's normal-form code paths: membership goes
// through rational solving / enumeration, torsion through Smith diagonals,
// indices through determinants.

#include <flagalg/intmatrix.hpp>
#include <flagalg/lattice.hpp>
#include <flagalg/subgroup.hpp>

#include <optional>
#include <vector>

namespace oracles {

using flagalg::Int;
using flagalg::IntMatrix;
using flagalg::Lattice;
using flagalg::Rat;

// v in row span of b over Z.  Rational solve plus integrality when rows are
// independent, otherwise bounded enumeration of coefficients.
inline bool member(const IntMatrix& b, const std::vector<Int>& v) {
  if (b.rows() == 0) {
    for (const auto& x : v)
      if (x != 0) return false;
    return true;
  }
  auto sol = flagalg::solve_left_rational(b, v);
  if (!sol) return false;
  if (flagalg::int_rank(b) == b.rows()) {
    for (const auto& y : *sol)
      if (boost::multiprecision::denominator(y) != 1) return false;
    return true;
  }
  // dependent rows: search |y_i| <= 60
  std::vector<Int> y(b.rows(), Int(0));
  const long long bound = 60;
  std::vector<long long> idx(b.rows(), -bound);
  while (true) {
    std::vector<Int> acc(v.size(), Int(0));
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) acc[j] += Int(idx[i]) * b.at(i, j);
    if (acc == v) return true;
    std::size_t k = 0;
    while (k < idx.size() && idx[k] == bound) idx[k++] = -bound;
    if (k == idx.size()) return false;
    ++idx[k];
  }
}

inline bool same_row_span(const IntMatrix& a, const IntMatrix& b) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (!member(b, a.row(i))) return false;
  for (std::size_t i = 0; i < b.rows(); ++i)
    if (!member(a, b.row(i))) return false;
  return true;
}

inline Int content_gcd(const IntMatrix& m) {
  Int g = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) g = flagalg::int_gcd(g, m.at(i, j));
  return g;
}

// index of n inside m for full-rank square bases, via determinants
inline Int index_via_det(const IntMatrix& m, const IntMatrix& n) {
  Rat dm = flagalg::det_rational(m);
  Rat dn = flagalg::det_rational(n);
  Rat q = dn / dm;
  Int num = boost::multiprecision::numerator(q);
  Int den = boost::multiprecision::denominator(q);
  if (den != 1) throw std::runtime_error("not a sublattice");
  return flagalg::int_abs(num);
}

// m/n torsion-free via the Smith diagonal of n written in m-coordinates
inline bool torsion_free_smith(const Lattice& m, const Lattice& n) {
  // coordinates of each n-basis row in the m-basis
  IntMatrix coords(n.basis().rows(), m.basis().rows());
  for (std::size_t i = 0; i < n.basis().rows(); ++i) {
    auto sol = flagalg::solve_left_rational(m.basis(), n.basis().row(i));
    if (!sol) return false;
    for (std::size_t j = 0; j < m.basis().rows(); ++j) {
      if (boost::multiprecision::denominator((*sol)[j]) != 1) return false;
      coords.at(i, j) = boost::multiprecision::numerator((*sol)[j]);
    }
  }
  for (const auto& d : flagalg::smith_diagonal(coords))
    if (d != 0 && d != 1) return false;
  return true;
}

}  // namespace oracles

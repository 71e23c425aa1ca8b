#pragma once

#include <flagalg/intmatrix.hpp>

#include <string>
#include <vector>

namespace flagalg {

// A sublattice of Z^ambient_rank stored by its canonical HNF basis (rows).
// Equality of lattices is bitwise equality of stored bases.
class Lattice {
 public:
  Lattice() : ambient_(0), basis_(0, 0) {}
  Lattice(std::size_t ambient_rank, const IntMatrix& generators)
      : ambient_(ambient_rank), basis_(hnf(generators)) {
    if (generators.rows() > 0 && generators.cols() != ambient_rank)
      throw std::invalid_argument("generator width != ambient rank");
    if (basis_.rows() == 0) basis_ = IntMatrix(0, ambient_rank);
  }

  static Lattice zero(std::size_t ambient_rank) {
    return Lattice(ambient_rank, IntMatrix(0, ambient_rank));
  }
  static Lattice full(std::size_t ambient_rank) {
    return Lattice(ambient_rank, IntMatrix::identity(ambient_rank));
  }

  std::size_t ambient_rank() const { return ambient_; }
  const IntMatrix& basis() const { return basis_; }
  std::size_t rank() const { return basis_.rows(); }

  bool operator==(const Lattice& o) const {
    return ambient_ == o.ambient_ && basis_ == o.basis_;
  }
  bool operator!=(const Lattice& o) const { return !(*this == o); }
  bool operator<(const Lattice& o) const {
    if (ambient_ != o.ambient_) return ambient_ < o.ambient_;
    if (basis_.rows() != o.basis_.rows()) return basis_.rows() < o.basis_.rows();
    for (std::size_t i = 0; i < basis_.rows(); ++i)
      for (std::size_t j = 0; j < basis_.cols(); ++j)
        if (basis_.at(i, j) != o.basis_.at(i, j)) return basis_.at(i, j) < o.basis_.at(i, j);
    return false;
  }

  bool contains_vector(const std::vector<Int>& v) const {
    return hnf_contains(basis_, v);
  }

  // sublattice containment: other subset of this
  bool contains(const Lattice& other) const {
    for (std::size_t i = 0; i < other.basis_.rows(); ++i)
      if (!contains_vector(other.basis_.row(i))) return false;
    return true;
  }

  friend Lattice intersect(const Lattice& a, const Lattice& b);
  friend Lattice saturate(const Lattice& l);
  friend Lattice sum(const Lattice& a, const Lattice& b);

 private:
  std::size_t ambient_;
  IntMatrix basis_;
};

// a + b as sublattices of the common ambient Z^r
inline Lattice sum(const Lattice& a, const Lattice& b) {
  return Lattice(a.ambient_rank(), IntMatrix::vstack(a.basis(), b.basis()));
}

// a meet b via the kernel of the stacked basis: pairs (x, y) with
// x*Ba = y*Bb, projected through Ba.
inline Lattice intersect(const Lattice& a, const Lattice& b) {
  std::size_t n = a.ambient_rank();
  const IntMatrix& ba = a.basis();
  const IntMatrix& bb = b.basis();
  IntMatrix neg(bb.rows(), n);
  for (std::size_t i = 0; i < bb.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) neg.at(i, j) = -bb.at(i, j);
  IntMatrix stacked = IntMatrix::vstack(ba, neg);
  IntMatrix ker = kernel_left(stacked);  // rows (x | y)
  IntMatrix gens(ker.rows(), n);
  for (std::size_t i = 0; i < ker.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Int s = 0;
      for (std::size_t k = 0; k < ba.rows(); ++k) s += ker.at(i, k) * ba.at(k, j);
      gens.at(i, j) = s;
    }
  return Lattice(n, gens);
}

// (l tensor Q) intersect Z^r: smallest saturated lattice containing l.
// Computed as the orthogonal complement of the orthogonal complement.
inline Lattice saturate(const Lattice& l) {
  IntMatrix w = kernel_left(l.basis().transposed());
  IntMatrix back = kernel_left(w.transposed());
  return Lattice(l.ambient_rank(), back);
}

inline bool is_saturated(const Lattice& l) { return saturate(l) == l; }

// Z^ambient / l is torsion-free iff l is saturated; more generally for
// n inside m, m/n is torsion-free iff (Q n) intersect m = n.
inline bool torsion_free_quotient(const Lattice& m, const Lattice& n) {
  return intersect(m, saturate(n)) == n;
}

}  // namespace flagalg

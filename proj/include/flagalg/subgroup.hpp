#pragma once

#include <flagalg/lattice.hpp>

#include <string>
#include <vector>

namespace flagalg {

// A character of T^r: an element of Z^r.
struct Character {
  std::vector<Int> vector;

  explicit Character(std::vector<Int> v) : vector(std::move(v)) {}
  static Character from(std::initializer_list<long long> v) {
    std::vector<Int> out;
    for (long long x : v) out.emplace_back(x);
    return Character(std::move(out));
  }
  std::size_t ambient_rank() const { return vector.size(); }
  Character power(const Int& n) const {
    std::vector<Int> out(vector.size());
    for (std::size_t i = 0; i < vector.size(); ++i) out[i] = n * vector[i];
    return Character(std::move(out));
  }
  bool is_trivial() const {
    for (const auto& x : vector)
      if (x != 0) return false;
    return true;
  }
  bool operator==(const Character& o) const { return vector == o.vector; }
};

// Closed subgroup of T^r, encoded dually by its annihilator lattice: the
// characters of T^r vanishing on it.  All order relations reduce to lattice
// algebra on annihilators (containment reverses).
class ClosedSubgroup {
 public:
  ClosedSubgroup() = default;
  ClosedSubgroup(std::size_t ambient_rank, Lattice annihilator, std::string name = "")
      : ambient_(ambient_rank), ann_(std::move(annihilator)), name_(std::move(name)) {
    if (ann_.ambient_rank() != ambient_) throw std::invalid_argument("annihilator rank mismatch");
  }

  static ClosedSubgroup full_torus(std::size_t r, std::string name = "T") {
    return ClosedSubgroup(r, Lattice::zero(r), std::move(name));
  }
  static ClosedSubgroup trivial(std::size_t r, std::string name = "1") {
    return ClosedSubgroup(r, Lattice::full(r), std::move(name));
  }
  static ClosedSubgroup from_annihilator(std::size_t r,
                                         std::initializer_list<std::initializer_list<long long>> gens,
                                         std::string name = "") {
    return ClosedSubgroup(r, Lattice(r, IntMatrix(gens)), std::move(name));
  }

  std::size_t ambient_rank() const { return ambient_; }
  const Lattice& annihilator() const { return ann_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  std::size_t dim() const { return ambient_ - ann_.rank(); }
  std::size_t codim() const { return ann_.rank(); }
  bool is_connected() const { return is_saturated(ann_); }
  bool is_full() const { return ann_.rank() == 0; }

  // identity is by canonical lattice form, not by display name
  bool operator==(const ClosedSubgroup& o) const {
    return ambient_ == o.ambient_ && ann_ == o.ann_;
  }
  bool operator!=(const ClosedSubgroup& o) const { return !(*this == o); }
  bool operator<(const ClosedSubgroup& o) const { return ann_ < o.ann_; }

 private:
  std::size_t ambient_ = 0;
  Lattice ann_;
  std::string name_;
};

inline void check_same_ambient(const ClosedSubgroup& a, const ClosedSubgroup& b) {
  if (a.ambient_rank() != b.ambient_rank())
    throw std::invalid_argument("ambient rank mismatch");
}

// h contains k, dually: annihilator(h) inside annihilator(k)
inline bool contains(const ClosedSubgroup& h, const ClosedSubgroup& k) {
  check_same_ambient(h, k);
  return k.annihilator().contains(h.annihilator());
}

inline ClosedSubgroup identity_component(const ClosedSubgroup& h) {
  std::string n = h.name().empty() ? "" : h.name() + "_0";
  return ClosedSubgroup(h.ambient_rank(), saturate(h.annihilator()), n);
}

// l cotoral in k: l inside k and k/l a torus.  Dually annihilator(k) is
// saturated inside annihilator(l).
inline bool is_cotoral(const ClosedSubgroup& l, const ClosedSubgroup& k) {
  check_same_ambient(l, k);
  if (!contains(k, l)) return false;
  return torsion_free_quotient(l.annihilator(), k.annihilator());
}

// The unique subgroup with identity component k containing ltilde cotorally:
// ltilde * k, dually the intersection of annihilators.
inline ClosedSubgroup join_istar(const ClosedSubgroup& ltilde, const ClosedSubgroup& k) {
  check_same_ambient(ltilde, k);
  if (!k.is_connected()) throw std::invalid_argument("join target not connected");
  if (!contains(k, identity_component(ltilde)))
    throw std::invalid_argument("identity component not inside join target");
  Lattice ann = intersect(ltilde.annihilator(), k.annihilator());
  std::string n;
  if (!ltilde.name().empty() && !k.name().empty()) n = ltilde.name() + "." + k.name();
  return ClosedSubgroup(ltilde.ambient_rank(), ann, n);
}

inline std::size_t dim(const ClosedSubgroup& h) { return h.dim(); }

// Cyclic subgroup C_n of the circle (rank 1): annihilator nZ.
inline ClosedSubgroup cyclic_rank1(long long n) {
  IntMatrix m(1, 1);
  m.at(0, 0) = n;
  std::string name = n == 1 ? "1" : "C" + std::to_string(n);
  return ClosedSubgroup(1, Lattice(1, m), name);
}

}  // namespace flagalg

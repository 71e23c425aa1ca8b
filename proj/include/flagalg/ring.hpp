#pragma once

#include <flagalg/polynomial.hpp>
#include <flagalg/subgroup.hpp>

#include <algorithm>
#include <cassert>
#include <string>
#include <vector>

namespace flagalg {

// Generator of a Borel polynomial ring, tied to a character lattice basis
// vector.  All generators sit in cohomological degree 2.
struct RingGenerator {
  std::string name;
  std::vector<Int> character;

  bool operator==(const RingGenerator& o) const {
    return name == o.name && character == o.character;
  }
};

// One factor of a (product) ring: a polynomial ring over Q together with
// the list of inverted generators of its multiplicative set.  An empty
// inverted list means no localization.
struct RingComponent {
  std::string label;
  std::vector<RingGenerator> gens;
  std::vector<Polynomial> inverted;
  // for product diagrams: the fiber member this factor belongs to
  std::optional<ClosedSubgroup> subject;

  std::size_t nvars() const { return gens.size(); }
  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& g : gens) n.push_back(g.name);
    return n;
  }

  Polynomial inverted_product() const {
    Polynomial p = Polynomial::constant(nvars(), 1);
    for (const auto& s : inverted) p = p * s;
    return p;
  }

  // structural equality of the underlying ring (labels excluded)
  bool same_ring(const RingComponent& o) const {
    return gens == o.gens && inverted == o.inverted;
  }
};

// f becomes a unit after inverting the component's multiplicative set.
// For homogeneous f over a UFD it suffices to test divisibility into
// (product of the inverted generators)^(weight of f).
inline bool is_unit_in_localization(const RingComponent& c, const Polynomial& f) {
  if (f.is_zero()) return false;
  if (f.is_constant()) return true;
  if (c.inverted.empty()) return false;
  Polynomial p = c.inverted_product();
  if (p.is_constant()) return false;
  int bound = monomial_weight(f.leading_term().first);
  return divides(f, p.pow(static_cast<unsigned>(bound)));
}

// Fraction over one component: num / prod(inverted[i]^den[i]).
struct LocPoly {
  Polynomial num;
  std::vector<int> den;  // aligned with component.inverted

  static LocPoly integral(const RingComponent& c, Polynomial p) {
    return LocPoly{std::move(p), std::vector<int>(c.inverted.size(), 0)};
  }
  bool den_trivial() const {
    return std::all_of(den.begin(), den.end(), [](int e) { return e == 0; });
  }
};

inline Polynomial den_poly(const RingComponent& c, const std::vector<int>& den) {
  Polynomial p = Polynomial::constant(c.nvars(), 1);
  for (std::size_t i = 0; i < c.inverted.size(); ++i)
    for (int k = 0; k < den[i]; ++k) p = p * c.inverted[i];
  return p;
}

// cross-multiplied equality (inverted generators are nonzerodivisors on the
// ring itself)
inline bool loc_equal(const RingComponent& c, const LocPoly& a, const LocPoly& b) {
  return (a.num * den_poly(c, b.den)) == (b.num * den_poly(c, a.den));
}

inline LocPoly loc_add(const RingComponent& c, const LocPoly& a, const LocPoly& b) {
  std::vector<int> den(a.den.size());
  for (std::size_t i = 0; i < den.size(); ++i) den[i] = std::max(a.den[i], b.den[i]);
  std::vector<int> ea(den.size()), eb(den.size());
  for (std::size_t i = 0; i < den.size(); ++i) {
    ea[i] = den[i] - a.den[i];
    eb[i] = den[i] - b.den[i];
  }
  return LocPoly{a.num * den_poly(c, ea) + b.num * den_poly(c, eb), den};
}

inline LocPoly loc_mul(const RingComponent& c, const LocPoly& a, const LocPoly& b) {
  std::vector<int> den(a.den.size());
  for (std::size_t i = 0; i < den.size(); ++i) den[i] = a.den[i] + b.den[i];
  return LocPoly{a.num * b.num, den};
  (void)c;
}

// Finite product of ring components; idempotents are implicit in the
// component decomposition.
struct Ring {
  std::vector<RingComponent> components;

  std::size_t size() const { return components.size(); }
  const RingComponent& operator[](std::size_t i) const { return components[i]; }

  bool same_ring(const Ring& o) const {
    if (components.size() != o.components.size()) return false;
    for (std::size_t i = 0; i < components.size(); ++i)
      if (!components[i].same_ring(o.components[i])) return false;
    return true;
  }
};

// Element of a product ring, one fraction per component.
struct RingElem {
  std::vector<LocPoly> parts;

  static RingElem zero(const Ring& r) {
    RingElem e;
    for (const auto& c : r.components)
      e.parts.push_back(LocPoly::integral(c, Polynomial::zero(c.nvars())));
    return e;
  }
  static RingElem one(const Ring& r) {
    RingElem e;
    for (const auto& c : r.components)
      e.parts.push_back(LocPoly::integral(c, Polynomial::constant(c.nvars(), 1)));
    return e;
  }
  // idempotent selecting one component
  static RingElem idempotent(const Ring& r, std::size_t comp) {
    RingElem e = zero(r);
    e.parts[comp].num = Polynomial::constant(r[comp].nvars(), 1);
    return e;
  }
};

inline RingElem ring_add(const Ring& r, const RingElem& a, const RingElem& b) {
  RingElem e;
  for (std::size_t i = 0; i < r.size(); ++i) e.parts.push_back(loc_add(r[i], a.parts[i], b.parts[i]));
  return e;
}
inline RingElem ring_mul(const Ring& r, const RingElem& a, const RingElem& b) {
  RingElem e;
  for (std::size_t i = 0; i < r.size(); ++i) e.parts.push_back(loc_mul(r[i], a.parts[i], b.parts[i]));
  return e;
}
inline bool ring_equal(const Ring& r, const RingElem& a, const RingElem& b) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!loc_equal(r[i], a.parts[i], b.parts[i])) return false;
  return true;
}
inline bool ring_is_unit(const Ring& r, const RingElem& a) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!is_unit_in_localization(r[i], a.parts[i].num)) return false;
  return true;
}

// image of one inverted source generator: scale * prod(target inverted^exps)
struct DenImage {
  Rat scale;
  std::vector<int> exps;
};

// Component of a ring map: which source component feeds this target
// component, where generators go, and how inverted generators transport.
struct RingMapComponent {
  std::size_t src;
  std::vector<Polynomial> gen_images;  // per source generator, in target vars
  std::vector<DenImage> den_images;    // per source inverted generator
};

// Unital degree-preserving map between product rings.  Each target
// component is fed by exactly one source component.
class RingMap {
 public:
  RingMap() = default;
  RingMap(Ring domain, Ring codomain, std::vector<RingMapComponent> comps)
      : dom_(std::move(domain)), cod_(std::move(codomain)), comps_(std::move(comps)) {
    if (comps_.size() != cod_.size()) throw std::invalid_argument("ring map component count");
    for (std::size_t t = 0; t < comps_.size(); ++t) {
      const auto& mc = comps_[t];
      const auto& sc = dom_[mc.src];
      const auto& tc = cod_[t];
      if (mc.gen_images.size() != sc.nvars()) throw std::invalid_argument("generator image count");
      for (const auto& img : mc.gen_images) {
        auto d = img.degree();
        if (!img.is_zero() && (!d || *d != 2))
          throw std::invalid_argument("generator image must have degree 2");
      }
      if (mc.den_images.size() != sc.inverted.size())
        throw std::invalid_argument("denominator image count");
      // verify each recorded denominator image against actual substitution
      for (std::size_t i = 0; i < sc.inverted.size(); ++i) {
        Polynomial image = sc.inverted[i].substitute(mc.gen_images, tc.nvars());
        Polynomial claimed = den_poly(tc, mc.den_images[i].exps) * mc.den_images[i].scale;
        if (image != claimed) throw std::invalid_argument("denominator image mismatch");
      }
    }
  }

  const Ring& domain() const { return dom_; }
  const Ring& codomain() const { return cod_; }
  const std::vector<RingMapComponent>& components() const { return comps_; }
  std::size_t source_component(std::size_t target_comp) const { return comps_[target_comp].src; }

  LocPoly apply_component(std::size_t t, const LocPoly& x) const {
    const auto& mc = comps_[t];
    const auto& tc = cod_[t];
    Polynomial num = x.num.substitute(mc.gen_images, tc.nvars());
    std::vector<int> den(tc.inverted.size(), 0);
    Rat scale(1);
    for (std::size_t i = 0; i < x.den.size(); ++i) {
      if (x.den[i] == 0) continue;
      for (std::size_t j = 0; j < den.size(); ++j) den[j] += x.den[i] * mc.den_images[i].exps[j];
      for (int k = 0; k < x.den[i]; ++k) scale *= mc.den_images[i].scale;
    }
    if (scale == 0) throw std::logic_error("denominator image not invertible");
    num = num * (Rat(1) / scale);
    return LocPoly{num, den};
  }

  RingElem operator()(const RingElem& x) const {
    RingElem out;
    for (std::size_t t = 0; t < cod_.size(); ++t)
      out.parts.push_back(apply_component(t, x.parts[comps_[t].src]));
    return out;
  }

  static RingMap identity(const Ring& r) {
    std::vector<RingMapComponent> comps;
    for (std::size_t i = 0; i < r.size(); ++i) {
      RingMapComponent mc;
      mc.src = i;
      for (std::size_t g = 0; g < r[i].nvars(); ++g)
        mc.gen_images.push_back(Polynomial::variable(r[i].nvars(), g));
      for (std::size_t s = 0; s < r[i].inverted.size(); ++s) {
        DenImage d;
        d.scale = Rat(1);
        d.exps.assign(r[i].inverted.size(), 0);
        d.exps[s] = 1;
        mc.den_images.push_back(d);
      }
      comps.push_back(std::move(mc));
    }
    return RingMap(r, r, std::move(comps));
  }

  friend RingMap compose(const RingMap& g, const RingMap& f);

  // maps agree when the component wiring and generator images agree
  bool same_map(const RingMap& o) const {
    if (!dom_.same_ring(o.dom_) || !cod_.same_ring(o.cod_)) return false;
    if (comps_.size() != o.comps_.size()) return false;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (comps_[i].src != o.comps_[i].src) return false;
      if (comps_[i].gen_images != o.comps_[i].gen_images) return false;
    }
    return true;
  }

 private:
  Ring dom_, cod_;
  std::vector<RingMapComponent> comps_;
};

// g after f
inline RingMap compose(const RingMap& g, const RingMap& f) {
  std::vector<RingMapComponent> comps;
  for (std::size_t t = 0; t < g.codomain().size(); ++t) {
    const auto& gc = g.components()[t];
    const auto& fc = f.components()[gc.src];
    RingMapComponent mc;
    mc.src = fc.src;
    for (const auto& img : fc.gen_images)
      mc.gen_images.push_back(img.substitute(gc.gen_images, g.codomain()[t].nvars()));
    for (std::size_t i = 0; i < fc.den_images.size(); ++i) {
      DenImage d;
      d.scale = fc.den_images[i].scale;
      d.exps.assign(g.codomain()[t].inverted.size(), 0);
      for (std::size_t j = 0; j < fc.den_images[i].exps.size(); ++j) {
        int e = fc.den_images[i].exps[j];
        if (e == 0) continue;
        for (std::size_t k = 0; k < d.exps.size(); ++k)
          d.exps[k] += e * gc.den_images[j].exps[k];
        for (int rep = 0; rep < e; ++rep) d.scale *= gc.den_images[j].scale;
      }
      mc.den_images.push_back(d);
    }
    comps.push_back(std::move(mc));
  }
  return RingMap(f.domain(), g.codomain(), std::move(comps));
}

// ---- Borel rings -----------------------------------------------------

// H^*(B G/K; Q) in the connected basis: polynomial on the canonical basis
// of the saturated annihilator of K.
inline RingComponent borel_component(const ClosedSubgroup& k, const std::string& label = "") {
  Lattice lam = saturate(k.annihilator());
  RingComponent c;
  c.label = label.empty() ? (k.name().empty() ? "R" : "R(G/" + k.name() + ")") : label;
  c.subject = k;
  for (std::size_t i = 0; i < lam.basis().rows(); ++i) {
    RingGenerator g;
    g.name = lam.basis().rows() == 1 ? "c" : "x" + std::to_string(i);
    g.character = lam.basis().row(i);
    c.gens.push_back(std::move(g));
  }
  return c;
}

inline Ring borel_ring(const ClosedSubgroup& k) { return Ring{{borel_component(k)}}; }

// Inflation between single Borel components along an inclusion of character
// lattices: expand each source basis vector in the target basis.
inline RingMapComponent inflation_component(const RingComponent& src, const RingComponent& tgt,
                                            std::size_t src_index = 0) {
  std::size_t width = 0;
  if (!tgt.gens.empty()) width = tgt.gens.front().character.size();
  else if (!src.gens.empty()) width = src.gens.front().character.size();
  IntMatrix tb(tgt.nvars(), width);
  for (std::size_t i = 0; i < tgt.nvars(); ++i)
    for (std::size_t j = 0; j < width; ++j) tb.at(i, j) = tgt.gens[i].character[j];
  RingMapComponent mc;
  mc.src = src_index;
  for (const auto& g : src.gens) {
    auto sol = solve_left_rational(tb, g.character);
    if (!sol) throw std::invalid_argument("inflation: character not in target span");
    Polynomial img(tgt.nvars());
    for (std::size_t j = 0; j < tgt.nvars(); ++j) {
      if ((*sol)[j] == 0) continue;
      Monomial mm(tgt.nvars(), 0);
      mm[j] = 1;
      img.add_term(mm, (*sol)[j]);
    }
    mc.gen_images.push_back(img);
  }
  return mc;
}

// inflation from G/K to G/L for L <= K, with no localization on either side
inline RingMap inflation(const ClosedSubgroup& k, const ClosedSubgroup& l) {
  check_same_ambient(k, l);
  if (!contains(k, l)) throw std::invalid_argument("inflation requires containment");
  Ring rk = borel_ring(k);
  Ring rl = borel_ring(l);
  RingMapComponent mc = inflation_component(rk[0], rl[0]);
  return RingMap(rk, rl, {mc});
}

}  // namespace flagalg

#pragma once

#include <flagalg/flags.hpp>
#include <flagalg/pairs.hpp>
#include <flagalg/ring.hpp>
#include <flagalg/sigma.hpp>

#include <map>
#include <memory>
#include <set>
#include <vector>

namespace flagalg {

enum class DiagramFlavor { Splitting, Coefficient, Pair };

// Index category of a ring diagram: the base poset itself (splitting
// systems), its flag poset, or its pair category.
struct DiagramIndex {
  enum class Kind { Base, Flags, Pairs } kind = Kind::Base;
  std::shared_ptr<const Poset> base;
  std::shared_ptr<const FlagPoset> flags;
  std::shared_ptr<const PairPoset> pairs;

  static DiagramIndex of_base(std::shared_ptr<const Poset> p) {
    DiagramIndex ix;
    ix.kind = Kind::Base;
    ix.base = std::move(p);
    return ix;
  }
  static DiagramIndex of_flags(std::shared_ptr<const Poset> p, std::size_t cap = 5000) {
    DiagramIndex ix;
    ix.kind = Kind::Flags;
    ix.base = p;
    ix.flags = std::make_shared<FlagPoset>(*ix.base, cap);
    return ix;
  }
  static DiagramIndex of_pairs(std::shared_ptr<const Poset> p) {
    DiagramIndex ix;
    ix.kind = Kind::Pairs;
    ix.base = p;
    ix.pairs = std::make_shared<PairPoset>(*ix.base);
    return ix;
  }

  std::size_t size() const {
    switch (kind) {
      case Kind::Base: return base->size();
      case Kind::Flags: return flags->size();
      case Kind::Pairs: return pairs->size();
    }
    return 0;
  }

  // arrow a -> b of the diagram (for splitting systems arrows run downward)
  bool arrow(std::size_t a, std::size_t b) const {
    switch (kind) {
      case Kind::Base: return a != b && base->leq(b, a);
      case Kind::Flags: return a != b && flags->leq(a, b);
      case Kind::Pairs: return a != b && pairs->leq(a, b);
    }
    return false;
  }

  std::string label(std::size_t i) const {
    switch (kind) {
      case Kind::Base: return base->node(i).label;
      case Kind::Flags: {
        std::string s = "(";
        const Flag& f = flags->flag(i);
        for (std::size_t k = 0; k < f.terms.size(); ++k) {
          if (k) s += ">";
          s += base->node(f.terms[k]).label;
        }
        return s + ")";
      }
      case Kind::Pairs: {
        const PairObj& p = pairs->pair(i);
        return "(" + base->node(p.first).label + ">=" + base->node(p.last).label + ")";
      }
    }
    return "";
  }
};

// A diagram of rings over a poset-shaped index: values on objects, ring
// maps on every arrow.  Composites along all length-2 paths are checked at
// construction.
class RingDiagram {
 public:
  RingDiagram() = default;
  RingDiagram(DiagramFlavor flavor, DiagramIndex index, std::vector<Ring> values,
              std::map<std::pair<std::size_t, std::size_t>, RingMap> generating_maps)
      : flavor_(flavor), index_(std::move(index)), values_(std::move(values)) {
    if (values_.size() != index_.size()) throw std::invalid_argument("value count mismatch");
    maps_ = std::move(generating_maps);
    close_and_check();
  }

  DiagramFlavor flavor() const { return flavor_; }
  const DiagramIndex& index() const { return index_; }
  std::size_t size() const { return index_.size(); }
  const Ring& value(std::size_t i) const { return values_[i]; }
  bool has_arrow(std::size_t a, std::size_t b) const { return index_.arrow(a, b); }
  const RingMap& map(std::size_t from, std::size_t to) const {
    auto it = maps_.find({from, to});
    if (it == maps_.end()) throw std::invalid_argument("no arrow between given objects");
    return it->second;
  }

 private:
  void close_and_check() {
    // verify provided arrows are legal and typed correctly
    for (const auto& [key, m] : maps_) {
      if (!index_.arrow(key.first, key.second)) throw std::invalid_argument("map on non-arrow");
      if (!m.domain().same_ring(values_[key.first]) || !m.codomain().same_ring(values_[key.second]))
        throw std::invalid_argument("map endpoints mismatch");
    }
    // saturate under composition; check agreement on repeats
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::pair<std::pair<std::size_t, std::size_t>, RingMap>> found;
      for (const auto& [ab, f] : maps_)
        for (const auto& [bc, g] : maps_) {
          if (ab.second != bc.first) continue;
          std::pair<std::size_t, std::size_t> ac{ab.first, bc.second};
          RingMap comp = compose(g, f);
          auto it = maps_.find(ac);
          if (it != maps_.end()) {
            if (!it->second.same_map(comp)) throw std::invalid_argument("diagram not functorial");
          } else {
            found.push_back({ac, comp});
          }
        }
      for (auto& [k, v] : found)
        if (maps_.emplace(k, std::move(v)).second) changed = true;
    }
    // every arrow must end up with a map
    for (std::size_t a = 0; a < size(); ++a)
      for (std::size_t b = 0; b < size(); ++b)
        if (index_.arrow(a, b) && !maps_.count({a, b}))
          throw std::invalid_argument("diagram arrows not generated by supplied maps");
  }

  DiagramFlavor flavor_ = DiagramFlavor::Splitting;
  DiagramIndex index_;
  std::vector<Ring> values_;
  std::map<std::pair<std::size_t, std::size_t>, RingMap> maps_;
};

namespace detail {

// locate `image` in the target's inverted list as scale * prod(gens^exps)
inline DenImage factor_over_inverted(const RingComponent& tc, Polynomial image) {
  DenImage d;
  d.exps.assign(tc.inverted.size(), 0);
  bool progress = true;
  while (!image.is_constant() && progress) {
    progress = false;
    for (std::size_t i = 0; i < tc.inverted.size(); ++i) {
      if (tc.inverted[i].is_constant()) continue;
      if (auto q = exact_divide(image, tc.inverted[i])) {
        image = *q;
        d.exps[i] += 1;
        progress = true;
        break;
      }
    }
  }
  if (!image.is_constant() || image.is_zero())
    throw std::invalid_argument("inverted generator image is not a unit in the target");
  d.scale = image.constant_value();
  return d;
}

}  // namespace detail

// Map component between localized components induced by a map of the
// underlying polynomial rings: all source inverted generators must land in
// units of the target.
inline RingMapComponent localized_component_map(const RingComponent& sc, const RingComponent& tc,
                                                std::vector<Polynomial> gen_images,
                                                std::size_t src_index) {
  RingMapComponent mc;
  mc.src = src_index;
  mc.gen_images = std::move(gen_images);
  for (const auto& s : sc.inverted) {
    Polynomial image = s.substitute(mc.gen_images, tc.nvars());
    mc.den_images.push_back(detail::factor_over_inverted(tc, image));
  }
  return mc;
}

// ---- splitting systems ------------------------------------------------

// The Borel splitting system on a subgroup poset: single polynomial ring
// per node, inflations as structure maps.
inline RingDiagram borel_splitting(std::shared_ptr<const Poset> sigma) {
  std::vector<Ring> values;
  for (std::size_t i = 0; i < sigma->size(); ++i)
    values.push_back(Ring{{borel_component(sigma->subgroup(i))}});
  std::map<std::pair<std::size_t, std::size_t>, RingMap> maps;
  for (std::size_t k = 0; k < sigma->size(); ++k)
    for (std::size_t l = 0; l < sigma->size(); ++l) {
      if (k == l || !sigma->leq(l, k)) continue;
      RingMapComponent mc = inflation_component(values[k][0], values[l][0]);
      maps.emplace(std::make_pair(k, l), RingMap(values[k], values[l], {mc}));
    }
  return RingDiagram(DiagramFlavor::Splitting, DiagramIndex::of_base(std::move(sigma)),
                     std::move(values), std::move(maps));
}

// Splitting system with multiplicities q_! R on the base of a multiplicity
// system: value at K is the product over the fiber of Borel rings in the
// connected basis, structure maps are products of diagonal inflations.
inline RingDiagram borel_splitting_with_multiplicities(std::shared_ptr<const Poset> sigma_c,
                                                       const Poset& sigma_a,
                                                       const MultiplicitySystem& fs) {
  std::vector<Ring> values;
  for (std::size_t k = 0; k < sigma_c->size(); ++k) {
    Ring r;
    for (std::size_t kt : fs.fiber(k)) {
      RingComponent c = borel_component(sigma_c->subgroup(k));
      c.subject = sigma_a.subgroup(kt);
      c.label = "R(G/" + sigma_a.subgroup(kt).name() + ")";
      r.components.push_back(std::move(c));
    }
    values.push_back(std::move(r));
  }
  std::map<std::pair<std::size_t, std::size_t>, RingMap> maps;
  for (std::size_t k = 0; k < sigma_c->size(); ++k)
    for (std::size_t l = 0; l < sigma_c->size(); ++l) {
      if (k == l || !sigma_c->leq(l, k)) continue;
      // target component lt receives from i_*(lt)
      std::vector<RingMapComponent> comps;
      const auto& fiber_l = fs.fiber(l);
      const auto& fiber_k = fs.fiber(k);
      for (std::size_t ci = 0; ci < fiber_l.size(); ++ci) {
        std::size_t kt = fs.push(fiber_l[ci], k);
        std::size_t src = 0;
        while (fiber_k[src] != kt) ++src;
        RingMapComponent mc = inflation_component(values[k][src], values[l][ci], src);
        comps.push_back(std::move(mc));
      }
      maps.emplace(std::make_pair(k, l), RingMap(values[k], values[l], std::move(comps)));
    }
  return RingDiagram(DiagramFlavor::Splitting, DiagramIndex::of_base(std::move(sigma_c)),
                     std::move(values), std::move(maps));
}

// ---- Euler classes -----------------------------------------------------

// c(alpha) on a component of codimension one: alpha must be a multiple of
// the primitive character cutting out the identity component h of htilde.
inline Polynomial euler_class(const Character& alpha, const ClosedSubgroup& htilde,
                              const ClosedSubgroup& h) {
  if (identity_component(htilde) != h) throw std::invalid_argument("h is not the identity component");
  if (h.codim() != 1) throw std::invalid_argument("codimension one required");
  Lattice lam = saturate(h.annihilator());
  auto v = lam.basis().row(0);
  // alpha = n * v
  auto sol = solve_left_rational(lam.basis(), alpha.vector);
  if (!sol || boost::multiprecision::denominator((*sol)[0]) != 1)
    throw std::invalid_argument("character is not a power of the faithful character");
  Int n = boost::multiprecision::numerator((*sol)[0]);
  if (n == 0) throw std::invalid_argument("trivial character has no Euler class");
  // |htilde / h| = index of the annihilator of htilde in Z*v
  auto w = htilde.annihilator().basis().row(0);
  auto msol = solve_left_rational(lam.basis(), w);
  Int m = boost::multiprecision::numerator((*msol)[0]);
  m = int_abs(m);
  if (n % m == 0) return Polynomial::variable(1, 0, Rat(n));
  return Polynomial::constant(1, Rat(1));
}

// A maximally generated system: chosen generators at maximal elements,
// realized anywhere below by the splitting system's inflations.
struct EulerGenerator {
  std::size_t node;  // maximal element of the base poset
  std::string name;
  RingElem value;  // integral element of the diagram value at `node`
};

class EulerSystem {
 public:
  EulerSystem() = default;
  EulerSystem(const RingDiagram* splitting, std::vector<EulerGenerator> gens)
      : diagram_(splitting), gens_(std::move(gens)) {
    const Poset& base = *splitting->index().base;
    std::set<std::size_t> maximal;
    for (std::size_t m : base.maximal_elements()) maximal.insert(m);
    for (const auto& g : gens_) {
      if (!maximal.count(g.node)) throw std::invalid_argument("generator not at a maximal element");
      for (const auto& part : g.value.parts)
        if (!part.den_trivial()) throw std::invalid_argument("generator must be integral");
    }
  }

  const RingDiagram& diagram() const { return *diagram_; }
  const std::vector<EulerGenerator>& generators() const { return gens_; }

  RingElem realize(const EulerGenerator& g, std::size_t at_node) const {
    if (g.node == at_node) return g.value;
    return diagram_->map(g.node, at_node)(g.value);
  }

  // generators of E_{K/L}: symbols living above L whose maximal element
  // does not lie above K
  std::vector<const EulerGenerator*> set_generators(std::size_t upper_k,
                                                    std::size_t lower_l) const {
    const Poset& base = *diagram_->index().base;
    std::vector<const EulerGenerator*> out;
    for (const auto& g : gens_)
      if (base.leq(lower_l, g.node) && !base.leq(upper_k, g.node)) out.push_back(&g);
    return out;
  }

  // realized numerator polynomials per component of the value at L
  std::vector<std::vector<Polynomial>> realize_set(std::size_t upper_k,
                                                   std::size_t lower_l) const {
    const Ring& rl = diagram_->value(lower_l);
    std::vector<std::vector<Polynomial>> out(rl.size());
    for (const EulerGenerator* g : set_generators(upper_k, lower_l)) {
      RingElem e = realize(*g, lower_l);
      for (std::size_t c = 0; c < rl.size(); ++c) out[c].push_back(e.parts[c].num);
    }
    return out;
  }

  bool transitivity_check(std::size_t h, std::size_t k, std::size_t l) const {
    const Poset& base = *diagram_->index().base;
    if (!(base.leq(l, k) && base.leq(k, h))) throw std::invalid_argument("not a chain");
    auto side_a = realize_set(h, l);
    // <infl E_{H/K}, E_{K/L}> realized at L
    auto side_b = realize_set(k, l);
    {
      const Poset& b2 = base;
      for (const auto& g : gens_)
        if (b2.leq(k, g.node) && !b2.leq(h, g.node)) {
          RingElem e = realize(g, l);
          for (std::size_t c = 0; c < side_b.size(); ++c) side_b[c].push_back(e.parts[c].num);
        }
    }
    const Ring& rl = diagram_->value(l);
    return mutually_saturated(rl, side_a, side_b);
  }

  // both generator families give the same localization of `ring`
  static bool mutually_saturated(const Ring& ring,
                                 const std::vector<std::vector<Polynomial>>& a,
                                 const std::vector<std::vector<Polynomial>>& b) {
    for (std::size_t c = 0; c < ring.size(); ++c) {
      RingComponent ca = ring[c];
      ca.inverted = a[c];
      RingComponent cb = ring[c];
      cb.inverted = b[c];
      for (const auto& f : a[c])
        if (!is_unit_in_localization(cb, f)) return false;
      for (const auto& f : b[c])
        if (!is_unit_in_localization(ca, f)) return false;
    }
    return true;
  }

 private:
  const RingDiagram* diagram_ = nullptr;
  std::vector<EulerGenerator> gens_;
};

enum class EulerVariant { Natural, DiagonalInflation, Componentwise };

// Standard maximally generated systems on Borel splitting diagrams whose
// maximal elements have codimension one.
inline EulerSystem euler_system_standard(const RingDiagram* splitting,
                                         EulerVariant variant = EulerVariant::Natural) {
  const Poset& base = *splitting->index().base;
  auto maximal = base.maximal_elements();
  if (maximal.empty()) throw std::invalid_argument("no maximal elements");
  std::vector<EulerGenerator> gens;
  for (std::size_t h : maximal) {
    const ClosedSubgroup& sub_h = base.subgroup(h);
    if (sub_h.dim() + 1 != sub_h.ambient_rank())
      throw std::invalid_argument("maximal element not of codimension one");
    const Ring& rh = splitting->value(h);
    // per-component index |Htilde / H|
    std::vector<Int> idx;
    for (const auto& comp : rh.components) {
      if (!comp.subject) throw std::invalid_argument("component without subject");
      Lattice lam = saturate(sub_h.annihilator());
      auto w = comp.subject->annihilator().basis().row(0);
      auto sol = solve_left_rational(lam.basis(), w);
      idx.push_back(int_abs(boost::multiprecision::numerator((*sol)[0])));
    }
    Int lcm_all(1);
    for (const auto& m : idx) lcm_all = int_lcm(lcm_all, m);

    switch (variant) {
      case EulerVariant::Natural: {
        // c(alpha^n) for n up to the lcm of the component indices
        for (Int n = 1; n <= lcm_all; ++n) {
          RingElem e = RingElem::one(rh);
          bool nontrivial = false;
          for (std::size_t c = 0; c < rh.size(); ++c) {
            if (n % idx[c] == 0) {
              e.parts[c].num = Polynomial::variable(1, 0, Rat(n));
              nontrivial = true;
            }
          }
          if (nontrivial)
            gens.push_back(EulerGenerator{h, "c(a^" + n.str() + ")@" + base.node(h).label, e});
        }
        break;
      }
      case EulerVariant::DiagonalInflation: {
        RingElem e = RingElem::one(rh);
        for (std::size_t c = 0; c < rh.size(); ++c) e.parts[c].num = Polynomial::variable(1, 0);
        gens.push_back(EulerGenerator{h, "c(a)diag@" + base.node(h).label, e});
        break;
      }
      case EulerVariant::Componentwise: {
        for (std::size_t c = 0; c < rh.size(); ++c) {
          RingElem e = RingElem::one(rh);
          e.parts[c].num = Polynomial::variable(1, 0);
          gens.push_back(EulerGenerator{
              h, "c(a)@" + base.node(h).label + "/" + rh[c].label, e});
        }
        break;
      }
    }
  }
  return EulerSystem(splitting, std::move(gens));
}

// ---- coefficient systems on flags and pairs ---------------------------

namespace detail {

// b is a nonzero rational multiple of a
inline bool scalar_multiple(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  auto q = exact_divide(b, a);
  return q && q->is_constant();
}

// add an inverted generator unless a scalar multiple is already present
inline void push_inverted(RingComponent& rc, const Polynomial& p) {
  if (p.is_constant() || p.is_zero()) return;
  for (const auto& q : rc.inverted)
    if (scalar_multiple(q, p)) return;
  rc.inverted.push_back(p);
}

// value ring of the flag/pair (upper, lower): base ring at `lower` with
// E_{upper/lower} inverted
inline Ring localized_value(const RingDiagram& splitting, const EulerSystem& sys,
                            std::size_t upper, std::size_t lower) {
  Ring r = splitting.value(lower);
  auto inv = sys.realize_set(upper, lower);
  for (std::size_t c = 0; c < r.size(); ++c)
    for (auto& p : inv[c]) push_inverted(r.components[c], p);
  return r;
}

// map between two localized values over a base-diagram arrow upperE/lowerE
// -> upperF/lowerF (with lowerF <= lowerE, upperE <= upperF)
inline RingMap localized_map(const RingDiagram& splitting, const Ring& from, const Ring& to,
                             std::size_t lower_from, std::size_t lower_to) {
  std::vector<RingMapComponent> comps;
  if (lower_from == lower_to) {
    for (std::size_t c = 0; c < to.size(); ++c) {
      std::vector<Polynomial> ids;
      for (std::size_t g = 0; g < from[c].nvars(); ++g)
        ids.push_back(Polynomial::variable(from[c].nvars(), g));
      comps.push_back(localized_component_map(from[c], to[c], std::move(ids), c));
    }
  } else {
    const RingMap& base_map = splitting.map(lower_from, lower_to);
    for (std::size_t c = 0; c < to.size(); ++c) {
      const auto& bc = base_map.components()[c];
      comps.push_back(localized_component_map(from[bc.src], to[c], bc.gen_images, bc.src));
    }
  }
  return RingMap(from, to, std::move(comps));
}

}  // namespace detail

// R^f on flag(Sigma): value at F is E^{-1}_{f(F)/l(F)} R(G/l(F)).
inline RingDiagram splitting_to_coefficient(const RingDiagram& splitting, const EulerSystem& sys,
                                            std::size_t flag_cap = 5000) {
  DiagramIndex ix = DiagramIndex::of_flags(splitting.index().base, flag_cap);
  std::vector<Ring> values;
  for (std::size_t i = 0; i < ix.size(); ++i) {
    const Flag& f = ix.flags->flag(i);
    values.push_back(detail::localized_value(splitting, sys, f.first(), f.last()));
  }
  std::map<std::pair<std::size_t, std::size_t>, RingMap> maps;
  for (std::size_t e = 0; e < ix.size(); ++e)
    for (std::size_t f = 0; f < ix.size(); ++f) {
      if (e == f || !ix.flags->leq(e, f)) continue;
      const Flag& fe = ix.flags->flag(e);
      const Flag& ff = ix.flags->flag(f);
      maps.emplace(std::make_pair(e, f),
                   detail::localized_map(splitting, values[e], values[f], fe.last(), ff.last()));
    }
  return RingDiagram(DiagramFlavor::Coefficient, std::move(ix), std::move(values), std::move(maps));
}

// R^p on qp(Sigma): value at (K >= L) is E^{-1}_{K/L} R(G/L).
inline RingDiagram coefficient_to_pairs(const RingDiagram& splitting, const EulerSystem& sys) {
  DiagramIndex ix = DiagramIndex::of_pairs(splitting.index().base);
  std::vector<Ring> values;
  for (std::size_t i = 0; i < ix.size(); ++i) {
    const PairObj& p = ix.pairs->pair(i);
    values.push_back(detail::localized_value(splitting, sys, p.first, p.last));
  }
  std::map<std::pair<std::size_t, std::size_t>, RingMap> maps;
  for (std::size_t a = 0; a < ix.size(); ++a)
    for (std::size_t b = 0; b < ix.size(); ++b) {
      if (a == b || !ix.pairs->leq(a, b)) continue;
      const PairObj& pa = ix.pairs->pair(a);
      const PairObj& pb = ix.pairs->pair(b);
      maps.emplace(std::make_pair(a, b),
                   detail::localized_map(splitting, values[a], values[b], pa.last, pb.last));
    }
  return RingDiagram(DiagramFlavor::Pair, std::move(ix), std::move(values), std::move(maps));
}

// R^f from R^p by reading off first and last terms of each flag.
inline RingDiagram pairs_to_flags(const RingDiagram& rp, std::size_t flag_cap = 5000) {
  if (rp.flavor() != DiagramFlavor::Pair) throw std::invalid_argument("pair diagram required");
  DiagramIndex ix = DiagramIndex::of_flags(rp.index().base, flag_cap);
  const PairPoset& qp = *rp.index().pairs;
  std::vector<Ring> values;
  for (std::size_t i = 0; i < ix.size(); ++i) {
    const Flag& f = ix.flags->flag(i);
    values.push_back(rp.value(qp.index_of(f.first(), f.last())));
  }
  std::map<std::pair<std::size_t, std::size_t>, RingMap> maps;
  for (std::size_t e = 0; e < ix.size(); ++e)
    for (std::size_t f = 0; f < ix.size(); ++f) {
      if (e == f || !ix.flags->leq(e, f)) continue;
      const Flag& fe = ix.flags->flag(e);
      const Flag& ff = ix.flags->flag(f);
      maps.emplace(std::make_pair(e, f),
                   rp.map(qp.index_of(fe.first(), fe.last()), qp.index_of(ff.first(), ff.last())));
    }
  return RingDiagram(DiagramFlavor::Coefficient, std::move(ix), std::move(values), std::move(maps));
}

}  // namespace flagalg

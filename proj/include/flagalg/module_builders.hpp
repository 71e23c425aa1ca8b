#pragma once

#include <flagalg/predicates.hpp>

#include <vector>

namespace flagalg {

namespace detail {

// re-home an integral element onto a component with a different inverted
// list (same polynomial ring)
inline ModElement rehome_element(const RingComponent& rc_new, const ModElement& e) {
  ModElement out;
  out.windowed = e.windowed;
  out.degree = e.degree;
  out.level = e.level;
  out.vec = e.vec;
  for (const auto& c : e.coords) {
    if (!c.den_trivial()) throw std::logic_error("rehoming a non-integral element");
    out.coords.push_back(LocPoly::integral(rc_new, c.num));
  }
  return out;
}

inline CompMap rehome_map(const RingComponent& rc_new, const CompMap& f) {
  if (f.kind != CompMap::Kind::ByGenerators) return f;
  CompMap out;
  out.kind = CompMap::Kind::ByGenerators;
  for (const auto& img : f.gen_images) out.gen_images.push_back(rehome_element(rc_new, img));
  return out;
}

inline CompMap identity_comp_map(const RingComponent& rc, const CompModule& m) {
  if (m.is_zero()) return CompMap::zero_map();
  std::vector<ModElement> imgs;
  for (std::size_t j = 0; j < m.gen_degrees.size(); ++j)
    imgs.push_back(ModElement::generator(rc, m, j));
  return CompMap::by_generators(std::move(imgs));
}

}  // namespace detail

// Extend a module over the splitting system to the flag coefficient system:
// the value at a flag is the (localized reading of the) value at its last
// element, which makes the result quasicoherent by construction.
inline ModuleDiagram extend_to_flags(const ModuleDiagram& node_data, const RingDiagram& rf) {
  const FlagPoset& fp = *rf.index().flags;
  std::vector<ModValue> values;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    const Flag& f = fp.flag(i);
    ModValue v = node_data.value(f.last());
    values.push_back(std::move(v));
  }
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps;
  for (std::size_t e = 0; e < fp.size(); ++e)
    for (std::size_t f = 0; f < fp.size(); ++f) {
      if (e == f || !fp.leq(e, f)) continue;
      const Flag& fe = fp.flag(e);
      const Flag& ff = fp.flag(f);
      ModMap mm;
      for (std::size_t ct = 0; ct < rf.value(f).size(); ++ct) {
        const RingComponent& rc_new = rf.value(f)[ct];
        if (fe.last() == ff.last()) {
          mm.comps.push_back(detail::identity_comp_map(rc_new, values[f].comps[ct]));
        } else {
          const CompMap& base = node_data.map(fe.last(), ff.last()).comps[ct];
          mm.comps.push_back(detail::rehome_map(rc_new, base));
        }
      }
      maps.emplace(std::make_pair(e, f), std::move(mm));
    }
  return ModuleDiagram(&rf, std::move(values), std::move(maps));
}

// Pair-diagram analogue: the value at (K >= L) reads the node value at L.
inline ModuleDiagram extend_to_pairs(const ModuleDiagram& node_data, const RingDiagram& rp) {
  const PairPoset& qp = *rp.index().pairs;
  std::vector<ModValue> values;
  for (std::size_t i = 0; i < qp.size(); ++i) values.push_back(node_data.value(qp.pair(i).last));
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps;
  for (std::size_t a = 0; a < qp.size(); ++a)
    for (std::size_t b = 0; b < qp.size(); ++b) {
      if (a == b || !qp.leq(a, b)) continue;
      ModMap mm;
      for (std::size_t ct = 0; ct < rp.value(b).size(); ++ct) {
        const RingComponent& rc_new = rp.value(b)[ct];
        if (qp.pair(a).last == qp.pair(b).last) {
          mm.comps.push_back(detail::identity_comp_map(rc_new, values[b].comps[ct]));
        } else {
          const CompMap& base = node_data.map(qp.pair(a).last, qp.pair(b).last).comps[ct];
          mm.comps.push_back(detail::rehome_map(rc_new, base));
        }
      }
      maps.emplace(std::make_pair(a, b), std::move(mm));
    }
  return ModuleDiagram(&rp, std::move(values), std::move(maps));
}

// Free module over the splitting system with the given shifts.
inline ModuleDiagram free_node_module(const RingDiagram& rs, const std::vector<int>& degrees) {
  std::vector<ModValue> values;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    ModValue v;
    for (std::size_t c = 0; c < rs.value(i).size(); ++c)
      v.comps.push_back(CompModule::free_module(degrees));
    values.push_back(std::move(v));
  }
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps;
  for (std::size_t a = 0; a < rs.size(); ++a)
    for (std::size_t b = 0; b < rs.size(); ++b) {
      if (!rs.has_arrow(a, b)) continue;
      ModMap mm;
      for (std::size_t ct = 0; ct < rs.value(b).size(); ++ct)
        mm.comps.push_back(detail::identity_comp_map(rs.value(b)[ct], values[b].comps[ct]));
      maps.emplace(std::make_pair(a, b), std::move(mm));
    }
  return ModuleDiagram(&rs, std::move(values), std::move(maps));
}

// Torsion module concentrated at the subgroup node k: at nodes L <= k the
// quotient of the node ring by the len-th powers of the Euler classes of
// maximal elements above k, zero elsewhere.  Extending to flags or pairs
// yields a qce module supported on the chains through k.
inline ModuleDiagram torsion_node_module(const RingDiagram& rs, const EulerSystem& sys,
                                         std::size_t k, int len, int shift = 0) {
  const Poset& base = *rs.index().base;
  std::vector<const EulerGenerator*> defining;
  for (const auto& g : sys.generators())
    if (base.leq(k, g.node)) defining.push_back(&g);
  if (defining.empty()) throw std::invalid_argument("no defining Euler classes above the node");

  std::vector<ModValue> values;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    ModValue v;
    const Ring& r = rs.value(i);
    if (!base.leq(i, k)) {
      for (std::size_t c = 0; c < r.size(); ++c) v.comps.push_back(CompModule::zero());
    } else {
      // relations per component: realized class powers
      std::vector<std::vector<std::vector<Polynomial>>> rels(r.size());
      for (const EulerGenerator* g : defining) {
        RingElem e = sys.realize(*g, i);
        for (std::size_t c = 0; c < r.size(); ++c)
          rels[c].push_back({e.parts[c].num.pow(static_cast<unsigned>(len))});
      }
      for (std::size_t c = 0; c < r.size(); ++c)
        v.comps.push_back(CompModule::presented({shift}, rels[c], {"t"}));
    }
    values.push_back(std::move(v));
  }
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps;
  for (std::size_t a = 0; a < rs.size(); ++a)
    for (std::size_t b = 0; b < rs.size(); ++b) {
      if (!rs.has_arrow(a, b)) continue;
      ModMap mm;
      for (std::size_t ct = 0; ct < rs.value(b).size(); ++ct) {
        if (values[a].comps[rs.map(a, b).components()[ct].src].is_zero() ||
            values[b].comps[ct].is_zero()) {
          mm.comps.push_back(CompMap::zero_map());
        } else {
          mm.comps.push_back(detail::identity_comp_map(rs.value(b)[ct], values[b].comps[ct]));
        }
      }
      maps.emplace(std::make_pair(a, b), std::move(mm));
    }
  return ModuleDiagram(&rs, std::move(values), std::move(maps));
}

}  // namespace flagalg

#pragma once

#include <flagalg/functors.hpp>

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace flagalg {

// A fully built desk-scale instance: closed subgroup universe, the three
// posets, the standard diagrams, and the Euler systems.  Everything is
// owned here; diagrams and systems hold pointers into the instance, so the
// object is pinned behind a unique_ptr.
struct Instance {
  std::string name;
  std::size_t rank = 1;
  std::vector<ClosedSubgroup> universe;
  std::size_t closure_added = 0;
  EulerVariant variant = EulerVariant::Natural;

  std::shared_ptr<const Poset> sigma_a, sigma_c, sigma_d;
  std::unique_ptr<PosetMap> q;  // sigma_a -> sigma_c
  std::unique_ptr<PosetMap> d;  // sigma_c -> sigma_d
  std::unique_ptr<MultiplicitySystem> mult;

  RingDiagram ra_s;  // splitting on sigma_a
  RingDiagram rc_s;  // q_! of it on sigma_c
  EulerSystem sys_a, sys_c;
  RingDiagram ra_p;  // pairs over sigma_a
  RingDiagram rc_f;  // flags over sigma_c
  RingDiagram rc_p;  // pairs over sigma_c
  RingDiagram rd_f;  // d_!^e of rc_f, flags over sigma_d

  Instance() = default;
  Instance(const Instance&) = delete;
  Instance& operator=(const Instance&) = delete;
};

inline std::unique_ptr<Instance> gen_standard_instance(std::vector<ClosedSubgroup> seed,
                                                       std::string name,
                                                       EulerVariant variant = EulerVariant::Natural) {
  auto inst = std::make_unique<Instance>();
  inst->name = std::move(name);
  if (seed.empty()) throw std::invalid_argument("empty universe");
  inst->rank = seed.front().ambient_rank();
  auto rep = close_universe(std::move(seed));
  inst->universe = std::move(rep.universe);
  inst->closure_added = rep.added;
  inst->variant = variant;

  std::vector<ClosedSubgroup> connected;
  for (const auto& h : inst->universe)
    if (h.is_connected()) connected.push_back(h);
  inst->sigma_a = std::make_shared<Poset>(build_sigma_a(inst->universe));
  inst->sigma_c = std::make_shared<Poset>(build_sigma_c(connected));
  inst->sigma_d = std::make_shared<Poset>(build_sigma_d(static_cast<int>(inst->rank)));
  inst->q = std::make_unique<PosetMap>(quotient_map_q(*inst->sigma_a, *inst->sigma_c));
  inst->d = std::make_unique<PosetMap>(dimension_map(*inst->sigma_c, *inst->sigma_d));
  inst->mult = std::make_unique<MultiplicitySystem>(*inst->q);

  inst->ra_s = borel_splitting(inst->sigma_a);
  inst->rc_s = borel_splitting_with_multiplicities(inst->sigma_c, *inst->sigma_a, *inst->mult);
  inst->sys_a = euler_system_standard(&inst->ra_s, EulerVariant::Natural);
  inst->sys_c = euler_system_standard(&inst->rc_s, variant);
  inst->ra_p = coefficient_to_pairs(inst->ra_s, inst->sys_a);
  inst->rc_f = splitting_to_coefficient(inst->rc_s, inst->sys_c);
  inst->rc_p = coefficient_to_pairs(inst->rc_s, inst->sys_c);
  inst->rd_f = pi_shriek_e_rings(inst->rc_s, inst->sys_c, inst->rc_f, *inst->d);
  return inst;
}

// canned universes
inline std::unique_ptr<Instance> make_instance(const std::string& key,
                                               EulerVariant variant = EulerVariant::Natural) {
  if (key == "rank1") {
    return gen_standard_instance({ClosedSubgroup::trivial(1, "1"), cyclic_rank1(2), cyclic_rank1(3),
                                  ClosedSubgroup::full_torus(1, "T")},
                                 "rank1", variant);
  }
  if (key == "rank1-minimal") {
    return gen_standard_instance(
        {ClosedSubgroup::trivial(1, "1"), ClosedSubgroup::full_torus(1, "T")}, "rank1-minimal",
        variant);
  }
  if (key == "rank2") {
    return gen_standard_instance(
        {ClosedSubgroup::trivial(2, "1"), ClosedSubgroup::from_annihilator(2, {{1, -1}}, "Hdiag"),
         ClosedSubgroup::from_annihilator(2, {{0, 1}}, "Hx"),
         ClosedSubgroup::from_annihilator(2, {{2, 0}, {0, 1}}, "C2x1"),
         ClosedSubgroup::full_torus(2, "T2")},
        "rank2", variant);
  }
  throw std::invalid_argument("unknown instance key: " + key);
}

// ---------------------------------------------------------------------
// Module corpus generation
// ---------------------------------------------------------------------

// direct sum of two modules over the same splitting diagram, generatorwise
inline ModuleDiagram sum_node_modules(const ModuleDiagram& a, const ModuleDiagram& b) {
  const RingDiagram& rs = a.over();
  std::vector<ModValue> values;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    ModValue v;
    for (std::size_t c = 0; c < rs.value(i).size(); ++c) {
      const CompModule& x = a.value(i).comps[c];
      const CompModule& y = b.value(i).comps[c];
      if (x.is_zero() && y.is_zero()) {
        v.comps.push_back(CompModule::zero());
        continue;
      }
      CompModule s;
      s.backend = CompModule::Backend::Presented;
      auto absorb = [&](const CompModule& m, const std::string& tag) {
        std::size_t base = s.gen_degrees.size();
        for (std::size_t g = 0; g < m.gen_degrees.size(); ++g) {
          s.gen_degrees.push_back(m.gen_degrees[g]);
          s.gen_labels.push_back(tag + std::to_string(g));
        }
        for (const auto& rel : m.relations) {
          std::vector<Polynomial> row(s.gen_degrees.size(), Polynomial::zero(rs.value(i)[c].nvars()));
          for (std::size_t g = 0; g < rel.size(); ++g) row[base + g] = rel[g];
          s.relations.push_back(std::move(row));
        }
      };
      absorb(x, "a");
      absorb(y, "b");
      for (auto& rel : s.relations) rel.resize(s.gen_degrees.size(), Polynomial::zero(rs.value(i)[c].nvars()));
      if (s.relations.empty()) s.backend = CompModule::Backend::Free;
      v.comps.push_back(std::move(s));
    }
    values.push_back(std::move(v));
  }
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps;
  for (std::size_t x = 0; x < rs.size(); ++x)
    for (std::size_t y = 0; y < rs.size(); ++y) {
      if (!rs.has_arrow(x, y)) continue;
      ModMap mm;
      for (std::size_t ct = 0; ct < rs.value(y).size(); ++ct) {
        std::size_t cs = rs.map(x, y).components()[ct].src;
        const CompMap& fa = a.map(x, y).comps[ct];
        const CompMap& fb = b.map(x, y).comps[ct];
        const CompModule& target = values[y].comps[ct];
        const RingComponent& rc = rs.value(y)[ct];
        if (target.is_zero()) {
          mm.comps.push_back(CompMap::zero_map());
          continue;
        }
        std::vector<ModElement> images;
        std::size_t na = a.value(y).comps[ct].gen_degrees.size();
        auto lift = [&](const CompMap& f, const CompModule& src_val, std::size_t offset) {
          std::size_t nsrc = src_val.gen_degrees.size();
          for (std::size_t g = 0; g < nsrc; ++g) {
            ModElement e = ModElement::zero(rc, target);
            if (f.kind == CompMap::Kind::ByGenerators) {
              const ModElement& img = f.gen_images[g];
              for (std::size_t k = 0; k < img.coords.size(); ++k)
                e.coords[offset + k] = img.coords[k];
            }
            images.push_back(std::move(e));
          }
        };
        lift(fa, a.value(x).comps[cs], 0);
        lift(fb, b.value(x).comps[cs], na);
        mm.comps.push_back(CompMap::by_generators(std::move(images)));
      }
      maps.emplace(std::make_pair(x, y), std::move(mm));
    }
  return ModuleDiagram(&rs, std::move(values), std::move(maps));
}

enum class GenModuleKind { Free, Torsion, Suspension, RandomQce };

// nodes strictly below the top: torsion lives away from the top element
inline std::vector<std::size_t> proper_nodes(const Poset& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (i != p.top()) out.push_back(i);
  if (out.empty()) out.push_back(p.top());
  return out;
}

// seeded corpus generator over the splitting system; extend to flags or
// pairs afterwards
inline ModuleDiagram gen_node_module(const Instance& inst, GenModuleKind kind,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const RingDiagram& rs = inst.rc_s;
  switch (kind) {
    case GenModuleKind::Free:
      return free_node_module(rs, {0});
    case GenModuleKind::Suspension: {
      std::uniform_int_distribution<int> shift(-3, 3);
      return free_node_module(rs, {2 * shift(rng)});
    }
    case GenModuleKind::Torsion: {
      auto nodes = proper_nodes(*inst.sigma_c);
      std::uniform_int_distribution<std::size_t> node(0, nodes.size() - 1);
      std::uniform_int_distribution<int> len(1, 3);
      return torsion_node_module(rs, inst.sys_c, nodes[node(rng)], len(rng));
    }
    case GenModuleKind::RandomQce: {
      std::uniform_int_distribution<int> nfree(1, 2), shift(-2, 2), len(1, 2), coin(0, 1);
      std::vector<int> degs;
      for (int i = 0; i < nfree(rng); ++i) degs.push_back(2 * shift(rng));
      ModuleDiagram m = free_node_module(rs, degs);
      if (coin(rng)) {
        auto nodes = proper_nodes(*inst.sigma_c);
        std::uniform_int_distribution<std::size_t> node(0, nodes.size() - 1);
        m = sum_node_modules(m, torsion_node_module(rs, inst.sys_c, nodes[node(rng)], len(rng)));
      }
      return m;
    }
  }
  throw std::logic_error("unreachable");
}

inline ModuleDiagram gen_module_flags(const Instance& inst, GenModuleKind kind,
                                      std::uint64_t seed) {
  return extend_to_flags(gen_node_module(inst, kind, seed), inst.rc_f);
}
inline ModuleDiagram gen_module_pairs(const Instance& inst, GenModuleKind kind,
                                      std::uint64_t seed) {
  return extend_to_pairs(gen_node_module(inst, kind, seed), inst.rc_p);
}

// the same generator over the sigma_a pair diagram (single components)
inline ModuleDiagram gen_node_module_a(const Instance& inst, GenModuleKind kind,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const RingDiagram& rs = inst.ra_s;
  switch (kind) {
    case GenModuleKind::Free:
      return free_node_module(rs, {0});
    case GenModuleKind::Suspension: {
      std::uniform_int_distribution<int> shift(-3, 3);
      return free_node_module(rs, {2 * shift(rng)});
    }
    case GenModuleKind::Torsion: {
      auto nodes = proper_nodes(*inst.sigma_a);
      std::uniform_int_distribution<std::size_t> node(0, nodes.size() - 1);
      std::uniform_int_distribution<int> len(1, 3);
      return torsion_node_module(rs, inst.sys_a, nodes[node(rng)], len(rng));
    }
    case GenModuleKind::RandomQce: {
      std::uniform_int_distribution<int> nfree(1, 2), shift(-2, 2), len(1, 2), coin(0, 1);
      std::vector<int> degs;
      for (int i = 0; i < nfree(rng); ++i) degs.push_back(2 * shift(rng));
      ModuleDiagram m = free_node_module(rs, degs);
      if (coin(rng)) {
        auto nodes = proper_nodes(*inst.sigma_a);
        std::uniform_int_distribution<std::size_t> node(0, nodes.size() - 1);
        m = sum_node_modules(m, torsion_node_module(rs, inst.sys_a, nodes[node(rng)], len(rng)));
      }
      return m;
    }
  }
  throw std::logic_error("unreachable");
}

inline ModuleDiagram gen_module_pairs_a(const Instance& inst, GenModuleKind kind,
                                        std::uint64_t seed) {
  return extend_to_pairs(gen_node_module_a(inst, kind, seed), inst.ra_p);
}

}  // namespace flagalg

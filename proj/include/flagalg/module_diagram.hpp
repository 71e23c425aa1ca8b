#pragma once

#include <flagalg/module_value.hpp>

#include <map>
#include <vector>

namespace flagalg {

// Module value over a product ring: one component value per ring factor
// (modules over finite products split canonically).
struct ModValue {
  std::vector<CompModule> comps;

  bool operator==(const ModValue& o) const { return comps == o.comps; }
  bool is_zero() const {
    for (const auto& c : comps)
      if (!c.is_zero()) return false;
    return true;
  }
};

// Structure map between module values, one component map per component of
// the *target* ring (wired through the underlying ring map).
struct ModMap {
  std::vector<CompMap> comps;
};

// A module over a diagram of rings: values on objects, semilinear maps on
// arrows.
class ModuleDiagram {
 public:
  ModuleDiagram() = default;
  ModuleDiagram(const RingDiagram* over, std::vector<ModValue> values,
                std::map<std::pair<std::size_t, std::size_t>, ModMap> maps)
      : over_(over), values_(std::move(values)), maps_(std::move(maps)) {
    if (values_.size() != over_->size()) throw std::invalid_argument("module value count");
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i].comps.size() != over_->value(i).size())
        throw std::invalid_argument("module component count at object " + std::to_string(i));
    for (std::size_t a = 0; a < values_.size(); ++a)
      for (std::size_t b = 0; b < values_.size(); ++b) {
        if (!over_->has_arrow(a, b)) continue;
        auto it = maps_.find({a, b});
        if (it == maps_.end()) throw std::invalid_argument("missing module map on an arrow");
        if (it->second.comps.size() != over_->value(b).size())
          throw std::invalid_argument("module map component count");
      }
  }

  const RingDiagram& over() const { return *over_; }
  std::size_t size() const { return values_.size(); }
  const ModValue& value(std::size_t i) const { return values_[i]; }
  const ModMap& map(std::size_t a, std::size_t b) const { return maps_.at({a, b}); }

  // exact structural equality (same ring diagram shape assumed)
  bool same_as(const ModuleDiagram& o) const {
    if (values_.size() != o.values_.size()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!(values_[i] == o.values_[i])) return false;
    for (const auto& [k, m] : maps_) {
      auto it = o.maps_.find(k);
      if (it == o.maps_.end()) return false;
      if (m.comps.size() != it->second.comps.size()) return false;
      for (std::size_t c = 0; c < m.comps.size(); ++c) {
        const CompMap& x = m.comps[c];
        const CompMap& y = it->second.comps[c];
        if (x.kind != y.kind) return false;
        if (x.kind == CompMap::Kind::ByGenerators) {
          if (x.gen_images.size() != y.gen_images.size()) return false;
          for (std::size_t g = 0; g < x.gen_images.size(); ++g) {
            if (x.gen_images[g].windowed != y.gen_images[g].windowed) return false;
            if (x.gen_images[g].windowed) {
              if (x.gen_images[g].vec != y.gen_images[g].vec) return false;
            } else {
              if (x.gen_images[g].coords.size() != y.gen_images[g].coords.size()) return false;
              const RingComponent& rc = over_->value(k.second)[c];
              for (std::size_t t = 0; t < x.gen_images[g].coords.size(); ++t)
                if (!loc_equal(rc, x.gen_images[g].coords[t], y.gen_images[g].coords[t]))
                  return false;
            }
          }
        } else if (x.kind == CompMap::Kind::ByMatrices) {
          if (x.out_level != y.out_level || !(x.matrices == y.matrices)) return false;
        }
      }
    }
    return true;
  }

 private:
  const RingDiagram* over_ = nullptr;
  std::vector<ModValue> values_;
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps_;
};

// The ring diagram as a module over itself.
inline ModuleDiagram ring_as_module(const RingDiagram& r) {
  std::vector<ModValue> values;
  for (std::size_t i = 0; i < r.size(); ++i) {
    ModValue v;
    for (std::size_t c = 0; c < r.value(i).size(); ++c)
      v.comps.push_back(CompModule::free_module({0}, {"1"}));
    values.push_back(std::move(v));
  }
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps;
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r.size(); ++b) {
      if (!r.has_arrow(a, b)) continue;
      ModMap m;
      for (std::size_t c = 0; c < r.value(b).size(); ++c) {
        ModElement img = ModElement::generator(r.value(b)[c], CompModule::free_module({0}), 0);
        m.comps.push_back(CompMap::by_generators({img}));
      }
      maps.emplace(std::make_pair(a, b), std::move(m));
    }
  return ModuleDiagram(&r, std::move(values), std::move(maps));
}

// value on the length-0 flag (or diagonal pair) of a node
inline const ModValue& phi_value(const ModuleDiagram& m, std::size_t node) {
  const DiagramIndex& ix = m.over().index();
  switch (ix.kind) {
    case DiagramIndex::Kind::Base:
      return m.value(node);
    case DiagramIndex::Kind::Flags:
      return m.value(ix.flags->index_of(singleton_flag(node)));
    case DiagramIndex::Kind::Pairs:
      return m.value(ix.pairs->index_of(node, node));
  }
  throw std::logic_error("unreachable");
}

}  // namespace flagalg

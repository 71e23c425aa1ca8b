#pragma once

#include <flagalg/poset.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

namespace flagalg {

constexpr std::size_t kUniverseCap = 64;

// Close a subgroup universe under identity components and joins
// join_istar(lt, k).  Reports how many members were added.
struct ClosureReport {
  std::vector<ClosedSubgroup> universe;
  std::size_t added = 0;
};

inline ClosureReport close_universe(std::vector<ClosedSubgroup> universe) {
  auto has = [&](const ClosedSubgroup& h) {
    return std::any_of(universe.begin(), universe.end(),
                       [&](const ClosedSubgroup& u) { return u == h; });
  };
  ClosureReport rep;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<ClosedSubgroup> found;
    for (const auto& h : universe) {
      auto h0 = identity_component(h);
      if (!has(h0) && std::none_of(found.begin(), found.end(),
                                   [&](const ClosedSubgroup& u) { return u == h0; }))
        found.push_back(h0);
    }
    for (const auto& lt : universe)
      for (const auto& k : universe) {
        if (!k.is_connected() || !contains(k, identity_component(lt))) continue;
        auto j = join_istar(lt, k);
        if (!has(j) && std::none_of(found.begin(), found.end(),
                                    [&](const ClosedSubgroup& u) { return u == j; }))
          found.push_back(j);
      }
    for (auto& f : found) {
      universe.push_back(f);
      ++rep.added;
      changed = true;
      if (universe.size() > kUniverseCap) throw std::runtime_error("universe exceeds size cap");
    }
  }
  rep.universe = std::move(universe);
  return rep;
}

namespace detail {

inline std::vector<PosetNode> subgroup_nodes(std::vector<ClosedSubgroup> universe) {
  std::sort(universe.begin(), universe.end());
  std::vector<PosetNode> nodes;
  nodes.reserve(universe.size());
  for (auto& h : universe) nodes.push_back(PosetNode::of(std::move(h)));
  return nodes;
}

}  // namespace detail

// Sigma_c: connected subgroups under containment, top T^r.
inline Poset build_sigma_c(const std::vector<ClosedSubgroup>& universe) {
  if (universe.empty()) throw std::invalid_argument("empty universe");
  std::size_t r = universe.front().ambient_rank();
  bool has_top = false;
  for (const auto& h : universe) {
    if (!h.is_connected()) throw std::invalid_argument("non-connected member in sigma_c universe");
    if (h.is_full()) has_top = true;
  }
  if (!has_top) throw std::invalid_argument("sigma_c universe missing the full torus");
  (void)r;
  return Poset(detail::subgroup_nodes(universe), [](const PosetNode& a, const PosetNode& b) {
    return contains(*b.subgroup, *a.subgroup);
  });
}

// Sigma_a: all closed subgroups under the cotoral order, top T^r.
inline Poset build_sigma_a(const std::vector<ClosedSubgroup>& universe) {
  if (universe.empty()) throw std::invalid_argument("empty universe");
  bool has_top = false;
  for (const auto& h : universe)
    if (h.is_full()) has_top = true;
  if (!has_top) throw std::invalid_argument("sigma_a universe missing the full torus");
  return Poset(detail::subgroup_nodes(universe), [](const PosetNode& a, const PosetNode& b) {
    return is_cotoral(*a.subgroup, *b.subgroup);
  });
}

// Sigma_d: the chain [0, r].
inline Poset build_sigma_d(int r) {
  if (r < 0) throw std::invalid_argument("negative rank");
  std::vector<PosetNode> nodes;
  for (int i = 0; i <= r; ++i) nodes.push_back(PosetNode::of_level(i));
  return Poset(std::move(nodes), [](const PosetNode& a, const PosetNode& b) {
    return *a.level <= *b.level;
  });
}

// d: Sigma_c -> [0, r], requiring every dimension to occur.
inline PosetMap dimension_map(const Poset& sigma_c, const Poset& sigma_d) {
  std::vector<std::size_t> assign(sigma_c.size());
  for (std::size_t i = 0; i < sigma_c.size(); ++i) {
    int d = static_cast<int>(sigma_c.subgroup(i).dim());
    auto idx = sigma_d.index_of_level(d);
    if (!idx) throw std::invalid_argument("dimension outside target chain");
    assign[i] = *idx;
  }
  return PosetMap(&sigma_c, &sigma_d, std::move(assign));
}

// q: Sigma_a -> Sigma_c, taking identity components.
inline PosetMap quotient_map_q(const Poset& sigma_a, const Poset& sigma_c) {
  std::vector<std::size_t> assign(sigma_a.size());
  for (std::size_t i = 0; i < sigma_a.size(); ++i) {
    auto idx = sigma_c.index_of_subgroup(identity_component(sigma_a.subgroup(i)));
    if (!idx) throw std::invalid_argument("identity component missing from sigma_c");
    assign[i] = *idx;
  }
  return PosetMap(&sigma_a, &sigma_c, std::move(assign));
}

// Multiplicity system attached to a quotient-style poset map: fibers plus
// the pushforwards i_*.  Axioms are asserted at construction.
class MultiplicitySystem {
 public:
  MultiplicitySystem(const PosetMap& q) : q_(&q) {
    const Poset& base = q.codomain();
    const Poset& tot = q.domain();
    fibers_.resize(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) fibers_[k] = q.fiber(k);
    if (fibers_[base.top()].size() != 1)
      throw std::invalid_argument("fiber over the top is not a singleton");
    for (std::size_t k = 0; k < base.size(); ++k)
      for (std::size_t a : fibers_[k])
        for (std::size_t b : fibers_[k])
          if (a != b && tot.leq(a, b))
            throw std::invalid_argument("fiber elements must be incomparable");
    // pushforwards: for lt over l and k >= l there must be a unique kt over
    // k with lt <= kt
    for (std::size_t l = 0; l < base.size(); ++l)
      for (std::size_t k = 0; k < base.size(); ++k) {
        if (!base.leq(l, k)) continue;
        for (std::size_t lt : fibers_[l]) {
          std::size_t count = 0, found = 0;
          for (std::size_t kt : fibers_[k])
            if (tot.leq(lt, kt)) { ++count; found = kt; }
          if (count != 1) throw std::invalid_argument("pushforward not unique");
          push_[{lt, k}] = found;
        }
        // surjectivity of i_*
        std::set<std::size_t> image;
        for (std::size_t lt : fibers_[l]) image.insert(push_[{lt, k}]);
        if (image.size() != fibers_[k].size())
          throw std::invalid_argument("pushforward not surjective");
      }
  }

  const PosetMap& q() const { return *q_; }
  const std::vector<std::size_t>& fiber(std::size_t base_node) const {
    return fibers_[base_node];
  }
  // i_* of a total-poset element into the fiber over base_node
  std::size_t push(std::size_t lt, std::size_t base_node) const {
    return push_.at({lt, base_node});
  }

 private:
  const PosetMap* q_;
  std::vector<std::vector<std::size_t>> fibers_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> push_;
};

}  // namespace flagalg

#pragma once

#include <flagalg/subgroup.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace flagalg {

// A node of an index poset: a closed subgroup, or a bare level for the
// dimension poset [0, r].
struct PosetNode {
  std::optional<ClosedSubgroup> subgroup;
  std::optional<int> level;
  std::string label;

  static PosetNode of(ClosedSubgroup h) {
    PosetNode n;
    n.label = h.name();
    n.subgroup = std::move(h);
    return n;
  }
  static PosetNode of_level(int k) {
    PosetNode n;
    n.level = k;
    n.label = std::to_string(k);
    return n;
  }

  bool same_identity(const PosetNode& o) const {
    if (subgroup && o.subgroup) return *subgroup == *o.subgroup;
    if (level && o.level) return *level == *o.level;
    return false;
  }
};

// Finite poset with a designated top element.  The order matrix is
// validated at construction: reflexive, antisymmetric, transitive, top
// maximum.
class Poset {
 public:
  Poset() = default;
  Poset(std::vector<PosetNode> nodes, std::function<bool(const PosetNode&, const PosetNode&)> leq)
      : nodes_(std::move(nodes)) {
    std::size_t n = nodes_.size();
    if (n == 0) throw std::invalid_argument("empty poset");
    leq_.assign(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) leq_[i][j] = leq(nodes_[i], nodes_[j]) ? 1 : 0;
    validate();
  }

  std::size_t size() const { return nodes_.size(); }
  const PosetNode& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<PosetNode>& nodes() const { return nodes_; }
  bool leq(std::size_t i, std::size_t j) const { return leq_[i][j] != 0; }
  bool lt(std::size_t i, std::size_t j) const { return i != j && leq_[i][j] != 0; }
  std::size_t top() const { return top_; }

  const ClosedSubgroup& subgroup(std::size_t i) const {
    if (!nodes_[i].subgroup) throw std::logic_error("node carries no subgroup");
    return *nodes_[i].subgroup;
  }

  std::optional<std::size_t> index_of_subgroup(const ClosedSubgroup& h) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].subgroup && *nodes_[i].subgroup == h) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> index_of_level(int k) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].level && *nodes_[i].level == k) return i;
    return std::nullopt;
  }

  // elements covered only by the top
  std::vector<std::size_t> maximal_elements() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) {
      if (i == top_) continue;
      bool maximal = true;
      for (std::size_t j = 0; j < size(); ++j)
        if (j != i && j != top_ && lt(i, j)) { maximal = false; break; }
      if (maximal) out.push_back(i);
    }
    return out;
  }

  std::optional<std::size_t> bottom() const {
    for (std::size_t i = 0; i < size(); ++i) {
      bool below_all = true;
      for (std::size_t j = 0; j < size(); ++j)
        if (!leq(i, j)) { below_all = false; break; }
      if (below_all) return i;
    }
    return std::nullopt;
  }

 private:
  void validate() {
    std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i)
      if (!leq_[i][i]) throw std::invalid_argument("order not reflexive");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && leq_[i][j] && leq_[j][i]) throw std::invalid_argument("order not antisymmetric");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (leq_[i][j] && leq_[j][k] && !leq_[i][k])
            throw std::invalid_argument("order not transitive");
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      bool is_top = true;
      for (std::size_t j = 0; j < n; ++j)
        if (!leq_[j][i]) { is_top = false; break; }
      if (is_top) { top_ = i; found = true; break; }
    }
    if (!found) throw std::invalid_argument("poset has no top element");
  }

  std::vector<PosetNode> nodes_;
  std::vector<std::vector<char>> leq_;
  std::size_t top_ = 0;
};

// Monotone surjection between posets.  Maps used to reindex flags must be
// strictly monotone and euler-compatible (top to top, maximal onto maximal);
// both are checked when the flag is set.
class PosetMap {
 public:
  PosetMap() = default;
  PosetMap(const Poset* domain, const Poset* codomain, std::vector<std::size_t> assignment,
           bool euler_compatible = true)
      : dom_(domain), cod_(codomain), map_(std::move(assignment)) {
    if (map_.size() != dom_->size()) throw std::invalid_argument("assignment size mismatch");
    for (std::size_t i = 0; i < dom_->size(); ++i)
      for (std::size_t j = 0; j < dom_->size(); ++j) {
        if (dom_->leq(i, j) && !cod_->leq(map_[i], map_[j]))
          throw std::invalid_argument("poset map not monotone");
        if (dom_->lt(i, j) && map_[i] == map_[j])
          throw std::invalid_argument("poset map not strictly monotone");
      }
    std::set<std::size_t> image(map_.begin(), map_.end());
    if (image.size() != cod_->size()) throw std::invalid_argument("poset map not surjective");
    if (euler_compatible) {
      if (map_[dom_->top()] != cod_->top()) throw std::invalid_argument("top not preserved");
      std::set<std::size_t> max_img;
      for (std::size_t m : dom_->maximal_elements()) max_img.insert(map_[m]);
      for (std::size_t m : cod_->maximal_elements())
        if (!max_img.count(m)) throw std::invalid_argument("maximal elements not covered");
      for (std::size_t m : dom_->maximal_elements()) {
        bool ok = map_[m] == cod_->top();
        for (std::size_t mm : cod_->maximal_elements()) ok = ok || map_[m] == mm;
        if (!ok) throw std::invalid_argument("maximal element not sent to maximal element");
      }
    }
  }

  const Poset& domain() const { return *dom_; }
  const Poset& codomain() const { return *cod_; }
  std::size_t operator()(std::size_t i) const { return map_[i]; }
  std::vector<std::size_t> fiber(std::size_t j) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < map_.size(); ++i)
      if (map_[i] == j) out.push_back(i);
    return out;
  }

 private:
  const Poset* dom_ = nullptr;
  const Poset* cod_ = nullptr;
  std::vector<std::size_t> map_;
};

}  // namespace flagalg

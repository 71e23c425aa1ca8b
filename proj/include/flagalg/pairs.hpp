#pragma once

#include <flagalg/poset.hpp>

#include <algorithm>
#include <map>
#include <vector>

namespace flagalg {

// Object (first >= last) of the pair category qp(Sigma).
struct PairObj {
  std::size_t first;
  std::size_t last;

  bool operator==(const PairObj& o) const { return first == o.first && last == o.last; }
  bool operator<(const PairObj& o) const {
    return first != o.first ? first < o.first : last < o.last;
  }
  bool diagonal() const { return first == last; }
};

// qp(Sigma): all comparable pairs, ordered by enlarging the first term and
// shrinking the last.  Morphisms factor as horizontal (first grows) after
// vertical (last shrinks).
class PairPoset {
 public:
  explicit PairPoset(const Poset& base) : base_(&base) {
    for (std::size_t k = 0; k < base.size(); ++k)
      for (std::size_t l = 0; l < base.size(); ++l)
        if (base.leq(l, k)) pairs_.push_back(PairObj{k, l});
    std::sort(pairs_.begin(), pairs_.end());
    for (std::size_t i = 0; i < pairs_.size(); ++i) index_[pairs_[i]] = i;
  }

  const Poset& base() const { return *base_; }
  std::size_t size() const { return pairs_.size(); }
  const PairObj& pair(std::size_t i) const { return pairs_[i]; }
  const std::vector<PairObj>& pairs() const { return pairs_; }

  std::size_t index_of(const PairObj& p) const { return index_.at(p); }
  std::size_t index_of(std::size_t first, std::size_t last) const {
    return index_.at(PairObj{first, last});
  }

  bool leq(std::size_t a, std::size_t b) const {
    const PairObj& p = pairs_[a];
    const PairObj& q = pairs_[b];
    return base_->leq(p.first, q.first) && base_->leq(q.last, p.last);
  }

  bool horizontal(std::size_t a, std::size_t b) const {
    return leq(a, b) && pairs_[a].last == pairs_[b].last;
  }
  bool vertical(std::size_t a, std::size_t b) const {
    return leq(a, b) && pairs_[a].first == pairs_[b].first;
  }

 private:
  const Poset* base_;
  std::vector<PairObj> pairs_;
  std::map<PairObj, std::size_t> index_;
};

}  // namespace flagalg

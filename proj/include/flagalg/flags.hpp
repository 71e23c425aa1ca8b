#pragma once

#include <flagalg/poset.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace flagalg {

// A flag is a strictly decreasing chain of poset nodes, largest first.
// Stored as node indices into the underlying poset.
struct Flag {
  std::vector<std::size_t> terms;

  std::size_t length() const { return terms.size() - 1; }  // |F|
  std::size_t first() const { return terms.front(); }      // f(F)
  std::size_t last() const { return terms.back(); }        // l(F)

  bool operator==(const Flag& o) const { return terms == o.terms; }
  bool operator<(const Flag& o) const {
    if (terms.size() != o.terms.size()) return terms.size() < o.terms.size();
    return terms < o.terms;
  }

  // omit the i-th term; 0 <= i <= |F|
  Flag face(std::size_t i) const {
    if (terms.size() <= 1) throw std::invalid_argument("cannot take a face of a 0-flag");
    if (i >= terms.size()) throw std::out_of_range("face index out of range");
    Flag e;
    for (std::size_t k = 0; k < terms.size(); ++k)
      if (k != i) e.terms.push_back(terms[k]);
    return e;
  }

  // is this flag a subflag (subsequence) of f?
  bool subflag_of(const Flag& f) const {
    std::size_t k = 0;
    for (std::size_t t : f.terms) {
      if (k < terms.size() && terms[k] == t) ++k;
    }
    return k == terms.size();
  }
};

inline Flag singleton_flag(std::size_t node) { return Flag{{node}}; }

// All nondegenerate flags of a finite poset, as a poset under subflag
// inclusion.  Construction rejects degenerate chains by definition of the
// enumeration and enforces the global size cap.
class FlagPoset {
 public:
  explicit FlagPoset(const Poset& base, std::size_t cap = 5000) : base_(&base) {
    // chains by DFS, descending from each start node
    std::vector<std::size_t> order(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) order[i] = i;
    for (std::size_t start : order) {
      Flag f{{start}};
      extend(f, cap);
    }
    std::sort(flags_.begin(), flags_.end());
    for (std::size_t i = 0; i < flags_.size(); ++i) index_[flags_[i]] = i;
  }

  const Poset& base() const { return *base_; }
  std::size_t size() const { return flags_.size(); }
  const Flag& flag(std::size_t i) const { return flags_[i]; }
  const std::vector<Flag>& flags() const { return flags_; }

  std::size_t index_of(const Flag& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) throw std::invalid_argument("no such flag");
    return it->second;
  }

  bool leq(std::size_t e, std::size_t f) const { return flags_[e].subflag_of(flags_[f]); }

  std::vector<Flag> flags_of_length(std::size_t s) const {
    std::vector<Flag> out;
    for (const auto& f : flags_)
      if (f.length() == s) out.push_back(f);
    return out;
  }

 private:
  void extend(Flag& f, std::size_t cap) {
    flags_.push_back(f);
    if (flags_.size() > cap) throw std::runtime_error("flag poset exceeds size cap");
    std::size_t tail = f.terms.back();
    for (std::size_t next = 0; next < base_->size(); ++next) {
      if (base_->lt(next, tail)) {
        f.terms.push_back(next);
        extend(f, cap);
        f.terms.pop_back();
      }
    }
  }

  const Poset* base_;
  std::vector<Flag> flags_;
  std::map<Flag, std::size_t> index_;
};

// enumeration entry point mirroring the operation contract: all s-flags
inline std::vector<Flag> flags_of(const Poset& p, std::size_t s, std::size_t cap = 5000) {
  return FlagPoset(p, cap).flags_of_length(s);
}

// image flag under a strictly monotone poset map
inline Flag map_flag(const PosetMap& pi, const Flag& f) {
  Flag out;
  out.terms.reserve(f.terms.size());
  for (std::size_t t : f.terms) out.terms.push_back(pi(t));
  return out;
}

// Grothendieck-fibration cleavage: the unique subflag e of f with
// pi(e) = ebar.  Requires ebar to be a subflag of pi(f).
inline Flag subflag_over(const Flag& f, const Flag& ebar, const PosetMap& pi) {
  Flag image = map_flag(pi, f);
  if (!ebar.subflag_of(image))
    throw std::invalid_argument("target is not a subflag of the image flag");
  Flag e;
  std::size_t k = 0;
  for (std::size_t i = 0; i < f.terms.size() && k < ebar.terms.size(); ++i)
    if (image.terms[i] == ebar.terms[k]) {
      e.terms.push_back(f.terms[i]);
      ++k;
    }
  return e;
}

}  // namespace flagalg

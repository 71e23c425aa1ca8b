#pragma once

#include <flagalg/ratmatrix.hpp>
#include <flagalg/ring_diagram.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flagalg {

// deterministic list of exponent vectors of a given weight
inline std::vector<Monomial> monomial_basis(std::size_t nvars, int weight) {
  std::vector<Monomial> out;
  if (weight < 0) return out;
  if (nvars == 0) {
    if (weight == 0) out.push_back(Monomial{});
    return out;
  }
  Monomial cur(nvars, 0);
  // lexicographic enumeration by recursion on positions
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int rest) {
    if (pos + 1 == nvars) {
      cur[pos] = rest;
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= rest; ++e) {
      cur[pos] = e;
      rec(pos + 1, rest - e);
    }
  };
  rec(0, weight);
  std::sort(out.begin(), out.end(), MonomialOrder{});
  return out;
}

// ---------------------------------------------------------------------
// Module value over one ring component.
//
// Backends:
//   Zero       the zero module
//   Free       free with a graded basis over the (localized) component
//   Presented  cokernel of a homogeneous relation matrix over the
//              polynomial ring; only allowed on unlocalized components
//   Windowed   explicit graded pieces with generator actions on a degree
//              range, produced by kernels/pullbacks/span constructions
//
// Graded pieces are always *numerator* spaces: the degree-d piece of the
// level-l truncation is the integral piece in degree d + l*deg(P), where P
// is the product of the component's inverted generators.
// ---------------------------------------------------------------------
struct CompModule {
  enum class Backend { Zero, Free, Presented, Windowed };
  Backend backend = Backend::Zero;

  // Free / Presented
  std::vector<int> gen_degrees;
  std::vector<std::string> gen_labels;
  std::vector<std::vector<Polynomial>> relations;  // rows: coords per generator

  // Windowed
  int win_lo = 0;
  int win_hi = -1;
  bool zero_below = false;
  bool zero_above = false;
  std::map<int, std::size_t> win_dims;                     // degree -> dim
  std::map<std::pair<int, int>, RatMatrix> win_actions;    // (var, degree)

  static CompModule zero() { return CompModule{}; }

  static CompModule free_module(std::vector<int> degrees, std::vector<std::string> labels = {}) {
    CompModule m;
    m.backend = Backend::Free;
    m.gen_degrees = std::move(degrees);
    if (labels.empty())
      for (std::size_t i = 0; i < m.gen_degrees.size(); ++i)
        labels.push_back("b" + std::to_string(i));
    m.gen_labels = std::move(labels);
    return m;
  }

  static CompModule presented(std::vector<int> degrees,
                              std::vector<std::vector<Polynomial>> rels,
                              std::vector<std::string> labels = {}) {
    CompModule m = free_module(std::move(degrees), std::move(labels));
    m.backend = Backend::Presented;
    m.relations = std::move(rels);
    return m;
  }

  bool is_zero() const { return backend == Backend::Zero; }

  bool operator==(const CompModule& o) const {
    if (backend != o.backend) return false;
    switch (backend) {
      case Backend::Zero: return true;
      case Backend::Free: return gen_degrees == o.gen_degrees;
      case Backend::Presented: return gen_degrees == o.gen_degrees && relations == o.relations;
      case Backend::Windowed:
        return win_lo == o.win_lo && win_hi == o.win_hi && win_dims == o.win_dims &&
               win_actions == o.win_actions;
    }
    return false;
  }
};

// degree of P = product of inverted generators, in cohomological degrees
inline int inverted_degree(const RingComponent& rc) {
  int w = 0;
  for (const auto& s : rc.inverted) w += monomial_weight(s.leading_term().first);
  return 2 * w;
}

// Basis of a degree-d numerator piece.
struct PieceInfo {
  std::size_t dim = 0;
  // Free/Presented ambient coordinates: (generator, monomial)
  std::vector<std::pair<std::size_t, Monomial>> ambient;
  // Presented: reduction from ambient coordinates to quotient coordinates
  RatMatrix reduce;  // dim x ambient.size(); identity-like for Free
  bool windowed = false;
};

namespace detail {

inline PieceInfo free_piece(const RingComponent& rc, const CompModule& m, int degree) {
  PieceInfo p;
  for (std::size_t j = 0; j < m.gen_degrees.size(); ++j) {
    int need = degree - m.gen_degrees[j];
    if (need < 0 || need % 2 != 0) continue;
    for (auto& mono : monomial_basis(rc.nvars(), need / 2)) p.ambient.push_back({j, mono});
  }
  p.dim = p.ambient.size();
  p.reduce = RatMatrix::identity(p.dim);
  return p;
}

inline std::size_t ambient_index(const PieceInfo& p, std::size_t gen, const Monomial& mono) {
  for (std::size_t i = 0; i < p.ambient.size(); ++i)
    if (p.ambient[i].first == gen && p.ambient[i].second == mono) return i;
  throw std::logic_error("ambient coordinate not found");
}

}  // namespace detail

// Integral (level-0) piece in the given degree; nullopt when the value is
// windowed and the degree is outside its known range.
inline std::optional<PieceInfo> comp_piece(const RingComponent& rc, const CompModule& m,
                                           int degree) {
  switch (m.backend) {
    case CompModule::Backend::Zero: {
      PieceInfo p;
      p.reduce = RatMatrix(0, 0);
      return p;
    }
    case CompModule::Backend::Free:
      return detail::free_piece(rc, m, degree);
    case CompModule::Backend::Presented: {
      // over a localized component the pieces are numerator spaces; the
      // inverted generators must be certified nonzerodivisors or nilpotent
      // on the cokernel (the generators' responsibility)
      PieceInfo p = detail::free_piece(rc, m, degree);
      if (m.relations.empty() || p.dim == 0) return p;
      // span of relation multiples in this degree
      std::vector<std::vector<Rat>> rows;
      for (const auto& rel : m.relations) {
        int reldeg = -1;
        for (std::size_t j = 0; j < rel.size(); ++j)
          if (!rel[j].is_zero()) reldeg = *rel[j].degree() + m.gen_degrees[j];
        if (reldeg < 0) continue;
        int need = degree - reldeg;
        if (need < 0 || need % 2 != 0) continue;
        for (auto& mu : monomial_basis(rc.nvars(), need / 2)) {
          std::vector<Rat> row(p.ambient.size(), Rat(0));
          for (std::size_t j = 0; j < rel.size(); ++j)
            for (const auto& [mono, coef] : rel[j].terms())
              row[detail::ambient_index(p, j, monomial_mul(mono, mu))] += coef;
          rows.push_back(std::move(row));
        }
      }
      if (rows.empty()) return p;
      RatMatrix relmat(rows.size(), p.ambient.size());
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < p.ambient.size(); ++j) relmat.at(i, j) = rows[i][j];
      auto pivots = linalg::rref(relmat);
      std::vector<bool> is_pivot(p.ambient.size(), false);
      std::size_t npiv = pivots.size();
      for (std::size_t c : pivots) is_pivot[c] = true;
      std::vector<std::size_t> reps;
      for (std::size_t j = 0; j < p.ambient.size(); ++j)
        if (!is_pivot[j]) reps.push_back(j);
      RatMatrix reduce(reps.size(), p.ambient.size());
      for (std::size_t q = 0; q < reps.size(); ++q) {
        reduce.at(q, reps[q]) = 1;
        for (std::size_t pi = 0; pi < npiv; ++pi)
          reduce.at(q, pivots[pi]) = -relmat.at(pi, reps[q]);
      }
      // reduce maps e_j to its class: identity on representatives, and the
      // pivot columns carry the negative of the relation expression
      RatMatrix reduce2(reps.size(), p.ambient.size());
      for (std::size_t j = 0; j < p.ambient.size(); ++j) {
        if (!is_pivot[j]) {
          for (std::size_t q = 0; q < reps.size(); ++q) reduce2.at(q, j) = (reps[q] == j) ? 1 : 0;
        } else {
          std::size_t pi = 0;
          while (pivots[pi] != j) ++pi;
          for (std::size_t q = 0; q < reps.size(); ++q) reduce2.at(q, j) = -relmat.at(pi, reps[q]);
        }
      }
      p.reduce = reduce2;
      p.dim = reps.size();
      return p;
    }
    case CompModule::Backend::Windowed: {
      if (degree < m.win_lo) {
        if (m.zero_below) {
          PieceInfo p;
          p.windowed = true;
          return p;
        }
        return std::nullopt;
      }
      if (degree > m.win_hi) {
        if (m.zero_above) {
          PieceInfo p;
          p.windowed = true;
          return p;
        }
        return std::nullopt;
      }
      PieceInfo p;
      p.windowed = true;
      auto it = m.win_dims.find(degree);
      p.dim = it == m.win_dims.end() ? 0 : it->second;
      return p;
    }
  }
  return std::nullopt;
}

// Matrix of multiplication by a homogeneous polynomial f:
// piece(degree) -> piece(degree + deg f).
inline std::optional<RatMatrix> comp_act(const RingComponent& rc, const CompModule& m,
                                         const Polynomial& f, int degree) {
  if (f.is_zero()) {
    auto src = comp_piece(rc, m, degree);
    if (!src) return std::nullopt;
    return RatMatrix(0, src->dim);  // caller must not use shape blindly
  }
  int fdeg = *f.degree();
  auto src = comp_piece(rc, m, degree);
  auto tgt = comp_piece(rc, m, degree + fdeg);
  if (!src || !tgt) return std::nullopt;
  switch (m.backend) {
    case CompModule::Backend::Zero:
      return RatMatrix(0, 0);
    case CompModule::Backend::Free:
    case CompModule::Backend::Presented: {
      RatMatrix amb(tgt->ambient.size(), src->ambient.size());
      for (std::size_t j = 0; j < src->ambient.size(); ++j) {
        auto [gen, mono] = src->ambient[j];
        for (const auto& [fm, fc] : f.terms())
          amb.at(detail::ambient_index(*tgt, gen, monomial_mul(mono, fm)), j) += fc;
      }
      if (m.backend == CompModule::Backend::Free) return amb;
      // quotient: reduce after multiplying representatives
      // source quotient basis -> ambient: representatives are the identity
      // columns of reduce; build a section
      RatMatrix section(src->ambient.size(), src->dim);
      {
        std::size_t q = 0;
        for (std::size_t j = 0; j < src->ambient.size() && q < src->dim; ++j) {
          bool is_rep = true;
          for (std::size_t r = 0; r < src->dim; ++r)
            if (src->reduce.at(r, j) != ((r == q) ? Rat(1) : Rat(0))) { is_rep = false; break; }
          if (is_rep) {
            section.at(j, q) = 1;
            ++q;
          }
        }
        if (q != src->dim) {
          // fall back: solve reduce * s = id columnwise
          for (std::size_t col = 0; col < src->dim; ++col) {
            std::vector<Rat> e(src->dim, Rat(0));
            e[col] = 1;
            auto sol = linalg::solve(src->reduce, e);
            if (!sol) throw std::logic_error("presented piece section failed");
            for (std::size_t j = 0; j < src->ambient.size(); ++j) section.at(j, col) = (*sol)[j];
          }
        }
      }
      return tgt->reduce * amb * section;
    }
    case CompModule::Backend::Windowed: {
      RatMatrix cur = RatMatrix::identity(src->dim);
      RatMatrix total(tgt->dim, src->dim);
      for (const auto& [mono, coef] : f.terms()) {
        RatMatrix term = RatMatrix::identity(src->dim);
        int at = degree;
        for (std::size_t v = 0; v < rc.nvars(); ++v)
          for (int e = 0; e < mono[v]; ++e) {
            auto it = m.win_actions.find({static_cast<int>(v), at});
            std::size_t from_dim = comp_piece(rc, m, at)->dim;
            std::size_t to_dim_expected = comp_piece(rc, m, at + 2) ? comp_piece(rc, m, at + 2)->dim : 0;
            RatMatrix step = it != m.win_actions.end() ? it->second
                                                       : RatMatrix(to_dim_expected, from_dim);
            term = step * term;
            at += 2;
          }
        // scale and accumulate
        for (std::size_t i = 0; i < total.rows(); ++i)
          for (std::size_t j = 0; j < total.cols(); ++j) total.at(i, j) += coef * term.at(i, j);
      }
      (void)cur;
      return total;
    }
  }
  return std::nullopt;
}

// multiplication by P^k (level raising)
inline std::optional<RatMatrix> comp_up(const RingComponent& rc, const CompModule& m, int degree,
                                        int k) {
  Polynomial p = rc.inverted_product().pow(static_cast<unsigned>(k));
  return comp_act(rc, m, p, degree);
}

// ---------------------------------------------------------------------
// Elements and maps
// ---------------------------------------------------------------------

// Element of a component value.  For Free/Presented backends the element is
// a coordinate vector of fractions over the generators; for Windowed it is
// a numerator vector at an explicit degree and level.
struct ModElement {
  std::vector<LocPoly> coords;
  int degree = 0;
  int level = 0;
  std::vector<Rat> vec;
  bool windowed = false;

  static ModElement generator(const RingComponent& rc, const CompModule& m, std::size_t j) {
    ModElement e;
    for (std::size_t i = 0; i < m.gen_degrees.size(); ++i)
      e.coords.push_back(LocPoly::integral(
          rc, i == j ? Polynomial::constant(rc.nvars(), 1) : Polynomial::zero(rc.nvars())));
    return e;
  }
  static ModElement zero(const RingComponent& rc, const CompModule& m) {
    ModElement e;
    if (m.backend == CompModule::Backend::Windowed) {
      e.windowed = true;
      return e;
    }
    for (std::size_t i = 0; i < m.gen_degrees.size(); ++i)
      e.coords.push_back(LocPoly::integral(rc, Polynomial::zero(rc.nvars())));
    return e;
  }
};

inline ModElement elem_scale(const RingComponent& rc, const ModElement& e, const LocPoly& f) {
  ModElement out = e;
  if (e.windowed) throw std::logic_error("scaling windowed elements requires matrices");
  for (auto& c : out.coords) c = loc_mul(rc, c, f);
  return out;
}

inline ModElement elem_add(const RingComponent& rc, const ModElement& a, const ModElement& b) {
  if (a.windowed || b.windowed) {
    if (a.degree != b.degree || a.level != b.level) throw std::logic_error("windowed add mismatch");
    ModElement out = a;
    for (std::size_t i = 0; i < out.vec.size(); ++i) out.vec[i] += b.vec[i];
    return out;
  }
  ModElement out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i)
    out.coords[i] = loc_add(rc, out.coords[i], b.coords[i]);
  return out;
}

// level of a fraction: smallest l with x expressible over P^l
inline int lp_level(const LocPoly& lp) {
  int l = 0;
  for (int e : lp.den) l = std::max(l, e);
  return l;
}

// numerator after padding the denominator to P^level
inline Polynomial lp_numerator_at_level(const RingComponent& rc, const LocPoly& lp, int level) {
  Polynomial pad = Polynomial::constant(rc.nvars(), 1);
  for (std::size_t i = 0; i < rc.inverted.size(); ++i)
    for (int k = lp.den[i]; k < level; ++k) pad = pad * rc.inverted[i];
  return lp.num * pad;
}

struct RealizedElement {
  int degree = 0;  // degree of the element (after dividing by P^level)
  int level = 0;
  std::vector<Rat> coords;  // in comp_piece(degree + level*degP)
};

// realize an element as a numerator vector; expected_degree disambiguates
// the zero element
inline std::optional<RealizedElement> elem_realize(const RingComponent& rc, const CompModule& m,
                                                   const ModElement& e, int expected_degree) {
  RealizedElement out;
  out.degree = expected_degree;
  if (m.backend == CompModule::Backend::Windowed) {
    out.level = e.level;
    out.coords = e.vec;
    if (e.vec.empty()) {
      auto p = comp_piece(rc, m, expected_degree + e.level * inverted_degree(rc));
      if (!p) return std::nullopt;
      out.coords.assign(p->dim, Rat(0));
    }
    return out;
  }
  int level = 0;
  for (const auto& c : e.coords) level = std::max(level, lp_level(c));
  out.level = level;
  int numdeg = expected_degree + level * inverted_degree(rc);
  auto p = comp_piece(rc, m, numdeg);
  if (!p) return std::nullopt;
  std::vector<Rat> amb(p->ambient.size(), Rat(0));
  for (std::size_t j = 0; j < e.coords.size(); ++j) {
    Polynomial num = lp_numerator_at_level(rc, e.coords[j], level);
    if (num.is_zero()) continue;
    if (*num.degree() + m.gen_degrees[j] != numdeg)
      throw std::logic_error("element is not homogeneous of the expected degree");
    for (const auto& [mono, coef] : num.terms())
      amb[detail::ambient_index(*p, j, mono)] += coef;
  }
  out.coords = p->reduce.apply(amb);
  return out;
}

// Map between component values over a ring-map component.  ByGenerators
// stores images of the source generators; ByMatrices stores per-degree
// matrices on numerator pieces with a fixed output level.
struct CompMap {
  enum class Kind { Zero, ByGenerators, ByMatrices };
  Kind kind = Kind::Zero;
  std::vector<ModElement> gen_images;
  std::map<int, RatMatrix> matrices;  // source degree -> matrix
  int out_level = 0;                  // ByMatrices: target level of outputs

  static CompMap zero_map() { return CompMap{}; }
  static CompMap by_generators(std::vector<ModElement> images) {
    CompMap m;
    m.kind = Kind::ByGenerators;
    m.gen_images = std::move(images);
    return m;
  }
};

// Realize a map on the degree-d integral piece of the source.
// Returns the matrix into the target numerator piece at degree
// d + out_level*degP_target, together with out_level.
struct RealizedMap {
  RatMatrix matrix;
  int out_level = 0;
};

inline std::optional<RealizedMap> comp_map_matrix(const RingComponent& rcs, const CompModule& ms,
                                                  const RingComponent& rct, const CompModule& mt,
                                                  const RingMapComponent& phi, const CompMap& f,
                                                  int degree) {
  auto src = comp_piece(rcs, ms, degree);
  if (!src) return std::nullopt;
  int degp = inverted_degree(rct);
  if (f.kind == CompMap::Kind::Zero) {
    auto tgt = comp_piece(rct, mt, degree);
    if (!tgt) return std::nullopt;
    RealizedMap rm;
    rm.out_level = 0;
    rm.matrix = RatMatrix(tgt->dim, src->dim);
    return rm;
  }
  if (f.kind == CompMap::Kind::ByMatrices) {
    auto it = f.matrices.find(degree);
    auto tgt = comp_piece(rct, mt, degree + f.out_level * degp);
    if (!tgt) return std::nullopt;
    RealizedMap rm;
    rm.out_level = f.out_level;
    if (it != f.matrices.end()) {
      rm.matrix = it->second;
    } else if (src->dim == 0) {
      rm.matrix = RatMatrix(tgt->dim, 0);
    } else {
      return std::nullopt;  // outside the stored range
    }
    return rm;
  }
  // ByGenerators
  // realize each generator image once, at a common output level
  int common = 0;
  std::vector<RealizedElement> imgs;
  for (std::size_t j = 0; j < f.gen_images.size(); ++j) {
    auto re = elem_realize(rct, mt, f.gen_images[j], ms.gen_degrees[j]);
    if (!re) return std::nullopt;
    common = std::max(common, re->level);
    imgs.push_back(std::move(*re));
  }
  // pad all images to the common level
  for (auto& re : imgs) {
    if (re.level == common) continue;
    auto up = comp_up(rct, mt, re.degree + re.level * degp, common - re.level);
    if (!up) return std::nullopt;
    re.coords = up->apply(re.coords);
    re.level = common;
  }
  auto tgt = comp_piece(rct, mt, degree + common * degp);
  if (!tgt) return std::nullopt;
  RealizedMap rm;
  rm.out_level = common;
  // build on ambient coordinates, then compose with a section for quotients
  RatMatrix amb_matrix(tgt->dim, src->ambient.size());
  for (std::size_t col = 0; col < src->ambient.size(); ++col) {
    auto [gen, mono] = src->ambient[col];
    Polynomial mu(rcs.nvars());
    mu.add_term(mono, Rat(1));
    Polynomial image_mu = mu.substitute(phi.gen_images, rct.nvars());
    // act on the realized generator image at level `common`
    if (image_mu.is_zero()) continue;
    auto act = comp_act(rct, mt, image_mu,
                        imgs[gen].degree + common * degp);
    if (!act) return std::nullopt;
    auto v = act->apply(imgs[gen].coords);
    for (std::size_t i = 0; i < tgt->dim; ++i) amb_matrix.at(i, col) = v[i];
  }
  if (ms.backend == CompModule::Backend::Presented) {
    RatMatrix section(src->ambient.size(), src->dim);
    for (std::size_t colq = 0; colq < src->dim; ++colq) {
      std::vector<Rat> e(src->dim, Rat(0));
      e[colq] = 1;
      auto sol = linalg::solve(src->reduce, e);
      if (!sol) return std::nullopt;
      for (std::size_t j = 0; j < src->ambient.size(); ++j) section.at(j, colq) = (*sol)[j];
    }
    rm.matrix = amb_matrix * section;
  } else {
    rm.matrix = amb_matrix;
  }
  return rm;
}

// apply a ByGenerators map to a symbolic element over the same ring-map
// component
inline ModElement comp_map_apply(const RingComponent& rcs, const CompModule& ms,
                                 const RingComponent& rct, const CompModule& mt,
                                 const RingMapComponent& phi, const CompMap& f,
                                 const ModElement& x) {
  if (f.kind == CompMap::Kind::Zero) return ModElement::zero(rct, mt);
  if (f.kind != CompMap::Kind::ByGenerators || x.windowed)
    throw std::logic_error("symbolic application needs generator images");
  ModElement out = ModElement::zero(rct, mt);
  for (std::size_t j = 0; j < x.coords.size(); ++j) {
    const LocPoly& c = x.coords[j];
    if (c.num.is_zero()) continue;
    // transport the fraction through the ring map
    Polynomial num = c.num.substitute(phi.gen_images, rct.nvars());
    std::vector<int> den(rct.inverted.size(), 0);
    Rat scale(1);
    for (std::size_t i = 0; i < c.den.size(); ++i) {
      if (c.den[i] == 0) continue;
      for (std::size_t k = 0; k < den.size(); ++k) den[k] += c.den[i] * phi.den_images[i].exps[k];
      for (int rep = 0; rep < c.den[i]; ++rep) scale *= phi.den_images[i].scale;
    }
    LocPoly cf{num * (Rat(1) / scale), den};
    out = elem_add(rct, out, elem_scale(rct, f.gen_images[j], cf));
  }
  return out;
}

}  // namespace flagalg

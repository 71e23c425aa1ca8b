#pragma once

#include <flagalg/module_diagram.hpp>

#include <optional>
#include <sstream>
#include <string>

namespace flagalg {

// Degree window and denominator-exponent bound for all bounded checks.
// Failures inside the window are definitive under the regularity
// certificates; passes certify the law on the window only.
struct Window {
  int lo = -20;
  int hi = 40;
  int den_bound = 8;
};

struct PredicateReport {
  std::string predicate;
  bool pass = true;
  std::string witness;  // set on failure
  Window window;
  std::size_t checks = 0;  // degrees actually decided
};

namespace detail {

// minimal degree with a possibly nonzero piece, if known
inline std::optional<int> lower_bound_degree(const CompModule& m) {
  switch (m.backend) {
    case CompModule::Backend::Zero:
      return 0;
    case CompModule::Backend::Free:
    case CompModule::Backend::Presented: {
      if (m.gen_degrees.empty()) return 0;
      int lo = m.gen_degrees[0];
      for (int d : m.gen_degrees) lo = std::min(lo, d);
      return lo;
    }
    case CompModule::Backend::Windowed:
      if (m.zero_below) return m.win_lo;
      return std::nullopt;
  }
  return std::nullopt;
}

// Stage space of the base-changed source at a numerator degree: blocks
// (complement monomial beta, source piece at matching degree).
struct StageBlock {
  Monomial beta;
  int adeg;          // source numerator degree
  std::size_t dim;
  std::size_t offset;
};

struct Stage {
  std::vector<StageBlock> blocks;
  std::size_t dim = 0;
};

// change-of-variables data for one edge component
struct BaseChange {
  std::size_t nsrc = 0, ntgt = 0, ncomp = 0;  // source vars, target vars, complement
  std::vector<std::size_t> comp_vars;         // complement variable indices
  std::vector<Polynomial> orig_in_w;          // original vars as linear forms in (y, z)
  Polynomial pw;                              // P_target written in (y, z)
};

inline std::optional<BaseChange> make_base_change(const RingComponent& rcs,
                                                  const RingComponent& rct,
                                                  const RingMapComponent& phi) {
  BaseChange bc;
  bc.nsrc = rcs.nvars();
  bc.ntgt = rct.nvars();
  // coefficient rows of the images
  RatMatrix w(bc.ntgt, bc.ntgt);
  std::size_t row = 0;
  for (const auto& img : phi.gen_images) {
    for (const auto& [mono, coef] : img.terms()) {
      for (std::size_t k = 0; k < bc.ntgt; ++k)
        if (mono[k] == 1) w.at(row, k) = coef;
    }
    ++row;
  }
  // complement: unit rows keeping full rank
  for (std::size_t k = 0; k < bc.ntgt && row < bc.ntgt; ++k) {
    RatMatrix trial = w;
    trial.at(row, k) = 1;
    RatMatrix sub(row + 1, bc.ntgt);
    for (std::size_t i = 0; i <= row; ++i)
      for (std::size_t j = 0; j < bc.ntgt; ++j) sub.at(i, j) = trial.at(i, j);
    if (linalg::rank(sub) == row + 1) {
      w = trial;
      bc.comp_vars.push_back(k);
      ++row;
    }
  }
  if (row != bc.ntgt) return std::nullopt;
  bc.ncomp = bc.comp_vars.size();
  auto winv = linalg::inverse(w);
  if (!winv) return std::nullopt;
  for (std::size_t k = 0; k < bc.ntgt; ++k) {
    Polynomial p(bc.ntgt);
    for (std::size_t j = 0; j < bc.ntgt; ++j) {
      if (winv->at(k, j) == 0) continue;
      Monomial mono(bc.ntgt, 0);
      mono[j] = 1;
      p.add_term(mono, winv->at(k, j));
    }
    bc.orig_in_w.push_back(p);
  }
  bc.pw = rct.inverted_product().substitute(bc.orig_in_w, bc.ntgt);
  return bc;
}

inline std::optional<Stage> make_stage(const RingComponent& rcs, const CompModule& a,
                                       const BaseChange& bc, int numerator_degree) {
  auto amin = lower_bound_degree(a);
  if (!amin) return std::nullopt;
  Stage st;
  int max_w = (numerator_degree - *amin) / 2;
  for (int wb = 0; wb <= std::max(0, max_w); ++wb) {
    for (auto& beta : monomial_basis(bc.ncomp, wb)) {
      int adeg = numerator_degree - 2 * wb;
      auto p = comp_piece(rcs, a, adeg);
      if (!p) return std::nullopt;
      if (p->dim == 0) continue;
      st.blocks.push_back(StageBlock{beta, adeg, p->dim, st.dim});
      st.dim += p->dim;
    }
  }
  return st;
}

inline std::optional<std::size_t> stage_block_offset(const Stage& st, const Monomial& beta,
                                                     int adeg) {
  for (const auto& b : st.blocks)
    if (b.beta == beta && b.adeg == adeg) return b.offset;
  return std::nullopt;
}

// multiplication by a (y, z)-polynomial: Stage(d) -> Stage(d + deg q)
inline std::optional<RatMatrix> stage_mult(const RingComponent& rcs, const CompModule& a,
                                           const BaseChange& bc, const Stage& from,
                                           const Stage& to, const Polynomial& qw) {
  RatMatrix m(to.dim, from.dim);
  for (const auto& blk : from.blocks) {
    for (const auto& [mono, coef] : qw.terms()) {
      Monomial alpha(bc.nsrc, 0);
      Monomial betap(bc.ncomp, 0);
      for (std::size_t i = 0; i < bc.nsrc; ++i) alpha[i] = mono[i];
      for (std::size_t i = 0; i < bc.ncomp; ++i) betap[i] = mono[bc.nsrc + i];
      Monomial beta_new = monomial_mul(blk.beta, betap);
      Polynomial xalpha(rcs.nvars());
      xalpha.add_term(alpha, coef);
      auto act = comp_act(rcs, a, xalpha, blk.adeg);
      if (!act) return std::nullopt;
      int adeg_new = blk.adeg + 2 * monomial_weight(alpha);
      auto off = stage_block_offset(to, beta_new, adeg_new);
      if (!off) {
        if (!act->is_zero()) return std::nullopt;
        continue;
      }
      for (std::size_t i = 0; i < act->rows(); ++i)
        for (std::size_t j = 0; j < act->cols(); ++j)
          m.at(*off + i, blk.offset + j) += act->at(i, j);
    }
  }
  return m;
}

// the canonical map on one stage, realized at a uniform output level;
// output lands in the target numerator piece of degree
// numerator_degree + level*degP
struct StageMapResult {
  RatMatrix matrix;
  int level = 0;
};

inline std::optional<StageMapResult> stage_alpha(const RingComponent& rcs, const CompModule& a,
                                                 const RingComponent& rct, const CompModule& b,
                                                 const RingMapComponent& phi, const CompMap& sigma,
                                                 const BaseChange& bc, const Stage& st,
                                                 int numerator_degree) {
  int degp = inverted_degree(rct);
  // per-block realized maps
  std::vector<RealizedMap> maps;
  int level = 0;
  for (const auto& blk : st.blocks) {
    auto rm = comp_map_matrix(rcs, a, rct, b, phi, sigma, blk.adeg);
    if (!rm) return std::nullopt;
    level = std::max(level, rm->out_level);
    maps.push_back(std::move(*rm));
  }
  auto tgt = comp_piece(rct, b, numerator_degree + level * degp);
  if (!tgt) return std::nullopt;
  StageMapResult out;
  out.level = level;
  out.matrix = RatMatrix(tgt->dim, st.dim);
  for (std::size_t bi = 0; bi < st.blocks.size(); ++bi) {
    const auto& blk = st.blocks[bi];
    RatMatrix m = maps[bi].matrix;  // adeg numerators -> b at adeg + l_b*degp
    int lb = maps[bi].out_level;
    // pad to the uniform level
    if (lb < level) {
      auto up = comp_up(rct, b, blk.adeg + lb * degp, level - lb);
      if (!up) return std::nullopt;
      m = *up * m;
    }
    // multiply by the complement monomial z^beta
    Polynomial zbeta = Polynomial::constant(rct.nvars(), 1);
    for (std::size_t i = 0; i < bc.ncomp; ++i)
      for (int e = 0; e < blk.beta[i]; ++e)
        zbeta = zbeta * Polynomial::variable(rct.nvars(), bc.comp_vars[i]);
    auto act = comp_act(rct, b, zbeta, blk.adeg + level * degp);
    if (!act) return std::nullopt;
    m = *act * m;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out.matrix.at(i, blk.offset + j) = m.at(i, j);
  }
  return out;
}

}  // namespace detail

// Check that the canonical map R(to) tensor_{R(from)} M(from) -> M(to) is
// bijective on the window.  Returns a witness description on failure.
inline std::optional<std::string> check_canonical_edge(const ModuleDiagram& m, std::size_t from,
                                                       std::size_t to, const Window& w,
                                                       std::size_t* checks = nullptr) {
  const RingDiagram& r = m.over();
  const RingMap& phi = r.map(from, to);
  for (std::size_t ct = 0; ct < r.value(to).size(); ++ct) {
    const auto& phic = phi.components()[ct];
    std::size_t cs = phic.src;
    const RingComponent& rcs = r.value(from)[cs];
    const RingComponent& rct = r.value(to)[ct];
    const CompModule& A = m.value(from).comps[cs];
    const CompModule& B = m.value(to).comps[ct];
    const CompMap& sigma = m.map(from, to).comps[ct];

    auto bc = detail::make_base_change(rcs, rct, phic);
    if (!bc) throw std::logic_error("unsupported ring map in canonical check");
    int degp = inverted_degree(rct);
    int d_cap = w.den_bound;

    for (int d = w.lo; d <= w.hi; ++d) {
      auto st0 = detail::make_stage(rcs, A, *bc, d);
      auto bpiece0 = comp_piece(rct, B, d);
      if (!st0 || !bpiece0) continue;  // outside the known window

      bool decided = true;
      // injectivity with denominator slack
      if (st0->dim > 0) {
        auto alpha0 = detail::stage_alpha(rcs, A, rct, B, phic, sigma, *bc, *st0, d);
        if (!alpha0) { decided = false; }
        else {
          RatMatrix ker = linalg::kernel(alpha0->matrix);
          if (ker.cols() > 0) {
            // push the kernel up d_cap stages
            RatMatrix cur = ker;
            if (degp > 0) {
              detail::Stage stage_prev = *st0;
              for (int step = 0; step < d_cap; ++step) {
                auto stage_next = detail::make_stage(rcs, A, *bc, d + (step + 1) * degp);
                if (!stage_next) { decided = false; break; }
                auto u = detail::stage_mult(rcs, A, *bc, stage_prev, *stage_next, bc->pw);
                if (!u) { decided = false; break; }
                cur = *u * cur;
                stage_prev = *stage_next;
                if (cur.is_zero()) break;
              }
            }
            if (decided && !cur.is_zero()) {
              std::ostringstream os;
              os << "canonical map not injective: objects " << from << "->" << to
                 << " component " << ct << " degree " << d;
              return os.str();
            }
          }
        }
      }
      // surjectivity with denominator slack
      if (decided && bpiece0->dim > 0) {
        auto stD = detail::make_stage(rcs, A, *bc, d + d_cap * degp);
        if (!stD) { decided = false; }
        else {
          auto alphaD = detail::stage_alpha(rcs, A, rct, B, phic, sigma, *bc, *stD, d + d_cap * degp);
          if (!alphaD) { decided = false; }
          else {
            auto up = comp_up(rct, B, d, d_cap + alphaD->level);
            if (!up) { decided = false; }
            else if (!linalg::span_subset(*up, alphaD->matrix)) {
              std::ostringstream os;
              os << "canonical map not surjective: objects " << from << "->" << to
                 << " component " << ct << " degree " << d;
              return os.str();
            }
          }
        }
      }
      if (decided && checks) ++*checks;
    }
  }
  return std::nullopt;
}

namespace detail {

template <typename EdgeSel>
inline PredicateReport run_edge_predicate(const ModuleDiagram& m, const std::string& name,
                                          const Window& w, EdgeSel&& edges) {
  PredicateReport rep;
  rep.predicate = name;
  rep.window = w;
  for (const auto& [from, to] : edges(m.over().index())) {
    auto fail = check_canonical_edge(m, from, to, w, &rep.checks);
    if (fail) {
      rep.pass = false;
      rep.witness = *fail;
      return rep;
    }
  }
  return rep;
}

inline std::vector<std::pair<std::size_t, std::size_t>> qc_edges(const DiagramIndex& ix) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (ix.kind == DiagramIndex::Kind::Flags) {
    for (std::size_t f = 0; f < ix.flags->size(); ++f) {
      const Flag& ff = ix.flags->flag(f);
      if (ff.length() == 0) continue;
      out.push_back({ix.flags->index_of(ff.face(0)), f});
    }
  } else if (ix.kind == DiagramIndex::Kind::Pairs) {
    for (std::size_t a = 0; a < ix.pairs->size(); ++a)
      for (std::size_t b = 0; b < ix.pairs->size(); ++b)
        if (a != b && ix.pairs->horizontal(a, b)) out.push_back({a, b});
  }
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> extended_edges(const DiagramIndex& ix) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (ix.kind == DiagramIndex::Kind::Flags) {
    for (std::size_t f = 0; f < ix.flags->size(); ++f) {
      const Flag& ff = ix.flags->flag(f);
      if (ff.length() == 0) continue;
      out.push_back({ix.flags->index_of(ff.face(ff.length())), f});
    }
  } else if (ix.kind == DiagramIndex::Kind::Pairs) {
    for (std::size_t a = 0; a < ix.pairs->size(); ++a)
      for (std::size_t b = 0; b < ix.pairs->size(); ++b)
        if (a != b && ix.pairs->vertical(a, b)) out.push_back({a, b});
  }
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> middle_edges(const DiagramIndex& ix) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (ix.kind == DiagramIndex::Kind::Flags) {
    for (std::size_t f = 0; f < ix.flags->size(); ++f) {
      const Flag& ff = ix.flags->flag(f);
      for (std::size_t i = 1; i < ff.length(); ++i)
        out.push_back({ix.flags->index_of(ff.face(i)), f});
    }
  }
  return out;
}

}  // namespace detail

inline PredicateReport is_qc(const ModuleDiagram& m, const Window& w = {}) {
  return detail::run_edge_predicate(m, "qc", w,
                                    [](const DiagramIndex& ix) { return detail::qc_edges(ix); });
}

inline PredicateReport is_extended(const ModuleDiagram& m, const Window& w = {}) {
  return detail::run_edge_predicate(
      m, "extended", w, [](const DiagramIndex& ix) { return detail::extended_edges(ix); });
}

inline PredicateReport is_middle_independent(const ModuleDiagram& m, const Window& w = {}) {
  return detail::run_edge_predicate(
      m, "middle-independent", w,
      [](const DiagramIndex& ix) { return detail::middle_edges(ix); });
}

inline PredicateReport is_qce(const ModuleDiagram& m, const Window& w = {}) {
  PredicateReport a = is_qc(m, w);
  PredicateReport b = is_extended(m, w);
  PredicateReport rep;
  rep.predicate = "qce";
  rep.window = w;
  rep.checks = a.checks + b.checks;
  rep.pass = a.pass && b.pass;
  rep.witness = !a.pass ? a.witness : (!b.pass ? b.witness : "");
  return rep;
}

}  // namespace flagalg

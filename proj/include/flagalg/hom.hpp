#pragma once

#include <flagalg/gamma.hpp>

#include <map>
#include <vector>

namespace flagalg {

// Degree-zero module-diagram homomorphisms T -> X on the window, solved on
// *stabilized* pieces: the degree-d piece of a localized value is read at
// denominator level den_bound, where certified values have settled (their
// level-raising maps are isomorphisms onto the stable range).  This keeps
// the solution space free of families that vanish in the localization.
struct HomSpace {
  struct Slot {
    std::size_t obj, comp;
    int degree;  // stable degree
    std::size_t rows, cols;
    std::size_t offset;
  };
  std::vector<Slot> slots;
  std::size_t nvars = 0;
  RatMatrix basis;
  // solutions pushed through up^D per slot: solution families that die in
  // the localization are quotiented out by rank computations on this matrix
  RatMatrix stable;
  std::vector<RatMatrix> slot_up;          // per slot: up^D on the target value
  std::vector<std::size_t> stable_offset;  // per slot: row offset in `stable`
  std::size_t stable_rows = 0;

  std::size_t dim() const { return linalg::rank(stable); }

  const Slot* find(std::size_t obj, std::size_t comp, int degree) const {
    for (const auto& s : slots)
      if (s.obj == obj && s.comp == comp && s.degree == degree) return &s;
    return nullptr;
  }

  // push raw entry-space columns through the per-slot stabilizers
  RatMatrix stabilize_columns(const RatMatrix& entries) const {
    RatMatrix out(stable_rows, entries.cols());
    for (std::size_t k = 0; k < entries.cols(); ++k)
      for (std::size_t si = 0; si < slots.size(); ++si) {
        const auto& s = slots[si];
        RatMatrix mat(s.rows, s.cols);
        for (std::size_t i = 0; i < s.rows; ++i)
          for (std::size_t j = 0; j < s.cols; ++j)
            mat.at(i, j) = entries.at(s.offset + i * s.cols + j, k);
        RatMatrix pushed = slot_up[si] * mat;
        for (std::size_t i = 0; i < pushed.rows(); ++i)
          for (std::size_t j = 0; j < s.cols; ++j)
            out.at(stable_offset[si] + i * s.cols + j, k) = pushed.at(i, j);
      }
    return out;
  }
};

namespace detail {

// numerator degree of the stable degree-d piece
inline int stable_shift(const RingComponent& rc, int den_bound) {
  return den_bound * inverted_degree(rc);
}

}  // namespace detail

inline HomSpace hom_space(const ModuleDiagram& t, const ModuleDiagram& x, const Window& w) {
  const RingDiagram& r = t.over();
  const int D = w.den_bound;
  HomSpace hs;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t c = 0; c < r.value(i).size(); ++c) {
      int shift = detail::stable_shift(r.value(i)[c], D);
      for (int d = w.lo; d <= w.hi; ++d) {
        auto pt = comp_piece(r.value(i)[c], t.value(i).comps[c], d + shift);
        auto px = comp_piece(r.value(i)[c], x.value(i).comps[c], d + shift);
        if (!pt || !px || pt->dim == 0 || px->dim == 0) continue;
        hs.slots.push_back({i, c, d, px->dim, pt->dim, hs.nvars});
        hs.nvars += px->dim * pt->dim;
      }
    }

  std::vector<std::vector<Rat>> rows;
  auto add_equation = [&](const std::vector<std::pair<std::size_t, Rat>>& terms) {
    std::vector<Rat> row(hs.nvars, Rat(0));
    bool nonzero = false;
    for (auto& [idx, coef] : terms)
      if (coef != 0) {
        row[idx] += coef;
        nonzero = true;
      }
    if (nonzero) rows.push_back(std::move(row));
  };

  // ring-linearity at the stable level
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t c = 0; c < r.value(i).size(); ++c) {
      const RingComponent& rc = r.value(i)[c];
      int shift = detail::stable_shift(rc, D);
      for (int d = w.lo; d + 2 <= w.hi; ++d) {
        const auto* s0 = hs.find(i, c, d);
        const auto* s1 = hs.find(i, c, d + 2);
        for (std::size_t v = 0; v < rc.nvars(); ++v) {
          auto at = comp_act(rc, t.value(i).comps[c], Polynomial::variable(rc.nvars(), v),
                             d + shift);
          auto ax = comp_act(rc, x.value(i).comps[c], Polynomial::variable(rc.nvars(), v),
                             d + shift);
          if (!at || !ax) continue;
          for (std::size_t a = 0; a < ax->rows(); ++a)
            for (std::size_t b = 0; b < at->cols(); ++b) {
              std::vector<std::pair<std::size_t, Rat>> terms;
              if (s1)
                for (std::size_t k = 0; k < at->rows(); ++k)
                  terms.push_back({s1->offset + a * s1->cols + k, at->at(k, b)});
              if (s0)
                for (std::size_t k = 0; k < ax->cols(); ++k)
                  terms.push_back({s0->offset + k * s0->cols + b, -ax->at(a, k)});
              add_equation(terms);
            }
        }
      }
    }

  // structure-map squares, pushed to the stable level of the target
  for (std::size_t e = 0; e < r.size(); ++e)
    for (std::size_t f = 0; f < r.size(); ++f) {
      if (!r.has_arrow(e, f)) continue;
      const RingMap& phi = r.map(e, f);
      for (std::size_t ct = 0; ct < r.value(f).size(); ++ct) {
        std::size_t cs = phi.components()[ct].src;
        const RingComponent& rcs = r.value(e)[cs];
        const RingComponent& rct = r.value(f)[ct];
        int degp = inverted_degree(rct);
        int shift_src = detail::stable_shift(rcs, D);
        for (int d = w.lo; d <= w.hi; ++d) {
          // source stable piece corresponds to numerator degree d + shift_src;
          // an element there represents a degree-d element, whose image has
          // numerator degree d + shift_src + lev*degp representing level
          // shift_src/degp_src + lev over the target; we push both sides to
          // the target slot at numerator degree d + D*degp + shift_src
          auto mt = comp_map_matrix(rcs, t.value(e).comps[cs], rct, t.value(f).comps[ct],
                                    phi.components()[ct], t.map(e, f).comps[ct], d + shift_src);
          auto mx = comp_map_matrix(rcs, x.value(e).comps[cs], rct, x.value(f).comps[ct],
                                    phi.components()[ct], x.map(e, f).comps[ct], d + shift_src);
          if (!mt || !mx) continue;
          int lev_target = D;  // final level over the target
          if (mt->out_level > lev_target || mx->out_level > lev_target) continue;
          RatMatrix tmat = mt->matrix;
          RatMatrix xmat = mx->matrix;
          {
            auto up = comp_up(rct, t.value(f).comps[ct], d + shift_src + mt->out_level * degp,
                              lev_target - mt->out_level);
            if (!up) continue;
            tmat = *up * tmat;
          }
          {
            auto up = comp_up(rct, x.value(f).comps[ct], d + shift_src + mx->out_level * degp,
                              lev_target - mx->out_level);
            if (!up) continue;
            xmat = *up * xmat;
          }
          // the target slot sits at stable degree d + shift_src
          const auto* se = hs.find(e, cs, d);
          const auto* sf = hs.find(f, ct, d + shift_src);
          for (std::size_t a = 0; a < xmat.rows(); ++a)
            for (std::size_t b = 0; b < tmat.cols(); ++b) {
              std::vector<std::pair<std::size_t, Rat>> terms;
              if (sf)
                for (std::size_t k = 0; k < tmat.rows(); ++k)
                  terms.push_back({sf->offset + a * sf->cols + k, tmat.at(k, b)});
              if (se)
                for (std::size_t k = 0; k < xmat.cols(); ++k)
                  terms.push_back({se->offset + k * se->cols + b, -xmat.at(a, k)});
              add_equation(terms);
            }
        }
      }
    }

  RatMatrix system(rows.size(), hs.nvars);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < hs.nvars; ++j) system.at(i, j) = rows[i][j];
  hs.basis = linalg::kernel(system);

  // stabilization: push each slot through up^D on the target value
  for (const auto& s : hs.slots) {
    const RingComponent& rc = r.value(s.obj)[s.comp];
    int shift = detail::stable_shift(rc, D);
    auto up = comp_up(rc, x.value(s.obj).comps[s.comp], s.degree + shift, D);
    RatMatrix u = up ? *up : RatMatrix(0, s.rows);
    hs.slot_up.push_back(u);
    hs.stable_offset.push_back(hs.stable_rows);
    hs.stable_rows += u.rows() * s.cols;
  }
  RatMatrix entries(hs.nvars, hs.basis.cols());
  for (std::size_t k = 0; k < hs.basis.cols(); ++k)
    for (std::size_t i = 0; i < hs.nvars; ++i) entries.at(i, k) = hs.basis.at(i, k);
  hs.stable = hs.stabilize_columns(entries);
  return hs;
}

// postcomposition with lambda on solution spaces: the universal property of
// the associated extended module holds when this is bijective on the
// stabilized solution spaces
inline bool lambda_postcomposition_bijective(const ModuleDiagram& t, const GammaVResult& g,
                                             const ModuleDiagram& m, const Window& w) {
  const RingDiagram& r = m.over();
  const int D = w.den_bound;
  HomSpace hk = hom_space(t, g.module, w);
  HomSpace hm = hom_space(t, m, w);
  if (hk.dim() != hm.dim()) return false;
  if (hk.dim() == 0) return true;
  // post-composition in the raw entry space of hm
  RatMatrix post(hm.nvars, hk.basis.cols());
  for (std::size_t k = 0; k < hk.basis.cols(); ++k) {
    for (const auto& s : hm.slots) {
      const RingComponent& rc = r.value(s.obj)[s.comp];
      int shift = detail::stable_shift(rc, D);
      const CompMap& lam = g.lambda[s.obj][s.comp];
      const auto* sk = hk.find(s.obj, s.comp, s.degree);
      if (!sk) continue;
      auto it = lam.matrices.find(s.degree + shift);
      if (it == lam.matrices.end()) continue;
      if (lam.out_level > 0) continue;  // corpus lambdas live at level zero
      RatMatrix phik(sk->rows, sk->cols);
      for (std::size_t i = 0; i < sk->rows; ++i)
        for (std::size_t j = 0; j < sk->cols; ++j)
          phik.at(i, j) = hk.basis.at(sk->offset + i * sk->cols + j, k);
      RatMatrix composed = it->second * phik;
      for (std::size_t i = 0; i < composed.rows() && i < s.rows; ++i)
        for (std::size_t j = 0; j < composed.cols() && j < s.cols; ++j)
          post.at(s.offset + i * s.cols + j, k) = composed.at(i, j);
    }
  }
  RatMatrix b = hm.stabilize_columns(post);
  const RatMatrix& a = hm.stable;
  const RatMatrix& c = hk.stable;
  // image matches, and nothing honest dies: ker(b) inside ker(c)
  if (!linalg::span_equal(a, b)) return false;
  RatMatrix bc(b.rows() + c.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) bc.at(i, j) = b.at(i, j);
    for (std::size_t i = 0; i < c.rows(); ++i) bc.at(b.rows() + i, j) = c.at(i, j);
  }
  return linalg::rank(bc) == linalg::rank(b);
}

}  // namespace flagalg

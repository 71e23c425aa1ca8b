#pragma once

#include <flagalg/ratmatrix.hpp>
#include <flagalg/polynomial.hpp>

#include <functional>
#include <map>
#include <set>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

// Rank-one backend with the infinite fiber {C_i : i >= 1} over the trivial
// subgroup.  Components are identified along termwise inflation, so one
// polynomial variable c serves every component; families are stored as a
// finite list of exceptional components plus a tail pattern valid almost
// everywhere.  This is the carrier for the localization-of-products versus
// product-of-localizations distinction.
namespace flagalg::rank1 {

// Laurent fraction p(c)/c^k over the generic component.
struct AeFrac {
  Polynomial num{1};  // univariate
  int cpow = 0;

  static AeFrac zero() { return AeFrac{Polynomial::zero(1), 0}; }
  static AeFrac integral(Polynomial p) { return AeFrac{std::move(p), 0}; }
  static AeFrac constant(const Rat& a) { return AeFrac{Polynomial::constant(1, a), 0}; }
  static AeFrac c_power(int k) {
    // c^k for k of either sign
    if (k >= 0) return AeFrac{Polynomial::variable(1, 0).pow(static_cast<unsigned>(k)), 0};
    return AeFrac{Polynomial::constant(1, 1), -k};
  }

  void normalize() {
    if (num.is_zero()) {
      cpow = 0;
      return;
    }
    Polynomial c = Polynomial::variable(1, 0);
    while (cpow > 0) {
      auto q = exact_divide(num, c);
      if (!q) break;
      num = *q;
      --cpow;
    }
  }
  bool is_zero() const { return num.is_zero(); }
  bool is_integral() const {
    AeFrac t = *this;
    t.normalize();
    return t.cpow == 0;
  }
  // cohomological degree (num homogeneous)
  std::optional<int> degree() const {
    if (num.is_zero()) return std::nullopt;
    return *num.degree() - 2 * cpow;
  }
};

inline AeFrac operator+(const AeFrac& a, const AeFrac& b) {
  int k = std::max(a.cpow, b.cpow);
  Polynomial c = Polynomial::variable(1, 0);
  AeFrac r{a.num * c.pow(static_cast<unsigned>(k - a.cpow)) +
               b.num * c.pow(static_cast<unsigned>(k - b.cpow)),
           k};
  r.normalize();
  return r;
}
inline AeFrac operator-(const AeFrac& a) { return AeFrac{-a.num, a.cpow}; }
inline AeFrac operator-(const AeFrac& a, const AeFrac& b) { return a + (-b); }
inline AeFrac operator*(const AeFrac& a, const AeFrac& b) {
  AeFrac r{a.num * b.num, a.cpow + b.cpow};
  r.normalize();
  return r;
}
inline bool operator==(const AeFrac& a, const AeFrac& b) {
  Polynomial c = Polynomial::variable(1, 0);
  return a.num * c.pow(static_cast<unsigned>(std::max(0, b.cpow - a.cpow) + a.cpow)) ==
         b.num * c.pow(static_cast<unsigned>(std::max(0, a.cpow - b.cpow) + b.cpow));
}

// Family over the infinite fiber: tail pattern almost everywhere, finitely
// many exceptional components.
struct AeFamily {
  AeFrac tail = AeFrac::zero();
  std::map<long, AeFrac> exceptional;

  static AeFamily constant(AeFrac t) {
    AeFamily f;
    f.tail = std::move(t);
    f.tail.normalize();
    return f;
  }
  static AeFamily at_component(long i, AeFrac v) {
    AeFamily f;
    f.exceptional[i] = std::move(v);
    f.prune();
    return f;
  }

  const AeFrac& at(long i) const {
    auto it = exceptional.find(i);
    return it == exceptional.end() ? tail : it->second;
  }
  void prune() {
    for (auto it = exceptional.begin(); it != exceptional.end();)
      it = (it->second == tail) ? exceptional.erase(it) : std::next(it);
  }
  bool is_zero() const {
    if (!tail.is_zero()) return false;
    for (const auto& [i, v] : exceptional)
      if (!v.is_zero()) return false;
    return true;
  }
  // member of E^{-1} prod R: all but finitely many components integral
  bool ae_integral() const {
    AeFrac t = tail;
    t.normalize();
    return t.cpow == 0;
  }
  // member of prod R: integral at every component
  bool integral_everywhere() const {
    if (!ae_integral()) return false;
    for (const auto& [i, v] : exceptional)
      if (!v.is_integral()) return false;
    return true;
  }
};

inline AeFamily apply2(const AeFamily& a, const AeFamily& b, AeFrac (*op)(const AeFrac&, const AeFrac&)) {
  AeFamily r;
  r.tail = op(a.tail, b.tail);
  for (const auto& [i, v] : a.exceptional) r.exceptional[i] = op(v, b.at(i));
  for (const auto& [i, v] : b.exceptional)
    if (!a.exceptional.count(i)) r.exceptional[i] = op(a.tail, v);
  r.prune();
  return r;
}
inline AeFamily operator+(const AeFamily& a, const AeFamily& b) {
  return apply2(a, b, +[](const AeFrac& x, const AeFrac& y) { return x + y; });
}
inline AeFamily operator*(const AeFamily& a, const AeFamily& b) {
  return apply2(a, b, +[](const AeFrac& x, const AeFrac& y) { return x * y; });
}
inline bool operator==(const AeFamily& a, const AeFamily& b) {
  if (!(a.tail == b.tail)) return false;
  for (const auto& [i, v] : a.exceptional)
    if (!(v == b.at(i))) return false;
  for (const auto& [i, v] : b.exceptional)
    if (!(a.at(i) == v)) return false;
  return true;
}

// The strictness of the continuity condition: the family with component
// 1/c_i for every i lies in prod E^{-1} R but not in E^{-1} prod R.
inline bool strictness_witness_detected() {
  AeFamily x = AeFamily::constant(AeFrac::c_power(-1));
  bool in_product_of_localizations = true;  // every component is a fraction
  return in_product_of_localizations && !x.ae_integral();
}

// Finitely generated graded Q[c]-module: free generators plus cyclic
// torsion blocks Q[c]/c^len starting in a given degree.
struct UniMod {
  std::vector<int> free_degs;
  std::vector<std::pair<int, int>> torsion;  // (start degree, length)

  std::size_t dim(int d) const {
    std::size_t n = 0;
    for (int b : free_degs)
      if (d >= b && (d - b) % 2 == 0) ++n;
    for (auto [b, len] : torsion)
      if (d >= b && (d - b) % 2 == 0 && (d - b) / 2 < len) ++n;
    return n;
  }
  std::size_t c_rank(int d) const {
    // rank of multiplication c: M_d -> M_{d+2}
    std::size_t n = 0;
    for (int b : free_degs)
      if (d >= b && (d - b) % 2 == 0) ++n;
    for (auto [b, len] : torsion)
      if (d >= b && (d - b) % 2 == 0 && (d - b) / 2 + 1 < len) ++n;
    return n;
  }
  bool operator==(const UniMod& o) const {
    return free_degs == o.free_degs && torsion == o.torsion;
  }
};

// An object of the rank-one model: V a graded Q-space, N given by an
// almost-everywhere pattern with finitely many exceptional components, and
// the structure matrix kappa identifying V inside the localized components
// (rows: components of N's free part; columns: V generators).  For objects
// of the `a` kind kappa is the continuity structure; for the `c` kind it is
// the composite of the quasicoherence and extendedness identifications.
struct ModelObject {
  enum class Kind { PairsOverAll, PairsOverConnected };  // A^p_a or A^p_c data
  Kind kind = Kind::PairsOverConnected;
  std::vector<int> vdegs;
  UniMod tail;
  std::map<long, UniMod> exceptional;
  // kappa[row = tail free generator][col = V generator]
  std::vector<std::vector<AeFamily>> kappa;

  const UniMod& component(long i) const {
    auto it = exceptional.find(i);
    return it == exceptional.end() ? tail : it->second;
  }
};

inline ModelObject zero_object() { return ModelObject{}; }

// eR: V = Q, N_i = Q[c_i], kappa the diagonal unit
inline ModelObject standard_eR() {
  ModelObject x;
  x.vdegs = {0};
  x.tail.free_degs = {0};
  x.kappa = {{AeFamily::constant(AeFrac::constant(Rat(1)))}};
  return x;
}

// validation: the continuity structure must be almost everywhere integral,
// and the per-component identification must be invertible over Q(c)
inline void validate_object(const ModelObject& x, int den_bound = 8) {
  if (x.vdegs.size() != x.tail.free_degs.size())
    throw std::invalid_argument("extendedness certificate fails: V rank != free rank");
  for (const auto& [i, u] : x.exceptional)
    if (u.free_degs.size() != x.vdegs.size())
      throw std::invalid_argument("extendedness certificate fails at an exceptional component");
  for (const auto& row : x.kappa)
    for (const auto& fam : row)
      if (!fam.ae_integral())
        throw std::invalid_argument("continuity structure is not almost everywhere integral");
  if (x.vdegs.empty()) return;
  // invertibility of the generic matrix over Q(c): clear denominators and
  // take a determinant
  std::size_t n = x.vdegs.size();
  if (x.kappa.size() != n) throw std::invalid_argument("kappa shape mismatch");
  // determinant of the tail matrix by expansion (n is tiny)
  std::vector<std::vector<AeFrac>> mat(n, std::vector<AeFrac>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t cidx = 0; cidx < n; ++cidx) mat[r][cidx] = x.kappa[r][cidx].tail;
  std::function<AeFrac(std::vector<std::size_t>, std::size_t)> det =
      [&](std::vector<std::size_t> rows, std::size_t col) -> AeFrac {
    if (rows.empty()) return AeFrac::constant(Rat(1));
    AeFrac acc = AeFrac::zero();
    Rat sign(1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j < rows.size(); ++j)
        if (j != k) rest.push_back(rows[j]);
      AeFrac term = mat[rows[k]][col] * det(rest, col + 1);
      term.num = term.num * sign;
      acc = acc + term;
      sign = -sign;
    }
    return acc;
  };
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (det(all, 0).is_zero())
    throw std::invalid_argument("quasicoherence certificate fails: kappa not invertible");
  // exceptional components must also be invertibly identified
  std::set<long> indices;
  for (const auto& [i, u] : x.exceptional) indices.insert(i);
  for (const auto& row : x.kappa)
    for (const auto& fam : row)
      for (const auto& [i, v] : fam.exceptional) indices.insert(i);
  for (long i : indices) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t cidx = 0; cidx < n; ++cidx) mat[r][cidx] = x.kappa[r][cidx].at(i);
    if (det(all, 0).is_zero())
      throw std::invalid_argument("quasicoherence certificate fails: kappa not invertible at component " +
                                  std::to_string(i));
  }
  (void)den_bound;
}

// e between the two presentations re-reads the same data.
inline ModelObject rank1_e(const ModelObject& c_obj) {
  ModelObject a = c_obj;
  a.kind = ModelObject::Kind::PairsOverAll;
  return a;
}
inline ModelObject rank1_as_c(const ModelObject& a_obj) {
  ModelObject c = a_obj;
  c.kind = ModelObject::Kind::PairsOverConnected;
  return c;
}

// ---------------------------------------------------------------------
// The pullback N' = pb( E^{-1}R tensor V -> E^{-1} prod N_i <- prod N_i ),
// computed exactly in per-degree slices.  The tail slice couples V to the
// integrality of kappa; exceptional components contribute their own
// single-component pullbacks.
// ---------------------------------------------------------------------

struct SliceProfile {
  std::map<int, std::size_t> dims;
  std::map<int, std::size_t> c_ranks;
};

namespace detail {

// Laurent coefficient window for one V-coordinate at a given degree
struct LaurentVar {
  std::size_t vgen;
  int exponent;  // coefficient of c^exponent (Laurent)
};

// slice of the pullback at degree d: solutions (w, torsion) where the
// V-coordinates w_j = a_j c^{e_j} satisfy integrality of kappa(w) at the
// selected component (generic tail when comp is absent)
inline std::vector<LaurentVar> slice_vars(const ModelObject& x, int d, int den_bound) {
  std::vector<LaurentVar> vars;
  for (std::size_t j = 0; j < x.vdegs.size(); ++j) {
    int num = d - x.vdegs[j];
    if (num % 2 != 0) continue;
    int e = num / 2;
    if (e < -den_bound) continue;  // bounded denominators
    vars.push_back({j, e});
  }
  return vars;
}

inline const AeFrac& kappa_at(const ModelObject& x, std::size_t g, std::size_t j,
                              const std::optional<long>& comp) {
  return comp ? x.kappa[g][j].at(*comp) : x.kappa[g][j].tail;
}

// integrality conditions: for each free generator g of the component the
// coordinate sum_j kappa[g][j] * w_j must have no negative c-exponents
inline RatMatrix slice_integrality_conditions(const ModelObject& x, int d,
                                              const std::vector<LaurentVar>& vars,
                                              const std::optional<long>& comp) {
  const UniMod& u = comp ? x.component(*comp) : x.tail;
  std::vector<std::vector<Rat>> rows;
  for (std::size_t g = 0; g < u.free_degs.size(); ++g) {
    std::map<int, std::vector<Rat>> coeff_rows;  // exponent -> row
    for (std::size_t vi = 0; vi < vars.size(); ++vi) {
      AeFrac entry = kappa_at(x, g, vars[vi].vgen, comp);
      entry.normalize();
      if (entry.is_zero()) continue;
      for (const auto& [mono, cf] : entry.num.terms()) {
        int ex = mono[0] - entry.cpow + vars[vi].exponent;
        auto& row = coeff_rows[ex];
        row.resize(vars.size(), Rat(0));
        row[vi] += cf;
      }
    }
    for (auto& [ex, row] : coeff_rows) {
      if (ex >= 0) continue;  // integral part is unconstrained
      row.resize(vars.size(), Rat(0));
      rows.push_back(row);
    }
  }
  RatMatrix m(rows.size(), vars.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < vars.size(); ++j) m.at(i, j) = rows[i][j];
  return m;
}

}  // namespace detail

// slice profile of one component of the pullback (tail when comp absent)
inline SliceProfile pullback_component_profile(const ModelObject& x, std::optional<long> comp,
                                               int lo, int hi, int den_bound) {
  SliceProfile p;
  const UniMod& u = comp ? x.component(*comp) : x.tail;
  std::map<int, RatMatrix> kernels;
  std::map<int, std::vector<detail::LaurentVar>> varsets;
  for (int d = lo; d <= hi + 2; ++d) {
    auto vars = detail::slice_vars(x, d, den_bound);
    RatMatrix cond = detail::slice_integrality_conditions(x, d, vars, comp);
    kernels[d] = linalg::kernel(cond);
    varsets[d] = vars;
  }
  for (int d = lo; d <= hi; ++d) {
    std::size_t tor = 0, tor_rank = 0;
    for (auto [b, len] : u.torsion) {
      if (d >= b && (d - b) % 2 == 0 && (d - b) / 2 < len) ++tor;
      if (d >= b && (d - b) % 2 == 0 && (d - b) / 2 + 1 < len) ++tor_rank;
    }
    p.dims[d] = kernels[d].cols() + tor;
    // c action on the w part: shift exponents by one; in coordinates the
    // variable (j, e) goes to (j, e+1)
    const auto& v0 = varsets[d];
    const auto& v1 = varsets[d + 2];
    RatMatrix shift(v1.size(), v0.size());
    for (std::size_t a = 0; a < v0.size(); ++a)
      for (std::size_t b2 = 0; b2 < v1.size(); ++b2)
        if (v1[b2].vgen == v0[a].vgen && v1[b2].exponent == v0[a].exponent + 1)
          shift.at(b2, a) = 1;
    RatMatrix moved = shift * kernels[d];
    // rank of the composite into the kernel at d+2 (image lies inside it)
    p.c_ranks[d] = linalg::rank(moved) + tor_rank;
  }
  return p;
}

inline SliceProfile pullback_tail_profile(const ModelObject& x, int lo, int hi, int den_bound) {
  return pullback_component_profile(x, std::nullopt, lo, hi, den_bound);
}

// slice profile of the module pattern itself
inline SliceProfile module_profile(const UniMod& u, int lo, int hi) {
  SliceProfile p;
  for (int d = lo; d <= hi; ++d) {
    p.dims[d] = u.dim(d);
    p.c_ranks[d] = u.c_rank(d);
  }
  return p;
}

// The composite round trip is the identity on an object: the recomputed
// pullback matches the stored pattern degreewise, both at the generic
// component and at every exceptional component (where the certified
// identification makes the comparison automatic; we still check the
// certificate).
inline bool rank1_round_trip_identity(const ModelObject& x, int lo, int hi, int den_bound,
                                      std::string* why = nullptr) {
  try {
    validate_object(x, den_bound);
  } catch (const std::exception& e) {
    if (why) *why = e.what();
    return false;
  }
  // components to compare: the generic tail, every exceptional component of
  // the object or its structure matrix, and one fresh generic index
  std::vector<std::optional<long>> comps{std::nullopt};
  std::set<long> indices;
  for (const auto& [i, u] : x.exceptional) indices.insert(i);
  for (const auto& row : x.kappa)
    for (const auto& fam : row)
      for (const auto& [i, v] : fam.exceptional) indices.insert(i);
  long fresh = 1;
  while (indices.count(fresh)) ++fresh;
  indices.insert(fresh);
  for (long i : indices) comps.push_back(i);

  for (const auto& comp : comps) {
    SliceProfile pulled = pullback_component_profile(x, comp, lo, hi, den_bound);
    SliceProfile stored = module_profile(comp ? x.component(*comp) : x.tail, lo, hi);
    std::string where = comp ? "component " + std::to_string(*comp) : std::string("tail");
    for (int d = lo; d <= hi; ++d) {
      if (pulled.dims[d] != stored.dims[d]) {
        if (why)
          *why = where + " dimension mismatch at degree " + std::to_string(d) + ": pullback " +
                 std::to_string(pulled.dims[d]) + " vs module " + std::to_string(stored.dims[d]);
        return false;
      }
      if (pulled.c_ranks[d] != stored.c_ranks[d]) {
        if (why) *why = where + " c-rank mismatch at degree " + std::to_string(d);
        return false;
      }
    }
  }
  return true;
}

// The square for N = R is a pullback: the slice comparison for eR, plus the
// elementwise membership facts that drive it.
inline bool rank1_square_is_pullback_for_R(int lo, int hi, int den_bound,
                                           std::string* why = nullptr) {
  // membership lemma: a family integral at every component is almost
  // everywhere integral with integral exceptions, i.e. lies in the image of
  // prod R -> E^{-1} prod N
  AeFamily probe = AeFamily::constant(AeFrac::integral(Polynomial::variable(1, 0)));
  probe.exceptional[3] = AeFrac::integral(Polynomial::constant(1, Rat(7)));
  if (!probe.integral_everywhere()) {
    if (why) *why = "integral probe misclassified";
    return false;
  }
  AeFamily bad = AeFamily::constant(AeFrac::c_power(-1));
  if (bad.integral_everywhere() || bad.ae_integral()) {
    if (why) *why = "fractional tail misclassified";
    return false;
  }
  // a compatible pair: v in E^{-1}R tensor V whose components are all
  // integral descends to prod R
  AeFamily v = AeFamily::constant(AeFrac::integral(Polynomial::variable(1, 0).pow(2)));
  v.exceptional[2] = AeFrac{Polynomial::variable(1, 0).pow(3), 1};  // c^3/c = c^2
  if (!v.integral_everywhere()) {
    if (why) *why = "reducible fraction not recognized as integral";
    return false;
  }
  return rank1_round_trip_identity(standard_eR(), lo, hi, den_bound, why);
}

}  // namespace flagalg::rank1

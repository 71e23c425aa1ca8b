#include <flagalg/functors.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace flagalg;

namespace {

// rank-1 standard setup with multiplicities {1, C2, C3, T}
struct Setup1 {
  std::shared_ptr<const Poset> sc, sa, sd;
  PosetMap q, d;
  std::unique_ptr<MultiplicitySystem> fs;
  RingDiagram ra_s;   // R_a splitting on Sigma_a
  RingDiagram rc_s;   // R_c = q_! R_a splitting on Sigma_c
  EulerSystem sys_a;  // natural system on R_a
  EulerSystem sys_c;  // natural system on R_c
  RingDiagram rc_f;   // R_c^f on flag(Sigma_c)
  RingDiagram rc_p;   // R_c^p on qp(Sigma_c)
  RingDiagram ra_p;   // R_a^p on qp(Sigma_a)

  Setup1() {
    sc = std::make_shared<Poset>(build_sigma_c(
        {ClosedSubgroup::trivial(1, "1"), ClosedSubgroup::full_torus(1, "T")}));
    sa = std::make_shared<Poset>(build_sigma_a({ClosedSubgroup::trivial(1, "1"), cyclic_rank1(2),
                                                cyclic_rank1(3),
                                                ClosedSubgroup::full_torus(1, "T")}));
    sd = std::make_shared<Poset>(build_sigma_d(1));
    q = quotient_map_q(*sa, *sc);
    d = dimension_map(*sc, *sd);
    fs = std::make_unique<MultiplicitySystem>(q);
    ra_s = borel_splitting(sa);
    rc_s = borel_splitting_with_multiplicities(sc, *sa, *fs);
    sys_a = euler_system_standard(&ra_s, EulerVariant::Natural);
    sys_c = euler_system_standard(&rc_s, EulerVariant::Natural);
    rc_f = splitting_to_coefficient(rc_s, sys_c);
    rc_p = coefficient_to_pairs(rc_s, sys_c);
    ra_p = coefficient_to_pairs(ra_s, sys_a);
  }
};

Window test_window() {
  Window w;
  w.lo = -6;
  w.hi = 12;
  w.den_bound = 4;
  return w;
}

}  // namespace

TEST_CASE("e after pi_! is the identity, exactly") {
  Setup1 s;
  auto pirings = pi_shriek_rings(s.rc_f, s.d);
  auto rmod = ring_as_module(s.rc_f);
  auto tor = extend_to_flags(
      torsion_node_module(s.rc_s, s.sys_c, *s.sc->index_of_subgroup(ClosedSubgroup::trivial(1)), 2),
      s.rc_f);

  for (const ModuleDiagram* m : {&rmod, &tor}) {
    auto pim = pi_shriek(*m, s.d, pirings);
    auto back = apply_e(pim, s.d, s.rc_f);
    CHECK(back.same_as(*m));
  }
}

TEST_CASE("pi_!^e agrees with pi_! on finite fibers") {
  Setup1 s;
  auto pirings = pi_shriek_rings(s.rc_f, s.d);
  auto pierings = pi_shriek_e_rings(s.rc_s, s.sys_c, s.rc_f, s.d);
  REQUIRE(pirings.size() == pierings.size());
  for (std::size_t i = 0; i < pirings.size(); ++i) CHECK(pirings.value(i).same_ring(pierings.value(i)));
  for (std::size_t a = 0; a < pirings.size(); ++a)
    for (std::size_t b = 0; b < pirings.size(); ++b) {
      if (!pirings.has_arrow(a, b)) continue;
      CHECK(pirings.map(a, b).same_map(pierings.map(a, b)));
    }

  // module side: the canonical pi-structure gives the same product module
  auto rmod = ring_as_module(s.rc_f);
  auto pie = pi_shriek_e(rmod, s.d, pierings);
  auto pi = pi_shriek(rmod, s.d, pirings);
  std::string why;
  CHECK(modules_agree_windowed(pie, pi, -4, 10, &why));

  // counit e pi_!^e M -> M is an isomorphism (here: equality)
  auto back = apply_e(pie, s.d, s.rc_f);
  CHECK(back.same_as(rmod));
}

TEST_CASE("pi_!^e output is a p-module; broken block is detected") {
  Setup1 s;
  auto pierings = pi_shriek_e_rings(s.rc_s, s.sys_c, s.rc_f, s.d);
  auto rmod = ring_as_module(s.rc_f);
  auto pie = pi_shriek_e(rmod, s.d, pierings);
  auto rep = is_p_module(pie, test_window());
  CHECK(rep.pass);

  // zero out one block of a long flag but keep the singleton values: the
  // unit formula fails
  std::vector<ModValue> values;
  for (std::size_t i = 0; i < pie.size(); ++i) values.push_back(pie.value(i));
  const FlagPoset& fp = *pierings.index().flags;
  std::size_t long_flag = 0;
  for (std::size_t i = 0; i < fp.size(); ++i)
    if (fp.flag(i).length() == 1) long_flag = i;
  values[long_flag].comps[0] = CompModule::zero();
  std::map<std::pair<std::size_t, std::size_t>, ModMap> maps;
  for (std::size_t a = 0; a < pie.size(); ++a)
    for (std::size_t b = 0; b < pie.size(); ++b) {
      if (!pierings.has_arrow(a, b)) continue;
      ModMap mm = pie.map(a, b);
      if (b == long_flag) mm.comps[0] = CompMap::zero_map();
      maps.emplace(std::make_pair(a, b), std::move(mm));
    }
  ModuleDiagram broken(&pierings, std::move(values), std::move(maps));
  auto rep2 = is_p_module(broken, test_window());
  CHECK_FALSE(rep2.pass);
}

TEST_CASE("f and p round trips") {
  Setup1 s;
  auto tor = extend_to_pairs(
      torsion_node_module(s.rc_s, s.sys_c, *s.sc->index_of_subgroup(ClosedSubgroup::trivial(1)), 2),
      s.rc_p);
  // f sends the pair module to flags; p brings it back
  auto ff = functor_f(tor, s.rc_f);
  auto mi = is_middle_independent(ff, test_window());
  CHECK(mi.pass);
  auto back = functor_p(ff, s.rc_p, -8, 16);
  std::string why;
  CHECK(modules_agree_windowed(back, tor, -4, 10, &why));

  // p then f on a middle-independent flag module
  auto node = free_node_module(s.rc_s, {0, 2});
  auto mfree = extend_to_flags(node, s.rc_f);
  auto pfree = functor_p(mfree, s.rc_p, -8, 16);
  auto back2 = functor_f(pfree, s.rc_f);
  CHECK(modules_agree_windowed(back2, mfree, -4, 10, &why));

  // f o p and p o f on the ring module
  auto rmodp = ring_as_module(s.rc_p);
  auto frm = functor_f(rmodp, s.rc_f);
  auto rmodf = ring_as_module(s.rc_f);
  CHECK(modules_agree_windowed(frm, rmodf, -4, 10, &why));
}

TEST_CASE("q_!^d on the rank-1 instance") {
  Setup1 s;
  // (R F)^p = R_c^p; modules over R_a^p
  auto ra_mod = ring_as_module(s.ra_p);
  auto qd = q_shriek_d(ra_mod, s.q, s.rc_p);

  // (q_!^d R_a^p)(1 >= 1) = prod_i Q[c_i]
  const PairPoset& qpc = *s.rc_p.index().pairs;
  auto one = *s.sc->index_of_subgroup(ClosedSubgroup::trivial(1));
  std::size_t p11 = qpc.index_of(one, one);
  CHECK(qd.value(p11).comps.size() == 3);
  for (const auto& c : qd.value(p11).comps) CHECK(c.backend == CompModule::Backend::Free);

  // e q_!^d = identity
  auto back = apply_e_pairs_multiplicity(qd, s.q, s.ra_p);
  CHECK(back.same_as(ra_mod));

  // q_!^d of the zero module is zero
  std::vector<ModValue> zvals(s.ra_p.size());
  std::map<std::pair<std::size_t, std::size_t>, ModMap> zmaps;
  for (std::size_t i = 0; i < s.ra_p.size(); ++i) {
    ModValue v;
    for (std::size_t c = 0; c < s.ra_p.value(i).size(); ++c) v.comps.push_back(CompModule::zero());
    zvals[i] = std::move(v);
  }
  for (std::size_t a = 0; a < s.ra_p.size(); ++a)
    for (std::size_t b = 0; b < s.ra_p.size(); ++b) {
      if (!s.ra_p.has_arrow(a, b)) continue;
      ModMap mm;
      for (std::size_t c = 0; c < s.ra_p.value(b).size(); ++c) mm.comps.push_back(CompMap::zero_map());
      zmaps.emplace(std::make_pair(a, b), std::move(mm));
    }
  ModuleDiagram zero(&s.ra_p, std::move(zvals), std::move(zmaps));
  auto qz = q_shriek_d(zero, s.q, s.rc_p);
  for (std::size_t i = 0; i < qz.size(); ++i) CHECK(qz.value(i).is_zero());
}

TEST_CASE("pi_star on finite universes") {
  Setup1 s;
  auto pirings = pi_shriek_rings(s.rc_f, s.d);
  auto rmod = ring_as_module(s.rc_f);
  auto star = pi_star(rmod, s.d, pirings);

  // unit X -> e pi_* X is the identity
  auto unit = apply_e(star, s.d, s.rc_f);
  CHECK(unit.same_as(rmod));

  // counit pi_* e Xbar -> Xbar is an inclusion; on finite fibers equality
  auto counit = pi_star(apply_e(star, s.d, s.rc_f), s.d, pirings);
  CHECK(counit.same_as(star));

  // span description matches the product
  Window w = test_window();
  CHECK(pi_star_span_matches_product(rmod, s.d, star, w));

  // decomposition of the intersections over singleton flags
  std::string why;
  CHECK(pi_star_decomposition_check(rmod, s.d, pirings, w, &why));
}

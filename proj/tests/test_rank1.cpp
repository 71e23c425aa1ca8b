#include <flagalg/rank1.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace flagalg;
using namespace flagalg::rank1;

namespace {

AeFrac frac(std::initializer_list<long long> coeffs, int cpow) {
  Polynomial p(1);
  int e = 0;
  for (long long c : coeffs) {
    Monomial m{e};
    p.add_term(m, Rat(c));
    ++e;
  }
  AeFrac f{p, cpow};
  f.normalize();
  return f;
}

std::vector<ModelObject> ten_objects() {
  std::vector<ModelObject> out;
  out.push_back(zero_object());
  out.push_back(standard_eR());
  {  // shifted free line
    ModelObject x;
    x.vdegs = {2};
    x.tail.free_degs = {2};
    x.kappa = {{AeFamily::constant(AeFrac::constant(Rat(1)))}};
    out.push_back(x);
  }
  {  // rank 2 with a unipotent mixing entry
    ModelObject x;
    x.vdegs = {0, 2};
    x.tail.free_degs = {0, 2};
    x.kappa = {{AeFamily::constant(AeFrac::constant(Rat(1))),
                AeFamily::constant(AeFrac::c_power(1))},
               {AeFamily::constant(AeFrac::zero()),
                AeFamily::constant(AeFrac::constant(Rat(1)))}};
    out.push_back(x);
  }
  {  // exceptional torsion component
    ModelObject x = standard_eR();
    UniMod u;
    u.free_degs = {0};
    u.torsion = {{0, 2}};
    x.exceptional[5] = u;
    out.push_back(x);
  }
  {  // torsion in the tail pattern
    ModelObject x = standard_eR();
    x.tail.torsion = {{4, 1}};
    out.push_back(x);
  }
  {  // unit twist at one component (shifted generator there)
    ModelObject x = standard_eR();
    UniMod u;
    u.free_degs = {-2};
    x.exceptional[3] = u;
    x.kappa[0][0].exceptional[3] = AeFrac::c_power(1);
    out.push_back(x);
  }
  {  // denominator twist at one component
    ModelObject x = standard_eR();
    UniMod u;
    u.free_degs = {2};
    x.exceptional[4] = u;
    x.kappa[0][0].exceptional[4] = AeFrac::c_power(-1);
    out.push_back(x);
  }
  {  // rank 2 diagonal with exceptional torsion
    ModelObject x;
    x.vdegs = {0, 0};
    x.tail.free_degs = {0, 0};
    x.kappa = {{AeFamily::constant(AeFrac::constant(Rat(1))), AeFamily::constant(AeFrac::zero())},
               {AeFamily::constant(AeFrac::zero()), AeFamily::constant(AeFrac::constant(Rat(1)))}};
    UniMod u;
    u.free_degs = {0, 0};
    u.torsion = {{2, 2}};
    x.exceptional[7] = u;
    out.push_back(x);
  }
  {  // higher unit twist
    ModelObject x = standard_eR();
    UniMod u;
    u.free_degs = {-4};
    x.exceptional[2] = u;
    x.kappa[0][0].exceptional[2] = AeFrac::c_power(2);
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("ae fraction arithmetic") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coeff(-4, 4), pw(0, 3);
  for (int t = 0; t < 50; ++t) {
    AeFrac a = frac({coeff(rng), coeff(rng)}, pw(rng));
    AeFrac b = frac({coeff(rng), coeff(rng)}, pw(rng));
    AeFrac c = frac({coeff(rng)}, pw(rng));
    CHECK((a + b) == (b + a));
    CHECK((a * b) == (b * a));
    CHECK((a * (b + c)) == (a * b + a * c));
    CHECK((a - a).is_zero());
  }
  // normalization: c^3 / c = c^2 is integral
  AeFrac x{Polynomial::variable(1, 0).pow(3), 1};
  CHECK(x.is_integral());
  CHECK(frac({0, 1}, 2).degree() == -2);  // c / c^2
}

TEST_CASE("ae families") {
  AeFamily a = AeFamily::constant(AeFrac::constant(Rat(2)));
  a.exceptional[4] = AeFrac::c_power(1);
  AeFamily b = AeFamily::at_component(4, AeFrac::constant(Rat(3)));
  AeFamily s = a + b;
  CHECK(s.at(1) == AeFrac::constant(Rat(2)));
  CHECK(s.at(4) == (AeFrac::c_power(1) + AeFrac::constant(Rat(3))));
  CHECK(a.ae_integral());
  AeFamily fracs = AeFamily::constant(AeFrac::c_power(-2));
  CHECK_FALSE(fracs.ae_integral());
  a.exceptional[9] = AeFrac::c_power(-1);
  CHECK(a.ae_integral());                  // finitely many denominators allowed
  CHECK_FALSE(a.integral_everywhere());    // but not integral at component 9
}

TEST_CASE("strictness of localized products") {
  CHECK(strictness_witness_detected());
}

TEST_CASE("the square for N = R is a pullback") {
  std::string why;
  CHECK(rank1_square_is_pullback_for_R(-10, 14, 6, &why));
  // and the pullback profile is exactly the polynomial ring pattern
  auto pulled = pullback_tail_profile(standard_eR(), -6, 10, 6);
  for (int d = -6; d <= 10; ++d) {
    std::size_t expect = (d >= 0 && d % 2 == 0) ? 1 : 0;
    CHECK(pulled.dims[d] == expect);
  }
}

TEST_CASE("round trips on ten hand-built objects") {
  auto objs = ten_objects();
  REQUIRE(objs.size() == 10);
  for (std::size_t i = 0; i < objs.size(); ++i) {
    std::string why;
    // Gamma q_!^d after e on the connected-side object
    ModelObject a = rank1_e(objs[i]);
    INFO("object " << i << ": " << why);
    CHECK(rank1_round_trip_identity(a, -10, 14, 6, &why));
    // e after Gamma q_!^d on the all-subgroups side
    ModelObject c = rank1_as_c(a);
    CHECK(rank1_round_trip_identity(c, -10, 14, 6, &why));
  }
}

TEST_CASE("certificate failures are rejected") {
  // kappa with a fractional tail is not almost everywhere integral
  ModelObject bad = standard_eR();
  bad.kappa[0][0] = AeFamily::constant(AeFrac::c_power(-1));
  CHECK_THROWS_WITH(validate_object(bad), Catch::Matchers::ContainsSubstring("almost everywhere"));

  // a singular kappa fails quasicoherence
  ModelObject sing;
  sing.vdegs = {0, 0};
  sing.tail.free_degs = {0, 0};
  sing.kappa = {{AeFamily::constant(AeFrac::constant(Rat(1))),
                 AeFamily::constant(AeFrac::constant(Rat(1)))},
                {AeFamily::constant(AeFrac::constant(Rat(1))),
                 AeFamily::constant(AeFrac::constant(Rat(1)))}};
  CHECK_THROWS_WITH(validate_object(sing), Catch::Matchers::ContainsSubstring("not invertible"));

  // rank mismatch fails extendedness
  ModelObject mis = standard_eR();
  mis.tail.free_degs = {0, 2};
  CHECK_THROWS_WITH(validate_object(mis), Catch::Matchers::ContainsSubstring("free rank"));
}

TEST_CASE("zero object round trip") {
  std::string why;
  CHECK(rank1_round_trip_identity(zero_object(), -6, 10, 4, &why));
}

#include "doctest.h"

#include "cutpaste/kvar.hpp"
#include "cutpaste/serialize.hpp"
#include "dense_replay.hpp"

using namespace cutpaste;

TEST_CASE("Lefschetz polynomials") {
  CHECK(LPoly::projective_space(2).coeffs() == std::vector<std::int64_t>{1, 1, 1});
  CHECK(LPoly::torus(2).to_string() == "L^2 - 2*L + 1");
  CHECK(LPoly::torus(3).eval(7) == 216);
  CHECK((LPoly::lefschetz(2) - LPoly::lefschetz(2)).is_zero());
  CHECK_THROWS_AS(LPoly::constant(INT64_MAX) + LPoly::constant(1), ArithmeticError);
}

TEST_CASE("class table") {
  const KClass smooth = kclass_normalize("P(2) + 6*L");
  CHECK(kclass_realize(smooth, Measure::count(7)) == 99);
  CHECK(kclass_realize(smooth, Measure::euler()) == 9);
  for (std::int64_t q : {5, 7, 11}) CHECK(kclass_realize(smooth, Measure::count(q)) == q * q + 7 * q + 1);
  const KClass nodal = kclass_normalize("L^2 + 4*L + 2*P(1)");
  CHECK(kclass_realize(nodal, Measure::euler()) == 9);
  CHECK(kclass_realize(nodal, Measure::count(7)) == 49 + 42 + 2);
}

TEST_CASE("normalizer parses the expression grammar") {
  CHECK(kclass_normalize("(L - 1)^3") == KClass(LPoly::torus(3)));
  CHECK(kclass_normalize("P(3)") == KClass(LPoly::projective_space(3)));
  CHECK(kclass_normalize("2*[X] - [X] + L*[Z]") == KClass::atom("X") + KClass(LPoly::lefschetz()) * KClass::atom("Z"));
  CHECK(kclass_normalize("-L + 3") == KClass(LPoly(std::vector<std::int64_t>{3, -1})));
  CHECK_THROWS_AS(kclass_normalize("[X]*[Y]"), ArithmeticError);
  CHECK_THROWS_AS(kclass_normalize("L +"), ParseError);
  CHECK_THROWS_AS(kclass_normalize("P(2"), ParseError);
  CHECK_THROWS_AS(kclass_normalize("Q"), ParseError);
}

TEST_CASE("realization needs bindings for atoms") {
  const KClass c = kclass_normalize("L*[Z] + 1");
  CHECK_THROWS_AS(kclass_realize(c, Measure::count(5)), ArithmeticError);
  CHECK(kclass_realize(c, Measure::count(5), {{"Z", 4}}) == 21);
}

TEST_CASE("hyperplane complement matches enumeration") {
  // A^k x (A^1 \ 0)^{m-k}: points of F_q^m whose last m-k coordinates are nonzero.
  for (unsigned q : {5u, 7u})
    for (unsigned m = 1; m <= 4; ++m)
      for (unsigned k = 0; k < m; ++k) {
        std::uint64_t total = 1, n = 0;
        for (unsigned i = 0; i < m; ++i) total *= q;
        for (std::uint64_t idx = 0; idx < total; ++idx) {
          std::uint64_t r = idx;
          bool ok = true;
          for (unsigned i = 0; i < m; ++i, r /= q)
            if (i >= k && r % q == 0) ok = false;
          n += ok;
        }
        CHECK(kclass_realize(kv_hyperplane_complement(m, k), Measure::count(q)) == static_cast<std::int64_t>(n));
      }
  CHECK(kclass_realize(kv_hyperplane_complement(3, 1), Measure::count(7)) == 252);
  CHECK_THROWS_AS(kv_hyperplane_complement(3, 3), InvalidArgument);
}

TEST_CASE("fiber decomposition relation") {
  const Relation r = kv_fiber_decomposition(3);
  CHECK(r.lhs == KClass::atom("X"));
  CHECK(r.rhs == kclass_normalize("[X0] + [S_inf] + L*[Z]"));
}

TEST_CASE("relation set layout") {
  const auto rel = kv_generate_relations(3);
  REQUIRE(rel.size() == 7);
  CHECK(rel[0].lhs == kclass_normalize("L*[X]"));
  CHECK(rel[3].rhs == kclass_normalize("L^4*[Xtilde]"));
  CHECK(rel[4].lhs == kclass_normalize("(L-1)^3*[X]"));
  CHECK(rel[6].lhs == kclass_normalize("L^2*(L-1)*[X]"));
}

TEST_CASE("cancellation derivations replay independently for m <= 10") {
  for (unsigned m = 1; m <= 10; ++m) {
    CAPTURE(m);
    const Derivation d = kv_cancellation_derive(m);
    CHECK(kv_replay(d).ok);
    CHECK(dense::dense_replay(m, to_json(d)) == "");
  }
}

TEST_CASE("replay rejects a tampered derivation") {
  Derivation d = kv_cancellation_derive(4);
  d.steps[2].scalar += 1;
  CHECK_FALSE(kv_replay(d).ok);
  CHECK(dense::dense_replay(4, to_json(d)) != "");
  Derivation e = kv_cancellation_derive(3);
  e.conclusion = Relation{KClass::atom("X"), KClass::atom("Z"), ""};
  CHECK_FALSE(kv_replay(e).ok);
}

#include "doctest.h"

#include "cutpaste/count.hpp"
#include "cutpaste/pencil.hpp"
#include "cutpaste/seed.hpp"

using namespace cutpaste;

namespace {

// Singular points of a cubic form by evaluating its four partials as
// polynomials at every point of P^3(F_{p^k}).
std::vector<std::vector<Raw>> brute_singular_points(const MPoly& f, unsigned k) {
  const Field ext = Field::create(f.field().characteristic(), k);
  std::vector<MPoly> d;
  for (std::size_t v = 0; v < 4; ++v) d.push_back(f.partial(v));
  const auto p3 = CellDecomposition::projective(3, ext.size());
  std::vector<std::vector<Raw>> out;
  std::vector<Raw> x(4);
  for (std::uint64_t i = 0; i < p3.total(); ++i) {
    p3.point(i, x.data());
    bool sing = true;
    for (const auto& dv : d) sing = sing && dv.eval_raw(ext, x) == 0;
    if (sing) out.push_back(x);
  }
  return out;
}

const Pencil& pencil_7_3() {
  static const Pencil p = make_pencil(Field::create(7), 3, 1);
  return p;
}

const Pencil& pencil_7_3_tilde() {
  static const Pencil p = make_pencil(Field::create(7), 3, 2, &pencil_7_3());
  return p;
}

std::vector<FieldElem> elems(const Field& f, const Raw* x, std::size_t n) {
  std::vector<FieldElem> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(f.elem(x[i]));
  return out;
}

}  // namespace

TEST_CASE("nodal cubic over F_7") {
  const Field f = Field::create(7);
  const NodalCubic c = make_nodal_cubic(f, 1);
  CHECK(c.certificate.ok());
  const std::vector<Raw> node{0, 0, 0, 1};
  CHECK(c.form.eval_raw(f, node) == 0);
  for (std::size_t v = 0; v < 4; ++v) CHECK(c.form.partial(v).eval_raw(f, node) == 0);
  for (unsigned k = 1; k <= 2; ++k) {
    const auto pts = brute_singular_points(c.form, k);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == node);
  }
  // degree in x3 is at most 1 by construction
  CHECK(c.form.degree_in(3) <= 1);
}

TEST_CASE("quadratic discriminant detects rank") {
  const Field f = Field::create(7);
  const MPoly conic = MPoly::from_terms(f, 4, {{{1, 0, 1, 0}, 1}, {{0, 2, 0, 0}, 6}});
  CHECK(quadratic_discriminant(conic) != 0);
  const MPoly rank2 = MPoly::from_terms(f, 4, {{{2, 0, 0, 0}, 1}, {{0, 2, 0, 0}, 1}});
  CHECK(quadratic_discriminant(rank2) == 0);
  // F = x3 * rank2 + C is rejected: the node is not ordinary
  const MPoly x3 = MPoly::variable(f, 4, 3);
  const MPoly bad = (x3 * rank2 + MPoly::monomial(f, {3, 0, 0, 0}, 1) + MPoly::monomial(f, {0, 0, 3, 0}, 1))
                        .with_grading({kXBlock});
  CHECK_FALSE(certify_nodal(bad, 1, {}).ok());
}

TEST_CASE("split nodal cubic has six rational lines through the node") {
  for (std::uint32_t q : {7u, 11u}) {
    const Field f = Field::create(q);
    const NodalCubic c = make_split_nodal_cubic(f, 3);
    CHECK(c.certificate.ok());
    // Lines through [0:0:0:1] on F are the conic points (s^2 : s u : u^2) where C vanishes.
    const FieldKernel K = f.kernel();
    int lines = 0;
    for (std::uint64_t i = 0; i <= q; ++i) {
      const Raw s = i < q ? 1 : 0, u = i < q ? static_cast<Raw>(i) : 1;
      const std::vector<Raw> x{K.mul(s, s), K.mul(s, u), K.mul(u, u), 0};
      lines += c.form.eval_raw(f, x) == 0;
    }
    CHECK(lines == 6);
  }
}

TEST_CASE("pencil construction") {
  const Pencil& a = pencil_7_3();
  const Pencil& b = pencil_7_3_tilde();
  CHECK(a.certified);
  CHECK(b.certified);
  CHECK(a.shares_surfaces_with(b));
  CHECK_FALSE(a.alpha == b.alpha);
  CHECK(a.equation().is_homogeneous(std::array{kXBlock, Block{4, 2, 3}}));
  CHECK_THROWS_AS(make_pencil(Field::create(5), 5, 1), InvalidArgument);
  CHECK_THROWS_AS(make_pencil(Field::create(7), 0, 1), InvalidArgument);
  CHECK_THROWS_AS(make_pencil(Field::create(7, 2), 3, 1), InvalidArgument);
  // deterministic per seed
  CHECK(make_pencil(Field::create(7), 3, 1).equation() == a.equation());
}

TEST_CASE("certified pencils pass the generic smoothness scan") {
  const Pencil p = make_pencil(Field::create(5), 1, 4);
  const SmoothnessResult r = check_smooth(p.equation(), 2);
  CHECK(r.smooth);
  CHECK(r.points_scanned == 156 * 6 + 16276 * 26);
  CHECK(check_smooth(pencil_7_3().equation(), 1).smooth);
}

TEST_CASE("degenerate pencils are caught") {
  const Pencil& a = pencil_7_3();
  const Field& f = a.field;
  // alpha = beta = t0^3: X contains the whole fiber t0 = 0 with multiplicity 3
  const MPoly t03 = binary_form(f, {1, 0, 0, 0});
  const Pencil bad = pencil_from_forms(f, 3, a.G, a.F, t03, t03);
  const SmoothnessResult r = check_smooth(bad.equation(), 1);
  CHECK_FALSE(r.smooth);
  REQUIRE(r.witness.size() == 6);
  const PencilCertificates c = certify_pencil(bad, 1);
  CHECK_FALSE(c.alpha_beta_coprime);
  CHECK_FALSE(c.total_space_smooth);
  CHECK_FALSE(c.ok());

  // G nodal: the member [1:0] is singular
  const Pencil gsing = pencil_from_forms(f, 3, a.F, a.G, a.alpha, a.beta);
  CHECK_FALSE(certify_pencil(gsing, 1).g_smooth);

  // F alone: the witness is the node
  const SmoothnessResult rf = check_smooth(a.F.with_grading({kXBlock}), 2);
  CHECK_FALSE(rf.smooth);
  CHECK(rf.witness == std::vector<Raw>{0, 0, 0, 1});
}

TEST_CASE("resultant vanishes exactly for a common root") {
  const Field f = Field::create(7);
  // t0^2 - t1^2 vs t0 t1: coprime; t0^2 - t1^2 vs t0^2 - t0 t1: share [1:1]
  CHECK(binary_resultant(f, {1, 0, 6}, {0, 1, 0}) != 0);
  CHECK(binary_resultant(f, {1, 0, 6}, {1, 6, 0}) == 0);
  CHECK(binary_resultant(f, {1, 0}, {0, 1}) != 0);
}

TEST_CASE("pencil scan agrees with brute-force singular points of members") {
  const Pencil& p = pencil_7_3();
  const PencilScan scan = scan_pencil(p, 1);
  // Members [1:s] = G + s F and [0:1] = F.
  for (std::uint64_t s = 0; s <= 7; ++s) {
    const MPoly member = s < 7 ? p.G + p.F.scaled(static_cast<Raw>(s)) : p.F;
    const auto pts = brute_singular_points(member.with_grading({kXBlock}), 1);
    const auto it = scan.singular_members.find(s);
    CHECK((it == scan.singular_members.end() ? 0 : it->second.points) == pts.size());
  }
  CHECK_FALSE(scan.total_space_witness);
}

TEST_CASE("the fiber at infinity is a smooth cubic surface") {
  for (const Pencil* p : {&pencil_7_3(), &pencil_7_3_tilde()}) {
    const PencilCounter pc(*p, 1);
    const auto n = static_cast<std::int64_t>(pc.fiber_at_infinity());
    CHECK(n % 7 == 1);
    CHECK(std::abs(n - 49 - 1) <= 7 * 7);
  }
}

TEST_CASE("universal family restricts to the pencil") {
  CHECK(universal_restricts_to_pencil(pencil_7_3()));
  CHECK(universal_restricts_to_pencil(pencil_7_3_tilde()));
  const Pencil p = make_pencil(Field::create(11), 4, 9);
  CHECK(universal_restricts_to_pencil(p));
}

TEST_CASE("phi on the zero fiber") {
  const Pencil& p = pencil_7_3();
  const Field& f = p.field;
  const auto ac = p.alpha_coeffs(), bc = p.beta_coeffs();
  const auto p3 = CellDecomposition::projective(3, 7);
  std::vector<Raw> x(4);
  bool found = false;
  for (std::uint64_t i = 0; i < p3.total() && !found; ++i) {
    p3.point(i, x.data());
    const auto xe = elems(f, x.data(), 4);
    const FieldElem g = p.G.eval(xe), fv = p.F.eval(xe);
    if (fv.is_zero() || !(f.elem(ac[0]) * g + f.elem(bc[0]) * fv).is_zero()) continue;
    found = true;
    const PhiDomainPoint dom{xe, f.zero(), std::vector<FieldElem>(3, f.zero()), f.zero()};
    const PhiImagePoint img = phi_forward(p, dom);
    for (const auto& y : img.y) CHECK(y.is_zero());
    CHECK(img.lambda.is_zero());
    CHECK(img.z.is_zero());
    const PhiDomainPoint back = phi_inverse(p, img);
    CHECK(back.lambda.is_zero());
    for (const auto& y : back.y) CHECK(y.is_zero());
  }
  CHECK(found);
}

TEST_CASE("phi rejects F(x) = 0 and a degenerate lambda coefficient") {
  const Pencil& a = pencil_7_3();
  const Field& f = a.field;
  // alpha with alpha0 = 0 puts {F = 0} inside the fiber over t = 0
  const Pencil p = pencil_from_forms(f, 3, a.G, a.F, binary_form(f, {0, 1, 2, 3}), a.beta);
  const auto p3 = CellDecomposition::projective(3, 7);
  std::vector<Raw> x(4);
  bool f_zero = false;
  for (std::uint64_t i = 0; i < p3.total() && !f_zero; ++i) {
    p3.point(i, x.data());
    const auto xe = elems(f, x.data(), 4);
    if (!a.F.eval(xe).is_zero() || a.G.eval(xe).is_zero()) continue;
    f_zero = true;
    const PhiDomainPoint dom{xe, f.zero(), std::vector<FieldElem>(3, f.one()), f.one()};
    try {
      phi_forward(p, dom);
      FAIL("expected PhiError");
    } catch (const PhiError& e) {
      CHECK(e.reason() == PhiError::Reason::f_vanishes);
    }
  }
  CHECK(f_zero);

  // -beta1 - alpha1 g = 0 with g = G/F = -beta(1,t)/alpha(1,t) on the fiber
  const Field f11 = Field::create(11);
  const Pencil q = make_pencil(f11, 3, 5);
  const auto ac = q.alpha_coeffs(), bc = q.beta_coeffs();
  const FieldKernel K = f11.kernel();
  const auto p3b = CellDecomposition::projective(3, 11);
  bool degenerate = false;
  for (Raw t = 0; t < 11 && !degenerate; ++t) {
    Raw at = 0, bt = 0;
    for (std::size_t i = 4; i-- > 0;) {
      at = K.add(K.mul(at, t), ac[i]);
      bt = K.add(K.mul(bt, t), bc[i]);
    }
    for (std::uint64_t i = 0; i < p3b.total() && !degenerate; ++i) {
      p3b.point(i, x.data());
      const auto xe = elems(f11, x.data(), 4);
      const Raw g = q.G.eval(xe).raw(), fv = q.F.eval(xe).raw();
      if (fv == 0 || K.add(K.mul(at, g), K.mul(bt, fv)) != 0) continue;
      if (K.add(bc[1], K.mul(ac[1], K.div(g, fv))) != 0) continue;
      degenerate = true;
      const PhiImagePoint img{xe, std::vector<FieldElem>(3, f11.one()), f11.one(), f11.elem(t), f11.one()};
      try {
        phi_inverse(q, img);
        FAIL("expected PhiError");
      } catch (const PhiError& e) {
        CHECK(e.reason() == PhiError::Reason::degenerate_lambda);
      }
    }
  }
  CHECK(degenerate);
}

TEST_CASE("phi round trips over F_11") {
  const Pencil p = make_pencil(Field::create(11), 3, 1);
  const PhiSampleStats st = phi_roundtrip_sample(p, 1, 10000, 77);
  CHECK(st.valid == 10000);
  CHECK(st.roundtrip_ok == st.valid);
  CHECK(st.image_on_universal == st.valid);
  CHECK(st.samples == st.valid + st.skipped_f_zero + st.skipped_degenerate);
  const PhiSampleStats ext = phi_roundtrip_sample(pencil_7_3(), 2, 2000, 78);
  CHECK(ext.roundtrip_ok == ext.valid);
  CHECK(ext.image_on_universal == ext.valid);
}

TEST_CASE("chart isomorphism") {
  const Pencil& a = pencil_7_3();
  const ChartIsomorphism id = universal_linear_iso(a, a);
  CHECK(id.identity_holds);
  for (unsigned i = 0; i < 3; ++i) {
    CHECK(id.offset[i] == 0);
    for (unsigned j = 0; j < 3; ++j) CHECK(id.matrix[i][j] == (i == j ? 1u : 0u));
  }
  CHECK(id.lambda_shift.is_zero());

  const Pencil& b = pencil_7_3_tilde();
  const ChartIsomorphism iso = universal_linear_iso(a, b);
  CHECK(iso.identity_holds);
  // Points of b's chart locus land on a's chart locus.
  const MPoly ea = universal_chart_equation(a), eb = universal_chart_equation(b);
  const Field& f = a.field;
  Rng rng(5);
  int hits = 0;
  while (hits < 200) {
    std::vector<Raw> pt(8);
    for (auto& v : pt) v = static_cast<Raw>(rng.below(7));
    if (eb.eval_raw(f, pt) != 0) continue;
    ++hits;
    iso.apply(f, pt);
    CHECK(ea.eval_raw(f, pt) == 0);
  }

  const Pencil other = make_pencil(Field::create(7), 3, 3);
  CHECK_THROWS_AS(universal_linear_iso(a, other), InvalidArgument);
  CHECK(count_universal_chart(a, 1).count == count_universal_chart(b, 1).count);
}

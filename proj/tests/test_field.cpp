#include "doctest.h"

#include "cutpaste/field.hpp"
#include "cutpaste/seed.hpp"

using namespace cutpaste;

namespace {

// Schoolbook product of coefficient vectors reduced by a monic modulus.
std::vector<std::uint32_t> mulmod(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                                  const std::vector<std::uint32_t>& mod, std::uint32_t p) {
  const std::size_t k = mod.size() - 1;
  std::vector<std::uint64_t> prod(2 * k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + std::uint64_t(a[i]) * b[j]) % p;
  for (std::size_t d = 2 * k - 1; d >= k; --d) {
    const std::uint64_t c = prod[d];
    if (!c) continue;
    for (std::size_t i = 0; i <= k; ++i) prod[d - k + i] = (prod[d - k + i] + (p - c) * mod[i]) % p;
  }
  return {prod.begin(), prod.begin() + static_cast<long>(k)};
}

std::vector<std::uint32_t> padded(const Field& f, Raw v) {
  auto c = f.coeffs(v);
  c.resize(f.degree(), 0);
  return c;
}

}  // namespace

TEST_CASE("smallest irreducible quadratic over F_5") {
  // x^2 + b x + c with (c, b) in encoding order; irreducible iff no root.
  std::vector<std::uint32_t> expected;
  for (std::uint32_t code = 0; code < 25 && expected.empty(); ++code) {
    const std::uint32_t c = code % 5, b = code / 5;
    bool root = false;
    for (std::uint32_t x = 0; x < 5; ++x) root = root || (x * x + b * x + c) % 5 == 0;
    if (!root) expected = {c, b, 1};
  }
  const Field f = Field::create(5, 2);
  CHECK(f.modulus() == expected);
  CHECK(f.modulus() == std::vector<std::uint32_t>{2, 0, 1});
}

TEST_CASE("prime field basics") {
  const Field f = Field::create(7);
  CHECK(f.size() == 7);
  CHECK(f.from_int(3).inverse() == f.from_int(5));
  CHECK(f.from_int(-1) == f.from_int(6));
  CHECK(f.from_int(3) * f.from_int(5) == f.one());
  CHECK_THROWS_AS(f.zero().inverse(), ArithmeticError);
  CHECK_THROWS_AS(f.one() / f.zero(), ArithmeticError);
}

TEST_CASE("invalid fields are rejected") {
  CHECK_THROWS_AS(Field::create(4), InvalidArgument);
  CHECK_THROWS_AS(Field::create(3), InvalidArgument);
  CHECK_THROWS_AS(Field::create(2), InvalidArgument);
  CHECK_THROWS_AS(Field::create(7, 6), InvalidArgument);  // 117649 > 2^16
  CHECK_THROWS_AS(Field::create(7, 0), InvalidArgument);
}

TEST_CASE("mixed-field arithmetic throws") {
  const Field a = Field::create(5), b = Field::create(7);
  CHECK_THROWS_AS(a.one() + b.one(), ArithmeticError);
  CHECK_THROWS_AS(Field::create(5, 2).one() * Field::create(5, 3).one(), ArithmeticError);
}

TEST_CASE("table multiplication matches schoolbook polynomial products") {
  for (auto [p, k] : {std::pair{5u, 2u}, {7u, 3u}, {11u, 2u}, {13u, 4u}}) {
    const Field f = Field::create(p, k);
    const FieldKernel K = f.kernel();
    Rng rng(derive_seed(p, "mul", k));
    for (int trial = 0; trial < 400; ++trial) {
      const Raw a = static_cast<Raw>(rng.below(f.size())), b = static_cast<Raw>(rng.below(f.size()));
      CHECK(padded(f, K.mul(a, b)) == mulmod(padded(f, a), padded(f, b), f.modulus(), p));
      CHECK(K.mul(a, b) == f.mul_reference(a, b));
      if (a) {
        CHECK(K.mul(a, K.inv(a)) == 1);
        CHECK(K.inv(a) == f.inv_reference(a));
      }
    }
  }
}

TEST_CASE("field axioms on random triples") {
  for (auto [p, k] : {std::pair{5u, 1u}, {5u, 2u}, {7u, 2u}, {11u, 3u}, {5u, 6u}}) {
    const Field f = Field::create(p, k);
    Rng rng(derive_seed(p, "axioms", k));
    auto draw = [&] { return f.elem(static_cast<Raw>(rng.below(f.size()))); };
    for (int trial = 0; trial < 200; ++trial) {
      const FieldElem a = draw(), b = draw(), c = draw();
      CHECK((a + b) + c == a + (b + c));
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a + b == b + a);
      CHECK(a * b == b * a);
      CHECK(a - a == f.zero());
      CHECK(a + f.zero() == a);
      CHECK(a * f.one() == a);
      if (!b.is_zero()) CHECK((a / b) * b == a);
    }
  }
}

TEST_CASE("Frobenius is a ring endomorphism fixing exactly F_p") {
  const Field f = Field::create(7, 2);
  std::size_t fixed = 0;
  for (const auto& a : f.elements()) {
    CHECK(a.pow(f.size()) == a);
    if (a.pow(7) == a) ++fixed;
    for (Raw r : {Raw{3}, Raw{17}, Raw{48}}) {
      const FieldElem b = f.elem(r);
      CHECK((a + b).pow(7) == a.pow(7) + b.pow(7));
      CHECK((a * b).pow(7) == a.pow(7) * b.pow(7));
    }
  }
  CHECK(fixed == 7);
}

TEST_CASE("generator has full order") {
  for (auto [p, k] : {std::pair{5u, 2u}, {7u, 3u}, {11u, 1u}}) {
    const Field f = Field::create(p, k);
    const FieldElem g = f.elem(f.generator());
    const std::uint32_t n = f.size() - 1;
    CHECK(g.pow(n) == f.one());
    for (std::uint32_t d = 2; d <= n; ++d)
      if (n % d == 0) CHECK_FALSE(g.pow(n / d) == f.one());
  }
}

TEST_CASE("encoding round trip and prime subfield embedding") {
  const Field f = Field::create(5, 3);
  for (Raw v = 0; v < f.size(); ++v) CHECK(f.encode(f.coeffs(v)) == v);
  const Field fp = Field::create(5);
  const FieldKernel K = f.kernel(), Kp = fp.kernel();
  for (Raw a = 0; a < 5; ++a)
    for (Raw b = 0; b < 5; ++b) {
      CHECK(K.mul(a, b) == Kp.mul(a, b));
      CHECK(K.add(a, b) == Kp.add(a, b));
    }
}

TEST_CASE("fields are shared per (p, k)") {
  CHECK(Field::create(11, 2) == Field::create(11, 2));
  CHECK_FALSE(Field::create(11, 2) == Field::create(11, 1));
}

TEST_CASE("irreducibility test against root counting for quadratics and cubics") {
  const std::uint32_t p = 7;
  for (std::uint32_t code = 0; code < p * p * p; ++code) {
    fp_poly::Poly f{code % p, (code / p) % p, code / (p * p), 1};
    bool root = false;
    for (std::uint32_t x = 0; x < p && !root; ++x) {
      std::uint64_t v = 0;
      for (std::size_t i = f.size(); i-- > 0;) v = (v * x + f[i]) % p;
      root = v == 0;
    }
    // a cubic is irreducible iff it has no root
    CHECK(fp_poly::is_irreducible(f, p) == !root);
  }
}

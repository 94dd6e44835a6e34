#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cutpaste/error.hpp"

namespace cutpaste {

// Encoded field element: c0 + c1*p + ... + c_{k-1}*p^{k-1} for the
// polynomial-basis coefficients (c0, ..., c_{k-1}). Elements of the prime
// subfield encode as their residue, so F_p values embed into F_{p^k}
// unchanged.
using Raw = std::uint32_t;

// Largest p^k a Field may have; every field is small enough to enumerate.
inline constexpr std::uint64_t kMaxFieldSize = 1u << 16;

namespace detail {

struct FieldTables {
  std::uint32_t p = 0;
  std::uint32_t k = 0;
  std::uint32_t size = 0;
  std::vector<std::uint32_t> modulus;  // monic, length k + 1, constant term first
  std::vector<std::uint32_t> pow_p;    // p^0 .. p^{k-1}
  Raw generator = 0;

  // Full addition/multiplication tables when size <= kFullTableSize.
  bool full = false;
  std::vector<std::uint16_t> add_tab;
  std::vector<std::uint16_t> mul_tab;

  std::vector<std::uint32_t> log;  // log[0] unused
  std::vector<std::uint32_t> exp;  // length 2 * (size - 1)
  std::vector<Raw> neg;
  std::vector<Raw> inv;            // inv[0] unused

  Raw add_digits(Raw a, Raw b) const noexcept;
};

inline constexpr std::uint32_t kFullTableSize = 2048;

}  // namespace detail

// Table-driven arithmetic on Raw encodings for enumeration loops. No checks:
// callers guarantee that operands belong to the field and divisors are nonzero.
class FieldKernel {
 public:
  explicit FieldKernel(const detail::FieldTables& t) noexcept : t_(&t) {}

  std::uint32_t size() const noexcept { return t_->size; }

  Raw add(Raw a, Raw b) const noexcept {
    if (t_->full) return t_->add_tab[a * t_->size + b];
    return t_->add_digits(a, b);
  }
  Raw neg(Raw a) const noexcept { return t_->neg[a]; }
  Raw sub(Raw a, Raw b) const noexcept { return add(a, t_->neg[b]); }
  Raw mul(Raw a, Raw b) const noexcept {
    if (t_->full) return t_->mul_tab[a * t_->size + b];
    if (a == 0 || b == 0) return 0;
    return t_->exp[t_->log[a] + t_->log[b]];
  }
  Raw inv(Raw a) const noexcept { return t_->inv[a]; }
  Raw div(Raw a, Raw b) const noexcept { return mul(a, t_->inv[b]); }
  Raw pow(Raw a, std::uint64_t e) const noexcept;

 private:
  const detail::FieldTables* t_;
};

class FieldElem;

// The finite field F_{p^k}, p prime >= 5, built on the lexicographically
// smallest monic irreducible polynomial of degree k over F_p. Instances are
// cheap handles onto shared immutable tables; two Fields with equal (p, k)
// are the same field.
class Field {
 public:
  // Throws InvalidArgument for non-prime p, p < 5, k < 1, or p^k above
  // kMaxFieldSize.
  static Field create(std::uint32_t p, std::uint32_t k = 1);

  std::uint32_t characteristic() const noexcept { return t_->p; }
  std::uint32_t degree() const noexcept { return t_->k; }
  std::uint32_t size() const noexcept { return t_->size; }
  const std::vector<std::uint32_t>& modulus() const noexcept { return t_->modulus; }
  Raw generator() const noexcept { return t_->generator; }

  FieldKernel kernel() const noexcept { return FieldKernel(*t_); }

  FieldElem elem(Raw v) const;
  FieldElem from_coeffs(std::span<const std::uint32_t> coeffs) const;
  FieldElem from_int(std::int64_t v) const;
  FieldElem zero() const;
  FieldElem one() const;

  Raw raw_from_int(std::int64_t v) const noexcept;
  std::vector<std::uint32_t> coeffs(Raw v) const;
  Raw encode(std::span<const std::uint32_t> coeffs) const;

  // All p^k elements ordered by encoding: zero, one, 2, ..., then elements
  // with c1 = 1, ... (coefficient vectors compared with c_{k-1} most
  // significant).
  std::vector<FieldElem> elements() const;

  // Polynomial-basis arithmetic without lookup tables; the tables are built
  // from these and tests compare the two.
  Raw mul_reference(Raw a, Raw b) const;
  Raw inv_reference(Raw a) const;  // extended Euclid on F_p[x] / (modulus)

  std::string to_string() const;

  friend bool operator==(const Field& a, const Field& b) noexcept {
    return a.t_ == b.t_ || (a.t_->p == b.t_->p && a.t_->k == b.t_->k);
  }

 private:
  explicit Field(std::shared_ptr<const detail::FieldTables> t) : t_(std::move(t)) {}
  std::shared_ptr<const detail::FieldTables> t_;
};

class FieldElem {
 public:
  FieldElem(Field f, Raw v);

  const Field& field() const noexcept { return field_; }
  Raw raw() const noexcept { return v_; }
  std::vector<std::uint32_t> coeffs() const { return field_.coeffs(v_); }
  bool is_zero() const noexcept { return v_ == 0; }

  FieldElem operator-() const;
  FieldElem inverse() const;  // throws ArithmeticError on zero
  FieldElem pow(std::uint64_t e) const;

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b);
  FieldElem& operator+=(const FieldElem& b) { return *this = *this + b; }
  FieldElem& operator-=(const FieldElem& b) { return *this = *this - b; }
  FieldElem& operator*=(const FieldElem& b) { return *this = *this * b; }

  // Elements of different fields compare unequal.
  friend bool operator==(const FieldElem& a, const FieldElem& b) noexcept {
    return a.v_ == b.v_ && a.field_ == b.field_;
  }

  std::string to_string() const;

 private:
  Field field_;
  Raw v_;
};

bool is_prime(std::uint64_t n) noexcept;

// Dense polynomials over F_p (coefficient vectors, constant term first),
// used for modulus selection and reference arithmetic.
namespace fp_poly {
using Poly = std::vector<std::uint32_t>;
void trim(Poly& a);
Poly mul(const Poly& a, const Poly& b, std::uint32_t p);
Poly mod(Poly a, const Poly& m, std::uint32_t p);
Poly sub(const Poly& a, const Poly& b, std::uint32_t p);
Poly gcd(Poly a, Poly b, std::uint32_t p);
Poly powmod(Poly base, std::uint64_t e, const Poly& m, std::uint32_t p);
// Ben-Or test: no factor of degree <= deg/2.
bool is_irreducible(const Poly& f, std::uint32_t p);
}  // namespace fp_poly

}  // namespace cutpaste

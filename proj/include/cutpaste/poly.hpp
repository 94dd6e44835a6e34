#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cutpaste/field.hpp"

namespace cutpaste {

using Exponents = std::vector<std::uint16_t>;

struct Term {
  Exponents exps;
  Raw coeff;  // nonzero, encoded in the polynomial's field

  friend bool operator==(const Term&, const Term&) = default;
};

// A contiguous run of variables that is homogeneous of a fixed degree, e.g.
// the x-block {0, 4, 3} and t-block {4, 2, m} of a pencil equation.
struct Block {
  std::size_t first = 0;
  std::size_t count = 0;
  unsigned degree = 0;

  friend bool operator==(const Block&, const Block&) = default;
};

// Graded lexicographic: higher total degree first, then larger exponent of
// the lowest-index variable first.
bool grlex_greater(const Exponents& a, const Exponents& b) noexcept;

// Sparse multivariate polynomial over a Field. Terms are kept sorted in
// descending grlex order with no duplicates and no zero coefficients.
class MPoly {
 public:
  MPoly(Field field, std::size_t nvars);

  static MPoly constant(Field field, std::size_t nvars, Raw c);
  static MPoly variable(Field field, std::size_t nvars, std::size_t var);
  static MPoly monomial(Field field, Exponents exps, Raw c);
  // Collects duplicates and drops zeros.
  static MPoly from_terms(Field field, std::size_t nvars, std::vector<Term> terms);

  const Field& field() const noexcept { return field_; }
  std::size_t nvars() const noexcept { return nvars_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int total_degree() const noexcept;  // -1 for zero
  unsigned degree_in(std::size_t var) const;
  // Coefficient of the given monomial (0 when absent).
  Raw coeff(const Exponents& exps) const;

  const std::optional<std::vector<Block>>& grading() const noexcept { return grading_; }
  // Attaches grading metadata; throws InvalidArgument if a term disagrees.
  MPoly with_grading(std::vector<Block> blocks) const;
  bool is_homogeneous(std::span<const Block> blocks) const;

  FieldElem eval(std::span<const FieldElem> point) const;
  // Evaluates at a point whose coordinates are encodings in `over`, which
  // must equal field() or be an extension of field()'s prime field when
  // field() is prime.
  Raw eval_raw(const Field& over, std::span<const Raw> point) const;

  MPoly partial(std::size_t var) const;

  // Coefficients of a prime-field polynomial reinterpreted in an extension.
  MPoly embed(const Field& ext) const;
  // Variable i of this polynomial becomes variable var_map[i] of a ring with
  // new_nvars variables. Grading is dropped.
  MPoly remap(std::size_t new_nvars, std::span<const std::size_t> var_map) const;
  // Replaces variable i by images[i]; all images share a ring.
  MPoly substitute(std::span<const MPoly> images) const;

  MPoly scaled(Raw c) const;
  MPoly pow(unsigned e) const;

  friend MPoly operator+(const MPoly& a, const MPoly& b);
  friend MPoly operator-(const MPoly& a, const MPoly& b);
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  MPoly operator-() const;

  // Structural equality of canonical forms; grading metadata is ignored.
  friend bool operator==(const MPoly& a, const MPoly& b) noexcept {
    return a.nvars_ == b.nvars_ && a.field_ == b.field_ && a.terms_ == b.terms_;
  }

  std::string to_string(std::span<const std::string> names = {}) const;

 private:
  void check_compatible(const MPoly& other) const;

  Field field_;
  std::size_t nvars_;
  std::vector<Term> terms_;
  std::optional<std::vector<Block>> grading_;
};

// All exponent vectors of total degree d supported on `block`, descending
// grlex.
std::vector<Exponents> block_monomials(std::size_t nvars, const Block& block);

// Homogeneous form of degree block.degree in the variables of `block`, one
// uniformly drawn coefficient per monomial (in block_monomials order) from
// Rng(seed). Zero draws are dropped, so the form may have fewer terms.
MPoly random_form(const Field& field, std::size_t nvars, const Block& block, std::uint64_t seed);

// Flattened polynomial for enumeration loops: evaluates on Raw points of a
// fixed field with no allocation.
class CompiledPoly {
 public:
  CompiledPoly(const MPoly& poly, const Field& over);

  Raw eval(const Raw* point) const noexcept;
  std::size_t nvars() const noexcept { return nvars_; }
  std::size_t term_count() const noexcept { return coeffs_.size(); }

 private:
  Field over_;
  FieldKernel kernel_;
  std::size_t nvars_;
  std::vector<Raw> coeffs_;
  std::vector<std::uint16_t> exps_;  // term-major, nvars_ per term
};

}  // namespace cutpaste

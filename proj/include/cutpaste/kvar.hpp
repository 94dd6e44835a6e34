#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cutpaste {

// Integer polynomial in the Lefschetz class L = [A^1]. Coefficients are
// stored constant term first with no trailing zeros; all arithmetic is
// overflow-checked.
class LPoly {
 public:
  LPoly() = default;
  explicit LPoly(std::vector<std::int64_t> coeffs);

  static LPoly constant(std::int64_t c);
  static LPoly lefschetz(unsigned power = 1);        // L^power
  static LPoly projective_space(unsigned n);         // [P^n] = L^n + ... + 1
  static LPoly torus(unsigned n);                    // (L - 1)^n

  const std::vector<std::int64_t>& coeffs() const noexcept { return c_; }
  std::int64_t coeff(std::size_t i) const noexcept { return i < c_.size() ? c_[i] : 0; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  bool is_constant() const noexcept { return c_.size() <= 1; }

  std::int64_t eval(std::int64_t at) const;

  friend LPoly operator+(const LPoly& a, const LPoly& b);
  friend LPoly operator-(const LPoly& a, const LPoly& b);
  friend LPoly operator*(const LPoly& a, const LPoly& b);
  LPoly operator-() const;
  LPoly scaled(std::int64_t s) const;

  friend bool operator==(const LPoly&, const LPoly&) = default;

  // e.g. "L^2 - 2*L + 1"
  std::string to_string() const;

 private:
  void trim();
  std::vector<std::int64_t> c_;
};

// Motivic measure out of K0(Var): counting over F_q sends L to q, the
// topological Euler characteristic sends L to 1.
struct Measure {
  enum class Kind { count, euler };
  Kind kind = Kind::euler;
  std::int64_t q = 1;

  static Measure count(std::int64_t q) { return {Kind::count, q}; }
  static Measure euler() { return {Kind::euler, 1}; }
  std::int64_t lefschetz_value() const noexcept { return kind == Kind::count ? q : 1; }
};

// Element of K0(Var) of the form P(L) + sum_a P_a(L) * [a] where the [a] are
// opaque atoms (classes of varieties we cannot expand, e.g. [X]). Canonical:
// projective spaces are always expanded and no atom carries the zero
// polynomial, so equality is structural.
class KClass {
 public:
  KClass() = default;
  KClass(LPoly base);

  static KClass atom(std::string name);

  const LPoly& base() const noexcept { return base_; }
  const std::map<std::string, LPoly>& atoms() const noexcept { return atoms_; }
  LPoly atom_coeff(const std::string& name) const;
  bool has_atoms() const noexcept { return !atoms_.empty(); }
  bool is_zero() const noexcept { return base_.is_zero() && atoms_.empty(); }

  friend KClass operator+(const KClass& a, const KClass& b);
  friend KClass operator-(const KClass& a, const KClass& b);
  // Throws ArithmeticError("atom product unsupported") if both factors
  // carry atoms.
  friend KClass operator*(const KClass& a, const KClass& b);
  KClass operator-() const;
  KClass scaled(std::int64_t s) const;

  friend bool operator==(const KClass&, const KClass&) = default;

  std::string to_string() const;

 private:
  void drop_zero_atoms();
  LPoly base_;
  std::map<std::string, LPoly> atoms_;
};

// Parses `P(n)`, `L`, integers, `[atom]`, `+ - * ^` and parentheses into
// canonical form. Throws ParseError on malformed input and ArithmeticError
// for products of two atom-bearing classes.
KClass kclass_normalize(std::string_view expr);

// Evaluates under a measure; every atom needs a binding. Throws
// ArithmeticError on an unbound atom or integer overflow.
std::int64_t kclass_realize(const KClass& c, const Measure& measure,
                            const std::map<std::string, std::int64_t>& bindings = {});

struct Relation {
  KClass lhs;
  KClass rhs;
  std::string label;

  // Labels are provenance only and do not take part in equality.
  friend bool operator==(const Relation& a, const Relation& b) {
    return a.lhs == b.lhs && a.rhs == b.rhs;
  }
  std::string to_string() const;
};

inline constexpr std::string_view kAtomX = "X";
inline constexpr std::string_view kAtomXtilde = "Xtilde";
inline constexpr std::string_view kAtomX0 = "X0";
inline constexpr std::string_view kAtomFiberInf = "S_inf";
inline constexpr std::string_view kAtomZ = "Z";

// [X] = [X0] + [S_inf] + [Z]*L: a pencil splits into the open chart t0 = 1
// away from the base curve, the fiber over [0:1], and Z x A^1.
Relation kv_fiber_decomposition(unsigned m);

// Class of A^k x (A^1 \ 0)^{m-k} = L^k (L - 1)^{m-k}. Requires k < m.
KClass kv_hyperplane_complement(unsigned m, unsigned k);

// {[X] L^k = [Xtilde] L^k : 1 <= k <= m+1} followed by
// {[X] L^k (L-1)^{m-k} = [Xtilde] L^k (L-1)^{m-k} : 0 <= k < m}.
std::vector<Relation> kv_generate_relations(unsigned m);

struct DerivationStep {
  enum class Op { start, subtract, scale };
  Op op = Op::start;
  std::optional<std::size_t> hypothesis;  // index into Derivation::hypotheses
  std::int64_t scalar = 1;
  std::string description;
  Relation result;
};

std::string_view to_string(DerivationStep::Op op);

struct Derivation {
  unsigned m = 0;
  std::vector<Relation> hypotheses;
  std::vector<DerivationStep> steps;
  Relation conclusion;
};

// Starting from [X](L-1)^m = [Xtilde](L-1)^m, subtracts binom(m,j)(-1)^{m-j}
// times [X]L^j = [Xtilde]L^j for j = m..1, then rescales the remaining
// (-1)^m [X] = (-1)^m [Xtilde] to [X] = [Xtilde].
Derivation kv_cancellation_derive(unsigned m);

struct ReplayResult {
  bool ok = false;
  std::string message;
};

// Recomputes every step from the hypotheses with KClass arithmetic and
// checks the recorded intermediate relations and the conclusion.
ReplayResult kv_replay(const Derivation& d);

}  // namespace cutpaste

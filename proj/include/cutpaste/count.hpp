#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cutpaste/enumerate.hpp"
#include "cutpaste/pencil.hpp"

namespace cutpaste {

struct CountResult {
  std::string label;
  std::uint32_t q = 0;
  unsigned k = 1;
  std::uint64_t count = 0;
  double seconds = 0;
  std::uint64_t evaluations = 0;
};

// Common zeros in P^{dims[0]} x P^{dims[1]} x ... over `over`. Each poly's
// variables are the blocks' coordinates concatenated; the polys may live over
// the prime subfield.
CountResult count_projective(const std::vector<MPoly>& polys, const std::vector<std::size_t>& dims, const Field& over,
                             const EnumContext& ctx = {}, std::string label = "projective");

// Fiberwise counter for one pencil over F_{q^k}. A single pass over P^3
// sorts every x by the point [G(x):F(x)] of P^1 (or into Z when both
// vanish); the fiber over t then holds Z plus the x with [G:F] = [beta(t):-alpha(t)].
class PencilCounter {
 public:
  PencilCounter(const Pencil& pencil, unsigned k, const EnumContext& ctx = {});

  const Field& field() const noexcept { return ext_; }
  std::uint64_t p3_size() const noexcept { return p3_; }
  std::uint64_t p1_size() const noexcept { return ratio_.size(); }

  // t is a P^1 index: [1:u] -> u, [0:1] -> q^k.
  std::uint64_t fiber(std::uint64_t t) const;
  std::uint64_t fiber_at_infinity() const { return fiber(ext_.size()); }
  std::uint64_t total() const;
  std::uint64_t z() const noexcept { return z_; }
  // X restricted to t0 = 1, minus Z x A^1.
  std::uint64_t x0() const;
  std::uint64_t z_times_a1() const { return z_ * ext_.size(); }

  double seconds() const noexcept { return seconds_; }

 private:
  Field ext_;
  std::uint64_t p3_ = 0;
  std::uint64_t z_ = 0;
  std::vector<std::uint64_t> ratio_;   // x count per [G:F]
  std::vector<std::uint64_t> member_;  // P^1 index of [beta(t):-alpha(t)], or kNoMember
  double seconds_ = 0;
};

CountResult count_pencil(const Pencil& pencil, unsigned k, const EnumContext& ctx = {});

// Oracle: enumerates P^3 x P^1 and evaluates the full bidegree (3, m) equation.
CountResult count_pencil_direct(const Pencil& pencil, unsigned k, const EnumContext& ctx = {});

enum class Locus { X0, Z, Fiber, ZTimesA1, XMinusSingularFibers };

std::string to_string(Locus l);

// Streams (t, x) pairs and tests membership directly, independent of
// PencilCounter. `t` is only read for Locus::Fiber.
CountResult count_locus(const Pencil& pencil, Locus locus, unsigned k, const EnumContext& ctx = {},
                        std::uint64_t t = 0);

// a_k: t in P^1(F_{q^k}) whose fiber has a singular point in P^3(F_{q^k}).
CountResult count_singular_fibers(const Pencil& pencil, unsigned k, const EnumContext& ctx = {});

// Closed-point decomposition a_k = sum_{d | k} d b_d. Empty when some b_d
// is negative or fractional.
std::optional<std::vector<std::int64_t>> closed_points(const std::vector<std::uint64_t>& a);

// Points of the chart locus of the universal equation (y0 = 1) over
// F_{q^k}: x in P^3, (y1..ym, lambda) in A^{m+1}.
CountResult count_universal_chart(const Pencil& pencil, unsigned k, const EnumContext& ctx = {});

enum class Verdict { Pass, Fail, NotApplicable, Warn };

std::string to_string(Verdict v);

struct EqualityRow {
  unsigned k = 0;
  std::uint64_t count_a = 0, count_b = 0;
  Verdict verdict = Verdict::NotApplicable;
  // X minus its singular fibers, on both sides. Conjectural: Pass or Warn.
  std::uint64_t xprime_a = 0, xprime_b = 0;
  Verdict xprime = Verdict::NotApplicable;
};

struct EqualityReport {
  Verdict verdict = Verdict::NotApplicable;
  std::string reason;  // why the comparison does not apply
  std::vector<EqualityRow> rows;
};

// NotApplicable unless both pencils are certified and share (G, F).
EqualityReport verdict_equality(const Pencil& a, const Pencil& b, const std::vector<unsigned>& ks,
                                const EnumContext& ctx = {}, bool probe_xprime = false);

struct EulerFormulas {
  int m = 0;
  std::int64_t chi_x = 0;
  std::int64_t s = 0;
  std::int64_t chi_blowup = 0;
  // m(chi_blowup - 9(2m-2)) + 9(2m-2)(m-1), -14m - 9(2m-2), -32m + 18
  std::int64_t chain[3] = {0, 0, 0};
  bool consistent = false;  // the chain agrees and 18 - s = chi_x
};

EulerFormulas euler_formulas(int m);

}  // namespace cutpaste

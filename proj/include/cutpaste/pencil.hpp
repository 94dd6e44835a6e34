#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cutpaste/enumerate.hpp"
#include "cutpaste/error.hpp"
#include "cutpaste/field.hpp"
#include "cutpaste/poly.hpp"

namespace cutpaste {

inline constexpr unsigned kDefaultKSing = 2;
inline constexpr unsigned kDefaultMaxAttempts = 32;

// Variable layout of the pencil ring: x0..x3 then t0, t1.
inline constexpr std::size_t kPencilVars = 6;
inline constexpr Block kXBlock{0, 4, 3};

// Cubic form in x0..x3 evaluated on Raw points of a fixed field, with its
// gradient. The value is recovered from the gradient by the Euler relation
// 3F = sum x_i dF/dx_i, which needs p != 3.
class CubicKernel {
 public:
  CubicKernel(const MPoly& cubic, const Field& over);

  Raw value(const Raw* x) const noexcept;
  void gradient(const Raw* x, Raw* g) const noexcept;
  // Value from an already computed gradient.
  Raw value_from_gradient(const Raw* x, const Raw* g) const noexcept;

 private:
  Field over_;
  FieldKernel k_;
  Raw inv3_;
  std::array<Raw, 20> cubic_{};               // coefficients of x_i x_j x_l, i <= j <= l
  std::array<std::array<Raw, 10>, 4> grad_{};  // d/dx_v as combination of x_i x_j, i <= j
};

struct SurfaceSingularities {
  std::uint64_t count = 0;  // singular points in P^3(F_{q^k})
  std::optional<std::uint64_t> first;  // smallest point index
};

// Points of P^3(F_{q^k}) where all four partials of the cubic vanish.
SurfaceSingularities scan_surface_singularities(const MPoly& cubic, const Field& ext, const EnumContext& ctx);

struct NodalCertificate {
  unsigned k_sing = 0;
  bool vanishes_at_node = false;
  bool node_nondegenerate = false;
  std::vector<std::uint64_t> singular_points;  // per k = 1..k_sing
  bool ok() const;
};

// F = x3*Q(x0,x1,x2) + C(x0,x1,x2): singular at [0:0:0:1], an ordinary
// double point when Q is nondegenerate.
struct NodalCubic {
  MPoly form;
  std::array<Raw, 4> node{0, 0, 0, 1};
  std::uint64_t seed = 0;
  unsigned attempts = 0;
  NodalCertificate certificate;
};

// Determinant of the Gram matrix of a ternary quadratic form in x0..x2.
Raw quadratic_discriminant(const MPoly& q);

NodalCertificate certify_nodal(const MPoly& form, unsigned k_sing, const EnumContext& ctx);

// Random Q, C until the certificate passes. Throws CertificationFailure
// after max_attempts draws.
NodalCubic make_nodal_cubic(const Field& field, std::uint64_t seed, unsigned k_sing = kDefaultKSing,
                            unsigned max_attempts = kDefaultMaxAttempts, const EnumContext& ctx = {});

// Nodal cubic with Q = x0*x2 - x1^2 and C chosen so that C restricted to
// the conic Q = 0 vanishes at six distinct rational points: all six lines
// through the node are defined over F_q.
NodalCubic make_split_nodal_cubic(const Field& field, std::uint64_t seed, unsigned k_sing = kDefaultKSing,
                                  unsigned max_attempts = kDefaultMaxAttempts, const EnumContext& ctx = {});

struct PencilCertificates {
  unsigned k_sing = 0;
  bool p_does_not_divide_m = false;
  bool g_smooth = false;
  bool f_single_node = false;
  bool alpha_beta_coprime = false;
  bool total_space_smooth = false;
  bool fiber_at_infinity_smooth = false;
  bool singular_fibers_single_node = false;
  std::string failure;  // empty when every check passed

  bool ok() const noexcept { return failure.empty(); }
};

// X = {alpha(t) G(x) + beta(t) F(x) = 0} in P^3 x P^1 over a prime field.
// alpha, beta are binary forms of degree m in (t0, t1) stored as
// polynomials in 2 variables; G, F are cubic forms in 4 variables.
struct Pencil {
  Field field;
  unsigned m = 0;
  std::uint64_t seed = 0;
  MPoly G;
  MPoly F;
  MPoly alpha;
  MPoly beta;
  PencilCertificates certificates;
  bool certified = false;

  // alpha_i is the coefficient of t0^{m-i} t1^i, matching y_i.
  std::vector<Raw> alpha_coeffs() const;
  std::vector<Raw> beta_coeffs() const;
  // Bidegree (3, m) form in x0..x3, t0, t1 with grading metadata.
  MPoly equation() const;
  bool shares_surfaces_with(const Pencil& other) const;
};

// Assembles a pencil without certifying it.
Pencil pencil_from_forms(const Field& field, unsigned m, MPoly G, MPoly F, MPoly alpha, MPoly beta);

// Binary form sum c_i t0^{m-i} t1^i in 2 variables.
MPoly binary_form(const Field& field, const std::vector<Raw>& coeffs);

// Resultant of two binary forms of degree m (Sylvester determinant); zero
// iff they share a root in P^1 over the algebraic closure.
Raw binary_resultant(const Field& field, const std::vector<Raw>& a, const std::vector<Raw>& b);

// Singularities of the pencil over F_{q^k}, found in a single pass over
// P^3: x lies on a singular member s0 G + s1 F exactly when the gradients
// of G and F are dependent at x.
struct PencilScan {
  unsigned k = 0;
  std::uint64_t p1_size = 0;
  // P^1 index of [s0:s1] -> singular points of s0 G + s1 F.
  struct Member {
    std::uint64_t points = 0;
    std::uint64_t first_x = 0;
  };
  std::map<std::uint64_t, Member> singular_members;
  // For each t in P^1(F_{q^k}): P^1 index of [alpha(t):beta(t)], or
  // kNoMember if alpha(t) = beta(t) = 0.
  std::vector<std::uint64_t> member_of_t;
  static constexpr std::uint64_t kNoMember = UINT64_MAX;
  // Smallest (x index, t index) where all six partials of the equation vanish.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> total_space_witness;

  bool fiber_singular(std::uint64_t t) const;
  std::uint64_t singular_fiber_count() const;
};

PencilScan scan_pencil(const Pencil& pencil, unsigned k, const EnumContext& ctx = {});

PencilCertificates certify_pencil(const Pencil& pencil, unsigned k_sing = kDefaultKSing, const EnumContext& ctx = {});

struct PencilOptions {
  unsigned k_sing = kDefaultKSing;
  unsigned max_attempts = kDefaultMaxAttempts;
  EnumContext ctx;
};

// Draws G, F, alpha, beta from `seed` (only alpha, beta when `shared` is
// given, reusing its G and F) and retries until certify_pencil passes.
// Throws InvalidArgument when p | m or m < 1, CertificationFailure when no
// draw certifies.
Pencil make_pencil(const Field& field, unsigned m, std::uint64_t seed, const Pencil* shared = nullptr,
                   const PencilOptions& options = {});

// Generic singular-point search for a multihomogeneous equation whose
// grading blocks are projective coordinate blocks: scans the product of
// projective spaces over F_{q^k}, k = 1..k_sing, for a point where every
// partial vanishes.
struct SmoothnessResult {
  bool smooth = true;
  std::uint32_t q = 0;
  unsigned k_sing = 0;
  std::uint64_t points_scanned = 0;
  // Witness coordinates (raw, over F_{q^witness_k}), blocks concatenated.
  unsigned witness_k = 0;
  std::vector<Raw> witness;
};

SmoothnessResult check_smooth(const MPoly& equation, unsigned k_sing, const EnumContext& ctx = {});

// ---------------------------------------------------------------- universal family

// L_alpha G + (L_beta + lambda) F in x0..x3, y0..ym, lambda.
struct UniversalFamily {
  unsigned m = 0;
  MPoly equation;

  static constexpr std::size_t y_var(std::size_t i) { return 4 + i; }
  std::size_t lambda_var() const { return 5 + m; }
};

UniversalFamily make_universal_family(const Pencil& pencil);

// The universal equation in the chart y0 = 1, in variables x0..x3,
// y1..ym, lambda.
MPoly universal_chart_equation(const Pencil& pencil);

// True when y_i = t0^{m-i} t1^i, lambda = 0 turns the universal equation
// into the pencil equation.
bool universal_restricts_to_pencil(const Pencil& pencil);

// ---------------------------------------------------------------- phi

class PhiError : public Error {
 public:
  enum class Reason { f_vanishes, degenerate_lambda, not_on_domain, not_in_image };
  PhiError(Reason r, const std::string& what) : Error(what), reason_(r) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

// A point of X0 x A^{m+1}: x in P^3 with alpha(1,t) G(x) + beta(1,t) F(x) = 0,
// and free coordinates y1..ym, lambda.
struct PhiDomainPoint {
  std::vector<FieldElem> x;
  FieldElem t;
  std::vector<FieldElem> y;
  FieldElem lambda;
};

// A point of calX0 x A^2 on the locus (y1 = z): x, y'1..y'm, lambda' on the
// universal chart equation, plus t and z.
struct PhiImagePoint {
  std::vector<FieldElem> x;
  std::vector<FieldElem> y;
  FieldElem lambda;
  FieldElem t;
  FieldElem z;
};

// y'1 = y1 + t + lambda, y'i = yi + t^i (i >= 2),
// lambda' = (-beta1 - alpha1 g) lambda - (L_beta(y) - beta0) - g (L_alpha(y) - alpha0)
// with g = G(x)/F(x). Throws PhiError for F(x) = 0 or a point off X0.
PhiImagePoint phi_forward(const Pencil& pencil, const PhiDomainPoint& p);

// Solves the triangular system: y_i = y'_i - t^i for i >= 2, y1 = z,
// lambda from lambda' (needs -beta1 - alpha1 g != 0), then checks
// y'1 = y1 + t + lambda.
PhiDomainPoint phi_inverse(const Pencil& pencil, const PhiImagePoint& p);

struct PhiSampleStats {
  std::uint64_t samples = 0;  // valid + skipped
  std::uint64_t valid = 0;
  std::uint64_t roundtrip_ok = 0;
  std::uint64_t image_on_universal = 0;
  std::uint64_t skipped_f_zero = 0;
  std::uint64_t skipped_degenerate = 0;

  double skip_rate() const noexcept {
    return samples ? static_cast<double>(skipped_f_zero + skipped_degenerate) / static_cast<double>(samples) : 0.0;
  }
};

// Draws uniform points of X0(F_{q^k}) x A^{m+1} until `valid_target` of them
// avoid the exceptional loci; round-trips each one and checks its image on
// the universal chart equation.
PhiSampleStats phi_roundtrip_sample(const Pencil& pencil, unsigned k, std::uint64_t valid_target,
                                    std::uint64_t seed);

// ---------------------------------------------------------------- chart isomorphism

// Affine change of chart coordinates Psi(x, y, lambda) =
// (x, M y + v, lambda + shift(y)) carrying the chart locus of `b` onto that
// of `a`: universal_a o Psi = universal_b as polynomials.
struct ChartIsomorphism {
  unsigned m = 0;
  std::vector<std::vector<Raw>> matrix;  // m x m
  std::vector<Raw> offset;               // v
  MPoly lambda_shift;                    // affine in y1..ym, chart ring
  bool identity_holds = false;
  std::vector<std::string> transcript;

  // point = (x0..x3, y1..ym, lambda) over `over`, result in place.
  void apply(const Field& over, std::vector<Raw>& point) const;
};

// Throws InvalidArgument when the pencils do not share (G, F) or when some
// L_alpha is constant in the chart.
ChartIsomorphism universal_linear_iso(const Pencil& a, const Pencil& b);

}  // namespace cutpaste

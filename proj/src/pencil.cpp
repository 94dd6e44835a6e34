#include "cutpaste/pencil.hpp"

#include <algorithm>
#include <sstream>

#include "cutpaste/seed.hpp"

namespace cutpaste {

namespace {

// Index of x_i x_j (i <= j) among the 10 quadratic monomials in 4 variables.
constexpr std::array<std::array<int, 4>, 4> kQuadIndex = [] {
  std::array<std::array<int, 4>, 4> idx{};
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) idx[i][j] = idx[j][i] = n++;
  return idx;
}();

struct CubicMonomial {
  int i, j, l;
};

constexpr std::array<CubicMonomial, 20> kCubicMonomials = [] {
  std::array<CubicMonomial, 20> out{};
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      for (int l = j; l < 4; ++l) out[n++] = {i, j, l};
  return out;
}();

int cubic_index(const Exponents& e) {
  int v[3], n = 0;
  for (int var = 0; var < 4; ++var)
    for (int r = 0; r < e[var]; ++r) v[n++] = var;
  for (int c = 0; c < 20; ++c)
    if (kCubicMonomials[c].i == v[0] && kCubicMonomials[c].j == v[1] && kCubicMonomials[c].l == v[2]) return c;
  return -1;
}

void require_cubic(const MPoly& f) {
  if (f.nvars() != 4 || !f.is_homogeneous(std::array{kXBlock}))
    throw InvalidArgument("expected a cubic form in x0..x3");
}

// P^1 index of the normalized [s0:s1] over a field of size n.
std::uint64_t p1_index(const FieldKernel& k, Raw s0, Raw s1) {
  if (s0 != 0) return k.div(s1, s0);
  return k.size();
}

Raw det_mod(std::vector<std::vector<Raw>> a, const FieldKernel& k) {
  const std::size_t n = a.size();
  Raw det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = k.neg(det);
    }
    det = k.mul(det, a[c][c]);
    const Raw inv = k.inv(a[c][c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      const Raw f = k.mul(a[r][c], inv);
      for (std::size_t j = c; j < n; ++j) a[r][j] = k.sub(a[r][j], k.mul(f, a[c][j]));
    }
  }
  return det;
}

std::size_t rank_mod(std::vector<std::vector<Raw>> a, const FieldKernel& k) {
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    const Raw inv = k.inv(a[r][c]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (a[i][c] == 0) continue;
      const Raw f = k.mul(a[i][c], inv);
      for (std::size_t j = c; j < cols; ++j) a[i][j] = k.sub(a[i][j], k.mul(f, a[r][j]));
    }
    ++r;
  }
  return r;
}

// Rank of the Hessian of a cubic at a point (rank 3 at an ordinary double
// point of a cubic surface).
std::size_t hessian_rank(const MPoly& f, const Field& over, const std::vector<Raw>& x) {
  std::vector<std::vector<Raw>> h(4, std::vector<Raw>(4));
  for (std::size_t i = 0; i < 4; ++i) {
    const MPoly di = f.partial(i);
    for (std::size_t j = 0; j < 4; ++j) h[i][j] = di.partial(j).eval_raw(over, x);
  }
  return rank_mod(std::move(h), over.kernel());
}

}  // namespace

// ---------------------------------------------------------------- CubicKernel

CubicKernel::CubicKernel(const MPoly& cubic, const Field& over) : over_(over), k_(over_.kernel()) {
  require_cubic(cubic);
  if (!(cubic.field() == over) &&
      (cubic.field().degree() != 1 || cubic.field().characteristic() != over.characteristic()))
    throw ArithmeticError("cubic and evaluation field are incompatible");
  inv3_ = k_.inv(over.raw_from_int(3));
  for (const auto& t : cubic.terms()) {
    cubic_[cubic_index(t.exps)] = t.coeff;
    for (int v = 0; v < 4; ++v) {
      if (!t.exps[v]) continue;
      Exponents d = t.exps;
      d[v] -= 1;
      int qi[2], n = 0;
      for (int var = 0; var < 4; ++var)
        for (int r = 0; r < d[var]; ++r) qi[n++] = var;
      const int q = kQuadIndex[qi[0]][qi[1]];
      grad_[v][q] = k_.add(grad_[v][q], k_.mul(t.coeff, over.raw_from_int(t.exps[v])));
    }
  }
}

Raw CubicKernel::value(const Raw* x) const noexcept {
  Raw acc = 0;
  for (int c = 0; c < 20; ++c) {
    if (!cubic_[c]) continue;
    const auto& m = kCubicMonomials[c];
    acc = k_.add(acc, k_.mul(cubic_[c], k_.mul(x[m.i], k_.mul(x[m.j], x[m.l]))));
  }
  return acc;
}

void CubicKernel::gradient(const Raw* x, Raw* g) const noexcept {
  Raw quad[10];
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) quad[kQuadIndex[i][j]] = k_.mul(x[i], x[j]);
  for (int v = 0; v < 4; ++v) {
    Raw acc = 0;
    for (int q = 0; q < 10; ++q)
      if (grad_[v][q]) acc = k_.add(acc, k_.mul(grad_[v][q], quad[q]));
    g[v] = acc;
  }
}

Raw CubicKernel::value_from_gradient(const Raw* x, const Raw* g) const noexcept {
  Raw acc = 0;
  for (int i = 0; i < 4; ++i) acc = k_.add(acc, k_.mul(x[i], g[i]));
  return k_.mul(acc, inv3_);
}

SurfaceSingularities scan_surface_singularities(const MPoly& cubic, const Field& ext, const EnumContext& ctx) {
  const CubicKernel ker(cubic, ext);
  const auto p3 = CellDecomposition::projective(3, ext.size());
  ctx.charge(p3.total(), "singular point scan of a cubic surface over " + ext.to_string());
  auto parts = parallel_chunks<SurfaceSingularities>(p3.total(), ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
    SurfaceSingularities s;
    Raw g[4];
    for_each_point(p3, b, e, [&](const Raw* x, std::uint64_t idx) {
      ker.gradient(x, g);
      if ((g[0] | g[1] | g[2] | g[3]) == 0) {
        if (!s.first) s.first = idx;
        ++s.count;
      }
    });
    return s;
  });
  SurfaceSingularities out;
  for (const auto& s : parts) {
    out.count += s.count;
    if (!out.first && s.first) out.first = s.first;
  }
  return out;
}

// ---------------------------------------------------------------- nodal cubics

bool NodalCertificate::ok() const {
  if (!vanishes_at_node || !node_nondegenerate || singular_points.size() != k_sing) return false;
  return std::all_of(singular_points.begin(), singular_points.end(), [](std::uint64_t c) { return c == 1; });
}

Raw quadratic_discriminant(const MPoly& q) {
  const Field& f = q.field();
  const FieldKernel k = f.kernel();
  const Raw half = k.inv(f.raw_from_int(2));
  std::vector<std::vector<Raw>> gram(3, std::vector<Raw>(3, 0));
  for (const auto& t : q.terms()) {
    int v[2], n = 0;
    for (int var = 0; var < 3; ++var)
      for (int r = 0; r < t.exps[var]; ++r) {
        if (n == 2) throw InvalidArgument("expected a quadratic form");
        v[n++] = var;
      }
    if (n != 2 || (q.nvars() > 3 && t.exps[3] != 0)) throw InvalidArgument("expected a quadratic form in x0..x2");
    if (v[0] == v[1]) gram[v[0]][v[0]] = t.coeff;
    else gram[v[0]][v[1]] = gram[v[1]][v[0]] = k.mul(t.coeff, half);
  }
  return det_mod(std::move(gram), k);
}

NodalCertificate certify_nodal(const MPoly& form, unsigned k_sing, const EnumContext& ctx) {
  require_cubic(form);
  NodalCertificate c;
  c.k_sing = k_sing;
  const Field& f = form.field();
  const std::vector<Raw> node{0, 0, 0, 1};
  c.vanishes_at_node = form.eval_raw(f, node) == 0;
  for (std::size_t v = 0; v < 4; ++v) c.vanishes_at_node = c.vanishes_at_node && form.partial(v).eval_raw(f, node) == 0;

  // Q = coefficient of x3 in F, a quadratic form in x0..x2.
  std::vector<Term> qterms;
  for (const auto& t : form.terms()) {
    if (t.exps[3] != 1) continue;
    Exponents e = t.exps;
    e[3] = 0;
    qterms.push_back({std::move(e), t.coeff});
  }
  const MPoly q = MPoly::from_terms(f, 4, std::move(qterms));
  c.node_nondegenerate = c.vanishes_at_node && quadratic_discriminant(q) != 0;

  const auto p3_last = [](std::uint64_t size) { return projective_size(3, size) - 1; };
  for (unsigned k = 1; k <= k_sing; ++k) {
    const Field ext = Field::create(f.characteristic(), k);
    const auto s = scan_surface_singularities(form, ext, ctx);
    // The node [0:0:0:1] is the last point in enumeration order.
    c.singular_points.push_back(s.count == 1 && s.first == p3_last(ext.size()) ? 1 : (s.count == 1 ? 0 : s.count));
  }
  return c;
}

namespace {

MPoly nodal_form(const Field& field, const MPoly& q, const MPoly& c) {
  const MPoly x3 = MPoly::variable(field, 4, 3);
  return (x3 * q + c).with_grading({kXBlock});
}

}  // namespace

NodalCubic make_nodal_cubic(const Field& field, std::uint64_t seed, unsigned k_sing, unsigned max_attempts,
                            const EnumContext& ctx) {
  const Block xyz2{0, 3, 2}, xyz3{0, 3, 3};
  for (unsigned attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = derive_seed(seed, "nodal", attempt);
    const MPoly q = random_form(field, 4, xyz2, derive_seed(s, "Q"));
    if (quadratic_discriminant(q) == 0) continue;  // rank <= 2: not an ordinary double point
    const MPoly c = random_form(field, 4, xyz3, derive_seed(s, "C"));
    NodalCubic out{nodal_form(field, q, c), {0, 0, 0, 1}, seed, attempt + 1, {}};
    out.certificate = certify_nodal(out.form, k_sing, ctx);
    if (out.certificate.ok()) return out;
  }
  throw CertificationFailure("no nodal cubic over " + field.to_string() + " certified after " +
                             std::to_string(max_attempts) + " attempts; use a larger field");
}

NodalCubic make_split_nodal_cubic(const Field& field, std::uint64_t seed, unsigned k_sing, unsigned max_attempts,
                                  const EnumContext& ctx) {
  if (field.degree() != 1) throw InvalidArgument("split nodal cubics are built over prime fields");
  const FieldKernel k = field.kernel();
  const std::uint32_t q = field.size();
  // Q = x0 x2 - x1^2, parametrized by (s^2, s u, u^2).
  MPoly quad = MPoly::from_terms(field, 4, {{{1, 0, 1, 0}, 1}, {{0, 2, 0, 0}, k.neg(1)}});
  // Monomial of C whose restriction to the conic is s^{6-j} u^j.
  const std::array<Exponents, 7> mono = {Exponents{3, 0, 0, 0}, {2, 1, 0, 0}, {2, 0, 1, 0}, {1, 1, 1, 0},
                                         {1, 0, 2, 0},          {0, 1, 2, 0}, {0, 0, 3, 0}};
  // P^1 points [a:b]: [1:u] for u in F_q, then [0:1].
  std::vector<std::pair<Raw, Raw>> p1;
  for (Raw u = 0; u < q; ++u) p1.emplace_back(1, u);
  p1.emplace_back(0, 1);

  for (unsigned attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(derive_seed(seed, "split-nodal", attempt));
    auto pts = p1;
    for (std::size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[rng.below(i)]);
    // h(s, u) = prod (b s - a u), coefficients h[j] of s^{6-j} u^j.
    std::vector<Raw> h{1};
    for (int r = 0; r < 6; ++r) {
      const auto [a, b] = pts[r];
      std::vector<Raw> next(h.size() + 1, 0);
      for (std::size_t j = 0; j < h.size(); ++j) {
        next[j] = k.add(next[j], k.mul(h[j], b));
        next[j + 1] = k.add(next[j + 1], k.mul(h[j], k.neg(a)));
      }
      h = std::move(next);
    }
    std::vector<Term> cterms;
    for (int j = 0; j <= 6; ++j) cterms.push_back({mono[j], h[j]});
    const MPoly c = MPoly::from_terms(field, 4, std::move(cterms));
    NodalCubic out{nodal_form(field, quad, c), {0, 0, 0, 1}, seed, attempt + 1, {}};
    out.certificate = certify_nodal(out.form, k_sing, ctx);
    if (out.certificate.ok()) return out;
  }
  throw CertificationFailure("no split nodal cubic over " + field.to_string() + " certified");
}

// ---------------------------------------------------------------- pencils

std::vector<Raw> Pencil::alpha_coeffs() const {
  std::vector<Raw> out(m + 1);
  for (unsigned i = 0; i <= m; ++i) out[i] = alpha.coeff({static_cast<std::uint16_t>(m - i), static_cast<std::uint16_t>(i)});
  return out;
}

std::vector<Raw> Pencil::beta_coeffs() const {
  std::vector<Raw> out(m + 1);
  for (unsigned i = 0; i <= m; ++i) out[i] = beta.coeff({static_cast<std::uint16_t>(m - i), static_cast<std::uint16_t>(i)});
  return out;
}

MPoly Pencil::equation() const {
  const std::array<std::size_t, 4> xmap{0, 1, 2, 3};
  const std::array<std::size_t, 2> tmap{4, 5};
  const MPoly e = alpha.remap(kPencilVars, tmap) * G.remap(kPencilVars, xmap) +
                  beta.remap(kPencilVars, tmap) * F.remap(kPencilVars, xmap);
  return e.with_grading({kXBlock, Block{4, 2, m}});
}

bool Pencil::shares_surfaces_with(const Pencil& other) const {
  return field == other.field && G == other.G && F == other.F;
}

MPoly binary_form(const Field& field, const std::vector<Raw>& coeffs) {
  if (coeffs.empty()) throw InvalidArgument("binary form needs at least one coefficient");
  const auto m = static_cast<std::uint16_t>(coeffs.size() - 1);
  std::vector<Term> terms;
  for (std::uint16_t i = 0; i <= m; ++i) terms.push_back({{static_cast<std::uint16_t>(m - i), i}, coeffs[i]});
  return MPoly::from_terms(field, 2, std::move(terms)).with_grading({Block{0, 2, m}});
}

Pencil pencil_from_forms(const Field& field, unsigned m, MPoly G, MPoly F, MPoly alpha, MPoly beta) {
  if (m < 1) throw InvalidArgument("pencil degree m must be at least 1");
  require_cubic(G);
  require_cubic(F);
  const Block tb{0, 2, m};
  for (const MPoly* f : {&alpha, &beta})
    if (f->nvars() != 2 || !f->is_homogeneous(std::array{tb}))
      throw InvalidArgument("alpha and beta must be binary forms of degree " + std::to_string(m));
  for (const MPoly* f : {&G, &F, &alpha, &beta})
    if (!(f->field() == field)) throw InvalidArgument("pencil forms must live over " + field.to_string());
  Pencil p{field, m, 0, std::move(G), std::move(F), std::move(alpha), std::move(beta), {}, false};
  return p;
}

Raw binary_resultant(const Field& field, const std::vector<Raw>& a, const std::vector<Raw>& b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("resultant needs two forms of equal degree >= 1");
  const std::size_t m = a.size() - 1;
  std::vector<std::vector<Raw>> syl(2 * m, std::vector<Raw>(2 * m, 0));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= m; ++i) {
      syl[r][r + i] = a[i];
      syl[m + r][r + i] = b[i];
    }
  return det_mod(std::move(syl), field.kernel());
}

bool PencilScan::fiber_singular(std::uint64_t t) const {
  const std::uint64_t s = member_of_t.at(t);
  return s == kNoMember || singular_members.contains(s);
}

std::uint64_t PencilScan::singular_fiber_count() const {
  std::uint64_t n = 0;
  for (std::uint64_t t = 0; t < member_of_t.size(); ++t) n += fiber_singular(t) ? 1 : 0;
  return n;
}

PencilScan scan_pencil(const Pencil& pencil, unsigned k, const EnumContext& ctx) {
  const Field ext = Field::create(pencil.field.characteristic(), k);
  const FieldKernel K = ext.kernel();
  const std::uint64_t n = ext.size();

  PencilScan scan;
  scan.k = k;
  scan.p1_size = n + 1;

  // Values and t-partials of alpha, beta at every t in P^1(F_{q^k}).
  struct TData {
    Raw a, b, da0, da1, db0, db1;
  };
  const CompiledPoly ca(pencil.alpha, ext), cb(pencil.beta, ext);
  const CompiledPoly ca0(pencil.alpha.partial(0), ext), ca1(pencil.alpha.partial(1), ext);
  const CompiledPoly cb0(pencil.beta.partial(0), ext), cb1(pencil.beta.partial(1), ext);
  const auto p1 = CellDecomposition::projective(1, n);
  std::vector<TData> tdata(p1.total());
  std::vector<std::vector<std::uint32_t>> t_by_member(n + 1);
  std::vector<std::uint32_t> degenerate_t;
  scan.member_of_t.resize(p1.total());
  for_each_point(p1, 0, p1.total(), [&](const Raw* t, std::uint64_t j) {
    TData d{ca.eval(t), cb.eval(t), ca0.eval(t), ca1.eval(t), cb0.eval(t), cb1.eval(t)};
    tdata[j] = d;
    if (d.a == 0 && d.b == 0) {
      scan.member_of_t[j] = PencilScan::kNoMember;
      degenerate_t.push_back(static_cast<std::uint32_t>(j));
    } else {
      const std::uint64_t s = p1_index(K, d.a, d.b);
      scan.member_of_t[j] = s;
      t_by_member[s].push_back(static_cast<std::uint32_t>(j));
    }
  });

  const CubicKernel kg(pencil.G, ext), kf(pencil.F, ext);
  const auto p3 = CellDecomposition::projective(3, n);
  ctx.charge(p3.total() * (1 + degenerate_t.size()), "pencil singularity scan over " + ext.to_string());

  struct Part {
    std::map<std::uint64_t, PencilScan::Member> members;
    std::uint64_t base_points = 0;  // both gradients vanish
    std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
  };

  auto parts = parallel_chunks<Part>(p3.total(), ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
    Part part;
    Raw gg[4], gf[4];
    auto t_partials_vanish = [&](std::uint32_t t, Raw gx, Raw fx) {
      const TData& d = tdata[t];
      return K.add(K.mul(d.da0, gx), K.mul(d.db0, fx)) == 0 && K.add(K.mul(d.da1, gx), K.mul(d.db1, fx)) == 0;
    };
    auto note_witness = [&](std::uint64_t x, std::uint64_t t) {
      if (!part.witness) part.witness = std::pair{x, t};
    };
    for_each_point(p3, b, e, [&](const Raw* x, std::uint64_t xi) {
      kg.gradient(x, gg);
      kf.gradient(x, gf);
      const bool zg = (gg[0] | gg[1] | gg[2] | gg[3]) == 0;
      const bool zf = (gf[0] | gf[1] | gf[2] | gf[3]) == 0;
      if (zg && zf) {
        // Every member is singular at x, and G(x) = F(x) = 0 kills the
        // t-partials: X is singular along {x} x P^1.
        ++part.base_points;
        note_witness(xi, 0);
        return;
      }
      const Raw gx = kg.value_from_gradient(x, gg);
      const Raw fx = kf.value_from_gradient(x, gf);
      for (std::uint32_t t : degenerate_t)
        if (t_partials_vanish(t, gx, fx)) {
          note_witness(xi, t);
          break;
        }
      // Dependent gradients <=> all 2x2 minors vanish.
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (K.mul(gg[i], gf[j]) != K.mul(gg[j], gf[i])) return;
      int i = 0;
      while (gg[i] == 0 && gf[i] == 0) ++i;
      // s0 gG + s1 gF = 0 for [s0:s1] = [gF_i : -gG_i].
      const std::uint64_t s = p1_index(K, gf[i], K.neg(gg[i]));
      auto& mem = part.members[s];
      if (mem.points++ == 0) mem.first_x = xi;
      for (std::uint32_t t : t_by_member[s])
        if (t_partials_vanish(t, gx, fx)) {
          note_witness(xi, t);
          break;
        }
    });
    return part;
  });

  std::uint64_t base_points = 0;
  for (auto& part : parts) {
    for (const auto& [s, mem] : part.members) {
      auto& dst = scan.singular_members[s];
      if (dst.points == 0) dst.first_x = mem.first_x;
      dst.points += mem.points;
    }
    base_points += part.base_points;
    if (!scan.total_space_witness && part.witness) scan.total_space_witness = part.witness;
  }
  if (base_points > 0) {
    // Record the common singular points on every member hit by some t.
    for (std::uint64_t t = 0; t < scan.member_of_t.size(); ++t) {
      const std::uint64_t s = scan.member_of_t[t];
      if (s != PencilScan::kNoMember) scan.singular_members[s].points += 0;
    }
  }
  return scan;
}

PencilCertificates certify_pencil(const Pencil& pencil, unsigned k_sing, const EnumContext& ctx) {
  PencilCertificates c;
  c.k_sing = k_sing;
  const std::uint32_t p = pencil.field.characteristic();
  auto fail = [&](const std::string& why) {
    if (c.failure.empty()) c.failure = why;
  };

  c.p_does_not_divide_m = pencil.m % p != 0;
  if (!c.p_does_not_divide_m) fail("characteristic divides m");

  const auto ac = pencil.alpha_coeffs(), bc = pencil.beta_coeffs();
  c.alpha_beta_coprime = binary_resultant(pencil.field, ac, bc) != 0;
  if (!c.alpha_beta_coprime) fail("alpha and beta share a root");

  c.g_smooth = c.f_single_node = c.total_space_smooth = true;
  c.fiber_at_infinity_smooth = c.singular_fibers_single_node = true;
  for (unsigned k = 1; k <= k_sing; ++k) {
    const PencilScan scan = scan_pencil(pencil, k, ctx);
    const std::uint64_t n = scan.p1_size - 1;
    const std::string over = " over F_" + std::to_string(p) + (k > 1 ? "^" + std::to_string(k) : "");

    auto mem = [&](std::uint64_t s) -> std::uint64_t {
      auto it = scan.singular_members.find(s);
      return it == scan.singular_members.end() ? 0 : it->second.points;
    };
    if (mem(0) != 0) {
      c.g_smooth = false;
      fail("G is singular" + over);
    }
    if (mem(n) != 1) {
      c.f_single_node = false;
      fail("F has " + std::to_string(mem(n)) + " singular points" + over);
    } else {
      const Field ext = Field::create(p, k);
      std::vector<Raw> node(4);
      CellDecomposition::projective(3, ext.size()).point(scan.singular_members.at(n).first_x, node.data());
      if (hessian_rank(pencil.F, ext, node) != 3) {
        c.f_single_node = false;
        fail("singular point of F is not an ordinary double point" + over);
      }
    }
    if (scan.total_space_witness) {
      c.total_space_smooth = false;
      fail("total space is singular" + over);
    }
    if (scan.fiber_singular(n)) {
      c.fiber_at_infinity_smooth = false;
      fail("fiber over [0:1] is singular" + over);
    }
    for (std::uint64_t t = 0; t < scan.member_of_t.size(); ++t) {
      const std::uint64_t s = scan.member_of_t[t];
      if (s == PencilScan::kNoMember) continue;
      if (mem(s) > 1) {
        c.singular_fibers_single_node = false;
        fail("a singular fiber has " + std::to_string(mem(s)) + " singular points" + over);
        break;
      }
    }
  }
  return c;
}

Pencil make_pencil(const Field& field, unsigned m, std::uint64_t seed, const Pencil* shared,
                   const PencilOptions& options) {
  if (field.degree() != 1) throw InvalidArgument("pencils are built over prime fields");
  if (m < 1) throw InvalidArgument("pencil degree m must be at least 1");
  if (m % field.characteristic() == 0)
    throw InvalidArgument("characteristic " + std::to_string(field.characteristic()) + " divides m = " +
                          std::to_string(m));
  if (shared && !(shared->field == field)) throw InvalidArgument("shared pencil lives over a different field");

  const Block tb{0, 2, m};
  std::string last_failure = "no attempt made";
  for (unsigned attempt = 0; attempt < options.max_attempts; ++attempt) {
    const std::uint64_t s = derive_seed(seed, "pencil", attempt);
    MPoly G = shared ? shared->G : random_form(field, 4, kXBlock, derive_seed(s, "G"));
    MPoly F(field, 4);
    if (shared) {
      F = shared->F;
    } else {
      try {
        F = make_nodal_cubic(field, derive_seed(s, "F"), options.k_sing, options.max_attempts, options.ctx).form;
      } catch (const CertificationFailure& e) {
        last_failure = e.what();
        continue;
      }
    }
    MPoly alpha = random_form(field, 2, tb, derive_seed(s, "alpha"));
    MPoly beta = random_form(field, 2, tb, derive_seed(s, "beta"));
    Pencil p = pencil_from_forms(field, m, std::move(G), std::move(F), std::move(alpha), std::move(beta));
    p.seed = seed;
    p.certificates = certify_pencil(p, options.k_sing, options.ctx);
    if (p.certificates.ok()) {
      p.certified = true;
      return p;
    }
    last_failure = p.certificates.failure;
  }
  throw CertificationFailure("no pencil over " + field.to_string() + " with m = " + std::to_string(m) +
                             " certified after " + std::to_string(options.max_attempts) +
                             " attempts (last failure: " + last_failure + "); use a larger field");
}

SmoothnessResult check_smooth(const MPoly& equation, unsigned k_sing, const EnumContext& ctx) {
  if (!equation.grading()) throw InvalidArgument("check_smooth needs grading metadata");
  const auto& blocks = *equation.grading();
  std::size_t covered = 0;
  for (const auto& b : blocks) {
    if (b.first != covered) throw InvalidArgument("grading blocks must tile the variables in order");
    covered += b.count;
    if (b.degree % equation.field().characteristic() == 0)
      throw InvalidArgument("block degree divisible by the characteristic");
  }
  if (covered != equation.nvars()) throw InvalidArgument("grading blocks must cover every variable");

  SmoothnessResult res;
  res.q = equation.field().characteristic();
  res.k_sing = k_sing;
  std::vector<MPoly> partials;
  for (std::size_t v = 0; v < equation.nvars(); ++v) partials.push_back(equation.partial(v));

  for (unsigned k = 1; k <= k_sing; ++k) {
    const Field ext = Field::create(res.q, k);
    std::vector<CompiledPoly> cps;
    for (const auto& d : partials) cps.emplace_back(d, ext);
    std::vector<CellDecomposition> spaces;
    std::uint64_t total = 1;
    for (const auto& b : blocks) {
      spaces.push_back(CellDecomposition::projective(b.count - 1, ext.size()));
      total *= spaces.back().total();
    }
    ctx.charge(total * partials.size(), "smoothness scan over " + ext.to_string());
    res.points_scanned += total;

    auto parts = parallel_chunks<std::optional<std::uint64_t>>(total, ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
      std::vector<Raw> pt(equation.nvars());
      for (std::uint64_t idx = b; idx < e; ++idx) {
        // first block most significant
        std::uint64_t r = idx;
        for (std::size_t bi = blocks.size(); bi-- > 0;) {
          const std::uint64_t sz = spaces[bi].total();
          spaces[bi].point(r % sz, pt.data() + blocks[bi].first);
          r /= sz;
        }
        bool all_zero = true;
        for (const auto& cp : cps)
          if (cp.eval(pt.data()) != 0) {
            all_zero = false;
            break;
          }
        if (all_zero) return std::optional<std::uint64_t>(idx);
      }
      return std::optional<std::uint64_t>();
    });
    for (const auto& w : parts) {
      if (!w) continue;
      res.smooth = false;
      res.witness_k = k;
      res.witness.assign(equation.nvars(), 0);
      std::uint64_t r = *w;
      for (std::size_t bi = blocks.size(); bi-- > 0;) {
        const std::uint64_t sz = spaces[bi].total();
        spaces[bi].point(r % sz, res.witness.data() + blocks[bi].first);
        r /= sz;
      }
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------- universal family

UniversalFamily make_universal_family(const Pencil& pencil) {
  const unsigned m = pencil.m;
  const std::size_t nv = 6 + m;
  const Field& f = pencil.field;
  UniversalFamily u{m, MPoly(f, nv)};
  const std::array<std::size_t, 4> xmap{0, 1, 2, 3};
  const auto ac = pencil.alpha_coeffs(), bc = pencil.beta_coeffs();
  MPoly la(f, nv), lb(f, nv);
  for (unsigned i = 0; i <= m; ++i) {
    const MPoly y = MPoly::variable(f, nv, UniversalFamily::y_var(i));
    la = la + y.scaled(ac[i]);
    lb = lb + y.scaled(bc[i]);
  }
  const MPoly lambda = MPoly::variable(f, nv, u.lambda_var());
  u.equation = la * pencil.G.remap(nv, xmap) + (lb + lambda) * pencil.F.remap(nv, xmap);
  return u;
}

MPoly universal_chart_equation(const Pencil& pencil) {
  const UniversalFamily u = make_universal_family(pencil);
  const unsigned m = pencil.m;
  const std::size_t nv = 5 + m;
  const Field& f = pencil.field;
  std::vector<MPoly> images;
  for (std::size_t i = 0; i < 4; ++i) images.push_back(MPoly::variable(f, nv, i));
  images.push_back(MPoly::constant(f, nv, 1));  // y0 = 1
  for (unsigned i = 1; i <= m; ++i) images.push_back(MPoly::variable(f, nv, 3 + i));
  images.push_back(MPoly::variable(f, nv, 4 + m));  // lambda
  return u.equation.substitute(images);
}

bool universal_restricts_to_pencil(const Pencil& pencil) {
  const UniversalFamily u = make_universal_family(pencil);
  const unsigned m = pencil.m;
  const Field& f = pencil.field;
  std::vector<MPoly> images;
  for (std::size_t i = 0; i < 4; ++i) images.push_back(MPoly::variable(f, kPencilVars, i));
  for (unsigned i = 0; i <= m; ++i) {
    Exponents e(kPencilVars, 0);
    e[4] = static_cast<std::uint16_t>(m - i);
    e[5] = static_cast<std::uint16_t>(i);
    images.push_back(MPoly::monomial(f, std::move(e), 1));
  }
  images.push_back(MPoly(f, kPencilVars));  // lambda = 0
  return u.equation.substitute(images) == pencil.equation();
}

// ---------------------------------------------------------------- phi

namespace {

struct PhiContext {
  Field f;
  std::vector<FieldElem> alpha, beta;
  FieldElem gx, fx;
};

PhiContext phi_context(const Pencil& pencil, const std::vector<FieldElem>& x, const FieldElem& t) {
  const Field& f = t.field();
  if (x.size() != 4) throw InvalidArgument("phi expects x in P^3");
  if (f.characteristic() != pencil.field.characteristic()) throw ArithmeticError("point field incompatible with pencil");
  for (const auto& c : x)
    if (!(c.field() == f)) throw ArithmeticError("point coordinates from mixed fields");
  PhiContext c{f, {}, {}, pencil.G.eval(x), pencil.F.eval(x)};
  for (Raw a : pencil.alpha_coeffs()) c.alpha.push_back(f.elem(a));
  for (Raw b : pencil.beta_coeffs()) c.beta.push_back(f.elem(b));
  return c;
}

// alpha(1, t), beta(1, t)
FieldElem chart_value(const std::vector<FieldElem>& coeffs, const FieldElem& t) {
  FieldElem acc = t.field().zero();
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
  return acc;
}

bool on_x0(const PhiContext& c, const FieldElem& t) {
  if (c.gx.is_zero() && c.fx.is_zero()) return false;
  return (chart_value(c.alpha, t) * c.gx + chart_value(c.beta, t) * c.fx).is_zero();
}

}  // namespace

PhiImagePoint phi_forward(const Pencil& pencil, const PhiDomainPoint& p) {
  const unsigned m = pencil.m;
  if (p.y.size() != m) throw InvalidArgument("phi expects y1..ym");
  const PhiContext c = phi_context(pencil, p.x, p.t);
  if (!on_x0(c, p.t)) throw PhiError(PhiError::Reason::not_on_domain, "point is not on X0");
  if (c.fx.is_zero()) throw PhiError(PhiError::Reason::f_vanishes, "F(x) = 0: lambda' is undefined");
  const FieldElem g = c.gx / c.fx;

  FieldElem a = c.f.zero(), b = c.f.zero();  // L_alpha(y) - alpha0, L_beta(y) - beta0
  for (unsigned i = 1; i <= m; ++i) {
    a += c.alpha[i] * p.y[i - 1];
    b += c.beta[i] * p.y[i - 1];
  }
  PhiImagePoint out{p.x, {}, c.f.zero(), p.t, p.y[0]};
  FieldElem tp = p.t;
  for (unsigned i = 1; i <= m; ++i) {
    out.y.push_back(i == 1 ? p.y[0] + p.t + p.lambda : p.y[i - 1] + tp);
    tp *= p.t;
  }
  out.lambda = (-c.beta[1] - c.alpha[1] * g) * p.lambda - b - g * a;
  return out;
}

PhiDomainPoint phi_inverse(const Pencil& pencil, const PhiImagePoint& p) {
  const unsigned m = pencil.m;
  if (p.y.size() != m) throw InvalidArgument("phi inverse expects y'1..y'm");
  const PhiContext c = phi_context(pencil, p.x, p.t);
  if (c.fx.is_zero()) throw PhiError(PhiError::Reason::f_vanishes, "F(x) = 0: lambda' is undefined");
  if (!on_x0(c, p.t)) throw PhiError(PhiError::Reason::not_in_image, "x is not on the fiber over t");
  const FieldElem g = c.gx / c.fx;
  const FieldElem coef = -c.beta[1] - c.alpha[1] * g;
  if (coef.is_zero())
    throw PhiError(PhiError::Reason::degenerate_lambda, "-beta1 - alpha1 G(x)/F(x) = 0: the affine map degenerates");

  PhiDomainPoint out{p.x, p.t, {}, c.f.zero()};
  out.y.push_back(p.z);
  FieldElem tp = p.t * p.t;
  for (unsigned i = 2; i <= m; ++i) {
    out.y.push_back(p.y[i - 1] - tp);
    tp *= p.t;
  }
  FieldElem a = c.f.zero(), b = c.f.zero();
  for (unsigned i = 1; i <= m; ++i) {
    a += c.alpha[i] * out.y[i - 1];
    b += c.beta[i] * out.y[i - 1];
  }
  out.lambda = (p.lambda + b + g * a) / coef;
  if (!(p.y[0] == out.y[0] + p.t + out.lambda))
    throw PhiError(PhiError::Reason::not_in_image, "y'1 != y1 + t + lambda: point is off the image");
  return out;
}

PhiSampleStats phi_roundtrip_sample(const Pencil& pencil, unsigned k, std::uint64_t valid_target,
                                    std::uint64_t seed) {
  const Field ext = Field::create(pencil.field.characteristic(), k);
  const FieldKernel K = ext.kernel();
  const unsigned m = pencil.m;
  const CubicKernel kg(pencil.G, ext), kf(pencil.F, ext);
  const auto ac = pencil.alpha_coeffs(), bc = pencil.beta_coeffs();
  const auto p3 = CellDecomposition::projective(3, ext.size());
  const MPoly chart = universal_chart_equation(pencil);

  auto horner = [&](const std::vector<Raw>& c, Raw t) {
    Raw acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = K.add(K.mul(acc, t), c[i]);
    return acc;
  };

  Rng rng(seed);
  PhiSampleStats st;
  const std::uint64_t max_draws = 100000 * (valid_target + 1);
  std::uint64_t draws = 0;
  Raw x[4];
  std::vector<Raw> chart_pt(5 + m);
  while (st.valid < valid_target) {
    if (++draws > max_draws) throw Error("phi sampling: X0 is too sparse to sample");
    p3.point(rng.below(p3.total()), x);
    const Raw t = static_cast<Raw>(rng.below(ext.size()));
    const Raw gx = kg.value(x), fx = kf.value(x);
    if (gx == 0 && fx == 0) continue;
    if (K.add(K.mul(horner(ac, t), gx), K.mul(horner(bc, t), fx)) != 0) continue;

    PhiDomainPoint dom{{}, ext.elem(t), {}, ext.zero()};
    for (int i = 0; i < 4; ++i) dom.x.push_back(ext.elem(x[i]));
    for (unsigned i = 0; i < m; ++i) dom.y.push_back(ext.elem(static_cast<Raw>(rng.below(ext.size()))));
    dom.lambda = ext.elem(static_cast<Raw>(rng.below(ext.size())));
    ++st.samples;

    if (fx == 0) {
      ++st.skipped_f_zero;
      continue;
    }
    const Raw g = K.div(gx, fx);
    if (K.sub(K.neg(bc[1]), K.mul(ac[1], g)) == 0) {
      ++st.skipped_degenerate;
      continue;
    }
    ++st.valid;
    try {
      const PhiImagePoint img = phi_forward(pencil, dom);
      for (int i = 0; i < 4; ++i) chart_pt[i] = img.x[i].raw();
      for (unsigned i = 0; i < m; ++i) chart_pt[4 + i] = img.y[i].raw();
      chart_pt[4 + m] = img.lambda.raw();
      if (chart.eval_raw(ext, chart_pt) == 0) ++st.image_on_universal;
      const PhiDomainPoint back = phi_inverse(pencil, img);
      bool same = back.t == dom.t && back.lambda == dom.lambda;
      for (unsigned i = 0; i < m; ++i) same = same && back.y[i] == dom.y[i];
      for (int i = 0; i < 4; ++i) same = same && back.x[i] == dom.x[i];
      if (same) ++st.roundtrip_ok;
    } catch (const PhiError&) {
      // counted as a failed round trip
    }
  }
  return st;
}

// ---------------------------------------------------------------- chart isomorphism

namespace {

struct Affine {
  std::vector<std::vector<Raw>> mat;
  std::vector<Raw> off;
};

// T with from0 + from . T(y) = to0 + to . y; needs from[j], to[j] != 0.
// Vectors are indexed 0..m with entry 0 the constant term.
Affine affine_step(const FieldKernel& K, const std::vector<Raw>& from, const std::vector<Raw>& to, std::size_t j) {
  const std::size_t m = from.size() - 1;
  Affine a{std::vector<std::vector<Raw>>(m, std::vector<Raw>(m, 0)), std::vector<Raw>(m, 0)};
  const Raw inv = K.inv(from[j]);
  for (std::size_t r = 0; r < m; ++r) a.mat[r][r] = 1;
  for (std::size_t c = 0; c < m; ++c)
    a.mat[j - 1][c] = K.add(a.mat[j - 1][c], K.mul(K.sub(to[c + 1], from[c + 1]), inv));
  a.off[j - 1] = K.mul(K.sub(to[0], from[0]), inv);
  return a;
}

// (outer o inner)(y) = outer.mat (inner.mat y + inner.off) + outer.off
Affine compose(const FieldKernel& K, const Affine& outer, const Affine& inner) {
  const std::size_t m = outer.off.size();
  Affine r{std::vector<std::vector<Raw>>(m, std::vector<Raw>(m, 0)), outer.off};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      Raw acc = 0;
      for (std::size_t l = 0; l < m; ++l) acc = K.add(acc, K.mul(outer.mat[i][l], inner.mat[l][j]));
      r.mat[i][j] = acc;
    }
    for (std::size_t l = 0; l < m; ++l) r.off[i] = K.add(r.off[i], K.mul(outer.mat[i][l], inner.off[l]));
  }
  return r;
}

std::string matrix_string(const Field& f, const std::vector<std::vector<Raw>>& m) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << (i ? ", " : "") << '[';
    for (std::size_t j = 0; j < m[i].size(); ++j) os << (j ? ", " : "") << f.elem(m[i][j]).to_string();
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace

void ChartIsomorphism::apply(const Field& over, std::vector<Raw>& point) const {
  if (point.size() != 5 + m) throw InvalidArgument("chart point has wrong dimension");
  const FieldKernel K = over.kernel();
  const Raw shift = lambda_shift.eval_raw(over, point);
  std::vector<Raw> y(m);
  for (unsigned i = 0; i < m; ++i) {
    Raw acc = offset[i];
    for (unsigned j = 0; j < m; ++j) acc = K.add(acc, K.mul(matrix[i][j], point[4 + j]));
    y[i] = acc;
  }
  for (unsigned i = 0; i < m; ++i) point[4 + i] = y[i];
  point[4 + m] = K.add(point[4 + m], shift);
}

ChartIsomorphism universal_linear_iso(const Pencil& a, const Pencil& b) {
  if (!a.shares_surfaces_with(b)) throw InvalidArgument("pencils do not share (G, F)");
  if (a.m != b.m) throw InvalidArgument("pencils have different degrees");
  const unsigned m = a.m;
  const Field& f = a.field;
  const FieldKernel K = f.kernel();
  const auto alpha = a.alpha_coeffs(), alpha_t = b.alpha_coeffs();
  const auto beta = a.beta_coeffs(), beta_t = b.beta_coeffs();

  std::size_t j = 0, l = 0;
  for (std::size_t i = 1; i <= m && !j; ++i)
    if (alpha[i]) j = i;
  for (std::size_t i = 1; i <= m && !l; ++i)
    if (alpha_t[i]) l = i;
  if (!j || !l) throw InvalidArgument("L_alpha is constant in the chart y0 = 1; redraw the pencil");

  ChartIsomorphism iso{m, {}, {}, MPoly(f, 5 + m), false, {}};
  Affine t;
  if (alpha_t[j]) {
    t = affine_step(K, alpha, alpha_t, j);
    iso.transcript.push_back("single elementary step on y" + std::to_string(j));
  } else {
    std::vector<Raw> mid = alpha_t;
    mid[j] = 1;
    t = compose(K, affine_step(K, alpha, mid, j), affine_step(K, mid, alpha_t, l));
    iso.transcript.push_back("two elementary steps via y" + std::to_string(j) + " and y" + std::to_string(l));
  }
  iso.matrix = t.mat;
  iso.offset = t.off;

  const std::size_t nv = 5 + m;
  // T(y) as affine polynomials in the chart ring.
  std::vector<MPoly> ty;
  for (unsigned i = 0; i < m; ++i) {
    MPoly p = MPoly::constant(f, nv, t.off[i]);
    for (unsigned c = 0; c < m; ++c) p = p + MPoly::variable(f, nv, 4 + c).scaled(t.mat[i][c]);
    ty.push_back(std::move(p));
  }
  auto chart_form = [&](const std::vector<Raw>& coeffs, const std::vector<MPoly>& ys) {
    MPoly p = MPoly::constant(f, nv, coeffs[0]);
    for (unsigned i = 1; i <= m; ++i) p = p + ys[i - 1].scaled(coeffs[i]);
    return p;
  };
  std::vector<MPoly> yvars;
  for (unsigned i = 0; i < m; ++i) yvars.push_back(MPoly::variable(f, nv, 4 + i));
  // lambda -> lambda + L_beta~(y) - L_beta(T(y))
  iso.lambda_shift = chart_form(beta_t, yvars) - chart_form(beta, ty);

  std::vector<MPoly> images;
  for (std::size_t i = 0; i < 4; ++i) images.push_back(MPoly::variable(f, nv, i));
  for (auto& p : ty) images.push_back(p);
  images.push_back(MPoly::variable(f, nv, 4 + m) + iso.lambda_shift);
  const MPoly pulled = universal_chart_equation(a).substitute(images);
  iso.identity_holds = pulled == universal_chart_equation(b);

  iso.transcript.push_back("M = " + matrix_string(f, t.mat));
  std::vector<std::vector<Raw>> off_row{t.off};
  iso.transcript.push_back("v = " + matrix_string(f, off_row));
  std::vector<std::string> names{"x0", "x1", "x2", "x3"};
  for (unsigned i = 1; i <= m; ++i) names.push_back("y" + std::to_string(i));
  names.push_back("lambda");
  iso.transcript.push_back("lambda shift = " + iso.lambda_shift.to_string(names));
  iso.transcript.push_back(std::string("universal_a(Psi) == universal_b: ") + (iso.identity_holds ? "yes" : "no"));
  return iso;
}

}  // namespace cutpaste

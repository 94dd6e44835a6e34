#include "cutpaste/count.hpp"

#include <chrono>
#include <numeric>

namespace cutpaste {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::uint64_t upow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

std::uint64_t p1_index(const FieldKernel& k, Raw s0, Raw s1) {
  if (s0 != 0) return k.div(s1, s0);
  return k.size();
}

// G(x), F(x) for every x in P^3(F_{q^k}), in point order.
struct SurfaceValues {
  std::vector<Raw> g, f;
};

SurfaceValues surface_values(const Pencil& pencil, const Field& ext, const EnumContext& ctx) {
  const auto p3 = CellDecomposition::projective(3, ext.size());
  ctx.charge(2 * p3.total(), "evaluating G and F on P^3 over " + ext.to_string());
  const CubicKernel kg(pencil.G, ext), kf(pencil.F, ext);
  SurfaceValues v{std::vector<Raw>(p3.total()), std::vector<Raw>(p3.total())};
  parallel_chunks<char>(p3.total(), ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
    for_each_point(p3, b, e, [&](const Raw* x, std::uint64_t i) {
      v.g[i] = kg.value(x);
      v.f[i] = kf.value(x);
    });
    return char{};
  });
  return v;
}

// (alpha(t), beta(t)) for every t in P^1(F_{q^k}), in point order.
std::vector<std::pair<Raw, Raw>> pencil_coeffs(const Pencil& pencil, const Field& ext) {
  const CompiledPoly ca(pencil.alpha, ext), cb(pencil.beta, ext);
  const auto p1 = CellDecomposition::projective(1, ext.size());
  std::vector<std::pair<Raw, Raw>> out(p1.total());
  for_each_point(p1, 0, p1.total(), [&](const Raw* t, std::uint64_t j) { out[j] = {ca.eval(t), cb.eval(t)}; });
  return out;
}

}  // namespace

CountResult count_projective(const std::vector<MPoly>& polys, const std::vector<std::size_t>& dims, const Field& over,
                             const EnumContext& ctx, std::string label) {
  const auto t0 = Clock::now();
  if (dims.empty()) throw InvalidArgument("count_projective needs at least one projective factor");
  std::vector<CellDecomposition> spaces;
  std::vector<std::size_t> first;
  std::size_t nv = 0;
  std::uint64_t total = 1;
  for (std::size_t d : dims) {
    spaces.push_back(CellDecomposition::projective(d, over.size()));
    first.push_back(nv);
    nv += d + 1;
    total *= spaces.back().total();
  }
  std::vector<CompiledPoly> cps;
  for (const auto& p : polys) {
    if (p.nvars() != nv) throw InvalidArgument("polynomial arity does not match the projective factors");
    cps.emplace_back(p, over);
  }
  const std::uint64_t evals = total * std::max<std::size_t>(1, polys.size());
  ctx.charge(evals, "counting " + label + " over " + over.to_string());

  auto parts = parallel_chunks<std::uint64_t>(total, ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<Raw> pt(nv);
    std::uint64_t n = 0;
    auto test = [&] {
      for (const auto& cp : cps)
        if (cp.eval(pt.data()) != 0) return;
      ++n;
    };
    if (spaces.size() == 1) {
      for_each_point(spaces[0], b, e, [&](const Raw* x, std::uint64_t) {
        std::copy(x, x + nv, pt.begin());
        test();
      });
      return n;
    }
    for (std::uint64_t idx = b; idx < e; ++idx) {
      std::uint64_t r = idx;
      for (std::size_t s = spaces.size(); s-- > 0;) {
        spaces[s].point(r % spaces[s].total(), pt.data() + first[s]);
        r /= spaces[s].total();
      }
      test();
    }
    return n;
  });
  CountResult res{std::move(label), over.characteristic(), over.degree(), 0, 0, evals};
  res.count = std::accumulate(parts.begin(), parts.end(), std::uint64_t{0});
  res.seconds = since(t0);
  return res;
}

// ---------------------------------------------------------------- PencilCounter

PencilCounter::PencilCounter(const Pencil& pencil, unsigned k, const EnumContext& ctx)
    : ext_(Field::create(pencil.field.characteristic(), k)) {
  const auto t0 = Clock::now();
  const FieldKernel K = ext_.kernel();
  const std::uint64_t n = ext_.size();
  const auto p3 = CellDecomposition::projective(3, n);
  p3_ = p3.total();
  ctx.charge(2 * p3_, "fiberwise count over " + ext_.to_string());
  const CubicKernel kg(pencil.G, ext_), kf(pencil.F, ext_);

  struct Part {
    std::vector<std::uint64_t> ratio;
    std::uint64_t z = 0;
  };
  auto parts = parallel_chunks<Part>(p3_, ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
    Part part{std::vector<std::uint64_t>(n + 1, 0), 0};
    for_each_point(p3, b, e, [&](const Raw* x, std::uint64_t) {
      const Raw g = kg.value(x), f = kf.value(x);
      if (g == 0 && f == 0) ++part.z;
      else ++part.ratio[p1_index(K, g, f)];
    });
    return part;
  });
  ratio_.assign(n + 1, 0);
  for (const auto& part : parts) {
    z_ += part.z;
    for (std::uint64_t i = 0; i <= n; ++i) ratio_[i] += part.ratio[i];
  }
  // alpha(t) G + beta(t) F = 0 <=> [G:F] = [beta(t) : -alpha(t)]
  for (const auto& [a, b] : pencil_coeffs(pencil, ext_))
    member_.push_back(a == 0 && b == 0 ? PencilScan::kNoMember : p1_index(K, b, K.neg(a)));
  seconds_ = since(t0);
}

std::uint64_t PencilCounter::fiber(std::uint64_t t) const {
  const std::uint64_t s = member_.at(t);
  return s == PencilScan::kNoMember ? p3_ : z_ + ratio_[s];
}

std::uint64_t PencilCounter::total() const {
  std::uint64_t n = 0;
  for (std::uint64_t t = 0; t < member_.size(); ++t) n += fiber(t);
  return n;
}

std::uint64_t PencilCounter::x0() const {
  std::uint64_t n = 0;
  for (std::uint64_t t = 0; t < ext_.size(); ++t) n += fiber(t) - z_;
  return n;
}

CountResult count_pencil(const Pencil& pencil, unsigned k, const EnumContext& ctx) {
  const PencilCounter pc(pencil, k, ctx);
  return {"X", pencil.field.characteristic(), k, pc.total(), pc.seconds(), 2 * pc.p3_size()};
}

CountResult count_pencil_direct(const Pencil& pencil, unsigned k, const EnumContext& ctx) {
  const Field ext = Field::create(pencil.field.characteristic(), k);
  auto r = count_projective({pencil.equation()}, {3, 1}, ext, ctx, "X (direct)");
  return r;
}

// ---------------------------------------------------------------- loci

std::string to_string(Locus l) {
  switch (l) {
    case Locus::X0: return "X0";
    case Locus::Z: return "Z";
    case Locus::Fiber: return "fiber";
    case Locus::ZTimesA1: return "Z x A^1";
    case Locus::XMinusSingularFibers: return "X minus singular fibers";
  }
  return "?";
}

CountResult count_locus(const Pencil& pencil, Locus locus, unsigned k, const EnumContext& ctx, std::uint64_t t) {
  const auto t0 = Clock::now();
  const Field ext = Field::create(pencil.field.characteristic(), k);
  const FieldKernel K = ext.kernel();
  const std::uint64_t n = ext.size();
  const SurfaceValues v = surface_values(pencil, ext, ctx);
  const std::uint64_t p3 = v.g.size();
  const auto coeffs = pencil_coeffs(pencil, ext);

  // Which t to stream, and whether to drop the base locus G = F = 0.
  std::vector<std::uint64_t> ts;
  bool drop_base = false, base_only = false;
  switch (locus) {
    case Locus::Z:
      ts = {0};
      base_only = true;
      break;
    case Locus::Fiber:
      if (t > n) throw InvalidArgument("fiber index outside P^1");
      ts = {t};
      break;
    case Locus::X0:
      for (std::uint64_t u = 0; u < n; ++u) ts.push_back(u);
      drop_base = true;
      break;
    case Locus::ZTimesA1:
      for (std::uint64_t u = 0; u < n; ++u) ts.push_back(u);
      base_only = true;
      break;
    case Locus::XMinusSingularFibers: {
      const PencilScan scan = scan_pencil(pencil, k, ctx);
      for (std::uint64_t u = 0; u <= n; ++u)
        if (!scan.fiber_singular(u)) ts.push_back(u);
      break;
    }
  }
  ctx.charge(p3 * ts.size(), "counting " + to_string(locus) + " over " + ext.to_string());

  auto parts = parallel_chunks<std::uint64_t>(ts.size(), ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t c = 0;
    for (std::uint64_t i = b; i < e; ++i) {
      const auto [a, bb] = coeffs[ts[i]];
      for (std::uint64_t x = 0; x < p3; ++x) {
        const bool base = v.g[x] == 0 && v.f[x] == 0;
        if (base_only) {
          c += base;
          continue;
        }
        if (drop_base && base) continue;
        c += K.add(K.mul(a, v.g[x]), K.mul(bb, v.f[x])) == 0;
      }
    }
    return c;
  });
  CountResult r{to_string(locus), pencil.field.characteristic(), k, 0, 0, p3 * ts.size()};
  r.count = std::accumulate(parts.begin(), parts.end(), std::uint64_t{0});
  r.seconds = since(t0);
  return r;
}

CountResult count_singular_fibers(const Pencil& pencil, unsigned k, const EnumContext& ctx) {
  const auto t0 = Clock::now();
  const PencilScan scan = scan_pencil(pencil, k, ctx);
  const std::uint64_t p3 = projective_size(3, upow(pencil.field.characteristic(), k));
  return {"singular fibers", pencil.field.characteristic(), k, scan.singular_fiber_count(), since(t0), p3};
}

std::optional<std::vector<std::int64_t>> closed_points(const std::vector<std::uint64_t>& a) {
  std::vector<std::int64_t> b(a.size());
  for (std::size_t d = 1; d <= a.size(); ++d) {
    std::int64_t rest = static_cast<std::int64_t>(a[d - 1]);
    for (std::size_t e = 1; e < d; ++e)
      if (d % e == 0) rest -= static_cast<std::int64_t>(e) * b[e - 1];
    if (rest < 0 || rest % static_cast<std::int64_t>(d) != 0) return std::nullopt;
    b[d - 1] = rest / static_cast<std::int64_t>(d);
  }
  return b;
}

CountResult count_universal_chart(const Pencil& pencil, unsigned k, const EnumContext& ctx) {
  const auto t0 = Clock::now();
  const Field ext = Field::create(pencil.field.characteristic(), k);
  const FieldKernel K = ext.kernel();
  const unsigned m = pencil.m;
  const auto ac = pencil.alpha_coeffs(), bc = pencil.beta_coeffs();
  const SurfaceValues v = surface_values(pencil, ext, ctx);
  const std::uint64_t n = ext.size();
  // Per x the chart equation is affine-linear in (y1..ym, lambda):
  // sum_i (alpha_i G + beta_i F) y_i + F lambda + (alpha0 G + beta0 F) = 0.
  auto parts = parallel_chunks<std::uint64_t>(v.g.size(), ctx.workers, [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t c = 0;
    for (std::uint64_t x = b; x < e; ++x) {
      const Raw g = v.g[x], f = v.f[x];
      bool linear = f != 0;
      for (unsigned i = 1; i <= m && !linear; ++i) linear = K.add(K.mul(ac[i], g), K.mul(bc[i], f)) != 0;
      if (linear) c += upow(n, m);
      else if (K.add(K.mul(ac[0], g), K.mul(bc[0], f)) == 0) c += upow(n, m + 1);
    }
    return c;
  });
  CountResult r{"universal chart", pencil.field.characteristic(), k, 0, 0, v.g.size()};
  r.count = std::accumulate(parts.begin(), parts.end(), std::uint64_t{0});
  r.seconds = since(t0);
  return r;
}

// ---------------------------------------------------------------- verdicts

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::NotApplicable: return "NOT-APPLICABLE";
    case Verdict::Warn: return "WARN";
  }
  return "?";
}

EqualityReport verdict_equality(const Pencil& a, const Pencil& b, const std::vector<unsigned>& ks,
                                const EnumContext& ctx, bool probe_xprime) {
  EqualityReport rep;
  if (!a.shares_surfaces_with(b)) {
    rep.reason = "pencils do not share (G, F)";
    return rep;
  }
  if (!a.certified || !b.certified) {
    rep.reason = "a pencil is not certified generic";
    return rep;
  }
  if (a.m != b.m) {
    rep.reason = "pencils have different degrees";
    return rep;
  }
  rep.verdict = Verdict::Pass;
  for (unsigned k : ks) {
    EqualityRow row;
    row.k = k;
    const PencilCounter ca(a, k, ctx), cb(b, k, ctx);
    row.count_a = ca.total();
    row.count_b = cb.total();
    row.verdict = row.count_a == row.count_b ? Verdict::Pass : Verdict::Fail;
    if (row.verdict == Verdict::Fail) rep.verdict = Verdict::Fail;
    if (probe_xprime) {
      row.xprime_a = count_locus(a, Locus::XMinusSingularFibers, k, ctx).count;
      row.xprime_b = count_locus(b, Locus::XMinusSingularFibers, k, ctx).count;
      row.xprime = row.xprime_a == row.xprime_b ? Verdict::Pass : Verdict::Warn;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

EulerFormulas euler_formulas(int m) {
  if (m < 1) throw InvalidArgument("m must be at least 1");
  EulerFormulas e;
  e.m = m;
  e.chi_blowup = -14;
  const std::int64_t mm = m;
  e.chain[0] = mm * (e.chi_blowup - 9 * (2 * mm - 2)) + 9 * (2 * mm - 2) * (mm - 1);
  e.chain[1] = -14 * mm - 9 * (2 * mm - 2);
  e.chain[2] = -32 * mm + 18;
  e.chi_x = e.chain[2];
  e.s = 32 * mm;
  e.consistent = e.chain[0] == e.chain[1] && e.chain[1] == e.chain[2] && 18 - e.s == e.chi_x;
  return e;
}

}  // namespace cutpaste

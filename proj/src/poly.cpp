#include "cutpaste/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cutpaste/error.hpp"
#include "cutpaste/seed.hpp"

namespace cutpaste {

namespace {

unsigned degree_of(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

unsigned block_degree(const Exponents& e, const Block& b) {
  unsigned d = 0;
  for (std::size_t i = b.first; i < b.first + b.count; ++i) d += e[i];
  return d;
}

bool same_layout(const std::vector<Block>& a, const std::vector<Block>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].first != b[i].first || a[i].count != b[i].count) return false;
  return true;
}

void check_field_compat(const Field& poly_field, const Field& over) {
  if (poly_field == over) return;
  if (poly_field.degree() != 1 || poly_field.characteristic() != over.characteristic())
    throw ArithmeticError("cannot evaluate a polynomial over " + poly_field.to_string() + " at points of " +
                          over.to_string());
}

}  // namespace

bool grlex_greater(const Exponents& a, const Exponents& b) noexcept {
  const unsigned da = degree_of(a), db = degree_of(b);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

MPoly::MPoly(Field field, std::size_t nvars) : field_(std::move(field)), nvars_(nvars) {}

MPoly MPoly::constant(Field field, std::size_t nvars, Raw c) {
  MPoly out(std::move(field), nvars);
  if (c != 0) out.terms_.push_back({Exponents(nvars, 0), c});
  return out;
}

MPoly MPoly::variable(Field field, std::size_t nvars, std::size_t var) {
  if (var >= nvars) throw InvalidArgument("variable index out of range");
  Exponents e(nvars, 0);
  e[var] = 1;
  return monomial(std::move(field), std::move(e), 1);
}

MPoly MPoly::monomial(Field field, Exponents exps, Raw c) {
  MPoly out(std::move(field), exps.size());
  if (c != 0) out.terms_.push_back({std::move(exps), c});
  return out;
}

MPoly MPoly::from_terms(Field field, std::size_t nvars, std::vector<Term> terms) {
  MPoly out(std::move(field), nvars);
  for (const auto& t : terms) {
    if (t.exps.size() != nvars) throw InvalidArgument("term has wrong number of variables");
    if (t.coeff >= out.field_.size()) throw InvalidArgument("coefficient out of range");
  }
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return grlex_greater(a.exps, b.exps); });
  const FieldKernel k = out.field_.kernel();
  for (auto& t : terms) {
    if (!out.terms_.empty() && out.terms_.back().exps == t.exps) {
      out.terms_.back().coeff = k.add(out.terms_.back().coeff, t.coeff);
      if (out.terms_.back().coeff == 0) out.terms_.pop_back();
    } else if (t.coeff != 0) {
      out.terms_.push_back(std::move(t));
    }
  }
  return out;
}

int MPoly::total_degree() const noexcept {
  if (terms_.empty()) return -1;
  return static_cast<int>(degree_of(terms_.front().exps));
}

unsigned MPoly::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.exps.at(var));
  return d;
}

Raw MPoly::coeff(const Exponents& exps) const {
  for (const auto& t : terms_)
    if (t.exps == exps) return t.coeff;
  return 0;
}

bool MPoly::is_homogeneous(std::span<const Block> blocks) const {
  for (const auto& b : blocks)
    if (b.first + b.count > nvars_) return false;
  for (const auto& t : terms_)
    for (const auto& b : blocks)
      if (block_degree(t.exps, b) != b.degree) return false;
  return true;
}

MPoly MPoly::with_grading(std::vector<Block> blocks) const {
  if (!is_homogeneous(blocks)) throw InvalidArgument("polynomial does not match declared multidegree");
  MPoly out = *this;
  out.grading_ = std::move(blocks);
  return out;
}

FieldElem MPoly::eval(std::span<const FieldElem> point) const {
  if (point.size() != nvars_)
    throw InvalidArgument("point has " + std::to_string(point.size()) + " coordinates, polynomial has " +
                          std::to_string(nvars_) + " variables");
  if (nvars_ == 0) return field_.elem(terms_.empty() ? 0 : terms_.front().coeff);
  const Field& over = point.front().field();
  std::vector<Raw> raw(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    if (!(point[i].field() == over)) throw ArithmeticError("point coordinates from mixed fields");
    raw[i] = point[i].raw();
  }
  return over.elem(eval_raw(over, raw));
}

Raw MPoly::eval_raw(const Field& over, std::span<const Raw> point) const {
  if (point.size() != nvars_) throw InvalidArgument("point dimension mismatch");
  check_field_compat(field_, over);
  const FieldKernel k = over.kernel();
  Raw acc = 0;
  for (const auto& t : terms_) {
    Raw v = t.coeff;
    for (std::size_t i = 0; i < nvars_ && v != 0; ++i)
      if (t.exps[i]) v = k.mul(v, k.pow(point[i], t.exps[i]));
    acc = k.add(acc, v);
  }
  return acc;
}

MPoly MPoly::partial(std::size_t var) const {
  if (var >= nvars_) throw InvalidArgument("variable index out of range");
  const FieldKernel k = field_.kernel();
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (t.exps[var] == 0) continue;
    Term d = t;
    d.coeff = k.mul(t.coeff, field_.raw_from_int(t.exps[var]));
    d.exps[var] -= 1;
    if (d.coeff != 0) out.push_back(std::move(d));
  }
  // Differentiation preserves grlex order among surviving terms.
  MPoly r(field_, nvars_);
  r.terms_ = std::move(out);
  if (grading_) {
    auto g = *grading_;
    for (auto& b : g)
      if (var >= b.first && var < b.first + b.count && b.degree > 0) b.degree -= 1;
    r.grading_ = std::move(g);
  }
  return r;
}

MPoly MPoly::embed(const Field& ext) const {
  check_field_compat(field_, ext);
  MPoly out = *this;
  out.field_ = ext;
  return out;
}

MPoly MPoly::remap(std::size_t new_nvars, std::span<const std::size_t> var_map) const {
  if (var_map.size() != nvars_) throw InvalidArgument("variable map has wrong length");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Exponents e(new_nvars, 0);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (var_map[i] >= new_nvars) throw InvalidArgument("variable map target out of range");
      e[var_map[i]] += t.exps[i];
    }
    out.push_back({std::move(e), t.coeff});
  }
  return from_terms(field_, new_nvars, std::move(out));
}

MPoly MPoly::substitute(std::span<const MPoly> images) const {
  if (images.size() != nvars_) throw InvalidArgument("substitution needs one image per variable");
  if (images.empty()) return *this;
  const Field& f = images.front().field();
  const std::size_t n = images.front().nvars();
  for (const auto& im : images)
    if (!(im.field() == f) || im.nvars() != n) throw InvalidArgument("substitution images from different rings");
  check_field_compat(field_, f);

  std::vector<std::vector<MPoly>> powers(nvars_);
  auto power = [&](std::size_t var, unsigned e) -> const MPoly& {
    auto& cache = powers[var];
    if (cache.empty()) cache.push_back(MPoly::constant(f, n, 1));
    while (cache.size() <= e) cache.push_back(cache.back() * images[var]);
    return cache[e];
  };

  std::vector<Term> acc;
  for (const auto& t : terms_) {
    MPoly prod = MPoly::constant(f, n, t.coeff);
    for (std::size_t i = 0; i < nvars_; ++i)
      if (t.exps[i]) prod = prod * power(i, t.exps[i]);
    acc.insert(acc.end(), prod.terms_.begin(), prod.terms_.end());
  }
  return from_terms(f, n, std::move(acc));
}

MPoly MPoly::scaled(Raw c) const {
  if (c == 0) return MPoly(field_, nvars_);
  const FieldKernel k = field_.kernel();
  MPoly out = *this;
  for (auto& t : out.terms_) t.coeff = k.mul(t.coeff, c);
  return out;
}

MPoly MPoly::pow(unsigned e) const {
  MPoly out = MPoly::constant(field_, nvars_, 1);
  for (unsigned i = 0; i < e; ++i) out = out * *this;
  if (grading_) {
    auto g = *grading_;
    for (auto& b : g) b.degree *= e;
    out.grading_ = std::move(g);
  }
  return out;
}

void MPoly::check_compatible(const MPoly& other) const {
  if (!(field_ == other.field_)) throw ArithmeticError("polynomials over different fields");
  if (nvars_ != other.nvars_) throw InvalidArgument("polynomials in different numbers of variables");
}

MPoly operator+(const MPoly& a, const MPoly& b) {
  a.check_compatible(b);
  std::vector<Term> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  MPoly out = MPoly::from_terms(a.field_, a.nvars_, std::move(terms));
  if (a.grading_ && b.grading_ && *a.grading_ == *b.grading_) out.grading_ = a.grading_;
  else if (a.grading_ && b.is_zero()) out.grading_ = a.grading_;
  else if (b.grading_ && a.is_zero()) out.grading_ = b.grading_;
  return out;
}

MPoly MPoly::operator-() const { return scaled(field_.kernel().neg(1)); }

MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }

MPoly operator*(const MPoly& a, const MPoly& b) {
  a.check_compatible(b);
  const FieldKernel k = a.field_.kernel();
  std::vector<Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      Exponents e(a.nvars_);
      for (std::size_t i = 0; i < a.nvars_; ++i) e[i] = x.exps[i] + y.exps[i];
      terms.push_back({std::move(e), k.mul(x.coeff, y.coeff)});
    }
  }
  MPoly out = MPoly::from_terms(a.field_, a.nvars_, std::move(terms));
  if (a.grading_ && b.grading_ && same_layout(*a.grading_, *b.grading_)) {
    auto g = *a.grading_;
    for (std::size_t i = 0; i < g.size(); ++i) g[i].degree += (*b.grading_)[i].degree;
    out.grading_ = std::move(g);
  }
  return out;
}

std::string MPoly::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    const bool is_const = degree_of(t.exps) == 0;
    const std::string c = field_.elem(t.coeff).to_string();
    if (is_const || t.coeff != 1) os << c;
    bool need_star = !(t.coeff == 1 && !is_const);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (!t.exps[i]) continue;
      if (need_star) os << '*';
      need_star = true;
      if (i < names.size()) os << names[i];
      else os << 'v' << i;
      if (t.exps[i] > 1) os << '^' << t.exps[i];
    }
  }
  return os.str();
}

std::vector<Exponents> block_monomials(std::size_t nvars, const Block& block) {
  if (block.first + block.count > nvars || block.count == 0)
    throw InvalidArgument("block outside the variable range");
  std::vector<Exponents> out;
  Exponents cur(nvars, 0);
  // Recursive distribution of the degree over block variables, first
  // variable receiving the most first (this is descending grlex).
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    const std::size_t var = block.first + i;
    if (i + 1 == block.count) {
      cur[var] = static_cast<std::uint16_t>(left);
      out.push_back(cur);
      cur[var] = 0;
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      cur[var] = static_cast<std::uint16_t>(e);
      self(self, i + 1, left - e);
    }
    cur[var] = 0;
  };
  rec(rec, 0, block.degree);
  return out;
}

MPoly random_form(const Field& field, std::size_t nvars, const Block& block, std::uint64_t seed) {
  if (block.degree < 1) throw InvalidArgument("form degree must be at least 1");
  Rng rng(seed);
  std::vector<Term> terms;
  for (auto& e : block_monomials(nvars, block)) {
    const Raw c = static_cast<Raw>(rng.below(field.size()));
    if (c != 0) terms.push_back({std::move(e), c});
  }
  return MPoly::from_terms(field, nvars, std::move(terms)).with_grading({block});
}

CompiledPoly::CompiledPoly(const MPoly& poly, const Field& over)
    : over_(over), kernel_(over_.kernel()), nvars_(poly.nvars()) {
  check_field_compat(poly.field(), over);
  for (const auto& t : poly.terms()) {
    coeffs_.push_back(t.coeff);
    exps_.insert(exps_.end(), t.exps.begin(), t.exps.end());
  }
}

Raw CompiledPoly::eval(const Raw* point) const noexcept {
  Raw acc = 0;
  const std::uint16_t* e = exps_.data();
  for (std::size_t t = 0; t < coeffs_.size(); ++t, e += nvars_) {
    Raw v = coeffs_[t];
    for (std::size_t i = 0; i < nvars_; ++i)
      for (std::uint16_t j = 0; j < e[i]; ++j) v = kernel_.mul(v, point[i]);
    acc = kernel_.add(acc, v);
  }
  return acc;
}

}  // namespace cutpaste

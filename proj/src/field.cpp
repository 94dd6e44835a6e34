#include "cutpaste/field.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "cutpaste/error.hpp"

namespace cutpaste {

namespace {

std::uint32_t inv_mod_p(std::uint32_t a, std::uint32_t p) {
  // a^(p-2) mod p
  std::uint64_t result = 1, base = a % p;
  std::uint64_t e = p - 2;
  while (e) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(result);
}

fp_poly::Poly to_poly(const detail::FieldTables& t, Raw v) {
  fp_poly::Poly out(t.k);
  for (std::uint32_t i = 0; i < t.k; ++i) {
    out[i] = v % t.p;
    v /= t.p;
  }
  fp_poly::trim(out);
  return out;
}

Raw from_poly(const detail::FieldTables& t, const fp_poly::Poly& a) {
  Raw v = 0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * t.p + a[i];
  return v;
}

Raw mul_ref(const detail::FieldTables& t, Raw a, Raw b) {
  auto prod = fp_poly::mul(to_poly(t, a), to_poly(t, b), t.p);
  return from_poly(t, fp_poly::mod(std::move(prod), t.modulus, t.p));
}

Raw inv_ref(const detail::FieldTables& t, Raw a) {
  // Extended Euclid: maintain r_i = s_i * a (mod modulus).
  using fp_poly::Poly;
  Poly r0 = t.modulus, r1 = to_poly(t, a);
  Poly s0 = {}, s1 = {1};
  const std::uint32_t p = t.p;
  while (!r1.empty()) {
    // polynomial division r0 = quot * r1 + rem
    Poly rem = r0;
    Poly quot(rem.size() >= r1.size() ? rem.size() - r1.size() + 1 : 0, 0);
    const std::uint32_t lead_inv = inv_mod_p(r1.back(), p);
    while (rem.size() >= r1.size() && !rem.empty()) {
      const std::size_t shift = rem.size() - r1.size();
      const std::uint32_t c = static_cast<std::uint32_t>(
          static_cast<std::uint64_t>(rem.back()) * lead_inv % p);
      quot[shift] = c;
      for (std::size_t i = 0; i < r1.size(); ++i) {
        rem[shift + i] = static_cast<std::uint32_t>(
            (rem[shift + i] + static_cast<std::uint64_t>(p - c) * r1[i]) % p);
      }
      fp_poly::trim(rem);
    }
    fp_poly::trim(quot);
    Poly s2 = fp_poly::sub(s0, fp_poly::mul(quot, s1, p), p);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 is a nonzero constant gcd.
  const std::uint32_t c = inv_mod_p(r0[0], p);
  for (auto& x : s0) x = static_cast<std::uint32_t>(static_cast<std::uint64_t>(x) * c % p);
  return from_poly(t, fp_poly::mod(s0, t.modulus, p));
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::shared_ptr<const detail::FieldTables> build_tables(std::uint32_t p, std::uint32_t k) {
  auto t = std::make_shared<detail::FieldTables>();
  t->p = p;
  t->k = k;
  std::uint64_t size = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    t->pow_p.push_back(static_cast<std::uint32_t>(size));
    size *= p;
  }
  t->size = static_cast<std::uint32_t>(size);

  // Smallest monic irreducible: scan lower coefficients in encoding order.
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    fp_poly::Poly f(k + 1);
    std::uint64_t v = idx;
    for (std::uint32_t i = 0; i < k; ++i) {
      f[i] = static_cast<std::uint32_t>(v % p);
      v /= p;
    }
    f[k] = 1;
    if (fp_poly::is_irreducible(f, p)) {
      t->modulus = std::move(f);
      break;
    }
  }

  const std::uint32_t n = t->size;
  t->neg.resize(n);
  for (Raw a = 0; a < n; ++a) {
    Raw v = a, out = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::uint32_t c = v % p;
      v /= p;
      out += ((p - c) % p) * t->pow_p[i];
    }
    t->neg[a] = out;
  }

  // Generator: smallest element of multiplicative order n - 1.
  const auto factors = prime_factors(n - 1);
  auto pow_ref = [&](Raw a, std::uint64_t e) {
    Raw r = 1;
    while (e) {
      if (e & 1) r = mul_ref(*t, r, a);
      a = mul_ref(*t, a, a);
      e >>= 1;
    }
    return r;
  };
  for (Raw g = 1; g < n; ++g) {
    bool ok = true;
    for (auto f : factors) {
      if (pow_ref(g, (n - 1) / f) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      t->generator = g;
      break;
    }
  }

  t->log.assign(n, 0);
  t->exp.assign(2 * (n - 1), 0);
  Raw cur = 1;
  for (std::uint32_t i = 0; i < n - 1; ++i) {
    t->exp[i] = cur;
    t->exp[i + n - 1] = cur;
    t->log[cur] = i;
    cur = mul_ref(*t, cur, t->generator);
  }
  t->inv.assign(n, 0);
  for (Raw a = 1; a < n; ++a) t->inv[a] = t->exp[(n - 1 - t->log[a]) % (n - 1)];

  if (n <= detail::kFullTableSize) {
    t->full = true;
    t->add_tab.resize(static_cast<std::size_t>(n) * n);
    t->mul_tab.resize(static_cast<std::size_t>(n) * n);
    for (Raw a = 0; a < n; ++a) {
      for (Raw b = 0; b < n; ++b) {
        t->add_tab[a * n + b] = static_cast<std::uint16_t>(t->add_digits(a, b));
        t->mul_tab[a * n + b] = static_cast<std::uint16_t>(
            (a == 0 || b == 0) ? 0 : t->exp[t->log[a] + t->log[b]]);
      }
    }
  }
  return t;
}

}  // namespace

Raw detail::FieldTables::add_digits(Raw a, Raw b) const noexcept {
  if (k == 1) {
    const Raw s = a + b;
    return s >= p ? s - p : s;
  }
  Raw out = 0;
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint32_t c = a % p + b % p;
    if (c >= p) c -= p;
    out += c * pow_p[i];
    a /= p;
    b /= p;
  }
  return out;
}

Raw FieldKernel::pow(Raw a, std::uint64_t e) const noexcept {
  Raw r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Field Field::create(std::uint32_t p, std::uint32_t k) {
  if (!is_prime(p)) throw InvalidArgument("field characteristic " + std::to_string(p) + " is not prime");
  if (p < 5) throw InvalidArgument("field characteristic must be at least 5, got " + std::to_string(p));
  if (k < 1) throw InvalidArgument("extension degree must be at least 1");
  std::uint64_t size = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    size *= p;
    if (size > kMaxFieldSize)
      throw InvalidArgument("field size " + std::to_string(p) + "^" + std::to_string(k) +
                            " exceeds the enumeration cap " + std::to_string(kMaxFieldSize));
  }

  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, std::shared_ptr<const detail::FieldTables>>
      cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{p, k}];
  if (!slot) slot = build_tables(p, k);
  return Field(slot);
}

FieldElem Field::elem(Raw v) const {
  if (v >= size()) throw InvalidArgument("element encoding out of range for " + to_string());
  return FieldElem(*this, v);
}

Raw Field::encode(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() > t_->k) throw InvalidArgument("too many coefficients for " + to_string());
  Raw v = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    if (coeffs[i] >= t_->p) throw InvalidArgument("coefficient out of range for " + to_string());
    v = v * t_->p + coeffs[i];
  }
  return v;
}

FieldElem Field::from_coeffs(std::span<const std::uint32_t> coeffs) const {
  return FieldElem(*this, encode(coeffs));
}

Raw Field::raw_from_int(std::int64_t v) const noexcept {
  const std::int64_t p = t_->p;
  return static_cast<Raw>(((v % p) + p) % p);
}

FieldElem Field::from_int(std::int64_t v) const { return FieldElem(*this, raw_from_int(v)); }
FieldElem Field::zero() const { return FieldElem(*this, 0); }
FieldElem Field::one() const { return FieldElem(*this, 1); }

std::vector<std::uint32_t> Field::coeffs(Raw v) const {
  std::vector<std::uint32_t> out(t_->k);
  for (std::uint32_t i = 0; i < t_->k; ++i) {
    out[i] = v % t_->p;
    v /= t_->p;
  }
  return out;
}

std::vector<FieldElem> Field::elements() const {
  std::vector<FieldElem> out;
  out.reserve(size());
  for (Raw v = 0; v < size(); ++v) out.emplace_back(*this, v);
  return out;
}

Raw Field::mul_reference(Raw a, Raw b) const { return mul_ref(*t_, a, b); }

Raw Field::inv_reference(Raw a) const {
  if (a == 0) throw ArithmeticError("division by zero");
  return inv_ref(*t_, a);
}

std::string Field::to_string() const {
  std::ostringstream os;
  os << "F_" << t_->p;
  if (t_->k > 1) os << "^" << t_->k;
  return os.str();
}

FieldElem::FieldElem(Field f, Raw v) : field_(std::move(f)), v_(v) {}

namespace {
void require_same(const FieldElem& a, const FieldElem& b) {
  if (!(a.field() == b.field()))
    throw ArithmeticError("mixed fields: " + a.field().to_string() + " and " + b.field().to_string());
}
}  // namespace

FieldElem FieldElem::operator-() const { return FieldElem(field_, field_.kernel().neg(v_)); }

FieldElem FieldElem::inverse() const {
  if (v_ == 0) throw ArithmeticError("division by zero");
  return FieldElem(field_, field_.kernel().inv(v_));
}

FieldElem FieldElem::pow(std::uint64_t e) const { return FieldElem(field_, field_.kernel().pow(v_, e)); }

FieldElem operator+(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  return FieldElem(a.field_, a.field_.kernel().add(a.v_, b.v_));
}

FieldElem operator-(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  return FieldElem(a.field_, a.field_.kernel().sub(a.v_, b.v_));
}

FieldElem operator*(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  return FieldElem(a.field_, a.field_.kernel().mul(a.v_, b.v_));
}

FieldElem operator/(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  if (b.v_ == 0) throw ArithmeticError("division by zero");
  return FieldElem(a.field_, a.field_.kernel().div(a.v_, b.v_));
}

std::string FieldElem::to_string() const {
  if (field_.degree() == 1) return std::to_string(v_);
  std::ostringstream os;
  os << '[';
  const auto c = coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ']';
  return os.str();
}

namespace fp_poly {

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly mul(const Poly& a, const Poly& b, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] = static_cast<std::uint32_t>((out[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
  trim(out);
  return out;
}

Poly mod(Poly a, const Poly& m, std::uint32_t p) {
  trim(a);
  const std::uint32_t lead_inv = inv_mod_p(m.back(), p);
  while (a.size() >= m.size()) {
    const std::size_t shift = a.size() - m.size();
    const std::uint64_t c = static_cast<std::uint64_t>(a.back()) * lead_inv % p;
    for (std::size_t i = 0; i < m.size(); ++i)
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + (p - c) * m[i]) % p);
    trim(a);
  }
  return a;
}

Poly sub(const Poly& a, const Poly& b, std::uint32_t p) {
  Poly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint32_t x = i < a.size() ? a[i] : 0;
    const std::uint32_t y = i < b.size() ? b[i] : 0;
    out[i] = (x + p - y) % p;
  }
  trim(out);
  return out;
}

Poly gcd(Poly a, Poly b, std::uint32_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Poly powmod(Poly base, std::uint64_t e, const Poly& m, std::uint32_t p) {
  Poly result = {1};
  base = mod(std::move(base), m, p);
  while (e) {
    if (e & 1) result = mod(mul(result, base, p), m, p);
    base = mod(mul(base, base, p), m, p);
    e >>= 1;
  }
  return result;
}

bool is_irreducible(const Poly& f, std::uint32_t p) {
  const std::size_t deg = f.size() - 1;
  if (deg <= 1) return deg == 1;
  Poly h = {0, 1};  // x
  for (std::size_t i = 1; i <= deg / 2; ++i) {
    h = powmod(h, p, f, p);  // x^{p^i} mod f
    const Poly g = gcd(f, sub(h, {0, 1}, p), p);
    if (g.size() > 1) return false;
  }
  return true;
}

}  // namespace fp_poly

}  // namespace cutpaste

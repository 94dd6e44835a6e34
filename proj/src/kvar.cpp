#include "cutpaste/kvar.hpp"

#include <cctype>
#include <sstream>

#include "cutpaste/error.hpp"

namespace cutpaste {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticError("integer overflow in class arithmetic");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticError("integer overflow in class arithmetic");
  return r;
}

std::int64_t binomial(unsigned n, unsigned k) {
  std::int64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = checked_mul(r, n - k + i) / i;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- LPoly

LPoly::LPoly(std::vector<std::int64_t> coeffs) : c_(std::move(coeffs)) { trim(); }

void LPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

LPoly LPoly::constant(std::int64_t c) { return LPoly({c}); }

LPoly LPoly::lefschetz(unsigned power) {
  std::vector<std::int64_t> c(power + 1, 0);
  c[power] = 1;
  return LPoly(std::move(c));
}

LPoly LPoly::projective_space(unsigned n) { return LPoly(std::vector<std::int64_t>(n + 1, 1)); }

LPoly LPoly::torus(unsigned n) {
  LPoly out = constant(1);
  const LPoly factor({-1, 1});
  for (unsigned i = 0; i < n; ++i) out = out * factor;
  return out;
}

std::int64_t LPoly::eval(std::int64_t at) const {
  std::int64_t acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = checked_add(checked_mul(acc, at), c_[i]);
  return acc;
}

LPoly operator+(const LPoly& a, const LPoly& b) {
  std::vector<std::int64_t> c(std::max(a.c_.size(), b.c_.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = checked_add(a.coeff(i), b.coeff(i));
  return LPoly(std::move(c));
}

LPoly LPoly::operator-() const { return scaled(-1); }

LPoly operator-(const LPoly& a, const LPoly& b) { return a + (-b); }

LPoly operator*(const LPoly& a, const LPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<std::int64_t> c(a.c_.size() + b.c_.size() - 1, 0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = checked_add(c[i + j], checked_mul(a.c_[i], b.c_[j]));
  return LPoly(std::move(c));
}

LPoly LPoly::scaled(std::int64_t s) const {
  std::vector<std::int64_t> c = c_;
  for (auto& x : c) x = checked_mul(x, s);
  return LPoly(std::move(c));
}

std::string LPoly::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    std::int64_t c = c_[i];
    if (c == 0) continue;
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const std::int64_t mag = c < 0 ? -c : c;
    if (i == 0) {
      os << mag;
      continue;
    }
    if (mag != 1) os << mag << '*';
    os << 'L';
    if (i > 1) os << '^' << i;
  }
  return os.str();
}

// ---------------------------------------------------------------- KClass

KClass::KClass(LPoly base) : base_(std::move(base)) {}

KClass KClass::atom(std::string name) {
  if (name.empty()) throw InvalidArgument("atom name must be nonempty");
  KClass c;
  c.atoms_.emplace(std::move(name), LPoly::constant(1));
  return c;
}

LPoly KClass::atom_coeff(const std::string& name) const {
  auto it = atoms_.find(name);
  return it == atoms_.end() ? LPoly() : it->second;
}

void KClass::drop_zero_atoms() {
  std::erase_if(atoms_, [](const auto& kv) { return kv.second.is_zero(); });
}

KClass operator+(const KClass& a, const KClass& b) {
  KClass out = a;
  out.base_ = a.base_ + b.base_;
  for (const auto& [name, p] : b.atoms_) out.atoms_[name] = out.atoms_[name] + p;
  out.drop_zero_atoms();
  return out;
}

KClass KClass::operator-() const { return scaled(-1); }

KClass operator-(const KClass& a, const KClass& b) { return a + (-b); }

KClass operator*(const KClass& a, const KClass& b) {
  if (a.has_atoms() && b.has_atoms()) throw ArithmeticError("atom product unsupported");
  const KClass& plain = a.has_atoms() ? b : a;
  const KClass& other = a.has_atoms() ? a : b;
  KClass out;
  out.base_ = plain.base_ * other.base_;
  for (const auto& [name, p] : other.atoms_) out.atoms_[name] = plain.base_ * p;
  out.drop_zero_atoms();
  return out;
}

KClass KClass::scaled(std::int64_t s) const { return *this * KClass(LPoly::constant(s)); }

std::string KClass::to_string() const {
  std::ostringstream os;
  bool first = true;
  if (!base_.is_zero() || atoms_.empty()) {
    os << base_.to_string();
    first = false;
  }
  for (const auto& [name, p] : atoms_) {
    const auto& c = p.coeffs();
    if (p.is_constant()) {
      const std::int64_t v = c[0];
      if (!first) os << (v < 0 ? " - " : " + ");
      else if (v < 0) os << '-';
      const std::int64_t mag = v < 0 ? -v : v;
      if (mag != 1) os << mag << '*';
      os << '[' << name << ']';
    } else {
      if (!first) os << " + ";
      os << '[' << name << "]*(" << p.to_string() << ')';
    }
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  KClass parse() {
    KClass v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("class expression, position " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::int64_t integer() {
    skip_ws();
    const std::size_t start = pos_;
    std::int64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = checked_add(checked_mul(v, 10), s_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("expected integer");
    return v;
  }

  KClass expr() {
    KClass v = term();
    while (true) {
      if (accept('+')) v = v + term();
      else if (accept('-')) v = v - term();
      else return v;
    }
  }

  KClass term() {
    KClass v = power();
    while (accept('*')) v = v * power();
    return v;
  }

  KClass power() {
    KClass base = unary();
    if (!accept('^')) return base;
    const std::int64_t e = integer();
    if (e > 4096) fail("exponent too large");
    KClass out = LPoly::constant(1);
    for (std::int64_t i = 0; i < e; ++i) out = out * base;
    return out;
  }

  KClass unary() {
    if (accept('-')) return -unary();
    return primary();
  }

  KClass primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return LPoly::constant(integer());
    if (c == 'L') {
      ++pos_;
      return LPoly::lefschetz(1);
    }
    if (c == 'P') {
      ++pos_;
      expect('(');
      const std::int64_t n = integer();
      if (n > 4096) fail("projective dimension too large");
      expect(')');
      return LPoly::projective_space(static_cast<unsigned>(n));
    }
    if (c == '[') {
      ++pos_;
      const std::size_t close = s_.find(']', pos_);
      if (close == std::string_view::npos) fail("unterminated atom");
      std::string name(s_.substr(pos_, close - pos_));
      if (name.empty()) fail("empty atom name");
      pos_ = close + 1;
      return KClass::atom(std::move(name));
    }
    if (c == '(') {
      ++pos_;
      KClass v = expr();
      expect(')');
      return v;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

KClass kclass_normalize(std::string_view expr) { return Parser(expr).parse(); }

std::int64_t kclass_realize(const KClass& c, const Measure& measure,
                            const std::map<std::string, std::int64_t>& bindings) {
  const std::int64_t l = measure.lefschetz_value();
  std::int64_t acc = c.base().eval(l);
  for (const auto& [name, p] : c.atoms()) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw ArithmeticError("unbound atom [" + name + "]");
    acc = checked_add(acc, checked_mul(p.eval(l), it->second));
  }
  return acc;
}

// ---------------------------------------------------------------- relations

std::string Relation::to_string() const { return lhs.to_string() + " = " + rhs.to_string(); }

Relation kv_fiber_decomposition(unsigned m) {
  if (m < 1) throw InvalidArgument("pencil degree m must be at least 1");
  const KClass rhs = KClass::atom(std::string(kAtomX0)) + KClass::atom(std::string(kAtomFiberInf)) +
                     KClass::atom(std::string(kAtomZ)) * LPoly::lefschetz(1);
  return {KClass::atom(std::string(kAtomX)), rhs, "fiber decomposition, m=" + std::to_string(m)};
}

KClass kv_hyperplane_complement(unsigned m, unsigned k) {
  if (k >= m) throw InvalidArgument("hyperplane complement needs 0 <= k < m");
  return LPoly::lefschetz(k) * LPoly::torus(m - k);
}

std::vector<Relation> kv_generate_relations(unsigned m) {
  if (m < 1) throw InvalidArgument("pencil degree m must be at least 1");
  const KClass a = KClass::atom(std::string(kAtomX));
  const KClass b = KClass::atom(std::string(kAtomXtilde));
  std::vector<Relation> out;
  for (unsigned k = 1; k <= m + 1; ++k) {
    const KClass f = LPoly::lefschetz(k);
    out.push_back({a * f, b * f, "stable: L^" + std::to_string(k)});
  }
  for (unsigned k = 0; k < m; ++k) {
    const KClass f = kv_hyperplane_complement(m, k);
    out.push_back({a * f, b * f,
                   "torus: L^" + std::to_string(k) + "*(L-1)^" + std::to_string(m - k)});
  }
  return out;
}

std::string_view to_string(DerivationStep::Op op) {
  switch (op) {
    case DerivationStep::Op::start: return "start";
    case DerivationStep::Op::subtract: return "subtract";
    case DerivationStep::Op::scale: return "scale";
  }
  return "?";
}

Derivation kv_cancellation_derive(unsigned m) {
  Derivation d;
  d.m = m;
  d.hypotheses = kv_generate_relations(m);
  // Layout of kv_generate_relations: index j-1 holds L^j (1 <= j <= m+1),
  // index (m+1)+k holds the torus relation for k.
  const std::size_t torus0 = m + 1;

  Relation cur = d.hypotheses[torus0];
  d.steps.push_back({DerivationStep::Op::start, torus0, 1, "expand [X]*(L-1)^m = [Xtilde]*(L-1)^m", cur});

  for (unsigned j = m; j >= 1; --j) {
    const std::int64_t c = binomial(m, j) * (((m - j) % 2) ? -1 : 1);
    const Relation& h = d.hypotheses[j - 1];
    cur = Relation{cur.lhs - h.lhs.scaled(c), cur.rhs - h.rhs.scaled(c), "after L^" + std::to_string(j)};
    d.steps.push_back({DerivationStep::Op::subtract, j - 1, c,
                       "subtract " + std::to_string(c) + " * ([X]*L^" + std::to_string(j) + " = [Xtilde]*L^" +
                           std::to_string(j) + ")",
                       cur});
  }

  const std::int64_t sign = (m % 2) ? -1 : 1;
  cur = Relation{cur.lhs.scaled(sign), cur.rhs.scaled(sign), "conclusion"};
  d.steps.push_back({DerivationStep::Op::scale, std::nullopt, sign, "multiply by (-1)^m", cur});
  d.conclusion = cur;
  return d;
}

ReplayResult kv_replay(const Derivation& d) {
  if (d.steps.empty()) return {false, "derivation has no steps"};
  std::optional<Relation> cur;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const auto& s = d.steps[i];
    const std::string where = "step " + std::to_string(i) + " (" + std::string(to_string(s.op)) + ")";
    if (s.hypothesis && *s.hypothesis >= d.hypotheses.size()) return {false, where + ": hypothesis index out of range"};
    Relation expect;
    switch (s.op) {
      case DerivationStep::Op::start:
        if (!s.hypothesis) return {false, where + ": start needs a hypothesis"};
        expect = d.hypotheses[*s.hypothesis];
        break;
      case DerivationStep::Op::subtract: {
        if (!cur || !s.hypothesis) return {false, where + ": subtract needs a previous step and a hypothesis"};
        const Relation& h = d.hypotheses[*s.hypothesis];
        expect = Relation{cur->lhs - h.lhs.scaled(s.scalar), cur->rhs - h.rhs.scaled(s.scalar), ""};
        break;
      }
      case DerivationStep::Op::scale:
        if (!cur) return {false, where + ": scale needs a previous step"};
        if (s.scalar != 1 && s.scalar != -1) return {false, where + ": only unit scalars are invertible"};
        expect = Relation{cur->lhs.scaled(s.scalar), cur->rhs.scaled(s.scalar), ""};
        break;
    }
    if (!(expect == s.result)) return {false, where + ": recorded " + s.result.to_string() + ", recomputed " + expect.to_string()};
    cur = s.result;
  }
  if (!(*cur == d.conclusion)) return {false, "conclusion differs from the last step"};
  return {true, "replayed " + std::to_string(d.steps.size()) + " steps"};
}

}  // namespace cutpaste

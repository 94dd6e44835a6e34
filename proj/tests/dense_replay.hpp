#pragma once

// Replays a serialized cancellation derivation with dense integer vectors,
// against a relation set regenerated here. Shares nothing with the library's
// KClass arithmetic.
#include <map>
#include <string>
#include <vector>

#include "cutpaste/serialize.hpp"

namespace dense {

using cutpaste::Json;

// Dense side of a relation: atom ("" for the pure part) -> coefficients in L.
using Dense = std::map<std::string, std::vector<long long>>;

inline void normalize(Dense& d) {
  for (auto it = d.begin(); it != d.end();) {
    auto& v = it->second;
    while (!v.empty() && v.back() == 0) v.pop_back();
    it = v.empty() ? d.erase(it) : std::next(it);
  }
}

inline Dense dense_side(const Json& j) {
  Dense d;
  d[""] = j.at("L").get<std::vector<long long>>();
  for (const auto& [name, c] : j.at("atoms").items()) d[name] = c.get<std::vector<long long>>();
  normalize(d);
  return d;
}

inline Dense axpy(const Dense& a, long long s, const Dense& b) {
  Dense r = a;
  for (const auto& [name, c] : b) {
    auto& v = r[name];
    if (v.size() < c.size()) v.resize(c.size(), 0);
    for (std::size_t i = 0; i < c.size(); ++i) v[i] += s * c[i];
  }
  normalize(r);
  return r;
}

inline Dense scale(const Dense& a, long long s) { return axpy(Dense{}, s, a); }

// atom * L^j * (L - 1)^e, expanded with binomial coefficients.
inline Dense monomial_torus(const std::string& atom, unsigned j, unsigned e) {
  std::vector<long long> c(j + e + 1, 0);
  long long binom = 1;
  for (unsigned i = 0; i <= e; ++i) {
    c[j + i] = ((e - i) % 2 ? -1 : 1) * binom;
    binom = binom * (e - i) / (i + 1);
  }
  Dense d{{atom, c}};
  normalize(d);
  return d;
}

// Replays a serialized derivation with dense arithmetic against a hypothesis
// set regenerated here. Returns an empty string on success.
inline std::string dense_replay(unsigned m, const Json& t) {
  std::vector<std::pair<Dense, Dense>> hyp;
  for (unsigned j = 1; j <= m + 1; ++j) hyp.push_back({monomial_torus("X", j, 0), monomial_torus("Xtilde", j, 0)});
  for (unsigned k = 0; k < m; ++k) hyp.push_back({monomial_torus("X", k, m - k), monomial_torus("Xtilde", k, m - k)});

  const auto& hs = t.at("hypotheses");
  if (hs.size() != hyp.size()) return "hypothesis count";
  for (std::size_t i = 0; i < hyp.size(); ++i)
    if (dense_side(hs[i]["lhs"]) != hyp[i].first || dense_side(hs[i]["rhs"]) != hyp[i].second)
      return "hypothesis " + std::to_string(i) + " is not in the relation set";

  std::pair<Dense, Dense> cur;
  bool started = false;
  for (const auto& s : t.at("steps")) {
    const auto op = s["op"].get<std::string>();
    const long long c = s["scalar"].get<long long>();
    if (op == "start") {
      cur = hyp.at(s["hypothesis"].get<std::size_t>());
      started = true;
    } else if (op == "subtract") {
      if (!started) return "subtract before start";
      const auto& h = hyp.at(s["hypothesis"].get<std::size_t>());
      cur = {axpy(cur.first, -c, h.first), axpy(cur.second, -c, h.second)};
    } else if (op == "scale") {
      if (c != 1 && c != -1) return "non-unit scale";
      cur = {scale(cur.first, c), scale(cur.second, c)};
    } else {
      return "unknown op " + op;
    }
    if (dense_side(s["result"]["lhs"]) != cur.first || dense_side(s["result"]["rhs"]) != cur.second)
      return "step result mismatch";
  }
  const Dense x{{"X", {1}}}, xt{{"Xtilde", {1}}};
  if (cur.first != x || cur.second != xt) return "does not conclude [X] = [Xtilde]";
  return "";
}

}  // namespace dense

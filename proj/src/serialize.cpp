#include "cutpaste/serialize.hpp"

#include <sstream>

namespace cutpaste {

Json to_json(const Field& f) { return {{"p", f.characteristic()}, {"k", f.degree()}, {"modulus", f.modulus()}}; }

Field field_from_json(const Json& j) {
  Field f = Field::create(j.at("p").get<std::uint32_t>(), j.at("k").get<std::uint32_t>());
  if (j.contains("modulus") && j["modulus"].get<std::vector<std::uint32_t>>() != f.modulus())
    throw ParseError("stored field modulus does not match the canonical one");
  return f;
}

Json elem_to_json(const Field& f, Raw v) { return f.coeffs(v); }

Raw elem_from_json(const Field& f, const Json& j) {
  const auto c = j.get<std::vector<std::uint32_t>>();
  return f.encode(c);
}

Json to_json(const MPoly& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms())
    terms.push_back({{"exps", t.exps}, {"coeff", elem_to_json(p.field(), t.coeff)}});
  Json j{{"nvars", p.nvars()}, {"terms", std::move(terms)}};
  if (p.grading()) {
    Json g = Json::array();
    for (const auto& b : *p.grading()) g.push_back({b.first, b.count, b.degree});
    j["grading"] = std::move(g);
  }
  return j;
}

MPoly poly_from_json(const Field& f, const Json& j) {
  const auto nvars = j.at("nvars").get<std::size_t>();
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) {
    auto exps = t.at("exps").get<Exponents>();
    if (exps.size() != nvars) throw ParseError("term exponent vector has wrong length");
    terms.push_back({std::move(exps), elem_from_json(f, t.at("coeff"))});
  }
  MPoly p = MPoly::from_terms(f, nvars, std::move(terms));
  if (j.contains("grading")) {
    std::vector<Block> blocks;
    for (const auto& b : j["grading"])
      blocks.push_back({b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>(), b.at(2).get<unsigned>()});
    p = p.with_grading(std::move(blocks));
  }
  return p;
}

Json to_json(const PencilCertificates& c) {
  return {{"k_sing", c.k_sing},
          {"p_does_not_divide_m", c.p_does_not_divide_m},
          {"g_smooth", c.g_smooth},
          {"f_single_node", c.f_single_node},
          {"alpha_beta_coprime", c.alpha_beta_coprime},
          {"total_space_smooth", c.total_space_smooth},
          {"fiber_at_infinity_smooth", c.fiber_at_infinity_smooth},
          {"singular_fibers_single_node", c.singular_fibers_single_node},
          {"failure", c.failure}};
}

Json to_json(const Pencil& p) {
  return {{"field", to_json(p.field)}, {"m", p.m},         {"seed", p.seed},
          {"G", to_json(p.G)},         {"F", to_json(p.F)}, {"alpha", to_json(p.alpha)},
          {"beta", to_json(p.beta)},   {"certified", p.certified}, {"certificates", to_json(p.certificates)}};
}

Pencil pencil_from_json(const Json& j) {
  try {
    const Field f = field_from_json(j.at("field"));
    Pencil p = pencil_from_forms(f, j.at("m").get<unsigned>(), poly_from_json(f, j.at("G")),
                                 poly_from_json(f, j.at("F")), poly_from_json(f, j.at("alpha")),
                                 poly_from_json(f, j.at("beta")));
    p.seed = j.at("seed").get<std::uint64_t>();
    p.certified = j.value("certified", false);
    if (j.contains("certificates")) {
      const auto& c = j["certificates"];
      p.certificates.k_sing = c.value("k_sing", 0u);
      p.certificates.p_does_not_divide_m = c.value("p_does_not_divide_m", false);
      p.certificates.g_smooth = c.value("g_smooth", false);
      p.certificates.f_single_node = c.value("f_single_node", false);
      p.certificates.alpha_beta_coprime = c.value("alpha_beta_coprime", false);
      p.certificates.total_space_smooth = c.value("total_space_smooth", false);
      p.certificates.fiber_at_infinity_smooth = c.value("fiber_at_infinity_smooth", false);
      p.certificates.singular_fibers_single_node = c.value("singular_fibers_single_node", false);
      p.certificates.failure = c.value("failure", std::string());
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed pencil: ") + e.what());
  }
}

Json to_json(const LPoly& p) { return p.coeffs(); }

Json to_json(const KClass& c) {
  Json atoms = Json::object();
  for (const auto& [name, poly] : c.atoms()) atoms[name] = to_json(poly);
  return {{"L", to_json(c.base())}, {"atoms", std::move(atoms)}, {"text", c.to_string()}};
}

Json to_json(const Relation& r) { return {{"label", r.label}, {"lhs", to_json(r.lhs)}, {"rhs", to_json(r.rhs)}}; }

Json to_json(const Derivation& d) {
  Json hyps = Json::array(), steps = Json::array();
  for (const auto& h : d.hypotheses) hyps.push_back(to_json(h));
  for (const auto& s : d.steps) {
    Json js{{"op", std::string(to_string(s.op))}, {"scalar", s.scalar}, {"description", s.description}};
    js["hypothesis"] = s.hypothesis ? Json(*s.hypothesis) : Json(nullptr);
    js["result"] = to_json(s.result);
    steps.push_back(std::move(js));
  }
  return {{"m", d.m}, {"hypotheses", std::move(hyps)}, {"steps", std::move(steps)},
          {"conclusion", to_json(d.conclusion)}};
}

Json to_json(const CountResult& r) {
  return {{"label", r.label}, {"q", r.q}, {"k", r.k}, {"count", r.count}, {"evaluations", r.evaluations}};
}

std::string csv_header() { return "label,q,k,count,evaluations,seconds"; }

std::string csv_row(const CountResult& r) {
  std::ostringstream os;
  os << '"' << r.label << "\"," << r.q << ',' << r.k << ',' << r.count << ',' << r.evaluations << ',' << r.seconds;
  return os.str();
}

}  // namespace cutpaste

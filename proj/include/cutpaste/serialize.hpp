#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cutpaste/count.hpp"
#include "cutpaste/kvar.hpp"
#include "cutpaste/pencil.hpp"

namespace cutpaste {

using Json = nlohmann::ordered_json;

// Field: {p, k, modulus}; elements are coefficient lists over F_p, lowest
// degree first; polynomials are {nvars, terms: [{exps, coeff}]}.
Json to_json(const Field& f);
Field field_from_json(const Json& j);

Json elem_to_json(const Field& f, Raw v);
Raw elem_from_json(const Field& f, const Json& j);

Json to_json(const MPoly& p);
MPoly poly_from_json(const Field& f, const Json& j);

Json to_json(const PencilCertificates& c);
Json to_json(const Pencil& p);
// Rebuilds a pencil; the certificate flags are read back as stored.
Pencil pencil_from_json(const Json& j);

Json to_json(const LPoly& p);
Json to_json(const KClass& c);
Json to_json(const Relation& r);
Json to_json(const Derivation& d);

Json to_json(const CountResult& r);
std::string csv_header();
std::string csv_row(const CountResult& r);

}  // namespace cutpaste

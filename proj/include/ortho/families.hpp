#pragma once

// Named classical families: Askey-scheme parameterizations mapped onto the
// seven lattice parameters, plus closed-form oracles (classical weights and
// recurrence coefficients) used by verification code and tests.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ortho/complex.hpp"
#include "ortho/lattice.hpp"

namespace ortho {

enum class FamilyName {
  Wilson,
  ContinuousHahn,
  Hahn,
  ContinuousDualHahn,
  Krawtchouk,
  Meixner,
  Charlier,
};

// Static catalog entry describing a family and its argument list.
struct FamilyInfo {
  FamilyName name;
  std::string id;                      // command-line identifier, e.g. "wilson"
  std::vector<std::string> arg_names;  // canonical argument order
  std::string case_label;              // lattice case the family lives on
  std::string description;
};

const std::vector<FamilyInfo>& family_catalog();

// A resolved family: validated arguments plus the derived lattice parameters.
struct FamilySpec {
  FamilyName name;
  std::string id;
  std::map<std::string, Complex> args;
  FamilyParams params;
};

// Builds a family from its identifier and named arguments. Throws
// ParameterError for an unknown identifier, missing/extra arguments, or
// argument values outside the family's domain (e.g. non-integer N).
FamilySpec make_family(const std::string& id, const std::map<std::string, Complex>& args);
FamilySpec make_family(FamilyName name, const std::map<std::string, Complex>& args);

// Generalized binomial coefficient C(x, k) = (x-k+1)_k / k!.
Complex binomial(const Complex& x, long k);

// Closed-form weight r_k where a classical expression is available
// (Krawtchouk, Meixner, Charlier, Hahn); nullopt otherwise. Used as an
// independent oracle against the hypergeometric evaluation.
std::optional<Complex> classical_weight(const FamilySpec& spec, long k);

// Closed-form recurrence coefficient alpha_n where one is recorded
// (Wilson, continuous Hahn); nullopt otherwise.
std::optional<Complex> alpha_closed_form(const FamilySpec& spec, long n);

}  // namespace ortho

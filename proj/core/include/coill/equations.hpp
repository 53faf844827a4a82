#pragma once

#include <string>
#include <vector>

#include "coill/context.hpp"
#include "coill/typing.hpp"

namespace coill {

struct CanonicalForm {
  Sequent sequent;
  ComputationalContext context;
  /// Names of the equation families that fired, in order of first use.
  std::vector<std::string> provenance;
  /// Printed canonical items; two forms are equal exactly when keys match.
  std::vector<std::string> key;
};

CanonicalForm canonicalize(const Sequent& s);
CanonicalForm canonicalize(const Derivation& d);

struct Comparison {
  bool equal = false;
  CanonicalForm left;
  CanonicalForm right;
};

/// Throws SequentMismatch when the two conclusions have different formulas.
Comparison compare_mod_theory(const Derivation& d1, const Derivation& d2);
bool equal_mod_theory(const Derivation& d1, const Derivation& d2);

struct Law {
  std::string name;
  std::string lhs;  // derivation scripts
  std::string rhs;
};

const std::vector<Law>& builtin_laws();

struct LawResult {
  std::string name;
  bool pass = false;
  std::string lhs;  // printed canonical sequents
  std::string rhs;
  std::string error;
};

std::vector<LawResult> verify_builtin_laws();
std::string laws_to_json(const std::vector<LawResult>& results);

}  // namespace coill

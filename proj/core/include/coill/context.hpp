#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coill/syntax.hpp"

namespace coill {

/// A multiset of terms in parallel composition over one distinguished free
/// variable. Components are kept sorted by the canonical term order and
/// empty lists are dropped.
class ComputationalContext {
 public:
  ComputationalContext(VarName var, std::vector<Term> components);

  /// The context {x: x}.
  static ComputationalContext identity(VarName x);

  const VarName& var() const { return var_; }
  const std::vector<Term>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  friend bool operator==(const ComputationalContext&, const ComputationalContext&) = default;

 private:
  VarName var_;
  std::vector<Term> components_;
};

/// `context x : T1 || T2`.
std::string print_context(const ComputationalContext& c);
ComputationalContext parse_context(std::string_view text);

struct Violation {
  int axiom = 0;
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has_axiom(int axiom) const;
  std::string to_string() const;
};

ValidationReport validate(const VarName& var, std::span<const Term> components);
ValidationReport validate(const ComputationalContext& c);

/// Multiset union. Throws VarMismatch when the variables differ.
ComputationalContext compose(const ComputationalContext& a, const ComputationalContext& b);

bool alpha_equal(const ComputationalContext& a, const ComputationalContext& b);

/// A term together with an opaque label that takes part in ordering and
/// comparison (used to attach formulas to succedent terms).
struct LabeledTerm {
  Term term;
  std::string label;
};

/// Rename every bound covariable to `k0, k1, ...` by first declaration and
/// put the items in a name-independent order. Input and output are in local
/// form. Two item lists are alpha-equivalent exactly when their canonical
/// forms coincide.
std::vector<LabeledTerm> alpha_canonical(std::vector<LabeledTerm> items);
ComputationalContext alpha_canonical(const ComputationalContext& c);

/// Printed canonical items, suitable for equality tests.
std::vector<std::string> alpha_key(std::vector<LabeledTerm> items);

namespace build {

/// R1 || ... || S_y[y := M], where sx = R1 || ... || M.
struct Substitution {
  ComputationalContext sx;
  Term m;
  ComputationalContext sy;
};

/// R1 || ... || mkc(M,'y) || S_y[y := 'y(M)].
struct MakeCoroutine {
  ComputationalContext sx;
  Term m;
  ComputationalContext sy;
  std::optional<CoName> co;  // defaults to y itself
};

/// S_x[x := casel(z)] || S_y[y := caser(z)].
struct Cases {
  ComputationalContext sx;
  ComputationalContext sy;
  VarName z;
};

/// postp('x -> M, y) || R1['x(y)] || ..., where sx = R1 || ... || M.
struct Postpone {
  ComputationalContext sx;
  Term m;
  VarName y;
};

struct Par {
  ComputationalContext sx;
  Term m0;
  Term m1;
};

struct Contraction {
  ComputationalContext sx;
  Term m0;
  Term m1;
};

/// S_x || connect_to(R) with R a component of S_x.
struct Unit {
  ComputationalContext sx;
  Term r;
};

struct Weakening {
  ComputationalContext sx;
  Term r;
};

/// store(P; N; guards; 'z; x) over x, from S_z = P || N.
struct Store {
  ComputationalContext sz;
  VarName x;
  std::vector<CoName> guards;  // generated when empty
};

}  // namespace build

using BuildRequest =
    std::variant<build::Substitution, build::MakeCoroutine, build::Cases, build::Postpone,
                 build::Par, build::Contraction, build::Unit, build::Weakening, build::Store>;

/// Throws ShapeMismatch when a precondition fails.
ComputationalContext build_context(const BuildRequest& request);

}  // namespace coill

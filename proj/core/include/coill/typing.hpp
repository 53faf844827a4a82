#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coill/context.hpp"
#include "coill/syntax.hpp"

namespace coill {

enum class FormulaKind { Atom, Bot, Par, Sub, WhyNot };

class Formula {
 public:
  static Formula atom(std::string name);
  static Formula bot();
  static Formula par(Formula a, Formula b);
  static Formula sub(Formula a, Formula b);
  static Formula why_not(Formula a);

  FormulaKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const Formula& left() const;
  const Formula& right() const;
  const Formula& operand() const { return left(); }
  std::size_t depth() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node {
    FormulaKind kind;
    std::string name;
    std::vector<Formula> args;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// `bot`, `p`, `?p`, `?(sub(p, q))`, `par(p, q)`, `sub(p, q)`.
std::string print_formula(const Formula& f);
Formula parse_formula(std::string_view text);
Formula parse_formula(Lexer& lex);

struct Slot {
  Term term;
  Formula formula;
};

/// x:E |> P1, ..., Pk | M1:F1, ..., Mn:Fn
struct Sequent {
  VarName var;
  Formula antecedent;
  std::vector<Term> control;
  std::vector<Slot> succedent;

  /// control ++ succedent terms, the list ⊥-intro and weakening index into.
  std::vector<Term> flat() const;
  ComputationalContext context() const;
};

std::string print_sequent(const Sequent& s);
Sequent parse_sequent(std::string_view text);

/// Labeled items of a sequent: control terms and formula-labeled slots.
std::vector<LabeledTerm> sequent_items(const Sequent& s);

/// Equality up to exchange and alpha-renaming of covariables.
bool sequent_alpha_equal(const Sequent& a, const Sequent& b);
/// Same antecedent formula and the same multiset of succedent formulas.
bool same_formulas(const Sequent& a, const Sequent& b);

enum class Rule {
  Axiom,
  Cut,
  BotIntro,
  BotElim,
  SubIntro,
  SubElim,
  ParIntro,
  ParElim,
  Dereliction,
  Weakening,
  Contraction,
  Storage,
  SubLeft,
  ParLeft,
};

std::string_view rule_name(Rule r);
std::size_t rule_arity(Rule r);
bool is_multiplicative(Rule r);

/// A rule tree. Scripts produce skeletons (no conclusions); elaborate fills
/// in every conclusion together with the covariables each node introduced.
struct Derivation {
  Rule rule = Rule::Axiom;
  std::vector<Derivation> premises;
  std::optional<VarName> var;
  std::optional<Formula> formula;
  /// Position arguments; nullopt means "use the rule's default".
  std::vector<std::optional<std::size_t>> args;
  std::vector<CoName> fresh;
  std::optional<Sequent> conclusion;

  const Sequent& sequent() const;
};

/// Reads `(define name D)*` followed by one derivation expression.
Derivation parse_script(std::string_view text);
std::string print_script(const Derivation& d);

/// Fresh covariables are `k0, k1, ...`, skipping identifiers used in the
/// skeleton, drawn in post-order.
Derivation elaborate(const Derivation& skeleton);
Derivation elaborate_script(std::string_view text);

struct CheckIssue {
  std::string code;
  std::string path;
  std::string message;
};

struct CheckReport {
  std::vector<CheckIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

CheckReport check(const Derivation& d);

/// Visit every node with its path ("r", "r.0", "r.0.1", ...).
void for_each_node(const Derivation& d,
                   const std::function<void(const Derivation&, const std::string&)>& f);

// Dual translation of non-linear co-intuitionistic formulas.

enum class PlainKind { Atom, Falsum, Or, Sub };

struct PlainFormula {
  PlainKind kind = PlainKind::Atom;
  std::string name;
  std::vector<PlainFormula> args;

  static PlainFormula atom(std::string n) { return {PlainKind::Atom, std::move(n), {}}; }
  static PlainFormula falsum() { return {PlainKind::Falsum, "", {}}; }
  static PlainFormula disj(PlainFormula a, PlainFormula b);
  static PlainFormula sub(PlainFormula a, PlainFormula b);

  friend bool operator==(const PlainFormula&, const PlainFormula&) = default;
};

/// `f | ident | or(C, D) | sub(C, D)`; other heads raise UnsupportedConnective.
PlainFormula parse_plain_formula(std::string_view text);
std::string print_plain_formula(const PlainFormula& f);

/// The reserved atom standing for the image of `f`.
inline constexpr std::string_view kZeroAtom = "zero";

Formula girard_dual(const PlainFormula& f);

struct PlainSequent {
  PlainFormula antecedent;
  std::vector<PlainFormula> succedent;
};

struct DualSequent {
  Formula antecedent;
  std::vector<Formula> succedent;
};

/// `E |- C1, ..., Cn` with plain formulas.
PlainSequent parse_plain_sequent(std::string_view text);
DualSequent girard_dual(const PlainSequent& s);
std::string print_dual_sequent(const DualSequent& s);

}  // namespace coill

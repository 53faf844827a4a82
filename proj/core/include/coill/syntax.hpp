#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coill/error.hpp"

namespace coill {

/// A term variable (x, y, z).
struct VarName {
  std::string name;
  friend auto operator<=>(const VarName&, const VarName&) = default;
};

/// A covariable, i.e. a unary function symbol used for remote binding.
struct CoName {
  std::string name;
  friend auto operator<=>(const CoName&, const CoName&) = default;
};

enum class TermKind : std::uint8_t {
  Var,
  CoApp,
  ConnectTo,
  Par,
  Casel,
  Caser,
  Mkc,
  Nil,
  List1,
  List2,
  Postp1,
  Postp2,
  Store,
};

std::string_view term_kind_name(TermKind kind);

enum class Sort { MTerm, PTerm };

/// Immutable term of the dual linear calculus. Copies share structure.
///
/// Children are kept in one vector so that generic traversals can address
/// any position by index:
///   CoApp [arg], ConnectTo [target], Par [l, r], Casel/Caser [m],
///   Mkc [m], List1 [m], List2 [a, b], Postp1 [m], Postp2 [body, anchor],
///   Store [stored..., guarded..., anchor].
class Term {
 public:
  static Term var(VarName x);
  static Term var(std::string x) { return var(VarName{std::move(x)}); }
  static Term co_app(CoName f, Term arg);
  static Term connect_to(Term target);
  static Term par(Term left, Term right);
  static Term casel(Term m);
  static Term caser(Term m);
  static Term mkc(Term m, CoName y);
  static Term nil();
  static Term list1(Term m);
  static Term list2(Term a, Term b);
  static Term postp(Term m);
  static Term postp(CoName bound, Term body, Term anchor);
  static Term store(std::vector<Term> stored, std::vector<Term> guarded,
                    std::vector<CoName> guards, CoName bound, Term anchor);

  TermKind kind() const;
  Sort sort() const;
  bool is_p_term() const { return sort() == Sort::PTerm; }

  /// Identifier carried by the node: the variable of Var, the head of
  /// CoApp, the covariable of Mkc, the tag of Postp2 and the bound
  /// covariable of Store. Empty for other kinds.
  const std::string& name() const;
  VarName var_name() const { return VarName{name()}; }
  CoName co_name() const { return CoName{name()}; }

  std::span<const Term> children() const;
  const Term& child(std::size_t i) const { return children()[i]; }
  std::size_t arity() const { return children().size(); }

  // Store views.
  std::span<const Term> stored() const;
  std::span<const Term> guarded() const;
  std::span<const CoName> guards() const;
  /// Anchor of Postp2 and Store.
  const Term& anchor() const;
  /// Body of Postp2.
  const Term& body() const;

  /// Same node with the children replaced (same count and layout).
  Term with_children(std::vector<Term> children) const;
  /// Store with new item lists, keeping bound name and anchor.
  Term with_store_items(std::vector<Term> stored, std::vector<Term> guarded,
                        std::vector<CoName> guards) const;
  /// Same node with a different identifier.
  Term with_name(std::string name) const;
  /// Store with different guard names.
  Term with_guards(std::vector<CoName> guards) const;

  std::size_t hash() const;
  std::size_t size() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term make(TermKind kind, std::string name, std::vector<Term> children,
                   std::vector<CoName> guards = {}, std::size_t n_stored = 0);

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

using TermMap = std::unordered_map<Term, Term, TermHash>;

std::set<VarName> free_vars(const Term& t);
bool occurs_free(const Term& t, const VarName& x);

/// Every covariable mentioned anywhere in t (heads, tags, guards).
std::set<std::string> co_names(const Term& t);

/// t[x := m]. Throws SubstituteWithPTerm when m is a p-term.
Term substitute(const Term& t, const VarName& x, const Term& m);

/// Replace every subterm equal to a key of `map`, outermost first. The
/// replacement is not revisited.
Term replace_subterms(const Term& t, const TermMap& map);

/// Rebuild t bottom-up, applying f to every rebuilt node.
Term map_bottom_up(const Term& t, const std::function<Term(const Term&)>& f);

/// Description of a misplaced node, or nullopt when t is well-formed.
std::optional<std::string> ill_formed(const Term& t);
bool is_well_formed(const Term& t);

/// Make locally bound variables explicit: inside postp('y -> N, M) every
/// y in N becomes 'y(M), and inside a store bound to 'z with anchor A every
/// z in the stored items becomes 'z(A).
Term to_remote(const Term& t);
/// Inverse of to_remote.
Term to_local(const Term& t);

/// Subterm at a child-index path.
const Term& subterm_at(const Term& t, std::span<const std::size_t> path);
Term replace_at(const Term& t, std::span<const std::size_t> path, Term with);

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

bool is_keyword(std::string_view word);

Term parse_term(std::string_view text);
std::string print_term(const Term& t);

/// Printing with every covariable replaced by `_`; used as a
/// name-insensitive ordering key.
std::string print_erased(const Term& t);

/// Small lexer shared by the term, context, formula and script readers.
class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_space();
  bool at_end();
  std::size_t offset() const { return pos_; }
  char peek();
  bool accept(std::string_view token);
  void expect(std::string_view token);
  std::optional<std::string> accept_ident();
  std::string expect_ident();
  [[noreturn]] void fail(std::vector<std::string> expected) const;
  std::string_view rest() const { return text_.substr(pos_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Term parse_term(Lexer& lex);

}  // namespace coill

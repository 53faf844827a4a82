#include "coill/typing.hpp"

#include <algorithm>
#include <map>

namespace coill {

// ---------------------------------------------------------------------------
// Formulas

Formula Formula::atom(std::string name) {
  if (name.empty()) throw Error(ErrorCode::IllFormed, "empty atom");
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Atom, std::move(name), {}}));
}
Formula Formula::bot() {
  static const Formula kBot(std::make_shared<const Node>(Node{FormulaKind::Bot, "", {}}));
  return kBot;
}
Formula Formula::par(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Par, "", {a, b}}));
}
Formula Formula::sub(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Sub, "", {a, b}}));
}
Formula Formula::why_not(Formula a) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::WhyNot, "", {a}}));
}

const Formula& Formula::left() const {
  if (node_->args.empty()) throw Error(ErrorCode::IllFormed, "formula has no operand");
  return node_->args[0];
}
const Formula& Formula::right() const {
  if (node_->args.size() < 2) throw Error(ErrorCode::IllFormed, "formula has no right operand");
  return node_->args[1];
}

std::size_t Formula::depth() const {
  std::size_t d = 0;
  for (const Formula& a : node_->args) d = std::max(d, a.depth());
  return d + (node_->args.empty() ? 0 : 1);
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->kind == b.node_->kind && a.node_->name == b.node_->name &&
         a.node_->args == b.node_->args;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (auto c = a.node_->kind <=> b.node_->kind; c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  return std::lexicographical_compare_three_way(a.node_->args.begin(), a.node_->args.end(),
                                                b.node_->args.begin(), b.node_->args.end());
}

std::string print_formula(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom: return f.name();
    case FormulaKind::Bot: return "bot";
    case FormulaKind::Par:
      return "par(" + print_formula(f.left()) + ", " + print_formula(f.right()) + ")";
    case FormulaKind::Sub:
      return "sub(" + print_formula(f.left()) + ", " + print_formula(f.right()) + ")";
    case FormulaKind::WhyNot: {
      const Formula& a = f.operand();
      if (a.kind() == FormulaKind::Atom || a.kind() == FormulaKind::Bot) {
        return "?" + print_formula(a);
      }
      return "?(" + print_formula(a) + ")";
    }
  }
  return "";
}

Formula parse_formula(Lexer& lex) {
  if (lex.accept("?")) {
    if (lex.accept("(")) {
      Formula inner = parse_formula(lex);
      lex.expect(")");
      return Formula::why_not(inner);
    }
    return Formula::why_not(parse_formula(lex));
  }
  auto id = lex.accept_ident();
  if (!id) lex.fail({"atom", "bot", "'?'", "par", "sub"});
  if (*id == "bot") return Formula::bot();
  if (*id == "par" || *id == "sub") {
    lex.expect("(");
    Formula a = parse_formula(lex);
    lex.expect(",");
    Formula b = parse_formula(lex);
    lex.expect(")");
    return *id == "par" ? Formula::par(a, b) : Formula::sub(a, b);
  }
  return Formula::atom(*id);
}

Formula parse_formula(std::string_view text) {
  Lexer lex(text);
  Formula f = parse_formula(lex);
  if (!lex.at_end()) lex.fail({"end of input"});
  return f;
}

// ---------------------------------------------------------------------------
// Sequents

std::vector<Term> Sequent::flat() const {
  std::vector<Term> out = control;
  for (const Slot& s : succedent) out.push_back(s.term);
  return out;
}

ComputationalContext Sequent::context() const { return ComputationalContext(var, flat()); }

std::string print_sequent(const Sequent& s) {
  std::string out = s.var.name + ":" + print_formula(s.antecedent) + " |>";
  for (std::size_t i = 0; i < s.control.size(); ++i) {
    out += i ? ", " : " ";
    out += print_term(s.control[i]);
  }
  out += " |";
  for (std::size_t i = 0; i < s.succedent.size(); ++i) {
    out += i ? ", " : " ";
    out += print_term(s.succedent[i].term) + ":" + print_formula(s.succedent[i].formula);
  }
  return out;
}

Sequent parse_sequent(std::string_view text) {
  Lexer lex(text);
  std::string var = lex.expect_ident();
  lex.expect(":");
  Formula ante = parse_formula(lex);
  lex.expect("|>");
  Sequent s{VarName{var}, ante, {}, {}};
  if (lex.peek() != '|') {
    do {
      s.control.push_back(parse_term(lex));
    } while (lex.accept(","));
  }
  lex.expect("|");
  if (!lex.at_end()) {
    do {
      Term t = parse_term(lex);
      lex.expect(":");
      s.succedent.push_back({t, parse_formula(lex)});
    } while (lex.accept(","));
  }
  if (!lex.at_end()) lex.fail({"','", "end of input"});
  return s;
}

std::vector<LabeledTerm> sequent_items(const Sequent& s) {
  std::vector<LabeledTerm> items;
  for (const Term& t : s.control) items.push_back({t, "|"});
  for (const Slot& slot : s.succedent) items.push_back({slot.term, ":" + print_formula(slot.formula)});
  return items;
}

bool same_formulas(const Sequent& a, const Sequent& b) {
  if (!(a.antecedent == b.antecedent) || a.succedent.size() != b.succedent.size()) return false;
  std::vector<Formula> fa;
  std::vector<Formula> fb;
  for (const Slot& s : a.succedent) fa.push_back(s.formula);
  for (const Slot& s : b.succedent) fb.push_back(s.formula);
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  return fa == fb;
}

bool sequent_alpha_equal(const Sequent& a, const Sequent& b) {
  if (a.var != b.var || !same_formulas(a, b) || a.control.size() != b.control.size()) {
    return false;
  }
  return alpha_key(sequent_items(a)) == alpha_key(sequent_items(b));
}

// ---------------------------------------------------------------------------
// Rules

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Axiom: return "axiom";
    case Rule::Cut: return "cut";
    case Rule::BotIntro: return "bot-intro";
    case Rule::BotElim: return "bot-elim";
    case Rule::SubIntro: return "sub-intro";
    case Rule::SubElim: return "sub-elim";
    case Rule::ParIntro: return "par-intro";
    case Rule::ParElim: return "par-elim";
    case Rule::Dereliction: return "der";
    case Rule::Weakening: return "weak";
    case Rule::Contraction: return "contr";
    case Rule::Storage: return "store";
    case Rule::SubLeft: return "sub-left";
    case Rule::ParLeft: return "par-left";
  }
  return "?";
}

std::size_t rule_arity(Rule r) {
  switch (r) {
    case Rule::Axiom:
    case Rule::BotElim:
      return 0;
    case Rule::BotIntro:
    case Rule::ParIntro:
    case Rule::Dereliction:
    case Rule::Weakening:
    case Rule::Contraction:
    case Rule::SubLeft:
      return 1;
    case Rule::Cut:
    case Rule::SubIntro:
    case Rule::SubElim:
    case Rule::Storage:
    case Rule::ParLeft:
      return 2;
    case Rule::ParElim:
      return 3;
  }
  return 0;
}

bool is_multiplicative(Rule r) {
  switch (r) {
    case Rule::Axiom:
    case Rule::Cut:
    case Rule::SubIntro:
    case Rule::SubElim:
    case Rule::ParIntro:
    case Rule::ParElim:
    case Rule::SubLeft:
    case Rule::ParLeft:
      return true;
    default:
      return false;
  }
}

const Sequent& Derivation::sequent() const {
  if (!conclusion) throw Error(ErrorCode::RuleMismatch, "derivation is not elaborated");
  return *conclusion;
}

void for_each_node(const Derivation& d,
                   const std::function<void(const Derivation&, const std::string&)>& f) {
  std::function<void(const Derivation&, const std::string&)> go =
      [&](const Derivation& n, const std::string& path) {
        f(n, path);
        for (std::size_t i = 0; i < n.premises.size(); ++i) {
          go(n.premises[i], path + "." + std::to_string(i));
        }
      };
  go(d, "r");
}

// ---------------------------------------------------------------------------
// Scripts

namespace {

const std::map<std::string, Rule, std::less<>>& rule_table() {
  static const std::map<std::string, Rule, std::less<>> table = {
      {"axiom", Rule::Axiom},         {"cut", Rule::Cut},
      {"bot-intro", Rule::BotIntro},  {"bot-elim", Rule::BotElim},
      {"sub-intro", Rule::SubIntro},  {"sub-elim", Rule::SubElim},
      {"par-intro", Rule::ParIntro},  {"par-elim", Rule::ParElim},
      {"der", Rule::Dereliction},     {"weak", Rule::Weakening},
      {"contr", Rule::Contraction},   {"store", Rule::Storage},
      {"sub-left", Rule::SubLeft},    {"par-left", Rule::ParLeft},
  };
  return table;
}

class ScriptParser {
 public:
  explicit ScriptParser(std::string_view text) : lex_(text) {}

  Derivation parse() {
    while (true) {
      std::string_view rest = lex_.rest();
      std::size_t skip = 0;
      while (skip < rest.size() && (std::isspace(static_cast<unsigned char>(rest[skip])))) ++skip;
      if (lex_.peek() == '(' && starts_define()) {
        lex_.expect("(");
        lex_.expect("define");
        std::string name = lex_.expect_ident();
        Derivation d = derivation();
        lex_.expect(")");
        defines_[name] = std::move(d);
        continue;
      }
      break;
    }
    Derivation d = derivation();
    if (!lex_.at_end()) lex_.fail({"end of input"});
    return d;
  }

 private:
  bool starts_define() {
    Lexer probe = lex_;
    probe.expect("(");
    return probe.accept("define");
  }

  std::string rule_word() {
    lex_.skip_space();
    std::string word;
    std::string_view rest = lex_.rest();
    std::size_t n = 0;
    while (n < rest.size() && (std::isalnum(static_cast<unsigned char>(rest[n])) ||
                               rest[n] == '-' || rest[n] == '_')) {
      ++n;
    }
    word = std::string(rest.substr(0, n));
    if (!rule_table().contains(word)) {
      std::vector<std::string> expected;
      for (const auto& [k, v] : rule_table()) expected.push_back(k);
      lex_.fail(expected);
    }
    lex_.expect(word);
    return word;
  }

  std::optional<std::size_t> maybe_index() {
    lex_.skip_space();
    std::string_view rest = lex_.rest();
    std::size_t n = 0;
    while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) ++n;
    if (n == 0) return std::nullopt;
    std::size_t v = std::stoul(std::string(rest.substr(0, n)));
    lex_.expect(rest.substr(0, n));
    return v;
  }

  std::size_t index() {
    auto v = maybe_index();
    if (!v) lex_.fail({"index"});
    return *v;
  }

  VarName variable() {
    std::string v = lex_.expect_ident();
    if (is_keyword(v)) lex_.fail({"variable name"});
    return VarName{v};
  }

  Derivation derivation() {
    if (lex_.peek() != '(') {
      auto id = lex_.accept_ident();
      if (!id) lex_.fail({"'('", "defined name"});
      auto it = defines_.find(*id);
      if (it == defines_.end()) throw Error(ErrorCode::RuleMismatch, "undefined derivation " + *id);
      return it->second;
    }
    lex_.expect("(");
    Derivation d;
    d.rule = rule_table().find(rule_word())->second;
    switch (d.rule) {
      case Rule::Axiom:
        d.var = variable();
        d.formula = parse_formula(lex_);
        break;
      case Rule::BotElim:
        d.var = variable();
        break;
      case Rule::Cut:
      case Rule::SubIntro:
        d.premises = {derivation(), derivation()};
        d.args = {maybe_index()};
        break;
      case Rule::SubElim:
        d.premises = {derivation(), derivation()};
        d.args = {maybe_index()};
        d.args.push_back(d.args[0] ? std::optional<std::size_t>(index()) : std::nullopt);
        break;
      case Rule::BotIntro:
      case Rule::Dereliction:
        d.premises = {derivation()};
        d.args = {index()};
        break;
      case Rule::ParIntro:
      case Rule::Contraction:
        d.premises = {derivation()};
        d.args = {index(), index()};
        break;
      case Rule::ParElim:
        d.premises = {derivation(), derivation(), derivation()};
        d.args = {maybe_index()};
        break;
      case Rule::Weakening:
        d.premises = {derivation()};
        d.formula = parse_formula(lex_);
        d.args = {index()};
        break;
      case Rule::Storage:
        d.premises = {derivation(), derivation()};
        d.args = {index()};
        break;
      case Rule::SubLeft:
        d.var = variable();
        d.premises = {derivation()};
        d.args = {maybe_index()};
        break;
      case Rule::ParLeft:
        d.var = variable();
        d.premises = {derivation(), derivation()};
        break;
    }
    lex_.expect(")");
    return d;
  }

  Lexer lex_;
  std::map<std::string, Derivation> defines_;
};

}  // namespace

Derivation parse_script(std::string_view text) { return ScriptParser(text).parse(); }

std::string print_script(const Derivation& d) {
  std::string out = "(" + std::string(rule_name(d.rule));
  if (d.var) out += " " + d.var->name;
  if (d.formula && d.rule == Rule::Axiom) out += " " + print_formula(*d.formula);
  for (const Derivation& p : d.premises) out += " " + print_script(p);
  if (d.formula && d.rule == Rule::Weakening) out += " " + print_formula(*d.formula);
  for (const auto& a : d.args) {
    if (a) out += " " + std::to_string(*a);
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// Elaboration

namespace {

class NameSource {
 public:
  virtual ~NameSource() = default;
  virtual CoName take() = 0;
};

class FreshNames : public NameSource {
 public:
  explicit FreshNames(std::set<std::string> used) : used_(std::move(used)) {}
  CoName take() override {
    std::string name;
    do {
      name = "k" + std::to_string(next_++);
    } while (used_.contains(name));
    taken_.push_back(CoName{name});
    return taken_.back();
  }
  std::vector<CoName> drain() { return std::exchange(taken_, {}); }

 private:
  std::set<std::string> used_;
  std::size_t next_ = 0;
  std::vector<CoName> taken_;
};

class RecordedNames : public NameSource {
 public:
  explicit RecordedNames(const std::vector<CoName>& names) : names_(names) {}
  CoName take() override {
    if (pos_ >= names_.size()) throw Error(ErrorCode::RuleMismatch, "node records too few names");
    return names_[pos_++];
  }

 private:
  const std::vector<CoName>& names_;
  std::size_t pos_ = 0;
};

void collect_identifiers(const Derivation& d, std::set<std::string>& out) {
  if (d.var) out.insert(d.var->name);
  for (const Derivation& p : d.premises) collect_identifiers(p, out);
  if (d.conclusion) {
    out.insert(d.conclusion->var.name);
    for (const Term& t : d.conclusion->flat()) {
      auto names = co_names(t);
      out.insert(names.begin(), names.end());
    }
  }
}

[[noreturn]] void mismatch(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

std::size_t resolve(const std::optional<std::size_t>& arg, std::size_t fallback, std::size_t size,
                    const char* what) {
  std::size_t i = arg.value_or(fallback);
  if (i >= size) {
    mismatch(ErrorCode::IndexOutOfRange, std::string(what) + " index " + std::to_string(i) +
                                             " out of range (size " + std::to_string(size) + ")");
  }
  return i;
}

std::optional<std::size_t> opt_arg(const Derivation& d, std::size_t k) {
  return k < d.args.size() ? d.args[k] : std::nullopt;
}

std::size_t last_or_zero(std::size_t n) { return n == 0 ? 0 : n - 1; }

void require_formula(const Formula& got, const Formula& want, const std::string& what) {
  if (!(got == want)) {
    mismatch(ErrorCode::FormulaMismatch,
             what + ": expected " + print_formula(want) + ", found " + print_formula(got));
  }
}

std::vector<Term> subst_all(const std::vector<Term>& ts, const VarName& x, const Term& m) {
  std::vector<Term> out;
  for (const Term& t : ts) out.push_back(substitute(t, x, m));
  return out;
}

std::vector<Slot> subst_slots(const std::vector<Slot>& ss, const VarName& x, const Term& m) {
  std::vector<Slot> out;
  for (const Slot& s : ss) out.push_back({substitute(s.term, x, m), s.formula});
  return out;
}

template <typename T>
void append(std::vector<T>& to, const std::vector<T>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

std::vector<Slot> erase_at(std::vector<Slot> slots, std::size_t i) {
  slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(i));
  return slots;
}

struct LeftPremise {
  VarName var;
  Formula antecedent;
};

// Shared tail of sub-elim and sub-left: the second premise's j-th slot is
// abstracted into a postpone anchored at `anchor`.
void sub_elim_tail(Sequent& out, const Sequent& d2, std::size_t j, const Term& anchor,
                   NameSource& names) {
  CoName k = names.take();
  Term remote = Term::co_app(k, anchor);
  append(out.control, subst_all(d2.control, d2.var, remote));
  Term body = substitute(d2.succedent[j].term, d2.var, Term::var(k.name));
  out.control.push_back(Term::postp(k, body, anchor));
  append(out.succedent, subst_slots(erase_at(d2.succedent, j), d2.var, remote));
}

void par_elim_tail(Sequent& out, const Sequent& d0, const Sequent& d1, const Term& on) {
  Term l = Term::casel(on);
  Term r = Term::caser(on);
  append(out.control, subst_all(d0.control, d0.var, l));
  append(out.control, subst_all(d1.control, d1.var, r));
  append(out.succedent, subst_slots(d0.succedent, d0.var, l));
  append(out.succedent, subst_slots(d1.succedent, d1.var, r));
}

Sequent apply_rule(Derivation& d, const std::vector<const Sequent*>& p, NameSource& names) {
  if (p.size() != rule_arity(d.rule)) {
    mismatch(ErrorCode::RuleMismatch, std::string(rule_name(d.rule)) + " expects " +
                                          std::to_string(rule_arity(d.rule)) + " premises, got " +
                                          std::to_string(p.size()));
  }
  auto need_var = [&]() -> const VarName& {
    if (!d.var) mismatch(ErrorCode::RuleMismatch, std::string(rule_name(d.rule)) + " needs a variable");
    return *d.var;
  };
  auto need_formula = [&]() -> const Formula& {
    if (!d.formula) mismatch(ErrorCode::RuleMismatch, std::string(rule_name(d.rule)) + " needs a formula");
    return *d.formula;
  };

  switch (d.rule) {
    case Rule::Axiom: {
      const VarName& x = need_var();
      return Sequent{x, need_formula(), {}, {{Term::var(x), need_formula()}}};
    }
    case Rule::BotElim: {
      const VarName& x = need_var();
      return Sequent{x, Formula::bot(), {Term::postp(Term::var(x))}, {}};
    }
    case Rule::Cut: {
      const Sequent& a = *p[0];
      const Sequent& b = *p[1];
      std::size_t i = resolve(opt_arg(d, 0), last_or_zero(a.succedent.size()), a.succedent.size(), "cut");
      d.args = {i};
      require_formula(b.antecedent, a.succedent[i].formula, "cut premise antecedent");
      const Term& m = a.succedent[i].term;
      Sequent out{a.var, a.antecedent, a.control, erase_at(a.succedent, i)};
      append(out.control, subst_all(b.control, b.var, m));
      append(out.succedent, subst_slots(b.succedent, b.var, m));
      return out;
    }
    case Rule::BotIntro: {
      Sequent out = *p[0];
      std::vector<Term> flat = out.flat();
      std::size_t k = resolve(opt_arg(d, 0), 0, flat.size(), "bot-intro target");
      out.succedent.push_back({Term::connect_to(flat[k]), Formula::bot()});
      return out;
    }
    case Rule::Weakening: {
      Sequent out = *p[0];
      std::vector<Term> flat = out.flat();
      std::size_t k = resolve(opt_arg(d, 0), 0, flat.size(), "weakening target");
      out.succedent.push_back({Term::connect_to(flat[k]), Formula::why_not(need_formula())});
      return out;
    }
    case Rule::SubIntro: {
      const Sequent& a = *p[0];
      const Sequent& b = *p[1];
      std::size_t i =
          resolve(opt_arg(d, 0), last_or_zero(a.succedent.size()), a.succedent.size(), "sub-intro");
      d.args = {i};
      CoName k = names.take();
      const Slot& slot = a.succedent[i];
      Term remote = Term::co_app(k, slot.term);
      Sequent out = a;
      out.succedent[i] = {Term::mkc(slot.term, k), Formula::sub(slot.formula, b.antecedent)};
      append(out.control, subst_all(b.control, b.var, remote));
      append(out.succedent, subst_slots(b.succedent, b.var, remote));
      return out;
    }
    case Rule::SubElim: {
      const Sequent& a = *p[0];
      const Sequent& b = *p[1];
      std::size_t i =
          resolve(opt_arg(d, 0), last_or_zero(a.succedent.size()), a.succedent.size(), "sub-elim");
      std::size_t j = resolve(opt_arg(d, 1), 0, b.succedent.size(), "sub-elim right");
      d.args = {i, j};
      const Slot& slot = a.succedent[i];
      if (slot.formula.kind() != FormulaKind::Sub) {
        mismatch(ErrorCode::FormulaMismatch,
                 "sub-elim: slot " + std::to_string(i) + " has formula " +
                     print_formula(slot.formula) + ", not a subtraction");
      }
      require_formula(b.antecedent, slot.formula.left(), "sub-elim right antecedent");
      require_formula(b.succedent[j].formula, slot.formula.right(), "sub-elim right slot");
      Sequent out{a.var, a.antecedent, a.control, erase_at(a.succedent, i)};
      sub_elim_tail(out, b, j, slot.term, names);
      return out;
    }
    case Rule::SubLeft: {
      const VarName& z = need_var();
      const Sequent& b = *p[0];
      std::size_t j = resolve(opt_arg(d, 0), 0, b.succedent.size(), "sub-left");
      d.args = {j};
      Sequent out{z, Formula::sub(b.antecedent, b.succedent[j].formula), {}, {}};
      sub_elim_tail(out, b, j, Term::var(z), names);
      return out;
    }
    case Rule::ParIntro: {
      Sequent out = *p[0];
      std::size_t i = resolve(opt_arg(d, 0), 0, out.succedent.size(), "par-intro");
      std::size_t j = resolve(opt_arg(d, 1), 0, out.succedent.size(), "par-intro");
      if (i == j) mismatch(ErrorCode::IndexOutOfRange, "par-intro needs two distinct slots");
      Slot joined{Term::par(out.succedent[i].term, out.succedent[j].term),
                  Formula::par(out.succedent[i].formula, out.succedent[j].formula)};
      out.succedent[std::min(i, j)] = joined;
      out.succedent = erase_at(out.succedent, std::max(i, j));
      return out;
    }
    case Rule::ParElim: {
      const Sequent& a = *p[0];
      std::size_t k =
          resolve(opt_arg(d, 0), last_or_zero(a.succedent.size()), a.succedent.size(), "par-elim");
      d.args = {k};
      const Slot& slot = a.succedent[k];
      if (slot.formula.kind() != FormulaKind::Par) {
        mismatch(ErrorCode::FormulaMismatch, "par-elim: slot " + std::to_string(k) + " has formula " +
                                                 print_formula(slot.formula) + ", not a par");
      }
      require_formula(p[1]->antecedent, slot.formula.left(), "par-elim left premise");
      require_formula(p[2]->antecedent, slot.formula.right(), "par-elim right premise");
      Sequent out{a.var, a.antecedent, a.control, erase_at(a.succedent, k)};
      par_elim_tail(out, *p[1], *p[2], slot.term);
      return out;
    }
    case Rule::ParLeft: {
      const VarName& z = need_var();
      Sequent out{z, Formula::par(p[0]->antecedent, p[1]->antecedent), {}, {}};
      par_elim_tail(out, *p[0], *p[1], Term::var(z));
      return out;
    }
    case Rule::Dereliction: {
      Sequent out = *p[0];
      std::size_t i = resolve(opt_arg(d, 0), 0, out.succedent.size(), "der");
      Slot& s = out.succedent[i];
      s = {Term::list1(s.term), Formula::why_not(s.formula)};
      return out;
    }
    case Rule::Contraction: {
      Sequent out = *p[0];
      std::size_t i = resolve(opt_arg(d, 0), 0, out.succedent.size(), "contr");
      std::size_t j = resolve(opt_arg(d, 1), 0, out.succedent.size(), "contr");
      if (i == j) mismatch(ErrorCode::IndexOutOfRange, "contr needs two distinct slots");
      const Formula& f = out.succedent[i].formula;
      if (f.kind() != FormulaKind::WhyNot) {
        mismatch(ErrorCode::FormulaMismatch, "contr: " + print_formula(f) + " is not a ?-formula");
      }
      require_formula(out.succedent[j].formula, f, "contr second slot");
      Slot joined{Term::list2(out.succedent[i].term, out.succedent[j].term), f};
      out.succedent[std::min(i, j)] = joined;
      out.succedent = erase_at(out.succedent, std::max(i, j));
      return out;
    }
    case Rule::Storage: {
      const Sequent& a = *p[0];
      const Sequent& b = *p[1];
      std::size_t k = resolve(opt_arg(d, 0), 0, a.succedent.size(), "store");
      const Slot& slot = a.succedent[k];
      if (slot.formula.kind() != FormulaKind::WhyNot) {
        mismatch(ErrorCode::FormulaMismatch,
                 "store: slot " + std::to_string(k) + " has formula " + print_formula(slot.formula));
      }
      require_formula(b.antecedent, slot.formula.operand(), "store box antecedent");
      for (const Slot& s : b.succedent) {
        if (s.formula.kind() != FormulaKind::WhyNot) {
          mismatch(ErrorCode::StorageShape,
                   "store: box conclusion " + print_formula(s.formula) + " is not a ?-formula");
        }
      }
      CoName bound = names.take();
      Term local = Term::var(bound.name);
      std::vector<CoName> guards;
      std::vector<Term> guarded;
      for (const Slot& s : b.succedent) {
        guards.push_back(names.take());
        guarded.push_back(substitute(s.term, b.var, local));
      }
      Term box = Term::store(subst_all(b.control, b.var, local), guarded, guards, bound, slot.term);
      Sequent out{a.var, a.antecedent, a.control, {}};
      out.control.push_back(box);
      Term occ = Term::co_app(bound, slot.term);
      for (std::size_t i = 0; i < a.succedent.size(); ++i) {
        if (i != k) {
          out.succedent.push_back(a.succedent[i]);
          continue;
        }
        for (std::size_t g = 0; g < guards.size(); ++g) {
          out.succedent.push_back({Term::co_app(guards[g], occ), b.succedent[g].formula});
        }
      }
      return out;
    }
  }
  mismatch(ErrorCode::RuleMismatch, "unknown rule");
}

void elaborate_rec(Derivation& d, FreshNames& names) {
  for (Derivation& p : d.premises) elaborate_rec(p, names);
  std::vector<const Sequent*> prem;
  for (const Derivation& p : d.premises) prem.push_back(&p.sequent());
  names.drain();
  d.conclusion = apply_rule(d, prem, names);
  d.fresh = names.drain();
}

}  // namespace

Derivation elaborate(const Derivation& skeleton) {
  Derivation d = skeleton;
  std::set<std::string> used;
  collect_identifiers(d, used);
  FreshNames names(std::move(used));
  elaborate_rec(d, names);
  return d;
}

Derivation elaborate_script(std::string_view text) { return elaborate(parse_script(text)); }

std::string CheckReport::to_string() const {
  if (ok()) return "ok";
  std::string out;
  for (const CheckIssue& i : issues) {
    if (!out.empty()) out += '\n';
    out += i.code + " at " + i.path + ": " + i.message;
  }
  return out;
}

namespace {

void check_rec(const Derivation& d, const std::string& path, CheckReport& report) {
  bool premises_ok = true;
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    check_rec(d.premises[i], path + "." + std::to_string(i), report);
    premises_ok = premises_ok && d.premises[i].conclusion.has_value();
  }
  if (!d.conclusion) {
    report.issues.push_back({"Unelaborated", path, "node has no conclusion"});
    return;
  }
  auto ctx_report = validate(d.conclusion->var, d.conclusion->flat());
  for (const Violation& v : ctx_report.violations) {
    report.issues.push_back({"InvalidContext", path,
                             "axiom " + std::to_string(v.axiom) + " at " + v.path + ": " + v.message});
  }
  if (!premises_ok) return;
  Derivation copy = d;
  std::vector<const Sequent*> prem;
  for (const Derivation& p : d.premises) prem.push_back(&p.sequent());
  try {
    RecordedNames names(d.fresh);
    Sequent expected = apply_rule(copy, prem, names);
    if (!same_formulas(expected, *d.conclusion) || expected.var != d.conclusion->var) {
      report.issues.push_back({"FormulaMismatch", path,
                               "expected " + print_sequent(expected) + ", stored " +
                                   print_sequent(*d.conclusion)});
    } else if (!sequent_alpha_equal(expected, *d.conclusion)) {
      report.issues.push_back({"ConclusionMismatch", path,
                               "expected " + print_sequent(expected) + ", stored " +
                                   print_sequent(*d.conclusion)});
    }
  } catch (const Error& e) {
    report.issues.push_back({std::string(error_code_name(e.code())), path, e.what()});
  }
}

}  // namespace

CheckReport check(const Derivation& d) {
  CheckReport report;
  check_rec(d, "r", report);
  return report;
}

// ---------------------------------------------------------------------------
// Dual translation

PlainFormula PlainFormula::disj(PlainFormula a, PlainFormula b) {
  return {PlainKind::Or, "", {std::move(a), std::move(b)}};
}
PlainFormula PlainFormula::sub(PlainFormula a, PlainFormula b) {
  return {PlainKind::Sub, "", {std::move(a), std::move(b)}};
}

namespace {

PlainFormula parse_plain(Lexer& lex) {
  std::size_t at = lex.offset();
  auto id = lex.accept_ident();
  if (!id) {
    if (!lex.at_end() && lex.peek() != ')' && lex.peek() != ',') {
      throw Error(ErrorCode::UnsupportedConnective,
                  "unsupported connective '" + std::string(1, lex.peek()) + "' at byte " +
                      std::to_string(lex.offset()));
    }
    lex.fail({"atom", "f", "or", "sub"});
  }
  if (*id == "f") return PlainFormula::falsum();
  if (lex.peek() == '(') {
    if (*id != "or" && *id != "sub") {
      throw Error(ErrorCode::UnsupportedConnective,
                  "unsupported connective '" + *id + "' at byte " + std::to_string(at));
    }
    lex.expect("(");
    PlainFormula a = parse_plain(lex);
    lex.expect(",");
    PlainFormula b = parse_plain(lex);
    lex.expect(")");
    return *id == "or" ? PlainFormula::disj(a, b) : PlainFormula::sub(a, b);
  }
  if (*id == std::string(kZeroAtom) || *id == "bot") {
    throw Error(ErrorCode::UnsupportedConnective, "reserved name '" + *id + "' is not an atom");
  }
  return PlainFormula::atom(*id);
}

}  // namespace

PlainFormula parse_plain_formula(std::string_view text) {
  Lexer lex(text);
  PlainFormula f = parse_plain(lex);
  if (!lex.at_end()) lex.fail({"end of input"});
  return f;
}

PlainSequent parse_plain_sequent(std::string_view text) {
  Lexer lex(text);
  PlainSequent s{parse_plain(lex), {}};
  lex.expect("|-");
  if (!lex.at_end()) {
    s.succedent.push_back(parse_plain(lex));
    while (lex.accept(",")) s.succedent.push_back(parse_plain(lex));
  }
  if (!lex.at_end()) lex.fail({"',' or end of input"});
  return s;
}

std::string print_plain_formula(const PlainFormula& f) {
  switch (f.kind) {
    case PlainKind::Atom: return f.name;
    case PlainKind::Falsum: return "f";
    case PlainKind::Or:
      return "or(" + print_plain_formula(f.args[0]) + ", " + print_plain_formula(f.args[1]) + ")";
    case PlainKind::Sub:
      return "sub(" + print_plain_formula(f.args[0]) + ", " + print_plain_formula(f.args[1]) + ")";
  }
  return "";
}

Formula girard_dual(const PlainFormula& f) {
  switch (f.kind) {
    case PlainKind::Atom: return Formula::atom(f.name);
    case PlainKind::Falsum: return Formula::atom(std::string(kZeroAtom));
    case PlainKind::Or:
      return Formula::par(Formula::why_not(girard_dual(f.args[0])),
                          Formula::why_not(girard_dual(f.args[1])));
    case PlainKind::Sub:
      return Formula::sub(girard_dual(f.args[0]), Formula::why_not(girard_dual(f.args[1])));
  }
  throw Error(ErrorCode::UnsupportedConnective, "unknown formula");
}

DualSequent girard_dual(const PlainSequent& s) {
  DualSequent out{Formula::why_not(girard_dual(s.antecedent)), {}};
  for (const PlainFormula& c : s.succedent) out.succedent.push_back(Formula::why_not(girard_dual(c)));
  return out;
}

std::string print_dual_sequent(const DualSequent& s) {
  std::string out = print_formula(s.antecedent) + " |-";
  for (std::size_t i = 0; i < s.succedent.size(); ++i) {
    out += i ? ", " : " ";
    out += print_formula(s.succedent[i]);
  }
  return out;
}

}  // namespace coill

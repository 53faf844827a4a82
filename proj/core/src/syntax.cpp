#include "coill/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace coill {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SubstituteWithPTerm: return "SubstituteWithPTerm";
    case ErrorCode::IllFormed: return "IllFormed";
    case ErrorCode::VarMismatch: return "VarMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RuleMismatch: return "RuleMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::FormulaMismatch: return "FormulaMismatch";
    case ErrorCode::StorageShape: return "StorageShape";
    case ErrorCode::UnsupportedConnective: return "UnsupportedConnective";
    case ErrorCode::StaleRedex: return "StaleRedex";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
    case ErrorCode::SequentMismatch: return "SequentMismatch";
    case ErrorCode::NotMultiplicative: return "NotMultiplicative";
    case ErrorCode::AssignmentInvalid: return "AssignmentInvalid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view term_kind_name(TermKind kind) {
  switch (kind) {
    case TermKind::Var: return "Var";
    case TermKind::CoApp: return "CoApp";
    case TermKind::ConnectTo: return "ConnectTo";
    case TermKind::Par: return "Par";
    case TermKind::Casel: return "Casel";
    case TermKind::Caser: return "Caser";
    case TermKind::Mkc: return "Mkc";
    case TermKind::Nil: return "Nil";
    case TermKind::List1: return "List1";
    case TermKind::List2: return "List2";
    case TermKind::Postp1: return "Postp1";
    case TermKind::Postp2: return "Postp2";
    case TermKind::Store: return "Store";
  }
  return "?";
}

struct Term::Node {
  TermKind kind;
  std::string name;
  std::vector<Term> children;
  std::vector<CoName> guards;
  std::size_t n_stored = 0;
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

const std::string kEmpty;

}  // namespace

Term Term::make(TermKind kind, std::string name, std::vector<Term> children,
                std::vector<CoName> guards, std::size_t n_stored) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->name = std::move(name);
  node->children = std::move(children);
  node->guards = std::move(guards);
  node->n_stored = n_stored;
  std::size_t h = mix(static_cast<std::size_t>(kind) + 1,
                      std::hash<std::string>{}(node->name));
  h = mix(h, n_stored);
  for (const CoName& g : node->guards) h = mix(h, std::hash<std::string>{}(g.name));
  for (const Term& c : node->children) {
    h = mix(h, c.hash());
    node->size += c.size();
  }
  node->hash = h;
  return Term(std::move(node));
}

Term Term::var(VarName x) {
  if (x.name.empty()) throw Error(ErrorCode::IllFormed, "empty variable name");
  return make(TermKind::Var, std::move(x.name), {});
}
Term Term::co_app(CoName f, Term arg) {
  if (f.name.empty()) throw Error(ErrorCode::IllFormed, "empty covariable name");
  return make(TermKind::CoApp, std::move(f.name), {std::move(arg)});
}
Term Term::connect_to(Term target) {
  return make(TermKind::ConnectTo, "", {std::move(target)});
}
Term Term::par(Term left, Term right) {
  return make(TermKind::Par, "", {std::move(left), std::move(right)});
}
Term Term::casel(Term m) { return make(TermKind::Casel, "", {std::move(m)}); }
Term Term::caser(Term m) { return make(TermKind::Caser, "", {std::move(m)}); }
Term Term::mkc(Term m, CoName y) {
  if (y.name.empty()) throw Error(ErrorCode::IllFormed, "empty covariable name");
  return make(TermKind::Mkc, std::move(y.name), {std::move(m)});
}
Term Term::nil() {
  static const Term kNil = make(TermKind::Nil, "", {});
  return kNil;
}
Term Term::list1(Term m) { return make(TermKind::List1, "", {std::move(m)}); }
Term Term::list2(Term a, Term b) {
  return make(TermKind::List2, "", {std::move(a), std::move(b)});
}
Term Term::postp(Term m) { return make(TermKind::Postp1, "", {std::move(m)}); }
Term Term::postp(CoName bound, Term body, Term anchor) {
  if (bound.name.empty()) throw Error(ErrorCode::IllFormed, "empty covariable name");
  return make(TermKind::Postp2, std::move(bound.name), {std::move(body), std::move(anchor)});
}
Term Term::store(std::vector<Term> stored, std::vector<Term> guarded,
                 std::vector<CoName> guards, CoName bound, Term anchor) {
  if (guarded.size() != guards.size()) {
    throw Error(ErrorCode::IllFormed, "store: guarded terms and guards differ in length");
  }
  if (bound.name.empty()) throw Error(ErrorCode::IllFormed, "empty covariable name");
  std::size_t n_stored = stored.size();
  std::vector<Term> children = std::move(stored);
  children.insert(children.end(), std::make_move_iterator(guarded.begin()),
                  std::make_move_iterator(guarded.end()));
  children.push_back(std::move(anchor));
  return make(TermKind::Store, std::move(bound.name), std::move(children), std::move(guards),
              n_stored);
}

TermKind Term::kind() const { return node_->kind; }

Sort Term::sort() const {
  switch (node_->kind) {
    case TermKind::Postp1:
    case TermKind::Postp2:
    case TermKind::Store:
      return Sort::PTerm;
    default:
      return Sort::MTerm;
  }
}

const std::string& Term::name() const { return node_->name; }

std::span<const Term> Term::children() const { return node_->children; }

std::span<const Term> Term::stored() const {
  if (kind() != TermKind::Store) return {};
  return std::span<const Term>(node_->children).subspan(0, node_->n_stored);
}

std::span<const Term> Term::guarded() const {
  if (kind() != TermKind::Store) return {};
  return std::span<const Term>(node_->children)
      .subspan(node_->n_stored, node_->guards.size());
}

std::span<const CoName> Term::guards() const { return node_->guards; }

const Term& Term::anchor() const {
  if (kind() != TermKind::Postp2 && kind() != TermKind::Store) {
    throw Error(ErrorCode::IllFormed, "anchor() on a term without anchor");
  }
  return node_->children.back();
}

const Term& Term::body() const {
  if (kind() != TermKind::Postp2) throw Error(ErrorCode::IllFormed, "body() on non-postp term");
  return node_->children[0];
}

Term Term::with_children(std::vector<Term> children) const {
  if (children.size() != node_->children.size()) {
    throw Error(ErrorCode::IllFormed, "with_children: arity changed");
  }
  bool same = true;
  for (std::size_t i = 0; i < children.size() && same; ++i) {
    same = children[i].node_ == node_->children[i].node_;
  }
  if (same) return *this;
  return make(node_->kind, node_->name, std::move(children), node_->guards, node_->n_stored);
}

Term Term::with_store_items(std::vector<Term> stored, std::vector<Term> guarded,
                            std::vector<CoName> guards) const {
  return store(std::move(stored), std::move(guarded), std::move(guards), co_name(), anchor());
}

Term Term::with_name(std::string name) const {
  if (name == node_->name) return *this;
  return make(node_->kind, std::move(name), node_->children, node_->guards, node_->n_stored);
}

Term Term::with_guards(std::vector<CoName> guards) const {
  if (guards.size() != node_->guards.size()) {
    throw Error(ErrorCode::IllFormed, "with_guards: guard count changed");
  }
  return make(node_->kind, node_->name, node_->children, std::move(guards), node_->n_stored);
}

std::size_t Term::hash() const { return node_->hash; }
std::size_t Term::size() const { return node_->size; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.size != y.size || x.name != y.name ||
      x.n_stored != y.n_stored || x.guards != y.guards) {
    return false;
  }
  return x.children == y.children;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  if (auto c = x.name <=> y.name; c != 0) return c;
  if (auto c = x.n_stored <=> y.n_stored; c != 0) return c;
  if (auto c = x.children.size() <=> y.children.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (auto c = x.children[i] <=> y.children[i]; c != 0) return c;
  }
  return x.guards <=> y.guards;
}

namespace {

void collect_free(const Term& t, std::set<VarName>& out) {
  switch (t.kind()) {
    case TermKind::Var:
      out.insert(t.var_name());
      return;
    case TermKind::Postp2: {
      std::set<VarName> inner;
      collect_free(t.body(), inner);
      inner.erase(VarName{t.name()});
      out.insert(inner.begin(), inner.end());
      collect_free(t.anchor(), out);
      return;
    }
    case TermKind::Store: {
      std::set<VarName> inner;
      for (const Term& s : t.stored()) collect_free(s, inner);
      for (const Term& g : t.guarded()) collect_free(g, inner);
      inner.erase(VarName{t.name()});
      out.insert(inner.begin(), inner.end());
      collect_free(t.anchor(), out);
      return;
    }
    default:
      for (const Term& c : t.children()) collect_free(c, out);
  }
}

bool binds(const Term& t, const VarName& x) {
  return (t.kind() == TermKind::Postp2 || t.kind() == TermKind::Store) && t.name() == x.name;
}

void collect_co_names(const Term& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::CoApp:
    case TermKind::Mkc:
    case TermKind::Postp2:
      out.insert(t.name());
      break;
    case TermKind::Store:
      out.insert(t.name());
      for (const CoName& g : t.guards()) out.insert(g.name);
      break;
    default:
      break;
  }
  for (const Term& c : t.children()) collect_co_names(c, out);
}

Term subst_rec(const Term& t, const VarName& x, const Term& m) {
  if (t.kind() == TermKind::Var) return t.name() == x.name ? m : t;
  if (t.arity() == 0) return t;
  std::vector<Term> kids(t.children().begin(), t.children().end());
  if (binds(t, x)) {
    kids.back() = subst_rec(kids.back(), x, m);
  } else {
    for (Term& k : kids) k = subst_rec(k, x, m);
  }
  return t.with_children(std::move(kids));
}

}  // namespace

std::set<VarName> free_vars(const Term& t) {
  std::set<VarName> out;
  collect_free(t, out);
  return out;
}

bool occurs_free(const Term& t, const VarName& x) { return free_vars(t).contains(x); }

std::set<std::string> co_names(const Term& t) {
  std::set<std::string> out;
  collect_co_names(t, out);
  return out;
}

Term substitute(const Term& t, const VarName& x, const Term& m) {
  if (m.is_p_term()) {
    throw Error(ErrorCode::SubstituteWithPTerm,
                "cannot substitute p-term " + print_term(m) + " for " + x.name);
  }
  return subst_rec(t, x, m);
}

Term replace_subterms(const Term& t, const TermMap& map) {
  if (map.empty()) return t;
  if (auto it = map.find(t); it != map.end()) return it->second;
  if (t.arity() == 0) return t;
  std::vector<Term> kids;
  kids.reserve(t.arity());
  for (const Term& c : t.children()) kids.push_back(replace_subterms(c, map));
  return t.with_children(std::move(kids));
}

Term map_bottom_up(const Term& t, const std::function<Term(const Term&)>& f) {
  if (t.arity() == 0) return f(t);
  std::vector<Term> kids;
  kids.reserve(t.arity());
  for (const Term& c : t.children()) kids.push_back(map_bottom_up(c, f));
  return f(t.with_children(std::move(kids)));
}

namespace {

std::optional<std::string> check_wf(const Term& t, const std::string& path) {
  auto need_m = [&](const Term& c, std::size_t i) -> std::optional<std::string> {
    std::string p = path + "/" + std::to_string(i);
    if (c.is_p_term()) {
      return "p-term " + std::string(term_kind_name(c.kind())) + " in m-term position at " + p;
    }
    return check_wf(c, p);
  };
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Nil:
      return std::nullopt;
    case TermKind::ConnectTo:
      return check_wf(t.child(0), path + "/0");
    case TermKind::Store: {
      std::size_t i = 0;
      for (const Term& s : t.stored()) {
        if (!s.is_p_term()) {
          return "m-term in stored p-term position at " + path + "/" + std::to_string(i);
        }
        if (auto e = check_wf(s, path + "/" + std::to_string(i))) return e;
        ++i;
      }
      for (std::size_t k = i; k < t.arity(); ++k) {
        if (auto e = need_m(t.child(k), k)) return e;
      }
      return std::nullopt;
    }
    default:
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (auto e = need_m(t.child(i), i)) return e;
      }
      return std::nullopt;
  }
}

Term remote_rec(const Term& t) {
  switch (t.kind()) {
    case TermKind::Postp2: {
      Term anchor = remote_rec(t.anchor());
      Term body = substitute(remote_rec(t.body()), t.var_name(), Term::co_app(t.co_name(), anchor));
      return t.with_children({std::move(body), std::move(anchor)});
    }
    case TermKind::Store: {
      Term anchor = remote_rec(t.anchor());
      Term occ = Term::co_app(t.co_name(), anchor);
      std::vector<Term> kids;
      for (std::size_t i = 0; i + 1 < t.arity(); ++i) {
        kids.push_back(substitute(remote_rec(t.child(i)), t.var_name(), occ));
      }
      kids.push_back(std::move(anchor));
      return t.with_children(std::move(kids));
    }
    default:
      if (t.arity() == 0) return t;
      std::vector<Term> kids;
      for (const Term& c : t.children()) kids.push_back(remote_rec(c));
      return t.with_children(std::move(kids));
  }
}

Term local_rec(const Term& t) {
  switch (t.kind()) {
    case TermKind::Postp2:
    case TermKind::Store: {
      TermMap back{{Term::co_app(t.co_name(), t.anchor()), Term::var(t.var_name())}};
      std::vector<Term> kids;
      for (std::size_t i = 0; i + 1 < t.arity(); ++i) {
        kids.push_back(local_rec(replace_subterms(t.child(i), back)));
      }
      kids.push_back(local_rec(t.anchor()));
      return t.with_children(std::move(kids));
    }
    default:
      if (t.arity() == 0) return t;
      std::vector<Term> kids;
      for (const Term& c : t.children()) kids.push_back(local_rec(c));
      return t.with_children(std::move(kids));
  }
}

}  // namespace

std::optional<std::string> ill_formed(const Term& t) { return check_wf(t, ""); }
bool is_well_formed(const Term& t) { return !ill_formed(t).has_value(); }

Term to_remote(const Term& t) { return remote_rec(t); }
Term to_local(const Term& t) { return local_rec(t); }

const Term& subterm_at(const Term& t, std::span<const std::size_t> path) {
  const Term* cur = &t;
  for (std::size_t i : path) {
    if (i >= cur->arity()) throw Error(ErrorCode::IndexOutOfRange, "subterm path out of range");
    cur = &cur->child(i);
  }
  return *cur;
}

Term replace_at(const Term& t, std::span<const std::size_t> path, Term with) {
  if (path.empty()) return with;
  if (path[0] >= t.arity()) throw Error(ErrorCode::IndexOutOfRange, "subterm path out of range");
  std::vector<Term> kids(t.children().begin(), t.children().end());
  kids[path[0]] = replace_at(kids[path[0]], path.subspan(1), std::move(with));
  return t.with_children(std::move(kids));
}

// ---------------------------------------------------------------------------
// Lexing and parsing

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += ", ";
    out += expected[i];
  }
  return out;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

constexpr std::string_view kKeywords[] = {"connect_to", "par",   "casel", "caser",
                                          "mkc",        "postp", "store"};

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected)
    : Error(ErrorCode::ParseError, "parse error at byte " + std::to_string(offset) +
                                       ": expected one of {" + join_expected(expected) + "}"),
      offset_(offset),
      expected_(std::move(expected)) {}

bool is_keyword(std::string_view word) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), word) != std::end(kKeywords);
}

void Lexer::skip_space() {
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos_;
    } else if (c == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    } else {
      break;
    }
  }
}

bool Lexer::at_end() {
  skip_space();
  return pos_ >= text_.size();
}

char Lexer::peek() {
  skip_space();
  return pos_ < text_.size() ? text_[pos_] : '\0';
}

bool Lexer::accept(std::string_view token) {
  skip_space();
  if (text_.substr(pos_, token.size()) != token) return false;
  if (!token.empty() && ident_char(token.back())) {
    std::size_t end = pos_ + token.size();
    if (end < text_.size() && ident_char(text_[end])) return false;
  }
  pos_ += token.size();
  return true;
}

void Lexer::expect(std::string_view token) {
  if (!accept(token)) fail({"'" + std::string(token) + "'"});
}

std::optional<std::string> Lexer::accept_ident() {
  skip_space();
  if (pos_ >= text_.size() || !ident_start(text_[pos_])) return std::nullopt;
  std::size_t start = pos_;
  while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
  return std::string(text_.substr(start, pos_ - start));
}

std::string Lexer::expect_ident() {
  auto id = accept_ident();
  if (!id) fail({"identifier"});
  return *id;
}

void Lexer::fail(std::vector<std::string> expected) const {
  throw ParseError(pos_, std::move(expected));
}

namespace {

CoName expect_co_name(Lexer& lex) {
  if (!lex.accept("'")) lex.fail({"covariable 'name"});
  return CoName{lex.expect_ident()};
}

std::vector<Term> parse_term_list(Lexer& lex) {
  std::vector<Term> out;
  lex.expect("[");
  if (lex.accept("]")) return out;
  do {
    out.push_back(parse_term(lex));
  } while (lex.accept(","));
  lex.expect("]");
  return out;
}

}  // namespace

Term parse_term(Lexer& lex) {
  lex.skip_space();
  if (lex.accept("'")) {
    std::string f = lex.expect_ident();
    lex.expect("(");
    Term arg = parse_term(lex);
    lex.expect(")");
    return Term::co_app(CoName{f}, arg);
  }
  if (lex.accept("[")) {
    if (lex.accept("]")) return Term::nil();
    Term a = parse_term(lex);
    if (lex.accept("]")) return Term::list1(a);
    if (!lex.accept(",")) lex.fail({"','", "']'"});
    Term b = parse_term(lex);
    lex.expect("]");
    return Term::list2(a, b);
  }
  std::size_t start = lex.offset();
  auto id = lex.accept_ident();
  if (!id) {
    lex.fail({"identifier", "'name(", "'['", "connect_to", "par", "casel", "caser", "mkc",
              "postp", "store"});
  }
  const std::string& w = *id;
  if (!is_keyword(w)) return Term::var(VarName{w});
  lex.expect("(");
  Term out = Term::nil();
  if (w == "connect_to") {
    out = Term::connect_to(parse_term(lex));
  } else if (w == "par") {
    Term a = parse_term(lex);
    lex.expect(",");
    out = Term::par(a, parse_term(lex));
  } else if (w == "casel") {
    out = Term::casel(parse_term(lex));
  } else if (w == "caser") {
    out = Term::caser(parse_term(lex));
  } else if (w == "mkc") {
    Term m = parse_term(lex);
    lex.expect(",");
    out = Term::mkc(m, expect_co_name(lex));
  } else if (w == "postp") {
    Lexer probe = lex;
    std::optional<CoName> tag;
    if (probe.peek() == '\'') {
      tag = expect_co_name(probe);
      if (!probe.accept("->")) tag.reset();
    }
    if (tag) {
      lex = probe;
      Term body = parse_term(lex);
      lex.expect(",");
      out = Term::postp(*tag, body, parse_term(lex));
    } else {
      out = Term::postp(parse_term(lex));
    }
  } else if (w == "store") {
    std::vector<Term> stored = parse_term_list(lex);
    lex.expect(";");
    std::vector<Term> guarded = parse_term_list(lex);
    lex.expect(";");
    std::vector<CoName> guards;
    lex.expect("[");
    if (!lex.accept("]")) {
      do {
        guards.push_back(expect_co_name(lex));
      } while (lex.accept(","));
      lex.expect("]");
    }
    lex.expect(";");
    CoName bound = expect_co_name(lex);
    lex.expect(";");
    Term anchor = parse_term(lex);
    if (guards.size() != guarded.size()) throw ParseError(start, {"one guard per guarded term"});
    out = Term::store(std::move(stored), std::move(guarded), std::move(guards), bound, anchor);
  }
  lex.expect(")");
  return out;
}

Term parse_term(std::string_view text) {
  Lexer lex(text);
  Term t = parse_term(lex);
  if (!lex.at_end()) lex.fail({"end of input"});
  return t;
}

namespace {

void print_rec(const Term& t, std::string& out, bool erase) {
  auto co = [&](const std::string& n) {
    out += '\'';
    out += erase ? "_" : n;
  };
  auto list = [&](std::span<const Term> items) {
    out += '[';
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ',';
      print_rec(items[i], out, erase);
    }
    out += ']';
  };
  auto unary = [&](std::string_view head) {
    out += head;
    out += '(';
    print_rec(t.child(0), out, erase);
    out += ')';
  };
  switch (t.kind()) {
    case TermKind::Var:
      out += t.name();
      return;
    case TermKind::CoApp:
      co(t.name());
      out += '(';
      print_rec(t.child(0), out, erase);
      out += ')';
      return;
    case TermKind::ConnectTo: unary("connect_to"); return;
    case TermKind::Casel: unary("casel"); return;
    case TermKind::Caser: unary("caser"); return;
    case TermKind::Postp1: unary("postp"); return;
    case TermKind::Par:
      out += "par(";
      print_rec(t.child(0), out, erase);
      out += ',';
      print_rec(t.child(1), out, erase);
      out += ')';
      return;
    case TermKind::Mkc:
      out += "mkc(";
      print_rec(t.child(0), out, erase);
      out += ',';
      co(t.name());
      out += ')';
      return;
    case TermKind::Nil:
    case TermKind::List1:
    case TermKind::List2:
      list(t.children());
      return;
    case TermKind::Postp2:
      out += "postp(";
      co(t.name());
      out += "->";
      print_rec(t.body(), out, erase);
      out += ',';
      print_rec(t.anchor(), out, erase);
      out += ')';
      return;
    case TermKind::Store: {
      out += "store(";
      list(t.stored());
      out += ';';
      list(t.guarded());
      out += ";[";
      for (std::size_t i = 0; i < t.guards().size(); ++i) {
        if (i) out += ',';
        co(t.guards()[i].name);
      }
      out += "];";
      co(t.name());
      out += ';';
      print_rec(t.anchor(), out, erase);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string print_term(const Term& t) {
  std::string out;
  print_rec(t, out, false);
  return out;
}

std::string print_erased(const Term& t) {
  std::string out;
  print_rec(t, out, true);
  return out;
}

}  // namespace coill

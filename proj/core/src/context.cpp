#include "coill/context.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace coill {

ComputationalContext::ComputationalContext(VarName var, std::vector<Term> components)
    : var_(std::move(var)) {
  if (var_.name.empty()) throw Error(ErrorCode::IllFormed, "context variable is empty");
  for (Term& c : components) {
    if (c.kind() != TermKind::Nil) components_.push_back(std::move(c));
  }
  std::sort(components_.begin(), components_.end());
}

ComputationalContext ComputationalContext::identity(VarName x) {
  Term v = Term::var(x);
  return ComputationalContext(std::move(x), {v});
}

std::string print_context(const ComputationalContext& c) {
  std::string out = "context " + c.var().name + " :";
  if (c.components().empty()) return out + " []";
  for (std::size_t i = 0; i < c.components().size(); ++i) {
    out += i ? " || " : " ";
    out += print_term(c.components()[i]);
  }
  return out;
}

ComputationalContext parse_context(std::string_view text) {
  Lexer lex(text);
  lex.expect("context");
  std::string var = lex.expect_ident();
  if (is_keyword(var)) lex.fail({"variable name"});
  lex.expect(":");
  std::vector<Term> comps;
  comps.push_back(parse_term(lex));
  while (lex.accept("||")) comps.push_back(parse_term(lex));
  if (!lex.at_end()) lex.fail({"'||'", "end of input"});
  return ComputationalContext(VarName{var}, std::move(comps));
}

bool ValidationReport::has_axiom(int axiom) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.axiom == axiom; });
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::string out;
  for (const Violation& v : violations) {
    if (!out.empty()) out += '\n';
    out += "violation: axiom " + std::to_string(v.axiom) + " at " + v.path + ": " + v.message;
  }
  return out;
}

namespace {

std::string fv_text(const std::set<VarName>& fv) {
  std::string out = "{";
  bool first = true;
  for (const VarName& v : fv) {
    if (!first) out += ",";
    out += v.name;
    first = false;
  }
  return out + "}";
}

bool guarded_form_ok(const Term& t) {
  switch (t.kind()) {
    case TermKind::List1:
    case TermKind::List2:
    case TermKind::ConnectTo:
    case TermKind::Var:
    case TermKind::CoApp:
    case TermKind::Casel:
    case TermKind::Caser:
      return true;
    default:
      return false;
  }
}

class Validator {
 public:
  explicit Validator(ValidationReport& report) : report_(report) {}

  void node(const VarName& x, std::span<const Term> comps, const std::string& prefix,
            std::vector<std::string>& ancestors) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      std::string path = prefix + "[" + std::to_string(i) + "]";
      const Term& c = comps[i];
      if (auto err = ill_formed(c)) {
        add(1, path, "ill-formed term: " + *err);
        continue;
      }
      auto fv = free_vars(c);
      if (fv != std::set<VarName>{x}) {
        add(1, path, "free variables " + fv_text(fv) + " instead of {" + x.name + "}");
      }
      term(c, path, true, x, ancestors);
    }
  }

 private:
  void add(int axiom, std::string path, std::string message) {
    report_.violations.push_back({axiom, std::move(path), std::move(message)});
  }

  void term(const Term& t, const std::string& path, bool top, const VarName& x,
            std::vector<std::string>& ancestors) {
    switch (t.kind()) {
      case TermKind::ConnectTo:
        return;
      case TermKind::Postp2: {
        auto body_fv = free_vars(t.body());
        if (body_fv != std::set<VarName>{t.var_name()}) {
          add(2, path, "postpone body must contain exactly the bound variable " + t.name() +
                           ", found " + fv_text(body_fv));
        }
        if (occurs_free(t.anchor(), t.var_name())) {
          add(2, path, "bound variable " + t.name() + " occurs free in the postpone anchor");
        }
        term(t.body(), path + "/0", false, x, ancestors);
        term(t.anchor(), path + "/1", false, x, ancestors);
        return;
      }
      case TermKind::Store: {
        if (!top) add(5, path, "store box below the top level of its node");
        for (std::size_t i = 0; i < t.guarded().size(); ++i) {
          if (!guarded_form_ok(t.guarded()[i])) {
            add(3, path + "/" + std::to_string(t.stored().size() + i),
                "guarded term " + print_term(t.guarded()[i]) + " has a forbidden shape");
          }
        }
        const VarName z = t.var_name();
        if (z == x) add(4, path, "box variable " + z.name + " equals the node variable");
        if (std::find(ancestors.begin(), ancestors.end(), z.name) != ancestors.end()) {
          add(5, path, "box variable " + z.name + " reused along a box path");
        }
        std::vector<Term> items(t.stored().begin(), t.stored().end());
        items.insert(items.end(), t.guarded().begin(), t.guarded().end());
        ancestors.push_back(x.name);
        node(z, items, path + ">", ancestors);
        ancestors.pop_back();
        term(t.anchor(), path + "/" + std::to_string(t.arity() - 1), false, x, ancestors);
        return;
      }
      default:
        for (std::size_t i = 0; i < t.arity(); ++i) {
          term(t.child(i), path + "/" + std::to_string(i), false, x, ancestors);
        }
    }
  }

  ValidationReport& report_;
};

}  // namespace

ValidationReport validate(const VarName& var, std::span<const Term> components) {
  ValidationReport report;
  std::vector<std::string> ancestors;
  Validator(report).node(var, components, "", ancestors);
  return report;
}

ValidationReport validate(const ComputationalContext& c) {
  return validate(c.var(), c.components());
}

ComputationalContext compose(const ComputationalContext& a, const ComputationalContext& b) {
  if (a.var() != b.var()) {
    throw Error(ErrorCode::VarMismatch,
                "cannot compose contexts over " + a.var().name + " and " + b.var().name);
  }
  std::vector<Term> all = a.components();
  all.insert(all.end(), b.components().begin(), b.components().end());
  return ComputationalContext(a.var(), std::move(all));
}

// ---------------------------------------------------------------------------
// Alpha canonical forms

namespace {

struct BinderKey {
  std::string name;
  Term arg;
  friend bool operator==(const BinderKey&, const BinderKey&) = default;
};

struct BinderKeyHash {
  std::size_t operator()(const BinderKey& k) const {
    return std::hash<std::string>{}(k.name) * 31 + k.arg.hash();
  }
};

using Renaming = std::unordered_map<BinderKey, std::string, BinderKeyHash>;

Term sort_store_items(const Term& t) {
  return map_bottom_up(t, [](const Term& n) {
    if (n.kind() != TermKind::Store) return n;
    std::vector<Term> stored(n.stored().begin(), n.stored().end());
    std::stable_sort(stored.begin(), stored.end(), [](const Term& a, const Term& b) {
      return print_erased(a) < print_erased(b);
    });
    std::vector<std::size_t> order(n.guarded().size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::string> keys;
    for (const Term& g : n.guarded()) keys.push_back(print_erased(g));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    std::vector<Term> guarded;
    std::vector<CoName> guards;
    for (std::size_t i : order) {
      guarded.push_back(n.guarded()[i]);
      guards.push_back(n.guards()[i]);
    }
    return n.with_store_items(std::move(stored), std::move(guarded), std::move(guards));
  });
}

void declare(const Term& t, std::vector<BinderKey>& out) {
  switch (t.kind()) {
    case TermKind::Mkc:
      out.push_back({t.name(), t.child(0)});
      break;
    case TermKind::Postp2:
      out.push_back({t.name(), t.anchor()});
      break;
    case TermKind::Store:
      out.push_back({t.name(), t.anchor()});
      for (const CoName& g : t.guards()) {
        out.push_back({g.name, Term::co_app(t.co_name(), t.anchor())});
      }
      break;
    default:
      break;
  }
  for (const Term& c : t.children()) declare(c, out);
}

void collect_apps(const Term& t, std::vector<BinderKey>& out) {
  if (t.kind() == TermKind::CoApp) out.push_back({t.name(), t.child(0)});
  for (const Term& c : t.children()) collect_apps(c, out);
}

std::string lookup(const Renaming& r, const std::string& name, const Term& arg) {
  auto it = r.find(BinderKey{name, arg});
  return it == r.end() ? name : it->second;
}

Term rename(const Term& t, const Renaming& r) {
  std::vector<Term> kids;
  kids.reserve(t.arity());
  for (const Term& c : t.children()) kids.push_back(rename(c, r));
  switch (t.kind()) {
    case TermKind::CoApp:
      return Term::co_app(CoName{lookup(r, t.name(), t.child(0))}, kids[0]);
    case TermKind::Mkc:
      return Term::mkc(kids[0], CoName{lookup(r, t.name(), t.child(0))});
    case TermKind::Postp2:
      return Term::postp(CoName{lookup(r, t.name(), t.anchor())}, kids[0], kids[1]);
    case TermKind::Store: {
      std::size_t ns = t.stored().size();
      std::size_t ng = t.guarded().size();
      std::vector<Term> stored(kids.begin(), kids.begin() + ns);
      std::vector<Term> guarded(kids.begin() + ns, kids.begin() + ns + ng);
      Term occ = Term::co_app(t.co_name(), t.anchor());
      std::vector<CoName> guards;
      for (const CoName& g : t.guards()) guards.push_back(CoName{lookup(r, g.name, occ)});
      return Term::store(std::move(stored), std::move(guarded), std::move(guards),
                         CoName{lookup(r, t.name(), t.anchor())}, kids.back());
    }
    default:
      return t.arity() == 0 ? t : t.with_children(std::move(kids));
  }
}

struct Prepared {
  std::vector<Term> remote;
  std::vector<std::string> labels;
  std::vector<std::string> erased;
  std::set<std::string> free_names;
};

Prepared prepare(const std::vector<LabeledTerm>& items) {
  Prepared p;
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Term> remote;
  std::vector<std::string> erased;
  for (const LabeledTerm& it : items) {
    remote.push_back(sort_store_items(to_remote(it.term)));
    erased.push_back(it.label + "\x1f" + print_erased(remote.back()));
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return erased[a] < erased[b]; });
  for (std::size_t i : order) {
    p.remote.push_back(remote[i]);
    p.labels.push_back(items[i].label);
    p.erased.push_back(erased[i]);
  }
  std::vector<BinderKey> decls;
  std::vector<BinderKey> apps;
  for (const Term& t : p.remote) {
    declare(t, decls);
    collect_apps(t, apps);
  }
  std::unordered_map<BinderKey, bool, BinderKeyHash> declared;
  for (const BinderKey& k : decls) declared[k] = true;
  for (const BinderKey& k : apps) {
    if (!declared.contains(k)) p.free_names.insert(k.name);
  }
  return p;
}

std::vector<LabeledTerm> canonical_for_order(const Prepared& p,
                                             const std::vector<std::size_t>& order) {
  std::vector<BinderKey> decls;
  for (std::size_t i : order) declare(p.remote[i], decls);
  Renaming r;
  std::size_t counter = 0;
  for (const BinderKey& k : decls) {
    if (r.contains(k)) continue;
    std::string name;
    do {
      name = "k" + std::to_string(counter++);
    } while (p.free_names.contains(name));
    r.emplace(k, std::move(name));
  }
  std::vector<LabeledTerm> out;
  for (std::size_t i : order) out.push_back({to_local(rename(p.remote[i], r)), p.labels[i]});
  return out;
}

std::vector<std::string> printed(const std::vector<LabeledTerm>& items) {
  std::vector<std::string> out;
  for (const LabeledTerm& it : items) out.push_back(it.label + "\x1f" + print_term(it.term));
  return out;
}

constexpr std::size_t kPermutationBudget = 5040;

}  // namespace

std::vector<LabeledTerm> alpha_canonical(std::vector<LabeledTerm> items) {
  Prepared p = prepare(items);
  std::size_t n = p.remote.size();
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t budget = 1;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && p.erased[j] == p.erased[i]) ++j;
    if (j - i > 1) {
      groups.push_back({i, j});
      for (std::size_t k = 2; k <= j - i && budget <= kPermutationBudget; ++k) budget *= k;
    }
    i = j;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (groups.empty() || budget > kPermutationBudget) return canonical_for_order(p, order);

  std::vector<LabeledTerm> best = canonical_for_order(p, order);
  std::vector<std::string> best_key = printed(best);
  // Odometer over the permutations of every tie group.
  while (true) {
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      auto [lo, hi] = groups[g];
      if (std::next_permutation(order.begin() + lo, order.begin() + hi)) break;
    }
    if (g == groups.size()) break;
    auto candidate = canonical_for_order(p, order);
    auto key = printed(candidate);
    if (key < best_key) {
      best = std::move(candidate);
      best_key = std::move(key);
    }
  }
  return best;
}

std::vector<std::string> alpha_key(std::vector<LabeledTerm> items) {
  return printed(alpha_canonical(std::move(items)));
}

ComputationalContext alpha_canonical(const ComputationalContext& c) {
  std::vector<LabeledTerm> items;
  for (const Term& t : c.components()) items.push_back({t, ""});
  std::vector<Term> out;
  for (auto& it : alpha_canonical(std::move(items))) out.push_back(std::move(it.term));
  return ComputationalContext(c.var(), std::move(out));
}

bool alpha_equal(const ComputationalContext& a, const ComputationalContext& b) {
  if (a.var() != b.var() || a.size() != b.size()) return false;
  if (a == b) return true;
  auto items = [](const ComputationalContext& c) {
    std::vector<LabeledTerm> out;
    for (const Term& t : c.components()) out.push_back({t, ""});
    return out;
  };
  return alpha_key(items(a)) == alpha_key(items(b));
}

// ---------------------------------------------------------------------------
// Construction operations

namespace {

[[noreturn]] void shape(const std::string& message) {
  throw Error(ErrorCode::ShapeMismatch, message);
}

std::vector<Term> without(const ComputationalContext& c, const Term& m, const char* what) {
  std::vector<Term> rest = c.components();
  auto it = std::find(rest.begin(), rest.end(), m);
  if (it == rest.end()) shape(std::string(what) + " " + print_term(m) + " is not a component");
  if (m.is_p_term()) shape(std::string(what) + " " + print_term(m) + " is not an m-term");
  rest.erase(it);
  return rest;
}

std::vector<Term> substituted(const ComputationalContext& c, const Term& with) {
  std::vector<Term> out;
  for (const Term& t : c.components()) out.push_back(substitute(t, c.var(), with));
  return out;
}

void require_distinct(const VarName& a, const VarName& b) {
  if (a == b) shape("variables must differ, both are " + a.name);
}

void append(std::vector<Term>& to, std::vector<Term> from) {
  to.insert(to.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

ComputationalContext checked(ComputationalContext c) {
  auto report = validate(c);
  if (!report.ok()) shape("result is not a computational context: " + report.to_string());
  return c;
}

ComputationalContext pair_up(const ComputationalContext& sx, const Term& m0, const Term& m1,
                             bool as_list) {
  std::vector<Term> rest = without(sx, m0, "first term");
  ComputationalContext tmp(sx.var(), rest);
  rest = without(tmp, m1, "second term");
  rest.push_back(as_list ? Term::list2(m0, m1) : Term::par(m0, m1));
  return ComputationalContext(sx.var(), std::move(rest));
}

ComputationalContext run(const build::Substitution& r) {
  require_distinct(r.sx.var(), r.sy.var());
  std::vector<Term> rest = without(r.sx, r.m, "distinguished term");
  append(rest, substituted(r.sy, r.m));
  return ComputationalContext(r.sx.var(), std::move(rest));
}

ComputationalContext run(const build::MakeCoroutine& r) {
  require_distinct(r.sx.var(), r.sy.var());
  CoName y = r.co.value_or(CoName{r.sy.var().name});
  std::vector<Term> rest = without(r.sx, r.m, "distinguished term");
  rest.push_back(Term::mkc(r.m, y));
  append(rest, substituted(r.sy, Term::co_app(y, r.m)));
  return ComputationalContext(r.sx.var(), std::move(rest));
}

ComputationalContext run(const build::Cases& r) {
  require_distinct(r.sx.var(), r.sy.var());
  require_distinct(r.sx.var(), r.z);
  require_distinct(r.sy.var(), r.z);
  Term z = Term::var(r.z);
  std::vector<Term> out = substituted(r.sx, Term::casel(z));
  append(out, substituted(r.sy, Term::caser(z)));
  return ComputationalContext(r.z, std::move(out));
}

ComputationalContext run(const build::Postpone& r) {
  require_distinct(r.sx.var(), r.y);
  std::vector<Term> rest = without(r.sx, r.m, "distinguished term");
  CoName tag{r.sx.var().name};
  Term y = Term::var(r.y);
  std::vector<Term> out{Term::postp(tag, r.m, y)};
  for (const Term& t : rest) out.push_back(substitute(t, r.sx.var(), Term::co_app(tag, y)));
  return ComputationalContext(r.y, std::move(out));
}

ComputationalContext run(const build::Par& r) { return pair_up(r.sx, r.m0, r.m1, false); }
ComputationalContext run(const build::Contraction& r) { return pair_up(r.sx, r.m0, r.m1, true); }

ComputationalContext add_link(const ComputationalContext& sx, const Term& r) {
  const auto& comps = sx.components();
  if (std::find(comps.begin(), comps.end(), r) == comps.end()) {
    shape("link target " + print_term(r) + " is not a component");
  }
  std::vector<Term> out = comps;
  out.push_back(Term::connect_to(r));
  return ComputationalContext(sx.var(), std::move(out));
}

ComputationalContext run(const build::Unit& r) { return add_link(r.sx, r.r); }
ComputationalContext run(const build::Weakening& r) { return add_link(r.sx, r.r); }

ComputationalContext run(const build::Store& r) {
  require_distinct(r.sz.var(), r.x);
  std::vector<Term> stored;
  std::vector<Term> guarded;
  for (const Term& t : r.sz.components()) (t.is_p_term() ? stored : guarded).push_back(t);
  std::vector<CoName> guards = r.guards;
  if (guards.empty()) {
    std::set<std::string> used;
    for (const Term& t : r.sz.components()) {
      auto names = co_names(t);
      used.insert(names.begin(), names.end());
    }
    for (std::size_t i = 0; guards.size() < guarded.size(); ++i) {
      std::string g = "g" + std::to_string(i);
      if (!used.contains(g) && g != r.sz.var().name) guards.push_back(CoName{g});
    }
  }
  if (guards.size() != guarded.size()) shape("one guard per guarded term required");
  Term box = Term::store(std::move(stored), std::move(guarded), std::move(guards),
                         CoName{r.sz.var().name}, Term::var(r.x));
  return ComputationalContext(r.x, {box});
}

}  // namespace

ComputationalContext build_context(const BuildRequest& request) {
  return checked(std::visit([](const auto& r) { return run(r); }, request));
}

}  // namespace coill

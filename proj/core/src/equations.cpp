#include "coill/equations.hpp"

#include <algorithm>

#include "json.hpp"

#include "engine.hpp"

namespace coill {

namespace {

using detail::Tracked;

constexpr std::size_t kMaxRounds = 200;

struct Work {
  Tracked t;
  std::size_t n_control = 0;
  std::vector<Formula> formulas;  // of the succedent slots, by original index
  std::vector<std::string> provenance;

  void note(const std::string& name) {
    if (std::find(provenance.begin(), provenance.end(), name) == provenance.end()) {
      provenance.push_back(name);
    }
  }

  bool is_slot(std::size_t i) const {
    return t.tags[i] >= 0 && static_cast<std::size_t>(t.tags[i]) >= n_control;
  }
  const Formula& formula_of(std::size_t i) const {
    return formulas[static_cast<std::size_t>(t.tags[i]) - n_control];
  }
};

std::set<std::string> all_names(const Tracked& t) {
  std::set<std::string> used;
  for (const Term& i : t.items) {
    auto n = co_names(i);
    used.insert(n.begin(), n.end());
  }
  return used;
}

CoName fresh_name(std::set<std::string>& used, const char* prefix) {
  for (std::size_t i = 0;; ++i) {
    std::string n = prefix + std::to_string(i);
    if (used.insert(n).second) return CoName{n};
  }
}

std::string order_key(const Term& t) { return print_erased(t) + "\x1f" + print_term(t); }

// Flatten list trees, drop connect_to units next to real elements, sort the
// leaves and rebuild right-nested.
Term monoid_node(const Term& t) {
  if (t.kind() != TermKind::List2) return t;
  std::vector<Term> leaves;
  std::function<void(const Term&)> collect = [&](const Term& n) {
    if (n.kind() == TermKind::List2) {
      collect(n.child(0));
      collect(n.child(1));
    } else {
      leaves.push_back(n);
    }
  };
  collect(t);
  std::vector<Term> kept;
  for (const Term& l : leaves) {
    if (l.kind() != TermKind::ConnectTo) kept.push_back(l);
  }
  if (kept.empty()) kept.push_back(leaves.front());
  std::vector<std::pair<std::string, Term>> keyed;
  for (const Term& k : kept) keyed.push_back({order_key(k), k});
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Term out = keyed.back().second;
  for (std::size_t i = keyed.size() - 1; i-- > 0;) out = Term::list2(keyed[i].second, out);
  return out;
}

bool monoid(Work& w) {
  bool changed = false;
  for (Term& item : w.t.items) {
    Term next = map_bottom_up(item, monoid_node);
    if (!(next == item)) {
      item = next;
      changed = true;
    }
  }
  return changed;
}

bool par_eta(Work& w) {
  bool changed = false;
  for (Term& item : w.t.items) {
    Term next = map_bottom_up(item, [](const Term& n) {
      if (n.kind() == TermKind::Par && n.child(0).kind() == TermKind::Casel &&
          n.child(1).kind() == TermKind::Caser && n.child(0).child(0) == n.child(1).child(0)) {
        return n.child(0).child(0);
      }
      return n;
    });
    if (!(next == item)) {
      item = next;
      changed = true;
    }
  }
  return changed;
}

bool contains(const Term& t, const Term& needle) {
  if (t == needle) return true;
  for (const Term& c : t.children()) {
    if (contains(c, needle)) return true;
  }
  return false;
}

struct NodeHit {
  std::vector<std::size_t> boxes;
  Term item;
};

// First item (in node preorder) satisfying pred.
std::optional<NodeHit> find_item(const Tracked& t, const std::function<bool(const Term&)>& pred) {
  std::optional<NodeHit> hit;
  detail::for_each_node(t, [&](const std::vector<std::size_t>& boxes, const std::vector<Term>& items) {
    if (hit) return;
    for (const Term& i : items) {
      if (pred(i)) {
        hit = NodeHit{boxes, i};
        return;
      }
    }
  });
  return hit;
}

void remove_from_node(Tracked& t, const std::vector<std::size_t>& boxes, const Term& x,
                      std::optional<Term> with = std::nullopt) {
  detail::edit_node(t, boxes, [&](std::vector<Term>& items, std::vector<int>* tags) {
    auto it = std::find(items.begin(), items.end(), x);
    if (it == items.end()) return;
    std::size_t pos = static_cast<std::size_t>(it - items.begin());
    if (with) {
      items[pos] = *with;
      return;
    }
    items.erase(it);
    if (tags) tags->erase(tags->begin() + static_cast<std::ptrdiff_t>(pos));
  });
}

bool sub_eta(Work& w) {
  std::vector<Term> all = w.t.items;
  auto hit = find_item(w.t, [&](const Term& x) {
    if (x.kind() != TermKind::Postp2) return false;
    Term inner = Term::co_app(x.co_name(), x.anchor());
    const Term& body = x.body();
    if (body.kind() != TermKind::CoApp || !(body.child(0) == inner)) return false;
    Term mkc = Term::mkc(inner, body.co_name());
    return std::any_of(all.begin(), all.end(), [&](const Term& i) { return contains(i, mkc); });
  });
  if (!hit) return false;
  const Term& x = hit->item;
  Term link = Term::connect_to(detail::node_variable(w.t, hit->boxes));
  remove_from_node(w.t, hit->boxes, x);
  TermMap map{{Term::mkc(Term::co_app(x.co_name(), x.anchor()), x.body().co_name()), x.anchor()},
              {Term::connect_to(x), link}};
  detail::replace_everywhere(w.t, map);
  return true;
}

bool bot_eta(Work& w) {
  std::optional<std::size_t> postp;
  std::optional<std::size_t> slot;
  for (std::size_t i = 0; i < w.t.items.size(); ++i) {
    const Term& it = w.t.items[i];
    if (!w.is_slot(i) && it.kind() == TermKind::Postp1) {
      if (!postp || order_key(it) < order_key(w.t.items[*postp])) postp = i;
    }
    if (w.is_slot(i) && it.kind() == TermKind::ConnectTo &&
        w.formula_of(i).kind() == FormulaKind::Bot) {
      if (!slot || order_key(it) < order_key(w.t.items[*slot])) slot = i;
    }
  }
  if (!postp || !slot) return false;
  Term x = w.t.items[*postp];
  w.t.items[*slot] = x.child(0);
  w.t.items.erase(w.t.items.begin() + static_cast<std::ptrdiff_t>(*postp));
  w.t.tags.erase(w.t.tags.begin() + static_cast<std::ptrdiff_t>(*postp));
  detail::replace_everywhere(w.t, {{Term::connect_to(x), Term::connect_to(Term::var(w.t.var))}});
  return true;
}

bool monad(Work& w) {
  auto hit = find_item(w.t, [](const Term& x) {
    return x.kind() == TermKind::Store && x.stored().empty() && x.guarded().size() == 1 &&
           x.guarded()[0] == Term::list1(Term::co_app(x.co_name(), x.anchor()));
  });
  if (!hit) return false;
  const Term& x = hit->item;
  Term link = Term::connect_to(detail::node_variable(w.t, hit->boxes));
  remove_from_node(w.t, hit->boxes, x);
  TermMap map{{Term::co_app(x.guards()[0], Term::co_app(x.co_name(), x.anchor())), x.anchor()},
              {Term::connect_to(x), link}};
  detail::replace_everywhere(w.t, map);
  return true;
}

bool algebra2(Work& w) {
  auto hit = find_item(w.t, [](const Term& x) {
    if (x.kind() != TermKind::Store) return false;
    return std::any_of(x.guarded().begin(), x.guarded().end(),
                       [](const Term& g) { return g.kind() == TermKind::List2; });
  });
  if (!hit) return false;
  const Term& x = hit->item;
  auto used = all_names(w.t);
  Term occ = Term::co_app(x.co_name(), x.anchor());
  std::vector<Term> guarded;
  std::vector<CoName> guards;
  TermMap map;
  bool split = false;
  for (std::size_t i = 0; i < x.guarded().size(); ++i) {
    const Term& g = x.guarded()[i];
    if (split || g.kind() != TermKind::List2) {
      guarded.push_back(g);
      guards.push_back(x.guards()[i]);
      continue;
    }
    split = true;
    CoName g0 = fresh_name(used, "s");
    CoName g1 = fresh_name(used, "s");
    guarded.push_back(g.child(0));
    guards.push_back(g0);
    guarded.push_back(g.child(1));
    guards.push_back(g1);
    map.emplace(Term::co_app(x.guards()[i], occ),
                Term::list2(Term::co_app(g0, occ), Term::co_app(g1, occ)));
  }
  Term next = x.with_store_items(std::vector<Term>(x.stored().begin(), x.stored().end()),
                                 std::move(guarded), std::move(guards));
  map.emplace(Term::connect_to(x), Term::connect_to(next));
  remove_from_node(w.t, hit->boxes, x, next);
  detail::replace_everywhere(w.t, map);
  return true;
}

bool algebra1(Work& w) {
  auto hit = find_item(w.t, [](const Term& x) {
    if (x.kind() != TermKind::Store || x.arity() < 3) return false;
    return std::any_of(x.guarded().begin(), x.guarded().end(),
                       [](const Term& g) { return g.kind() == TermKind::ConnectTo; });
  });
  if (!hit) return false;
  const Term& x = hit->item;
  Term occ = Term::co_app(x.co_name(), x.anchor());
  Term link = Term::connect_to(detail::node_variable(w.t, hit->boxes));
  std::vector<Term> guarded;
  std::vector<CoName> guards;
  TermMap map;
  bool dropped = false;
  for (std::size_t i = 0; i < x.guarded().size(); ++i) {
    const Term& g = x.guarded()[i];
    if (!dropped && g.kind() == TermKind::ConnectTo) {
      dropped = true;
      map.emplace(Term::co_app(x.guards()[i], occ), link);
      continue;
    }
    guarded.push_back(g);
    guards.push_back(x.guards()[i]);
  }
  Term next = x.with_store_items(std::vector<Term>(x.stored().begin(), x.stored().end()),
                                 std::move(guarded), std::move(guards));
  map.emplace(Term::connect_to(x), Term::connect_to(next));
  remove_from_node(w.t, hit->boxes, x, next);
  detail::replace_everywhere(w.t, map);
  return true;
}

// A box anchored at a guard occurrence of a sibling box moves inside that
// sibling, where its anchor becomes the guarded term itself.
bool commute(Work& w) {
  std::optional<std::vector<std::size_t>> where;
  Term outer = Term::nil();
  Term inner = Term::nil();
  std::size_t guard_index = 0;
  detail::for_each_node(w.t, [&](const std::vector<std::size_t>& boxes, const std::vector<Term>& items) {
    if (where) return;
    for (const Term& s2 : items) {
      if (s2.kind() != TermKind::Store || s2.anchor().kind() != TermKind::CoApp) continue;
      const Term& occ = s2.anchor().child(0);
      for (const Term& s1 : items) {
        if (s1.kind() != TermKind::Store || s1 == s2) continue;
        if (!(occ == Term::co_app(s1.co_name(), s1.anchor()))) continue;
        for (std::size_t g = 0; g < s1.guards().size(); ++g) {
          if (s1.guards()[g].name == s2.anchor().name()) {
            where = boxes;
            outer = s1;
            inner = s2;
            guard_index = g;
            return;
          }
        }
      }
    }
  });
  if (!where) return false;
  auto used = all_names(w.t);
  const Term& n1 = outer.guarded()[guard_index];
  Term occ1 = Term::co_app(outer.co_name(), outer.anchor());
  Term occ2 = Term::co_app(inner.co_name(), inner.anchor());
  Term new_occ2 = Term::co_app(inner.co_name(), n1);
  TermMap reanchor{{occ2, new_occ2}};
  std::vector<Term> in_stored;
  std::vector<Term> in_guarded;
  for (const Term& s : inner.stored()) in_stored.push_back(replace_subterms(s, reanchor));
  for (const Term& g : inner.guarded()) in_guarded.push_back(replace_subterms(g, reanchor));
  Term moved = Term::store(std::move(in_stored), std::move(in_guarded),
                           std::vector<CoName>(inner.guards().begin(), inner.guards().end()),
                           inner.co_name(), n1);
  std::vector<Term> stored(outer.stored().begin(), outer.stored().end());
  stored.push_back(moved);
  std::vector<Term> guarded;
  std::vector<CoName> guards;
  for (std::size_t g = 0; g < outer.guards().size(); ++g) {
    if (g == guard_index) continue;
    guarded.push_back(outer.guarded()[g]);
    guards.push_back(outer.guards()[g]);
  }
  TermMap global;
  for (const CoName& g2 : inner.guards()) {
    CoName h = fresh_name(used, "h");
    guarded.push_back(Term::co_app(g2, new_occ2));
    guards.push_back(h);
    global.emplace(Term::co_app(g2, occ2), Term::co_app(h, occ1));
  }
  Term merged = Term::store(std::move(stored), std::move(guarded), std::move(guards),
                            outer.co_name(), outer.anchor());
  Term link = Term::connect_to(detail::node_variable(w.t, *where));
  remove_from_node(w.t, *where, inner);
  remove_from_node(w.t, *where, outer, merged);
  global.emplace(Term::connect_to(inner), link);
  global.emplace(Term::connect_to(outer), Term::connect_to(merged));
  detail::replace_everywhere(w.t, global);
  return true;
}

bool rewire(Work& w) {
  auto local = detail::local_items(w.t);
  bool changed = false;
  for (Term& item : local) {
    Term next = map_bottom_up(item, [](const Term& n) {
      if (n.kind() != TermKind::ConnectTo) return n;
      auto fv = free_vars(n.child(0));
      if (fv.size() != 1) return n;
      Term v = Term::var(*fv.begin());
      return n.child(0) == v ? n : Term::connect_to(v);
    });
    if (!(next == item)) {
      item = next;
      changed = true;
    }
  }
  if (changed) {
    auto tags = w.t.tags;
    w.t = detail::track(w.t.var, local);
    w.t.tags = std::move(tags);
  }
  return changed;
}

bool beta(Work& w) { return detail::normalize_tracked(w.t, kDefaultFuel) > 0; }

void check_slots(const Work& w) {
  std::size_t slots = 0;
  for (std::size_t i = 0; i < w.t.items.size(); ++i) {
    if (!w.is_slot(i)) continue;
    ++slots;
    if (w.t.items[i].is_p_term()) {
      throw Error(ErrorCode::SequentMismatch, "a succedent slot became a p-term");
    }
  }
  if (slots != w.formulas.size()) {
    throw Error(ErrorCode::SequentMismatch, "canonicalization lost a succedent slot");
  }
}

Sequent to_sequent(const Work& w, const Formula& antecedent) {
  auto local = detail::local_items(w.t);
  Sequent s{w.t.var, antecedent, {}, {}};
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (w.is_slot(i)) {
      s.succedent.push_back({local[i], w.formula_of(i)});
    } else {
      s.control.push_back(local[i]);
    }
  }
  return s;
}

Sequent from_items(const Sequent& like, const std::vector<LabeledTerm>& items) {
  Sequent s{like.var, like.antecedent, {}, {}};
  for (const LabeledTerm& it : items) {
    if (it.label == "|") {
      s.control.push_back(it.term);
    } else {
      s.succedent.push_back({it.term, parse_formula(std::string_view(it.label).substr(1))});
    }
  }
  return s;
}

Sequent monoid_sequent(const Sequent& s) {
  Sequent out = s;
  for (Term& t : out.control) t = map_bottom_up(t, monoid_node);
  for (Slot& sl : out.succedent) sl.term = map_bottom_up(sl.term, monoid_node);
  return out;
}

}  // namespace

CanonicalForm canonicalize(const Sequent& s) {
  Work w;
  w.n_control = s.control.size();
  for (const Slot& sl : s.succedent) w.formulas.push_back(sl.formula);
  w.t = detail::track(s.var, s.flat());

  struct Phase {
    const char* name;
    bool (*run)(Work&);
  };
  static const Phase kPhases[] = {
      {"beta", beta},
      {"monoid", monoid},
      {"algebra-2", algebra2},
      {"algebra-1", algebra1},
      {"storage-commutation", commute},
      {"par-eta", par_eta},
      {"sub-eta", sub_eta},
      {"bot-eta", bot_eta},
      {"monad", monad},
      {"rewiring", rewire},
  };
  for (std::size_t round = 0;; ++round) {
    if (round == kMaxRounds) {
      throw Error(ErrorCode::FuelExhausted, "canonicalization did not stabilize");
    }
    bool any = false;
    for (const Phase& p : kPhases) {
      if (p.run(w)) {
        w.note(p.name);
        check_slots(w);
        any = true;
        break;
      }
    }
    if (!any) break;
  }

  Sequent seq = to_sequent(w, s.antecedent);
  std::vector<std::string> key;
  for (int i = 0; i < 6; ++i) {
    auto items = alpha_canonical(sequent_items(seq));
    Sequent next = monoid_sequent(from_items(seq, items));
    auto next_key = alpha_key(sequent_items(next));
    seq = from_items(next, alpha_canonical(sequent_items(next)));
    if (next_key == key) break;
    key = std::move(next_key);
  }
  CanonicalForm out{seq, seq.context(), w.provenance, key};
  return out;
}

CanonicalForm canonicalize(const Derivation& d) { return canonicalize(d.sequent()); }

namespace {

Sequent rename_root(const Sequent& s, const VarName& to) {
  if (s.var == to) return s;
  Term v = Term::var(to);
  Sequent out{to, s.antecedent, {}, {}};
  for (const Term& t : s.control) out.control.push_back(substitute(t, s.var, v));
  for (const Slot& sl : s.succedent) out.succedent.push_back({substitute(sl.term, s.var, v), sl.formula});
  return out;
}

}  // namespace

Comparison compare_mod_theory(const Derivation& d1, const Derivation& d2) {
  const Sequent& a = d1.sequent();
  Sequent b = rename_root(d2.sequent(), a.var);
  if (!same_formulas(a, b)) {
    throw Error(ErrorCode::SequentMismatch,
                "conclusions differ: " + print_sequent(a) + " versus " + print_sequent(b));
  }
  Comparison c{false, canonicalize(a), canonicalize(b)};
  c.equal = c.left.key == c.right.key;
  return c;
}

bool equal_mod_theory(const Derivation& d1, const Derivation& d2) {
  return compare_mod_theory(d1, d2).equal;
}

const std::vector<Law>& builtin_laws() {
  static const std::vector<Law> laws = {
      {"Dereliction-Storage",
       "(define box (der (sub-elim (axiom x sub(a, b)) (sub-intro (axiom u a) (axiom w b) 0) 0 1) 0))"
       " (store (der (axiom v sub(a, b)) 0) box 0)",
       "(define box (der (sub-elim (axiom x sub(a, b)) (sub-intro (axiom u a) (axiom w b) 0) 0 1) 0))"
       " (cut (axiom v sub(a, b)) box 0)"},
      {"Contraction-Storage",
       "(define d (par-elim (axiom v par(?c, ?c)) (axiom y ?c) (axiom w ?c) 0))"
       " (store (contr d 0 1) (der (axiom x c) 0) 0)",
       "(define d (par-elim (axiom v par(?c, ?c)) (axiom y ?c) (axiom w ?c) 0))"
       " (contr (store (store d (der (axiom x c) 0) 0) (der (axiom x c) 0) 1) 0 1)"},
      {"Weakening-Storage", "(store (weak (axiom v a) c 0) (der (axiom x c) 0) 1)",
       "(weak (axiom v a) c 0)"},
      {"Monad",
       "(cut (store (axiom z ?a) (der (der (axiom x a) 0) 0) 0) (store (axiom t ?(?a)) (axiom x ?a) 0) 0)",
       "(axiom z ?a)"},
      {"Algebra 1", "(store (axiom v ?c) (weak (der (axiom x c) 0) a 0) 0)",
       "(weak (store (axiom v ?c) (der (axiom x c) 0) 0) a 1)"},
      {"Algebra 2",
       "(store (axiom v ?(par(a, a)))"
       " (contr (der (der (par-elim (axiom x par(a, a)) (axiom y a) (axiom w a) 0) 0) 1) 0 1) 0)",
       "(contr (store (axiom v ?(par(a, a)))"
       " (der (der (par-elim (axiom x par(a, a)) (axiom y a) (axiom w a) 0) 0) 1) 0) 0 1)"},
      {"Monoid 1", "(contr (weak (axiom v ?c) c 0) 0 1)", "(axiom v ?c)"},
      {"Monoid 2", "(contr (weak (axiom v ?c) c 0) 1 0)", "(axiom v ?c)"},
      {"Monoid 3", "(contr (par-elim (axiom v par(?c, ?c)) (axiom y ?c) (axiom w ?c) 0) 0 1)",
       "(contr (par-elim (axiom v par(?c, ?c)) (axiom y ?c) (axiom w ?c) 0) 1 0)"},
      {"Monoid 4",
       "(define d (par-elim (axiom v par(?c, par(?c, ?c))) (axiom y ?c)"
       " (par-left w (axiom p ?c) (axiom q ?c)) 0))"
       " (contr (contr d 0 1) 0 1)",
       "(define d (par-elim (axiom v par(?c, par(?c, ?c))) (axiom y ?c)"
       " (par-left w (axiom p ?c) (axiom q ?c)) 0))"
       " (contr (contr d 1 2) 0 1)"},
      {"par-beta",
       "(define d (par-elim (axiom x par(a, b)) (axiom y a) (axiom w b) 0))"
       " (par-elim (par-intro d 0 1) (axiom p a) (axiom q b) 0)",
       "(par-elim (axiom x par(a, b)) (axiom y a) (axiom w b) 0)"},
      {"par-eta", "(par-intro (par-elim (axiom x par(a, b)) (axiom y a) (axiom w b) 0) 0 1)",
       "(axiom x par(a, b))"},
      {"sub-beta",
       "(sub-elim (sub-intro (axiom x a) (axiom y b) 0) (sub-intro (axiom u a) (axiom w b) 0) 0 1)",
       "(sub-intro (axiom x a) (axiom y b) 0)"},
      {"sub-eta", "(sub-elim (axiom x sub(a, b)) (sub-intro (axiom u a) (axiom w b) 0) 0 1)",
       "(axiom x sub(a, b))"},
      {"bot-beta", "(cut (bot-intro (axiom x a) 0) (bot-elim y) 1)", "(axiom x a)"},
      {"bot-eta", "(bot-intro (bot-elim x) 0)", "(axiom x bot)"},
  };
  return laws;
}

std::vector<LawResult> verify_builtin_laws() {
  std::vector<LawResult> out;
  for (const Law& law : builtin_laws()) {
    LawResult r{law.name, false, "", "", ""};
    try {
      Derivation l = elaborate_script(law.lhs);
      Derivation rr = elaborate_script(law.rhs);
      for (const Derivation* d : {&l, &rr}) {
        auto report = check(*d);
        if (!report.ok()) throw Error(ErrorCode::RuleMismatch, report.to_string());
      }
      Comparison c = compare_mod_theory(l, rr);
      r.pass = c.equal;
      r.lhs = print_sequent(c.left.sequent);
      r.rhs = print_sequent(c.right.sequent);
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string laws_to_json(const std::vector<LawResult>& results) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const LawResult& r : results) {
    nlohmann::ordered_json row;
    row["law"] = r.name;
    row["status"] = r.pass ? "pass" : "fail";
    if (!r.pass) {
      row["counterexample"] = {{"lhs", r.lhs}, {"rhs", r.rhs}};
      if (!r.error.empty()) row["error"] = r.error;
    }
    rows.push_back(std::move(row));
  }
  return rows.dump(2);
}

}  // namespace coill

#include "coill/reduce.hpp"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"

#include "engine.hpp"

namespace coill {

std::string_view redex_kind_name(RedexKind kind) {
  switch (kind) {
    case RedexKind::LocalPostpConnect: return "LocalPostpConnect";
    case RedexKind::LocalCasel: return "LocalCasel";
    case RedexKind::LocalCaser: return "LocalCaser";
    case RedexKind::PostpMkc: return "PostpMkc";
    case RedexKind::StoreDereliction: return "StoreDereliction";
    case RedexKind::StoreWeakening: return "StoreWeakening";
    case RedexKind::StoreContraction: return "StoreContraction";
  }
  return "?";
}

std::string print_site(const Site& s) {
  std::string out;
  for (std::size_t b : s.boxes) out += "box " + std::to_string(b) + " > ";
  out += "component " + std::to_string(s.component);
  if (!s.path.empty()) {
    out += " path";
    for (std::size_t p : s.path) out += " " + std::to_string(p);
  }
  return out;
}

namespace detail {

Tracked track(const VarName& var, const std::vector<Term>& local) {
  Tracked t{var, {}, {}};
  for (std::size_t i = 0; i < local.size(); ++i) {
    t.items.push_back(to_remote(local[i]));
    t.tags.push_back(static_cast<int>(i));
  }
  return t;
}

std::vector<Term> local_items(const Tracked& t) {
  std::vector<Term> out;
  for (const Term& r : t.items) out.push_back(to_local(r));
  return out;
}

namespace {

std::vector<Term> box_items(const Term& box) {
  std::vector<Term> items(box.stored().begin(), box.stored().end());
  items.insert(items.end(), box.guarded().begin(), box.guarded().end());
  return items;
}

Term rebuild_box(const Term& box, const std::vector<Term>& items) {
  std::vector<Term> stored;
  std::vector<Term> guarded;
  for (const Term& t : items) (t.is_p_term() ? stored : guarded).push_back(t);
  if (guarded.size() != box.guards().size()) {
    throw Error(ErrorCode::IllFormed, "box edit changed the number of guarded terms");
  }
  return box.with_store_items(std::move(stored), std::move(guarded),
                              std::vector<CoName>(box.guards().begin(), box.guards().end()));
}

Term box_at(const Tracked& t, const std::vector<std::size_t>& boxes) {
  std::vector<Term> items = t.items;
  Term holder = Term::nil();
  for (std::size_t b : boxes) {
    if (b >= items.size() || items[b].kind() != TermKind::Store) {
      throw Error(ErrorCode::StaleRedex, "box path does not lead to a store");
    }
    holder = items[b];
    items = box_items(holder);
  }
  return holder;
}

Term edit_box(const Term& box, std::span<const std::size_t> rest, const NodeEdit& edit) {
  std::vector<Term> items = box_items(box);
  if (rest.empty()) {
    edit(items, nullptr);
  } else {
    if (rest[0] >= items.size() || items[rest[0]].kind() != TermKind::Store) {
      throw Error(ErrorCode::StaleRedex, "box path does not lead to a store");
    }
    items[rest[0]] = edit_box(items[rest[0]], rest.subspan(1), edit);
  }
  return rebuild_box(box, items);
}

}  // namespace

std::vector<Term> node_items(const Tracked& t, const std::vector<std::size_t>& boxes) {
  if (boxes.empty()) return t.items;
  return box_items(box_at(t, boxes));
}

Term node_variable(const Tracked& t, const std::vector<std::size_t>& boxes) {
  if (boxes.empty()) return Term::var(t.var);
  Term box = box_at(t, boxes);
  return Term::co_app(box.co_name(), box.anchor());
}

void edit_node(Tracked& t, const std::vector<std::size_t>& boxes, const NodeEdit& edit) {
  if (boxes.empty()) {
    edit(t.items, &t.tags);
    return;
  }
  if (boxes[0] >= t.items.size() || t.items[boxes[0]].kind() != TermKind::Store) {
    throw Error(ErrorCode::StaleRedex, "box path does not lead to a store");
  }
  t.items[boxes[0]] =
      edit_box(t.items[boxes[0]], std::span<const std::size_t>(boxes).subspan(1), edit);
}

void replace_everywhere(Tracked& t, const TermMap& map) {
  for (Term& item : t.items) item = replace_subterms(item, map);
}

void for_each_node(const Tracked& t,
                   const std::function<void(const std::vector<std::size_t>&,
                                            const std::vector<Term>&)>& f) {
  std::vector<std::size_t> boxes;
  std::function<void(const std::vector<Term>&)> go = [&](const std::vector<Term>& items) {
    f(boxes, items);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].kind() != TermKind::Store) continue;
      boxes.push_back(i);
      go(box_items(items[i]));
      boxes.pop_back();
    }
  };
  go(t.items);
}

namespace {

std::optional<RedexKind> classify(const Term& local) {
  switch (local.kind()) {
    case TermKind::Postp1:
      if (local.child(0).kind() == TermKind::ConnectTo) return RedexKind::LocalPostpConnect;
      return std::nullopt;
    case TermKind::Casel:
      if (local.child(0).kind() == TermKind::Par) return RedexKind::LocalCasel;
      return std::nullopt;
    case TermKind::Caser:
      if (local.child(0).kind() == TermKind::Par) return RedexKind::LocalCaser;
      return std::nullopt;
    case TermKind::Postp2:
      if (local.anchor().kind() == TermKind::Mkc) return RedexKind::PostpMkc;
      return std::nullopt;
    case TermKind::Store:
      switch (local.anchor().kind()) {
        case TermKind::List1: return RedexKind::StoreDereliction;
        case TermKind::ConnectTo: return RedexKind::StoreWeakening;
        case TermKind::List2: return RedexKind::StoreContraction;
        default: return std::nullopt;
      }
    default:
      return std::nullopt;
  }
}

struct Scanner {
  std::vector<Found> out;
  std::unordered_set<Term, TermHash> seen;
  std::vector<std::size_t> boxes;

  void node(const std::vector<Term>& local, const std::vector<Term>& remote) {
    for (std::size_t c = 0; c < local.size(); ++c) {
      std::vector<std::size_t> path;
      term(local[c], remote[c], c, path);
    }
    for (std::size_t c = 0; c < local.size(); ++c) {
      if (local[c].kind() != TermKind::Store) continue;
      boxes.push_back(c);
      node(box_items(local[c]), box_items(remote[c]));
      boxes.pop_back();
    }
  }

  void term(const Term& l, const Term& r, std::size_t component, std::vector<std::size_t>& path) {
    if (auto kind = classify(l)) {
      if (seen.insert(r).second) out.push_back({{*kind, {boxes, component, path}}, r});
    }
    switch (l.kind()) {
      case TermKind::ConnectTo:
        return;
      case TermKind::Store: {
        std::size_t last = l.arity() - 1;
        path.push_back(last);
        term(l.anchor(), r.anchor(), component, path);
        path.pop_back();
        return;
      }
      default:
        for (std::size_t i = 0; i < l.arity(); ++i) {
          path.push_back(i);
          term(l.child(i), r.child(i), component, path);
          path.pop_back();
        }
    }
  }
};

void remove_item(std::vector<Term>& items, std::vector<int>* tags, const Term& x) {
  auto it = std::find(items.begin(), items.end(), x);
  if (it == items.end()) throw Error(ErrorCode::StaleRedex, "redex is not a component of its node");
  if (tags) tags->erase(tags->begin() + (it - items.begin()));
  items.erase(it);
}

void add_items(std::vector<Term>& items, std::vector<int>* tags, const std::vector<Term>& more) {
  for (const Term& m : more) {
    items.push_back(m);
    if (tags) tags->push_back(-1);
  }
}

}  // namespace

std::vector<Found> find_tracked(const Tracked& t) {
  Scanner s;
  s.node(local_items(t), t.items);
  return std::move(s.out);
}

void apply_tracked(Tracked& t, const Found& f) {
  const Term& x = f.remote;
  const std::vector<std::size_t>& boxes = f.redex.site.boxes;
  Term link_target = Term::connect_to(node_variable(t, boxes));
  TermMap global;
  switch (f.redex.kind) {
    case RedexKind::LocalCasel:
      global.emplace(x, x.child(0).child(0));
      break;
    case RedexKind::LocalCaser:
      global.emplace(x, x.child(0).child(1));
      break;
    case RedexKind::LocalPostpConnect:
      edit_node(t, boxes, [&](std::vector<Term>& items, std::vector<int>* tags) {
        remove_item(items, tags, x);
      });
      global.emplace(Term::connect_to(x), link_target);
      break;
    case RedexKind::PostpMkc: {
      const Term& mkc = x.anchor();
      const Term& m = mkc.child(0);
      TermMap inner{{Term::co_app(x.co_name(), mkc), m}};
      edit_node(t, boxes, [&](std::vector<Term>& items, std::vector<int>* tags) {
        remove_item(items, tags, x);
      });
      global.emplace(Term::co_app(mkc.co_name(), m), replace_subterms(x.body(), inner));
      global.emplace(Term::co_app(x.co_name(), mkc), m);
      global.emplace(Term::connect_to(x), link_target);
      break;
    }
    case RedexKind::StoreDereliction:
    case RedexKind::StoreWeakening:
    case RedexKind::StoreContraction: {
      const Term& a = x.anchor();
      Term occ = Term::co_app(x.co_name(), a);
      auto guard_occ = [&](std::size_t i, const Term& bound_occ) {
        return Term::co_app(x.guards()[i], bound_occ);
      };
      auto reanchored = [&](const Term& new_anchor) {
        TermMap m{{occ, Term::co_app(x.co_name(), new_anchor)}};
        std::vector<Term> stored;
        std::vector<Term> guarded;
        for (const Term& s : x.stored()) stored.push_back(replace_subterms(s, m));
        for (const Term& g : x.guarded()) guarded.push_back(replace_subterms(g, m));
        return Term::store(std::move(stored), std::move(guarded),
                           std::vector<CoName>(x.guards().begin(), x.guards().end()), x.co_name(),
                           new_anchor);
      };
      std::vector<Term> added;
      if (f.redex.kind == RedexKind::StoreDereliction) {
        const Term& m = a.child(0);
        TermMap inner{{occ, m}};
        for (const Term& s : x.stored()) added.push_back(replace_subterms(s, inner));
        for (std::size_t i = 0; i < x.guards().size(); ++i) {
          global.emplace(guard_occ(i, occ), replace_subterms(x.guarded()[i], inner));
        }
      } else if (f.redex.kind == RedexKind::StoreWeakening) {
        for (std::size_t i = 0; i < x.guards().size(); ++i) global.emplace(guard_occ(i, occ), a);
      } else {
        const Term& a0 = a.child(0);
        const Term& a1 = a.child(1);
        added = {reanchored(a0), reanchored(a1)};
        for (std::size_t i = 0; i < x.guards().size(); ++i) {
          global.emplace(guard_occ(i, occ),
                         Term::list2(guard_occ(i, Term::co_app(x.co_name(), a0)),
                                     guard_occ(i, Term::co_app(x.co_name(), a1))));
        }
      }
      edit_node(t, boxes, [&](std::vector<Term>& items, std::vector<int>* tags) {
        remove_item(items, tags, x);
        add_items(items, tags, added);
      });
      global.emplace(Term::connect_to(x), link_target);
      break;
    }
  }
  replace_everywhere(t, global);
  for (std::size_t i = t.items.size(); i-- > 0;) {
    if (t.items[i].kind() == TermKind::Nil) {
      t.items.erase(t.items.begin() + static_cast<std::ptrdiff_t>(i));
      t.tags.erase(t.tags.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
}

std::size_t normalize_tracked(Tracked& t, std::size_t fuel) {
  std::size_t steps = 0;
  while (true) {
    auto found = find_tracked(t);
    if (found.empty()) return steps;
    if (steps == fuel) throw FuelExhausted(fuel, {});
    apply_tracked(t, found.front());
    ++steps;
  }
}

}  // namespace detail

FuelExhausted::FuelExhausted(std::size_t fuel, Trace trace)
    : Error(ErrorCode::FuelExhausted,
            "normalization did not finish within " + std::to_string(fuel) + " steps"),
      trace_(std::move(trace)) {}

std::vector<Redex> find_redexes(const ComputationalContext& c) {
  auto t = detail::track(c.var(), c.components());
  std::vector<Redex> out;
  for (const auto& f : detail::find_tracked(t)) out.push_back(f.redex);
  return out;
}

ComputationalContext reduce_once(const ComputationalContext& c, const Redex& r) {
  auto t = detail::track(c.var(), c.components());
  auto found = detail::find_tracked(t);
  auto it = std::find_if(found.begin(), found.end(),
                         [&](const detail::Found& f) { return f.redex == r; });
  if (it == found.end()) {
    throw Error(ErrorCode::StaleRedex, std::string(redex_kind_name(r.kind)) + " at " +
                                           print_site(r.site) + " is not a redex");
  }
  detail::apply_tracked(t, *it);
  return ComputationalContext(c.var(), detail::local_items(t));
}

RedexChooser leftmost_strategy() {
  return [](const ComputationalContext&, const std::vector<Redex>&) { return std::size_t{0}; };
}

RedexChooser scripted_strategy(std::vector<std::size_t> choices) {
  auto state = std::make_shared<std::pair<std::vector<std::size_t>, std::size_t>>(
      std::move(choices), 0);
  return [state](const ComputationalContext&, const std::vector<Redex>& rs) {
    auto& [list, pos] = *state;
    if (pos >= list.size()) return std::size_t{0};
    std::size_t pick = list[pos++];
    if (pick >= rs.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "scripted choice " + std::to_string(pick) +
                                                  " but only " + std::to_string(rs.size()) +
                                                  " redexes");
    }
    return pick;
  };
}

NormalizeResult normalize(const ComputationalContext& c, std::size_t fuel,
                          const RedexChooser& strategy) {
  NormalizeResult result{c, {}};
  const RedexChooser& choose = strategy ? strategy : leftmost_strategy();
  while (true) {
    auto redexes = find_redexes(result.context);
    if (redexes.empty()) return result;
    if (result.trace.size() == fuel) throw FuelExhausted(fuel, std::move(result.trace));
    std::size_t pick = choose(result.context, redexes);
    ComputationalContext next = reduce_once(result.context, redexes.at(pick));
    result.trace.push_back({redexes[pick], result.context, next});
    result.context = std::move(next);
  }
}

std::string trace_to_jsonl(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceStep& s = trace[i];
    nlohmann::ordered_json j;
    j["step"] = i + 1;
    j["kind"] = redex_kind_name(s.redex.kind);
    j["site"] = {{"boxes", s.redex.site.boxes},
                 {"component", s.redex.site.component},
                 {"path", s.redex.site.path}};
    j["before"] = print_context(s.before);
    j["after"] = print_context(s.after);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace coill

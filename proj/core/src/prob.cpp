#include "coill/prob.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <random>
#include <thread>

#include "json.hpp"

namespace coill {

Universe::Universe(unsigned n) : size(n) {
  if (n == 0 || n > kMaxUniverse) {
    throw Error(ErrorCode::InvalidArgument,
                "universe size must be in 1.." + std::to_string(kMaxUniverse));
  }
}

Event Event::of(std::initializer_list<unsigned> points) {
  return from_points(std::vector<unsigned>(points));
}

Event Event::from_points(const std::vector<unsigned>& points) {
  Event e;
  for (unsigned p : points) {
    if (p >= kMaxUniverse) {
      throw Error(ErrorCode::AssignmentInvalid, "point " + std::to_string(p) + " out of range");
    }
    e.bits |= std::uint32_t{1} << p;
  }
  return e;
}

std::vector<unsigned> Event::points() const {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < 32; ++i) {
    if (bits & (std::uint32_t{1} << i)) out.push_back(i);
  }
  return out;
}

unsigned Event::count() const { return static_cast<unsigned>(std::popcount(bits)); }

std::string print_event(Event e) {
  std::string out = "{";
  bool first = true;
  for (unsigned p : e.points()) {
    if (!first) out += ",";
    out += std::to_string(p);
    first = false;
  }
  return out + "}";
}

Event Assignment::at(const std::string& key) const {
  auto it = events.find(key);
  return it == events.end() ? Event{} : it->second;
}

std::string ant_key(std::string_view path) { return std::string(path) + "/ant"; }
std::string slot_key(std::string_view path, std::size_t i) {
  return std::string(path) + "/s" + std::to_string(i);
}
std::string control_key(std::string_view path, std::size_t i) {
  return std::string(path) + "/c" + std::to_string(i);
}

bool is_multiplicative(const Derivation& d) {
  bool ok = true;
  for_each_node(d, [&](const Derivation& n, const std::string&) {
    switch (n.rule) {
      case Rule::Axiom:
      case Rule::Cut:
      case Rule::SubIntro:
      case Rule::SubElim:
      case Rule::SubLeft:
      case Rule::ParIntro:
      case Rule::ParElim:
      case Rule::ParLeft:
        break;
      default:
        ok = false;
    }
  });
  return ok;
}

namespace {

std::size_t arg(const Derivation& d, std::size_t k) {
  return k < d.args.size() && d.args[k] ? *d.args[k] : 0;
}

std::string child(const std::string& path, std::size_t i) { return path + "." + std::to_string(i); }

// Where each conclusion slot comes from: a premise slot, or nothing when the
// rule builds the slot itself.
struct Source {
  std::optional<std::size_t> premise;
  std::size_t slot = 0;
};

std::vector<Source> carry(const Derivation& d) {
  std::vector<Source> out;
  auto all_but = [&](std::size_t p, std::optional<std::size_t> skip) {
    std::size_t n = d.premises[p].sequent().succedent.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (skip && *skip == i) continue;
      out.push_back({p, i});
    }
  };
  switch (d.rule) {
    case Rule::Axiom:
      out.push_back({});
      break;
    case Rule::Cut:
      all_but(0, arg(d, 0));
      all_but(1, std::nullopt);
      break;
    case Rule::SubIntro:
      all_but(0, std::nullopt);
      out[arg(d, 0)] = {};
      all_but(1, std::nullopt);
      break;
    case Rule::SubElim:
      all_but(0, arg(d, 0));
      all_but(1, arg(d, 1));
      break;
    case Rule::SubLeft:
      all_but(0, arg(d, 0));
      break;
    case Rule::ParIntro: {
      std::size_t lo = std::min(arg(d, 0), arg(d, 1));
      std::size_t hi = std::max(arg(d, 0), arg(d, 1));
      all_but(0, hi);
      out[lo] = {};
      break;
    }
    case Rule::ParElim:
      all_but(0, arg(d, 0));
      all_but(1, std::nullopt);
      all_but(2, std::nullopt);
      break;
    case Rule::ParLeft:
      all_but(0, std::nullopt);
      all_but(1, std::nullopt);
      break;
    default:
      throw Error(ErrorCode::NotMultiplicative,
                  std::string(rule_name(d.rule)) + " is outside the multiplicative fragment");
  }
  return out;
}

void require_multiplicative(const Derivation& d) {
  for_each_node(d, [](const Derivation& n, const std::string& path) {
    if (!is_multiplicative(n.rule) || n.rule == Rule::BotIntro || n.rule == Rule::BotElim) {
      throw Error(ErrorCode::NotMultiplicative,
                  std::string(rule_name(n.rule)) + " at " + path + " is outside the multiplicative fragment");
    }
  });
}

class Checker {
 public:
  explicit Checker(const Assignment& a) : a_(a) {}

  void run(const Derivation& d, const std::string& p) {
    for (std::size_t i = 0; i < d.premises.size(); ++i) run(d.premises[i], child(p, i));
    const Sequent& s = d.sequent();
    for (std::size_t i = 0; i < s.control.size(); ++i) {
      if (!a_.at(control_key(p, i)).empty()) issue("p-term", p, control_key(p, i) + " must be empty");
    }
    const std::vector<Source> src = carry(d);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (!src[i].premise) continue;
      std::string from = slot_key(child(p, *src[i].premise), src[i].slot);
      equal("carry", p, slot_key(p, i), a_.at(slot_key(p, i)), from, a_.at(from));
    }
    Event ant = a_.at(ant_key(p));
    auto pant = [&](std::size_t k) { return a_.at(ant_key(child(p, k))); };
    auto pslot = [&](std::size_t k, std::size_t i) { return a_.at(slot_key(child(p, k), i)); };
    switch (d.rule) {
      case Rule::Axiom:
        subset("axiom", p, ant, a_.at(slot_key(p, 0)));
        break;
      case Rule::Cut:
        equal("antecedent", p, ant_key(p), ant, ant_key(child(p, 0)), pant(0));
        subset("cut", p, pslot(0, arg(d, 0)), pant(1));
        break;
      case Rule::SubIntro: {
        equal("antecedent", p, ant_key(p), ant, ant_key(child(p, 0)), pant(0));
        Event want = pslot(0, arg(d, 0)) & a_.complement(pant(1));
        Event got = a_.at(slot_key(p, arg(d, 0)));
        if (!(got == want)) {
          issue("mkc", p, slot_key(p, arg(d, 0)) + " is " + print_event(got) + ", expected " + print_event(want));
        }
        break;
      }
      case Rule::SubElim:
        equal("antecedent", p, ant_key(p), ant, ant_key(child(p, 0)), pant(0));
        subset("sub-elim", p, pslot(0, arg(d, 0)), pant(1) & a_.complement(pslot(1, arg(d, 1))));
        break;
      case Rule::SubLeft:
        subset("sub-left", p, ant, pant(0) & a_.complement(pslot(0, arg(d, 0))));
        break;
      case Rule::ParIntro: {
        equal("antecedent", p, ant_key(p), ant, ant_key(child(p, 0)), pant(0));
        std::size_t lo = std::min(arg(d, 0), arg(d, 1));
        Event want = pslot(0, arg(d, 0)) | pslot(0, arg(d, 1));
        Event got = a_.at(slot_key(p, lo));
        if (!(got == want)) {
          issue("par", p, slot_key(p, lo) + " is " + print_event(got) + ", expected " + print_event(want));
        }
        break;
      }
      case Rule::ParElim: {
        equal("antecedent", p, ant_key(p), ant, ant_key(child(p, 0)), pant(0));
        Event whole = pslot(0, arg(d, 0));
        subset("casel", p, pant(1), whole);
        subset("caser", p, pant(2), whole);
        subset("par-cover", p, whole, pant(1) | pant(2));
        break;
      }
      case Rule::ParLeft:
        if (!(ant == (pant(0) | pant(1)))) {
          issue("par-left", p, ant_key(p) + " must be the union of the premise antecedents");
        }
        break;
      default:
        break;
    }
  }

  CheckReport report;

 private:
  void issue(const std::string& code, const std::string& path, const std::string& message) {
    report.issues.push_back({code, path, message});
  }
  void subset(const char* row, const std::string& path, Event small, Event big) {
    if (!small.subset_of(big)) {
      issue(row, path, print_event(small) + " is not included in " + print_event(big));
    }
  }
  void equal(const char* row, const std::string& path, const std::string& k1, Event e1,
             const std::string& k2, Event e2) {
    if (!(e1 == e2)) {
      issue(row, path, k1 + " = " + print_event(e1) + " differs from " + k2 + " = " + print_event(e2));
    }
  }

  const Assignment& a_;
};

struct Decomposer {
  const Assignment& a;
  ParSplit split;

  std::vector<Event> run(const Derivation& d, const std::string& p) const {
    auto pant = [&](std::size_t k) { return a.at(ant_key(child(p, k))); };
    auto sub = [&](std::size_t k) { return run(d.premises[k], child(p, k)); };
    auto restrict = [](std::vector<Event> es, Event by) {
      for (Event& e : es) e = e & by;
      return es;
    };
    auto append = [](std::vector<Event>& to, const std::vector<Event>& from) {
      to.insert(to.end(), from.begin(), from.end());
    };
    auto without = [](std::vector<Event> es, std::size_t i) {
      es.erase(es.begin() + static_cast<std::ptrdiff_t>(i));
      return es;
    };
    switch (d.rule) {
      case Rule::Axiom:
        return {a.at(ant_key(p))};
      case Rule::Cut: {
        auto l = sub(0);
        Event via = l[arg(d, 0)];
        auto out = without(l, arg(d, 0));
        append(out, restrict(sub(1), via));
        return out;
      }
      case Rule::SubIntro: {
        auto out = sub(0);
        Event c = out[arg(d, 0)];
        Event dd = pant(1);
        out[arg(d, 0)] = c & a.complement(dd);
        append(out, restrict(sub(1), c & dd));
        return out;
      }
      case Rule::SubElim: {
        auto l = sub(0);
        Event via = l[arg(d, 0)];
        auto out = without(l, arg(d, 0));
        append(out, restrict(without(sub(1), arg(d, 1)), via));
        return out;
      }
      case Rule::SubLeft: {
        Event c = pant(0);
        Event dd = a.at(slot_key(child(p, 0), arg(d, 0)));
        return restrict(without(sub(0), arg(d, 0)), c & a.complement(dd));
      }
      case Rule::ParIntro: {
        auto out = sub(0);
        std::size_t lo = std::min(arg(d, 0), arg(d, 1));
        std::size_t hi = std::max(arg(d, 0), arg(d, 1));
        out[lo] = out[arg(d, 0)] | out[arg(d, 1)];
        return without(out, hi);
      }
      case Rule::ParElim: {
        auto l = sub(0);
        Event via = l[arg(d, 0)];
        auto out = without(l, arg(d, 0));
        auto [left, right] = halves(pant(1), pant(2));
        append(out, restrict(sub(1), via & left));
        append(out, restrict(sub(2), via & right));
        return out;
      }
      case Rule::ParLeft: {
        auto [left, right] = halves(pant(0), pant(1));
        auto out = restrict(sub(0), left);
        append(out, restrict(sub(1), right));
        return out;
      }
      default:
        throw Error(ErrorCode::NotMultiplicative, std::string(rule_name(d.rule)));
    }
  }

  std::pair<Event, Event> halves(Event c0, Event c1) const {
    if (split == ParSplit::KeepLeft) return {c0, c1 & a.complement(c0)};
    return {c0 & a.complement(c1), c1};
  }
};

// Top-down generator. `avoid[i]` asks (best effort) that conclusion slot i
// stay disjoint from the given event; the caller validates the result.
class Generator {
 public:
  Generator(Assignment& a, std::mt19937_64& rng) : a_(a), rng_(rng) {}

  void run(const Derivation& d, const std::string& p, Event ant, const std::vector<Event>& avoid) {
    a_.events[ant_key(p)] = ant;
    const Sequent& s = d.sequent();
    for (std::size_t i = 0; i < s.control.size(); ++i) a_.events[control_key(p, i)] = Event{};
    const std::vector<Source> src = carry(d);
    auto avoid_of = [&](std::size_t k) {
      std::vector<Event> out(d.premises[k].sequent().succedent.size());
      for (std::size_t i = 0; i < src.size() && i < avoid.size(); ++i) {
        if (src[i].premise && *src[i].premise == k) out[src[i].slot] = out[src[i].slot] | avoid[i];
      }
      return out;
    };
    auto want = [&](std::size_t i) { return i < avoid.size() ? avoid[i] : Event{}; };
    auto slot = [&](std::size_t k, std::size_t i) { return a_.at(slot_key(child(p, k), i)); };

    switch (d.rule) {
      case Rule::Axiom:
        a_.events[slot_key(p, 0)] = ant | (noise() & a_.complement(want(0)));
        return;
      case Rule::Cut: {
        run(d.premises[0], child(p, 0), ant, avoid_of(0));
        run(d.premises[1], child(p, 1), slot(0, arg(d, 0)) | sparse(), avoid_of(1));
        break;
      }
      case Rule::SubIntro: {
        std::size_t i = arg(d, 0);
        auto av0 = avoid_of(0);
        run(d.premises[0], child(p, 0), ant, av0);
        auto av1 = avoid_of(1);
        Event blocked;
        for (Event e : av1) blocked = blocked | e;
        Event dd = (noise() & a_.complement(blocked)) | (slot(0, i) & want(i));
        run(d.premises[1], child(p, 1), dd, av1);
        a_.events[slot_key(p, i)] = slot(0, i) & a_.complement(dd);
        break;
      }
      case Rule::SubElim: {
        run(d.premises[0], child(p, 0), ant, avoid_of(0));
        Event via = slot(0, arg(d, 0));
        auto av1 = avoid_of(1);
        av1[arg(d, 1)] = av1[arg(d, 1)] | via;
        run(d.premises[1], child(p, 1), via | (sparse() & a_.complement(via)), av1);
        break;
      }
      case Rule::SubLeft: {
        auto av0 = avoid_of(0);
        av0[arg(d, 0)] = av0[arg(d, 0)] | ant;
        run(d.premises[0], child(p, 0), ant | sparse(), av0);
        break;
      }
      case Rule::ParIntro: {
        auto av0 = avoid_of(0);
        std::size_t lo = std::min(arg(d, 0), arg(d, 1));
        av0[arg(d, 0)] = av0[arg(d, 0)] | want(lo);
        av0[arg(d, 1)] = av0[arg(d, 1)] | want(lo);
        run(d.premises[0], child(p, 0), ant, av0);
        a_.events[slot_key(p, lo)] = slot(0, arg(d, 0)) | slot(0, arg(d, 1));
        break;
      }
      case Rule::ParElim: {
        run(d.premises[0], child(p, 0), ant, avoid_of(0));
        auto [c0, c1] = cover(slot(0, arg(d, 0)));
        run(d.premises[1], child(p, 1), c0, avoid_of(1));
        run(d.premises[2], child(p, 2), c1, avoid_of(2));
        break;
      }
      case Rule::ParLeft: {
        auto [c0, c1] = cover(ant);
        run(d.premises[0], child(p, 0), c0, avoid_of(0));
        run(d.premises[1], child(p, 1), c1, avoid_of(1));
        break;
      }
      default:
        throw Error(ErrorCode::NotMultiplicative, std::string(rule_name(d.rule)));
    }
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i].premise) a_.events[slot_key(p, i)] = slot(*src[i].premise, src[i].slot);
    }
  }

  Event noise() { return Event{static_cast<std::uint32_t>(rng_()) & a_.universe.all()}; }
  Event sparse() { return noise() & noise(); }

 private:
  // Two events whose union is exactly `whole`.
  std::pair<Event, Event> cover(Event whole) {
    Event left = whole & noise();
    Event right = (whole & a_.complement(left)) | (left & noise());
    return {left, right};
  }

  Assignment& a_;
  std::mt19937_64& rng_;
};

Event valuate(const Formula& f, std::map<std::string, Event>& atoms, const Assignment& a,
              std::mt19937_64& rng) {
  switch (f.kind()) {
    case FormulaKind::Atom: {
      auto it = atoms.find(f.name());
      if (it == atoms.end()) {
        it = atoms.emplace(f.name(), Event{static_cast<std::uint32_t>(rng()) & a.universe.all()}).first;
      }
      return it->second;
    }
    case FormulaKind::Par:
      return valuate(f.left(), atoms, a, rng) | valuate(f.right(), atoms, a, rng);
    case FormulaKind::Sub:
      return valuate(f.left(), atoms, a, rng) & a.complement(valuate(f.right(), atoms, a, rng));
    default:
      throw Error(ErrorCode::NotMultiplicative, "formula " + print_formula(f) + " has no event reading");
  }
}

// Every judgement gets the event of its formula under one random valuation of
// the atoms; all rows then hold with equality.
Assignment valuation_assignment(const Derivation& d, Universe u, std::mt19937_64& rng) {
  Assignment a{u, {}};
  std::map<std::string, Event> atoms;
  for_each_node(d, [&](const Derivation& n, const std::string& p) {
    const Sequent& s = n.sequent();
    a.events[ant_key(p)] = valuate(s.antecedent, atoms, a, rng);
    for (std::size_t i = 0; i < s.control.size(); ++i) a.events[control_key(p, i)] = Event{};
    for (std::size_t i = 0; i < s.succedent.size(); ++i) {
      a.events[slot_key(p, i)] = valuate(s.succedent[i].formula, atoms, a, rng);
    }
  });
  return a;
}

constexpr int kAttempts = 64;

}  // namespace

CheckReport check_assignment(const Derivation& d, const Assignment& a) {
  require_multiplicative(d);
  Checker c(a);
  for (const auto& [key, e] : a.events) {
    if (!e.subset_of(Event{a.universe.all()})) {
      c.report.issues.push_back({"universe", key, print_event(e) + " leaves the universe"});
    }
  }
  c.run(d, "r");
  return c.report;
}

std::vector<Event> decompose(const Derivation& d, const Assignment& a, ParSplit split) {
  CheckReport r = check_assignment(d, a);
  if (!r.ok()) throw Error(ErrorCode::AssignmentInvalid, r.to_string());
  return Decomposer{a, split}.run(d, "r");
}

bool verify_decomposition(const Derivation& d, const Assignment& a, ParSplit split) {
  std::vector<Event> parts = decompose(d, a, split);
  const Sequent& s = d.sequent();
  if (parts.size() != s.succedent.size()) return false;
  Event all;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!parts[i].subset_of(a.at(slot_key("r", i)))) return false;
    if (!(parts[i] & all).empty()) return false;
    all = all | parts[i];
  }
  Event h = a.at(ant_key("r"));
  return (all & h) == h;
}

Assignment random_assignment(const Derivation& d, Universe u, std::uint64_t seed) {
  require_multiplicative(d);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Assignment a{u, {}};
    Generator g(a, rng);
    Event root = g.noise();
    g.run(d, "r", root, {});
    if (check_assignment(d, a).ok()) return a;
  }
  return valuation_assignment(d, u, rng);
}

std::string assignment_to_json(const Assignment& a) {
  nlohmann::ordered_json events = nlohmann::ordered_json::object();
  for (const auto& [key, e] : a.events) events[key] = e.points();
  nlohmann::ordered_json j;
  j["universe"] = a.universe.size;
  j["events"] = std::move(events);
  return j.dump(2);
}

Assignment assignment_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    Assignment a{Universe(j.at("universe").get<unsigned>()), {}};
    for (const auto& [key, pts] : j.at("events").items()) {
      a.events[key] = Event::from_points(pts.get<std::vector<unsigned>>());
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::AssignmentInvalid, std::string("bad assignment file: ") + e.what());
  }
}

SweepResult sweep(const Derivation& d, unsigned min_u, unsigned max_u, std::uint64_t seed,
                  std::size_t trials, unsigned jobs) {
  if (min_u > max_u) throw Error(ErrorCode::InvalidArgument, "empty universe range");
  require_multiplicative(d);
  std::vector<char> ok(trials, 0);
  auto work = [&](std::size_t from, std::size_t step) {
    for (std::size_t t = from; t < trials; t += step) {
      Universe u(min_u + static_cast<unsigned>(t % (max_u - min_u + 1)));
      try {
        ok[t] = verify_decomposition(d, random_assignment(d, u, seed + t)) ? 1 : 0;
      } catch (const Error&) {
        ok[t] = 0;
      }
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    for (auto& t : pool) t.join();
  }
  SweepResult r;
  r.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    if (ok[t]) {
      ++r.passed;
    } else {
      r.failing_seeds.push_back(seed + t);
    }
  }
  return r;
}

}  // namespace coill

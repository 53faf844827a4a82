#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coill/equations.hpp"
#include "coill/prob.hpp"
#include "coill/reduce.hpp"
#include "generators.hpp"

using namespace coill;
using coill::testing::DerivationGen;
using coill::testing::TermGen;
using coill::testing::read_fixture;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    }
  }
};

Derivation script(const std::string& fixture) { return elaborate_script(read_fixture(fixture)); }

Outcome example_one() {
  Outcome o;
  Derivation d = script("ex1.drv");
  o.require(print_sequent(d.sequent()) == "x:bot |> postp(x) | connect_to(postp(x)):bot",
            "typecheck gave " + print_sequent(d.sequent()));
  o.require(equal_mod_theory(d, script("bot-axiom.drv")), "not equal to the bottom axiom");
  return o;
}

Outcome example_two() {
  Outcome o;
  NormalizeResult r = normalize(parse_context(read_fixture("ex2.ctx")));
  o.require(r.trace.size() == 1, std::to_string(r.trace.size()) + " steps");
  o.require(print_context(r.context) == "context x : x", print_context(r.context));
  return o;
}

Outcome example_three() {
  Outcome o;
  ValidationReport bad = validate(parse_context(read_fixture("ex3-bad.ctx")));
  o.require(!bad.ok() && bad.has_axiom(2), "bad context not rejected by axiom 2");
  o.require(validate(parse_context(read_fixture("ex3.ctx"))).ok(), "corrected context invalid");
  Derivation d = script("ex3.drv");
  o.require(check(d).ok(), "derivation does not check");
  Sequent expected = parse_sequent(read_fixture("ex3.seq"));
  o.require(sequent_alpha_equal(d.sequent(), expected), "sequent " + print_sequent(d.sequent()));
  return o;
}

Outcome church_two_replay() {
  Outcome o;
  Derivation before = script("church-two-before.drv");
  Derivation after = script("church-two-after.drv");
  ComputationalContext c = before.sequent().context();
  std::vector<Redex> rs = find_redexes(c);
  std::size_t mkc = 0;
  for (const Redex& r : rs) mkc += r.kind == RedexKind::PostpMkc;
  o.require(mkc == 1, std::to_string(mkc) + " PostpMkc redexes");
  if (!o.pass) return o;
  std::size_t first = 0;
  while (rs[first].kind != RedexKind::PostpMkc) ++first;
  c = reduce_once(c, rs[first]);
  rs = find_redexes(c);
  o.require(!rs.empty() && rs[0].kind == RedexKind::StoreContraction, "second step is not StoreContraction");
  if (!o.pass) return o;
  c = reduce_once(c, rs[0]);
  o.require(alpha_equal(c, after.sequent().context()), "two-step result differs from the expected result");
  o.require(same_formulas(before.sequent(), after.sequent()), "start and expected result conclude different sequents");
  NormalizeResult r = normalize(c, 500);
  for (const TraceStep& s : r.trace) {
    o.require(s.after.var().name == "n", "root variable changed");
    o.require(validate(s.after).ok(), "invalid context after a step");
  }
  o.require(find_redexes(r.context).empty(), "not normal");
  return o;
}

Outcome laws() {
  Outcome o;
  std::vector<LawResult> rs = verify_builtin_laws();
  std::size_t passed = 0;
  for (const LawResult& r : rs) {
    passed += r.pass;
    o.require(r.pass, r.name + " fails");
  }
  o.require(rs.size() == 16, std::to_string(rs.size()) + " laws");
  if (o.pass) o.detail = std::to_string(passed) + "/16";
  return o;
}

Outcome monad() {
  Outcome o;
  CanonicalForm l = canonicalize(script("monad.drv"));
  CanonicalForm r = canonicalize(script("why-not-axiom.drv"));
  o.require(l.key == r.key, print_sequent(l.sequent) + " vs " + print_sequent(r.sequent));
  return o;
}

Outcome decomposition() {
  Outcome o;
  const char* fixtures[] = {"mult/subtraction-right.drv", "mult/example3.drv", "mult/par-sub-mix.drv",
                            "mult/subtraction-eta.drv",   "mult/par-beta.drv", "mult/left-rules.drv",
                            "mult/nested.drv"};
  std::size_t total = 0;
  for (const char* f : fixtures) {
    Derivation d = script(f);
    SweepResult r = sweep(d, 3, 6, 0, 200, 4);
    total += r.passed;
    o.require(r.passed == 200, std::string(f) + ": " + std::to_string(r.passed) + "/200");
  }
  if (o.pass) o.detail = std::to_string(total) + " assignments";
  return o;
}

Outcome properties() {
  Outcome o;
  constexpr int n = 300;
  const VarName names[] = {VarName{"x"}, VarName{"y"}, VarName{"z"}};
  for (int i = 0; i < n && o.pass; ++i) {
    TermGen g(1000 + i);
    Term t = g.any(4);
    Term m = g.m_term(2);
    const VarName& x = names[i % 3];
    std::set<VarName> want = free_vars(t);
    if (want.erase(x))
      for (const VarName& v : free_vars(m)) want.insert(v);
    Term r = substitute(t, x, m);
    o.require(free_vars(r) == want, "FV law: " + print_term(t));
    if (!occurs_free(t, x)) o.require(r == t, "identity substitution: " + print_term(t));
  }

  DerivationGen gen(77, {3, false});
  std::vector<Derivation> ds;
  for (int i = 0; i < n; ++i) ds.push_back(gen.next());
  for (int i = 0; i < n && o.pass; ++i) {
    ComputationalContext c = ds[i].sequent().context();
    ComputationalContext r1 = coill::testing::rename_bound(c, i);
    ComputationalContext r2 = coill::testing::rename_bound(r1, i + 1);
    const ComputationalContext other = ds[(i + 1) % n].sequent().context();
    o.require(alpha_equal(c, c) && alpha_equal(c, r1) && alpha_equal(r1, c) && alpha_equal(r1, r2) &&
                  alpha_equal(c, r2) && alpha_equal(c, other) == alpha_equal(other, c),
              "alpha laws: " + print_context(c));
  }

  DerivationGen with_redexes(123, {3, false, 0.5});
  std::vector<Derivation> rs_ds;
  for (int i = 0; i < n; ++i) rs_ds.push_back(with_redexes.next());
  std::size_t steps = 0;
  for (int i = 0; i < n && o.pass; ++i) {
    ComputationalContext c = rs_ds[i].sequent().context();
    for (int k = 0; k < 10; ++k) {
      std::vector<Redex> rs = find_redexes(c);
      if (rs.empty()) break;
      for (const Redex& r : rs) {
        ComputationalContext next = reduce_once(c, r);
        ++steps;
        o.require(validate(next).ok(), "reduct invalid: " + print_context(next));
      }
      c = reduce_once(c, rs[k % rs.size()]);
    }
  }

  for (int i = 0; i < n && o.pass; ++i) {
    for (const Derivation* d : {&ds[i], &rs_ds[i]}) {
      CanonicalForm once = canonicalize(*d);
      o.require(canonicalize(once.sequent).key == once.key, "not idempotent: " + print_script(*d));
    }
  }
  if (o.pass) o.detail = std::to_string(n) + " instances per suite, " + std::to_string(steps) + " reduction steps";
  return o;
}

Outcome girard() {
  Outcome o;
  const std::pair<const char*, const char*> rows[] = {
      {"p", "p"},
      {"f", "zero"},
      {"or(p, q)", "par(?p, ?q)"},
      {"sub(p, q)", "sub(p, ?q)"},
      {"or(sub(p, q), r)", "par(?(sub(p, ?q)), ?r)"},
      {"sub(or(p, q), r)", "sub(par(?p, ?q), ?r)"},
      {"or(p, or(q, r))", "par(?p, ?(par(?q, ?r)))"},
      {"sub(p, sub(q, r))", "sub(p, ?(sub(q, ?r)))"},
      {"or(f, p)", "par(?zero, ?p)"},
      {"sub(sub(p, q), or(r, f))", "sub(sub(p, ?q), ?(par(?r, ?zero)))"},
  };
  for (const auto& [in, want] : rows) {
    std::string got = print_formula(girard_dual(parse_plain_formula(in)));
    o.require(got == want, std::string(in) + " -> " + got);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"example 1 eta-expansion", example_one},
      {"example 2 reduction", example_two},
      {"example 3 validation and typing", example_three},
      {"church numeral two replay", church_two_replay},
      {"equational laws", laws},
      {"monad identity", monad},
      {"decomposition property", decomposition},
      {"property suites", properties},
      {"dual translation", girard},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    std::cout << "\n";
  }
  return failures == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "coill/equations.hpp"
#include "coill/prob.hpp"
#include "coill/reduce.hpp"
#include "generators.hpp"

namespace coill {
namespace {

using testing::DerivationGen;
using testing::TermGen;
using testing::read_fixture;

constexpr int kInstances = 300;

std::set<VarName> expected_fv(const Term& t, const VarName& x, const Term& m) {
  std::set<VarName> fv = free_vars(t);
  if (!fv.count(x)) return fv;
  fv.erase(x);
  for (const VarName& v : free_vars(m)) fv.insert(v);
  return fv;
}

TEST(Substitution, FreeVariableLaw) {
  const VarName names[] = {VarName{"x"}, VarName{"y"}, VarName{"z"}};
  for (int i = 0; i < kInstances; ++i) {
    TermGen g(1000 + i);
    Term t = g.any(4);
    Term m = g.m_term(2);
    const VarName& x = names[i % 3];
    Term r = substitute(t, x, m);
    EXPECT_EQ(free_vars(r), expected_fv(t, x, m)) << print_term(t) << " [" << x.name << ":=" << print_term(m) << "]";
    if (!occurs_free(t, x)) {
      EXPECT_EQ(r, t);
    }
  }
}

TEST(Syntax, RoundTripOnRandomTerms) {
  for (int i = 0; i < kInstances; ++i) {
    Term t = TermGen(5000 + i).any(5);
    ASSERT_TRUE(is_well_formed(t)) << print_term(t);
    Term back = Term::nil();
    ASSERT_NO_THROW(back = parse_term(print_term(t))) << print_term(t);
    EXPECT_EQ(back, t) << print_term(t);
  }
}

std::vector<ComputationalContext> random_contexts(std::size_t n, std::uint64_t seed, double redexes = 0.0) {
  std::vector<ComputationalContext> out;
  DerivationGen gen(seed, {3, false, redexes});
  while (out.size() < n) out.push_back(gen.next().sequent().context());
  return out;
}

TEST(Alpha, EquivalenceRelation) {
  std::vector<ComputationalContext> cs = random_contexts(500, 77);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const ComputationalContext& c = cs[i];
    ASSERT_TRUE(validate(c).ok()) << print_context(c);
    ComputationalContext r1 = testing::rename_bound(c, i);
    ComputationalContext r2 = testing::rename_bound(r1, i + 7919);
    EXPECT_TRUE(alpha_equal(c, c));
    EXPECT_TRUE(alpha_equal(c, r1)) << print_context(c) << "\n" << print_context(r1);
    EXPECT_TRUE(alpha_equal(r1, c));
    EXPECT_TRUE(alpha_equal(r1, r2));
    EXPECT_TRUE(alpha_equal(c, r2));
    const ComputationalContext& other = cs[(i + 1) % cs.size()];
    EXPECT_EQ(alpha_equal(c, other), alpha_equal(other, c));
    EXPECT_EQ(alpha_equal(r1, other), alpha_equal(c, other));
  }
}

TEST(Alpha, ValidateIgnoresComponentOrder) {
  std::vector<ComputationalContext> cs = random_contexts(kInstances, 91);
  std::mt19937_64 rng(3);
  for (const ComputationalContext& c : cs) {
    std::vector<Term> parts = c.components();
    std::shuffle(parts.begin(), parts.end(), rng);
    EXPECT_EQ(validate(c.var(), parts).ok(), validate(c).ok());
  }
}

TEST(Reduce, ValidityPreservation) {
  std::vector<ComputationalContext> cs = random_contexts(kInstances, 123, 0.5);
  for (const char* f : {"ex2.ctx"}) cs.push_back(parse_context(read_fixture(f)));
  for (const char* f : {"church-two-before.drv", "church-two-after.drv", "monad.drv", "ex3.drv", "ex1.drv"})
    cs.push_back(elaborate_script(read_fixture(f)).sequent().context());
  std::size_t steps = 0;
  std::set<RedexKind> kinds;
  for (const ComputationalContext& start : cs) {
    ComputationalContext c = start;
    for (int k = 0; k < 20; ++k) {
      std::vector<Redex> rs = find_redexes(c);
      if (rs.empty()) break;
      for (const Redex& r : rs) {
        ComputationalContext next = reduce_once(c, r);
        ++steps;
        kinds.insert(r.kind);
        ValidationReport v = validate(next);
        ASSERT_TRUE(v.ok()) << print_context(c) << "\n-> " << print_context(next) << "\n" << v.to_string();
      }
      c = reduce_once(c, rs.back());
    }
  }
  EXPECT_GE(steps, static_cast<std::size_t>(kInstances));
  EXPECT_EQ(kinds.size(), 7u);
}

TEST(Typing, RandomScriptsCheck) {
  DerivationGen gen(2024, {5, false});
  for (int i = 0; i < kInstances; ++i) {
    Derivation d = gen.next();
    CheckReport r = check(d);
    EXPECT_TRUE(r.ok()) << print_script(d) << "\n" << r.to_string();
    EXPECT_TRUE(check(elaborate_script(print_script(d))).ok());
  }
}

TEST(Equations, CanonicalizeIdempotent) {
  DerivationGen gen(31337, {3, false, 0.3});
  for (int i = 0; i < kInstances; ++i) {
    Derivation d = gen.next();
    CanonicalForm once = canonicalize(d);
    CanonicalForm twice = canonicalize(once.sequent);
    EXPECT_EQ(once.key, twice.key) << print_script(d);
    EXPECT_TRUE(same_formulas(once.sequent, d.sequent()));
  }
}

TEST(Equations, EqualityIsReflexiveAndSymmetric) {
  DerivationGen gen(99, {3, false});
  for (int i = 0; i < 100; ++i) {
    Derivation a = gen.next();
    EXPECT_TRUE(equal_mod_theory(a, a));
  }
  std::vector<Derivation> fx;
  for (const char* f : {"ex1.drv", "bot-axiom.drv"}) fx.push_back(elaborate_script(read_fixture(f)));
  EXPECT_EQ(equal_mod_theory(fx[0], fx[1]), equal_mod_theory(fx[1], fx[0]));
}

TEST(Prob, RandomMultiplicativeDerivations) {
  DerivationGen gen(4242, {4, true});
  for (int i = 0; i < kInstances; ++i) {
    Derivation d = gen.next();
    ASSERT_TRUE(is_multiplicative(d));
    Assignment a = random_assignment(d, Universe(3 + i % 4), i);
    ASSERT_TRUE(check_assignment(d, a).ok()) << print_script(d);
    EXPECT_TRUE(verify_decomposition(d, a)) << print_script(d) << " seed " << i;
    EXPECT_EQ(decompose(d, a).size(), d.sequent().succedent.size());
  }
}

TEST(Prob, ConditionalProbabilityIsOne) {
  const char* fixtures[] = {"mult/subtraction-right.drv", "mult/example3.drv", "mult/par-sub-mix.drv",
                            "mult/nested.drv", "mult/left-rules.drv"};
  int nonempty = 0;
  for (const char* f : fixtures) {
    Derivation d = elaborate_script(read_fixture(f));
    for (std::uint64_t s = 0; s < 100; ++s) {
      Assignment a = random_assignment(d, Universe(6), s);
      Event h = a.at(ant_key("r"));
      if (h.empty()) continue;
      ++nonempty;
      Event cover;
      for (Event e : decompose(d, a)) cover = cover | e;
      EXPECT_EQ((cover & h).count(), h.count()) << f << " seed " << s;
    }
  }
  EXPECT_GT(nonempty, 0);
}

}  // namespace
}  // namespace coill

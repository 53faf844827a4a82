#include <gtest/gtest.h>

#include "coill/equations.hpp"
#include "generators.hpp"

namespace coill {
namespace {

using testing::read_fixture;

Derivation drv(const std::string& s) { return elaborate_script(s); }

TEST(Canonicalize, EtaExpandedBottomAxiom) {
  CanonicalForm f = canonicalize(drv(read_fixture("ex1.drv")));
  EXPECT_EQ(print_sequent(f.sequent), "x:bot |> | x:bot");
  EXPECT_EQ(f.provenance, std::vector<std::string>{"bot-eta"});
}

TEST(Canonicalize, MonadIdentity) {
  CanonicalForm lhs = canonicalize(drv(read_fixture("monad.drv")));
  CanonicalForm rhs = canonicalize(drv(read_fixture("why-not-axiom.drv")));
  EXPECT_EQ(lhs.key, rhs.key);
  EXPECT_EQ(print_sequent(lhs.sequent), "z:?a |> | z:?a");
}

TEST(Canonicalize, UnitOfContraction) {
  Sequent s = parse_sequent("v:?c |> | [v,connect_to(v)]:?c");
  EXPECT_EQ(print_sequent(canonicalize(s).sequent), "v:?c |> | v:?c");
}

TEST(Canonicalize, Idempotent) {
  CanonicalForm once = canonicalize(drv(read_fixture("church-two-before.drv")));
  CanonicalForm twice = canonicalize(once.sequent);
  EXPECT_EQ(once.key, twice.key);
}

TEST(EqualModTheory, Reflexive) {
  Derivation d = drv(read_fixture("ex3.drv"));
  EXPECT_TRUE(equal_mod_theory(d, d));
}

TEST(EqualModTheory, ExampleOneAgainstTheAxiom) {
  EXPECT_TRUE(equal_mod_theory(drv(read_fixture("ex1.drv")), drv(read_fixture("bot-axiom.drv"))));
}

TEST(EqualModTheory, SubtractionBeta) {
  EXPECT_TRUE(equal_mod_theory(
      drv("(sub-elim (sub-intro (axiom x a) (axiom y b) 0) (sub-intro (axiom u a) (axiom w b) 0) 0 1)"),
      drv("(sub-intro (axiom x a) (axiom y b) 0)")));
}

TEST(EqualModTheory, RenamedRootVariable) {
  EXPECT_TRUE(equal_mod_theory(drv("(axiom x a)"), drv("(axiom y a)")));
}

TEST(EqualModTheory, ParSymmetryIsNotTheIdentity) {
  EXPECT_FALSE(equal_mod_theory(drv("(par-intro (par-elim (axiom v par(a, a)) (axiom y a) (axiom w a) 0) 0 1)"),
                                drv("(par-intro (par-elim (axiom v par(a, a)) (axiom y a) (axiom w a) 0) 1 0)")));
}

TEST(EqualModTheory, MismatchedConclusionsThrow) {
  try {
    equal_mod_theory(drv("(axiom x a)"), drv("(axiom x b)"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SequentMismatch);
  }
}

TEST(Laws, AllBuiltinsHold) {
  std::vector<LawResult> rs = verify_builtin_laws();
  EXPECT_EQ(rs.size(), 16u);
  for (const LawResult& r : rs) EXPECT_TRUE(r.pass) << r.name << ": " << r.error << " " << r.lhs << " vs " << r.rhs;
}

TEST(Laws, JsonReport) {
  std::string j = laws_to_json({{"Monoid 3", true, "", "", ""}, {"x", false, "L", "R", ""}});
  EXPECT_NE(j.find("\"status\": \"pass\""), std::string::npos);
  EXPECT_NE(j.find("\"counterexample\""), std::string::npos);
}

}  // namespace
}  // namespace coill

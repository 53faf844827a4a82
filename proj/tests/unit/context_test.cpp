#include <gtest/gtest.h>

#include "coill/context.hpp"
#include "generators.hpp"

namespace coill {
namespace {

using testing::read_fixture;

ComputationalContext ctx(const char* s) { return parse_context(s); }

TEST(Validate, ExampleThreeIsCorrect) { EXPECT_TRUE(validate(parse_context(read_fixture("ex3.ctx"))).ok()); }

TEST(Validate, ExampleThreeVariantViolatesAxiomTwo) {
  ValidationReport r = validate(parse_context(read_fixture("ex3-bad.ctx")));
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.has_axiom(2));
  EXPECT_NE(r.to_string().find("axiom 2"), std::string::npos);
}

TEST(Validate, IdentityIsCorrect) { EXPECT_TRUE(validate(ComputationalContext::identity(VarName{"x"})).ok()); }

TEST(Validate, ForeignFreeVariableViolatesAxiomOne) {
  EXPECT_TRUE(validate(ctx("context x : par(x,y)")).has_axiom(1));
}

TEST(Validate, ReusedBoxVariableViolatesAxiomFive) {
  ComputationalContext c = ctx("context x : store([store([postp(x)];[];[];'x;k)];[];[];'k;x)");
  EXPECT_TRUE(validate(c).has_axiom(5)) << validate(c).to_string();
}

TEST(Compose, UnitAndCommutativityAndAssociativity) {
  ComputationalContext a = ctx("context x : mkc(x,'y)");
  ComputationalContext b = ctx("context x : 'y(x)");
  ComputationalContext c = ctx("context x : connect_to(x)");
  ComputationalContext empty(VarName{"x"}, {Term::nil()});
  EXPECT_EQ(compose(a, empty), a);
  EXPECT_EQ(compose(a, b), compose(b, a));
  EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
}

TEST(Compose, DifferentVariablesAreRejected) {
  try {
    compose(ctx("context x : x"), ctx("context y : y"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VarMismatch);
  }
}

TEST(Alpha, RenamingTheMkcCovariable) {
  EXPECT_TRUE(alpha_equal(ctx("context x : mkc(x,'y) || 'y(x)"), ctx("context x : mkc(x,'z) || 'z(x)")));
}

TEST(Alpha, DifferentShapesDiffer) {
  EXPECT_FALSE(alpha_equal(ctx("context x : mkc(x,'y) || 'y(x)"), ctx("context x : mkc(x,'y) || x")));
}

TEST(Alpha, FreeVariableIsNotRenamed) {
  EXPECT_FALSE(alpha_equal(ctx("context x : x"), ctx("context y : y")));
}

TEST(Alpha, PostponeTagsAreBinders) {
  EXPECT_TRUE(alpha_equal(ctx("context z : postp('y -> 'w(y), mkc(z,'x)) || mkc('y(mkc(z,'x)),'w) || 'x(z)"),
                          ctx("context z : 'a(z) || mkc('b(mkc(z,'a)),'c) || postp('b -> 'c(b), mkc(z,'a))")));
}

TEST(Print, ContextSyntax) {
  EXPECT_EQ(print_context(ctx("context x : x || postp(connect_to(x))")), "context x : x || postp(connect_to(x))");
  EXPECT_EQ(print_context(ComputationalContext(VarName{"x"}, {})), "context x : []");
}

TEST(Build, PostponeWrapsTheDistinguishedTerm) {
  ComputationalContext c = build_context(build::Postpone{ctx("context x : mkc(x,'k)"), parse_term("mkc(x,'k)"), VarName{"y"}});
  EXPECT_EQ(print_context(c), "context y : postp('x->mkc(x,'k),y)");
  EXPECT_TRUE(validate(c).ok());
}

TEST(Build, Unit) {
  ComputationalContext c = build_context(build::Unit{ctx("context x : x"), Term::var("x")});
  EXPECT_EQ(c, ctx("context x : x || connect_to(x)"));
}

TEST(Build, CasesOverAFreshVariable) {
  ComputationalContext c =
      build_context(build::Cases{ctx("context x : x"), ctx("context y : mkc(y,'k) || 'k(y)"), VarName{"z"}});
  EXPECT_EQ(c, ctx("context z : casel(z) || mkc(caser(z),'k) || 'k(caser(z))"));
  EXPECT_TRUE(validate(c).ok());
}

TEST(Build, MakeCoroutine) {
  ComputationalContext c =
      build_context(build::MakeCoroutine{ctx("context x : x"), Term::var("x"), ctx("context y : y"), std::nullopt});
  EXPECT_EQ(c, ctx("context x : mkc(x,'y) || 'y(x)"));
}

TEST(Build, EveryVariantValidates) {
  ComputationalContext sx = ctx("context x : x");
  ComputationalContext pair = ctx("context x : casel(x) || caser(x)");
  std::vector<BuildRequest> requests = {
      build::Substitution{sx, Term::var("x"), ctx("context y : casel(y) || caser(y)")},
      build::MakeCoroutine{sx, Term::var("x"), ctx("context y : y"), CoName{"k"}},
      build::Cases{sx, ctx("context y : y"), VarName{"z"}},
      build::Postpone{sx, Term::var("x"), VarName{"y"}},
      build::Par{pair, parse_term("casel(x)"), parse_term("caser(x)")},
      build::Contraction{pair, parse_term("casel(x)"), parse_term("caser(x)")},
      build::Unit{sx, Term::var("x")},
      build::Weakening{sx, Term::var("x")},
      build::Store{ctx("context z : [z]"), VarName{"x"}, {}},
  };
  for (const BuildRequest& r : requests) {
    ComputationalContext c = build_context(r);
    EXPECT_TRUE(validate(c).ok()) << print_context(c);
  }
}

TEST(Build, ShapeMismatchIsReported) {
  try {
    build_context(build::Par{ctx("context x : x"), Term::var("x"), Term::var("y")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

}  // namespace
}  // namespace coill

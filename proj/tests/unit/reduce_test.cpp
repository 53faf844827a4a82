#include <gtest/gtest.h>

#include "coill/reduce.hpp"
#include "coill/typing.hpp"
#include "generators.hpp"

namespace coill {
namespace {

using testing::read_fixture;

ComputationalContext ctx(const char* s) { return parse_context(s); }

TEST(Redexes, ExampleTwo) {
  std::vector<Redex> rs = find_redexes(ctx("context x : x || postp(connect_to(x))"));
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].kind, RedexKind::LocalPostpConnect);
  EXPECT_EQ(rs[0].site.component, 1u);
}

TEST(Redexes, NormalFormHasNone) { EXPECT_TRUE(find_redexes(ctx("context x : x")).empty()); }

TEST(Redexes, ChurchTwoHasExactlyOnePostpMkc) {
  std::vector<Redex> rs = find_redexes(elaborate_script(read_fixture("church-two-before.drv")).sequent().context());
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].kind, RedexKind::PostpMkc);
}

TEST(ReduceOnce, ExampleTwo) {
  ComputationalContext c = ctx("context x : x || postp(connect_to(x))");
  EXPECT_EQ(reduce_once(c, find_redexes(c)[0]), ctx("context x : x"));
}

TEST(ReduceOnce, Projection) {
  ComputationalContext c = ctx("context x : casel(par(x,mkc(x,'k))) || 'k(x)");
  std::vector<Redex> rs = find_redexes(c);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].kind, RedexKind::LocalCasel);
  EXPECT_EQ(reduce_once(c, rs[0]), ctx("context x : x || 'k(x)"));
}

TEST(ReduceOnce, StaleRedexIsRejected) {
  ComputationalContext c = ctx("context x : x");
  try {
    reduce_once(c, Redex{RedexKind::PostpMkc, Site{{}, 0, {}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StaleRedex);
  }
}

TEST(ReduceOnce, ChurchTwoFirstSteps) {
  ComputationalContext c = elaborate_script(read_fixture("church-two-before.drv")).sequent().context();
  c = reduce_once(c, find_redexes(c)[0]);
  std::vector<Redex> rs = find_redexes(c);
  ASSERT_FALSE(rs.empty());
  EXPECT_EQ(rs[0].kind, RedexKind::StoreContraction);
  c = reduce_once(c, rs[0]);
  EXPECT_TRUE(alpha_equal(c, elaborate_script(read_fixture("church-two-after.drv")).sequent().context()));
}

TEST(Normalize, Identity) {
  NormalizeResult r = normalize(ctx("context x : x"));
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.context, ctx("context x : x"));
}

TEST(Normalize, ExampleTwoInOneStep) {
  NormalizeResult r = normalize(parse_context(read_fixture("ex2.ctx")));
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(print_context(r.context), "context x : x");
}

TEST(Normalize, ChurchTwoTerminates) {
  NormalizeResult r = normalize(elaborate_script(read_fixture("church-two-before.drv")).sequent().context(), 200);
  ASSERT_GE(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].redex.kind, RedexKind::PostpMkc);
  EXPECT_EQ(r.trace[1].redex.kind, RedexKind::StoreContraction);
  EXPECT_EQ(r.trace.size(), 6u);  // regression value
  EXPECT_TRUE(find_redexes(r.context).empty());
}

TEST(Normalize, FuelExhaustionKeepsThePartialTrace) {
  try {
    normalize(elaborate_script(read_fixture("church-two-before.drv")).sequent().context(), 1);
    FAIL();
  } catch (const FuelExhausted& e) {
    EXPECT_EQ(e.code(), ErrorCode::FuelExhausted);
    EXPECT_EQ(e.trace().size(), 1u);
  }
}

TEST(Normalize, ScriptedChoicesOutOfRange) {
  try {
    normalize(parse_context(read_fixture("ex2.ctx")), 10, scripted_strategy({3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(Trace, JsonLines) {
  NormalizeResult r = normalize(parse_context(read_fixture("ex2.ctx")));
  EXPECT_EQ(trace_to_jsonl(r.trace),
            "{\"step\":1,\"kind\":\"LocalPostpConnect\",\"site\":{\"boxes\":[],\"component\":1,\"path\":[]},"
            "\"before\":\"context x : x || postp(connect_to(x))\",\"after\":\"context x : x\"}\n");
}

TEST(Confluence, MultiplicativeFixturesJoin) {
  for (const char* f : {"mult/par-beta.drv", "mult/nested.drv", "mult/subtraction-eta.drv", "mult/example3.drv",
                        "mult/par-sub-mix.drv", "mult/left-rules.drv"}) {
    ComputationalContext c = elaborate_script(read_fixture(f)).sequent().context();
    std::vector<Redex> rs = find_redexes(c);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (std::size_t j = 0; j < rs.size(); ++j) {
        if (i == j) continue;
        ComputationalContext a = normalize(reduce_once(c, rs[i])).context;
        ComputationalContext b = normalize(reduce_once(c, rs[j])).context;
        EXPECT_TRUE(alpha_equal(a, b)) << f;
      }
    }
  }
}

}  // namespace
}  // namespace coill

#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "generators.hpp"
#include "json.hpp"

namespace {

using coill::testing::fixture_path;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = coill::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, ParseTerm) {
  Outcome r = run({"parse", "postp('y -> 'x(y), mkc(z,'x))"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "postp('y->'x(y),mkc(z,'x))\n");
}

TEST(Cli, ParseJson) {
  Outcome r = run({"parse", "--json", fixture_path("ex2.ctx")});
  ASSERT_EQ(r.code, 0) << r.err;
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "context");
}

TEST(Cli, ValidateGoodAndBad) {
  EXPECT_EQ(run({"validate", fixture_path("ex3.ctx")}).out, "ok\n");
  Outcome bad = run({"validate", "--json", fixture_path("ex3-bad.ctx")});
  EXPECT_EQ(bad.code, 1);
  nlohmann::json j = nlohmann::json::parse(bad.out);
  EXPECT_FALSE(j["ok"].get<bool>());
  EXPECT_EQ(j["violations"][0]["axiom"], 2);
}

TEST(Cli, Typecheck) {
  Outcome r = run({"typecheck", fixture_path("ex3.drv")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 4), "z:C ");
}

TEST(Cli, ReduceListsAndSteps) {
  Outcome list = run({"reduce", fixture_path("ex2.ctx")});
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.out.find("0: LocalPostpConnect"), std::string::npos);
  Outcome step = run({"reduce", "--step", fixture_path("ex2.ctx")});
  EXPECT_EQ(step.code, 0);
  EXPECT_NE(step.out.find("\"kind\":\"LocalPostpConnect\""), std::string::npos);
}

TEST(Cli, InlineScriptIsReduced) {
  Outcome r = run({"reduce", "(sub-elim (sub-intro (axiom x a) (axiom y b) 0) (sub-intro (axiom u a) (axiom w b) 0) 0 1)"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0: PostpMkc"), std::string::npos);
}

TEST(Cli, NormalizeTextAndJson) {
  Outcome r = run({"normalize", fixture_path("ex2.ctx")});
  EXPECT_EQ(r.out, "1 step\ncontext x : x\n");
  Outcome j = run({"normalize", "--json", fixture_path("ex2.ctx")});
  EXPECT_EQ(nlohmann::json::parse(j.out)["steps"], 1);
}

TEST(Cli, FuelExhausted) {
  Outcome r = run({"normalize", "--fuel", "1", fixture_path("church-two-before.drv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("FuelExhausted"), std::string::npos);
}

TEST(Cli, EqExitCodes) {
  EXPECT_EQ(run({"eq", fixture_path("ex1.drv"), fixture_path("bot-axiom.drv")}).code, 0);
  EXPECT_EQ(run({"eq", "(par-intro (par-elim (axiom v par(a, a)) (axiom y a) (axiom w a) 0) 0 1)",
                 "(par-intro (par-elim (axiom v par(a, a)) (axiom y a) (axiom w a) 0) 1 0)"})
                .code,
            1);
}

TEST(Cli, Laws) {
  Outcome r = run({"laws"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("16/16 laws hold"), std::string::npos);
}

TEST(Cli, ProbcheckFile) {
  Outcome r = run({"probcheck", fixture_path("mult/subtraction-right.drv"), "--evt", fixture_path("ex2e.evt")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "decomposition: {0} {1}\nverified\n");
  Outcome bad = run({"probcheck", fixture_path("mult/subtraction-right.drv"), "--evt", fixture_path("ex2e-bad.evt")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("mkc"), std::string::npos);
}

TEST(Cli, ProbcheckSweep) {
  Outcome r = run({"probcheck", "--json", fixture_path("mult/nested.drv"), "--universe", "3", "--universe-max", "6",
               "--trials", "50", "--jobs", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["passed"], 50);
}

TEST(Cli, Translate) {
  Outcome r = run({"translate", "or(p, q)"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "par(?p, ?q)\n");
}

TEST(Cli, Demo) {
  Outcome r = run({"demo", "church-two"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("step 1: PostpMkc"), std::string::npos);
  EXPECT_NE(r.out.find("matches expected two-step result: yes"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"probcheck", "x.drv", "--universe", "40"}).code, 2);
}

TEST(Cli, MissingFile) {
  Outcome r = run({"validate", "/nonexistent/file.ctx"});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

}  // namespace

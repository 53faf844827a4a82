#include <gtest/gtest.h>

#include "coill/prob.hpp"
#include "generators.hpp"

namespace coill {
namespace {

using testing::read_fixture;

Derivation example_2e() { return elaborate_script("(sub-intro (axiom x c) (axiom y d) 0)"); }

Assignment example_2e_events(Event mkc) {
  Assignment a{Universe(4), {}};
  a.events = {{"r/ant", Event::of({0, 1})},   {"r/s0", mkc},
              {"r/s1", Event::of({1, 2})},    {"r.0/ant", Event::of({0, 1})},
              {"r.0/s0", Event::of({0, 1})},  {"r.1/ant", Event::of({1, 2})},
              {"r.1/s0", Event::of({1, 2})}};
  return a;
}

TEST(Events, BitOperations) {
  Universe u(4);
  Event e = Event::of({0, 2});
  EXPECT_EQ(e.points(), (std::vector<unsigned>{0, 2}));
  EXPECT_EQ(e.count(), 2u);
  EXPECT_TRUE(Event::of({2}).subset_of(e));
  Assignment a{u, {}};
  EXPECT_EQ(a.complement(e), Event::of({1, 3}));
  EXPECT_EQ(print_event(e), "{0,2}");
  EXPECT_THROW(Universe(17), Error);
}

TEST(CheckAssignment, ExampleAccepted) {
  EXPECT_TRUE(check_assignment(example_2e(), example_2e_events(Event::of({0}))).ok());
}

TEST(CheckAssignment, WrongMkcEventRejected) {
  CheckReport r = check_assignment(example_2e(), example_2e_events(Event::of({0, 1})));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.issues[0].code, "mkc");
}

TEST(CheckAssignment, PTermsCarryTheEmptyEvent) {
  Derivation d = elaborate_script("(sub-elim (axiom x sub(a, b)) (sub-intro (axiom u a) (axiom w b) 0) 0 1)");
  Assignment a = random_assignment(d, Universe(5), 3);
  EXPECT_TRUE(check_assignment(d, a).ok());
  EXPECT_TRUE(a.at("r/c0").empty());
  a.events["r/c0"] = Event::of({1});
  EXPECT_EQ(check_assignment(d, a).issues.at(0).code, "p-term");
}

TEST(CheckAssignment, ExponentialsAreOutOfScope) {
  try {
    check_assignment(elaborate_script("(der (axiom x a) 0)"), Assignment{Universe(3), {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotMultiplicative);
  }
}

TEST(Decompose, ExampleTwoE) {
  std::vector<Event> parts = decompose(example_2e(), example_2e_events(Event::of({0})));
  EXPECT_EQ(parts, (std::vector<Event>{Event::of({0}), Event::of({1})}));
  EXPECT_TRUE(verify_decomposition(example_2e(), example_2e_events(Event::of({0}))));
}

TEST(Decompose, Axiom) {
  Derivation d = elaborate_script("(axiom x h)");
  Assignment a{Universe(3), {{"r/ant", Event::of({0, 2})}, {"r/s0", Event::of({0, 2})}}};
  EXPECT_EQ(decompose(d, a), std::vector<Event>{Event::of({0, 2})});
}

TEST(Decompose, ParRightUnitesTheParts) {
  Derivation d = elaborate_script("(par-intro (sub-intro (axiom x c) (axiom y d) 0) 0 1)");
  Assignment a = example_2e_events(Event::of({0}));
  for (auto& [k, v] : std::map<std::string, Event>(a.events)) {
    a.events.erase(k);
    a.events["r.0" + k.substr(1)] = v;
  }
  a.events["r/ant"] = Event::of({0, 1});
  a.events["r/s0"] = Event::of({0, 1, 2});
  ASSERT_TRUE(check_assignment(d, a).ok()) << check_assignment(d, a).to_string();
  EXPECT_EQ(decompose(d, a), std::vector<Event>{Event::of({0, 1})});
}

TEST(Decompose, InvalidAssignmentIsRejected) {
  try {
    decompose(example_2e(), example_2e_events(Event::of({0, 1})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AssignmentInvalid);
  }
}

TEST(Verify, EmptyPremiseEvent) {
  Derivation d = example_2e();
  Assignment a{Universe(3), {{"r.1/ant", Event::of({1})}, {"r.1/s0", Event::of({1})}, {"r/s1", Event::of({1})}}};
  ASSERT_TRUE(check_assignment(d, a).ok()) << check_assignment(d, a).to_string();
  EXPECT_TRUE(verify_decomposition(d, a));
}

TEST(Random, DeterministicPerSeed) {
  Derivation d = elaborate_script(read_fixture("mult/nested.drv"));
  EXPECT_EQ(assignment_to_json(random_assignment(d, Universe(6), 9)),
            assignment_to_json(random_assignment(d, Universe(6), 9)));
}

TEST(Random, SubtractionRightSweep) {
  Derivation d = elaborate_script(read_fixture("mult/subtraction-right.drv"));
  SweepResult r = sweep(d, 5, 5, 42, 200);
  EXPECT_EQ(r.passed, 200u);
}

TEST(Random, ExampleShapeThousandSeeds) {
  Derivation d = example_2e();
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Assignment a = random_assignment(d, Universe(4), s);
    ASSERT_TRUE(check_assignment(d, a).ok());
    ASSERT_TRUE(verify_decomposition(d, a)) << s;
  }
}

TEST(Random, BothParSplitsVerify) {
  Derivation d = elaborate_script(read_fixture("mult/left-rules.drv"));
  for (std::uint64_t s = 0; s < 100; ++s) {
    Assignment a = random_assignment(d, Universe(5), s);
    EXPECT_TRUE(verify_decomposition(d, a, ParSplit::KeepLeft));
    EXPECT_TRUE(verify_decomposition(d, a, ParSplit::KeepRight));
  }
}

TEST(Random, ParallelSweepMatchesSerial) {
  Derivation d = elaborate_script(read_fixture("mult/par-sub-mix.drv"));
  SweepResult a = sweep(d, 3, 6, 7, 64, 1);
  SweepResult b = sweep(d, 3, 6, 7, 64, 4);
  EXPECT_EQ(a.passed, b.passed);
  EXPECT_EQ(a.failing_seeds, b.failing_seeds);
}

TEST(Json, RoundTrip) {
  Assignment a = example_2e_events(Event::of({0}));
  Assignment b = assignment_from_json(assignment_to_json(a));
  EXPECT_EQ(b.universe.size, 4u);
  EXPECT_EQ(b.events, a.events);
  EXPECT_EQ(assignment_from_json(read_fixture("ex2e.evt")).events, a.events);
  EXPECT_THROW(assignment_from_json("{\"events\": {}}"), Error);
}

}  // namespace
}  // namespace coill

#include <gtest/gtest.h>

#include <random>

#include "lsc/family.hpp"
#include "lsc/measure.hpp"
#include "lsc/syntax.hpp"

using namespace lsc;

TEST(HereditaryHead, Occurrences) {
  EXPECT_TRUE(is_hh_occurrence(parse("x y"), Name("x")));
  EXPECT_FALSE(is_hh_occurrence(parse("x y"), Name("y")));
  EXPECT_TRUE(is_hh_occurrence(parse("(x y)[x/y r]"), Name("y")));
  EXPECT_FALSE(is_hh_occurrence(parse("(x y)[x/r y]"), Name("y")));
  EXPECT_FALSE(is_hh_occurrence(parse("\\x.x y"), Name("x")));
  EXPECT_FALSE(is_hh_occurrence(parse("(x y)[x/\\y.y]"), Name("y")));
  EXPECT_EQ(hh_variable(parse("(x y)[x/y r][y/u]")), Name("u"));
  EXPECT_FALSE(hh_variable(parse("\\z.z y")));
}

TEST(HeadMeasure, Examples) {
  EXPECT_EQ(head_measure(parse("((x y)[x/y r])[y/u]")), 2u);
  EXPECT_EQ(head_measure(parse("(x y)[y/u]")), 0u);
  EXPECT_EQ(head_measure(parse("(\\x.x x) (\\y.y)")), 0u);
  EXPECT_EQ(head_measure(parse("((x y)[x/y r] w)[y/u]")), 2u);
  EXPECT_THROW(head_measure(parse("x[x/y[y/z]]")), NotShallow);
}

TEST(HeadMeasure, PureTermsMeasureZero) {
  TermEnumerator en(default_names(), TermClass::Pure);
  en.for_each_up_to(7, [](const Term& t) { EXPECT_EQ(head_measure(t), 0u); });
}

TEST(HeadMeasure, DecreaseZeroAndExactness) {
  auto check = [](const Term& t) {
    auto m = head_measure(t);
    auto ls = redexes(t, Rule::HeadLS);
    EXPECT_EQ(m == 0, ls.empty()) << print(t);
    if (!ls.empty()) {
      Term u = apply_step(t, ls.front());
      EXPECT_EQ(m, head_measure(u) + 1) << print(t);
    }
    EXPECT_EQ(linear_unfold(t).steps, m) << print(t);
  };
  TermEnumerator en(default_names(), TermClass::Shallow);
  en.for_each_up_to(7, check);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) check(random_term(rng, 10 + i % 15, default_names(), TermClass::Shallow));
}

TEST(HeadMeasure, BudgetAlongLinearHeadTraces) {
  TermEnumerator en(default_names(), TermClass::Pure);
  en.for_each_up_to(7, [](const Term& t) {
    Trace tr;
    try {
      tr = normalize(t, {Rule::HeadDB, Rule::HeadLS}, Policy::LeftmostOutermost, 300).trace;
    } catch (const StepLimitExceeded& e) {
      tr = e.trace();
    }
    auto terms = replay(tr);
    std::uint64_t mult = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i > 0 && tr.steps[i - 1].step.rule == Rule::HeadDB) ++mult;
      EXPECT_EQ(terms[i].es_count(), mult);
      EXPECT_LE(head_measure(terms[i]), mult);
    }
  });
}

TEST(TraceStats, EmptyTrace) {
  Trace tr;
  tr.initial = tr.final = parse("x");
  auto s = trace_stats(tr);
  EXPECT_EQ(s.total, 0u);
  EXPECT_EQ(s.mult, 0u);
  EXPECT_EQ(s.expo, 0u);
  EXPECT_EQ(s.phases, 0u);
  EXPECT_TRUE(s.quadratic_ok);
}

TEST(TraceStats, FamilyUnderAllPolicies) {
  for (int n : {5, 20}) {
    auto f = gen_family(n);
    for (Policy p : {Policy::LeftmostOutermost, Policy::LSFirst, Policy::DBFirst}) {
      auto r = normalize(f.t, {Rule::HeadDB, Rule::HeadLS}, p, 100000);
      auto s = trace_stats(r.trace);
      EXPECT_EQ(s.mult, static_cast<std::uint64_t>(n));
      EXPECT_EQ(s.total, s.mult + s.expo);
      EXPECT_LE(s.total, s.mult * s.mult + s.mult);
      EXPECT_TRUE(s.quadratic_ok);
      EXPECT_GE(s.phases, 1u);
      EXPECT_TRUE(alpha_eq(unfold(r.term), f.r));
    }
  }
}

TEST(TraceStats, SimulationFragment) {
  Term t = parse("(\\x.x x) y");
  auto sim = simulate_head(t, redexes(t, Rule::HeadBeta).front());
  auto s = trace_stats(sim.trace);
  EXPECT_EQ(s.mult, 1u);
  EXPECT_EQ(s.expo, 2u);
  EXPECT_EQ(s.phases, 1u);
}

TEST(TraceStats, RejectsBetaAndCountsPhases) {
  Term t = parse("(\\x.x) y");
  auto beta = normalize(t, {Rule::Beta}, Policy::LeftmostOutermost, 10);
  EXPECT_THROW(trace_stats(beta.trace), std::invalid_argument);
  Trace tr;
  tr.initial = tr.final = t;
  for (Rule r : {Rule::HeadDB, Rule::HeadDB, Rule::HeadLS, Rule::HeadDB, Rule::GC, Rule::HeadDB})
    tr.steps.push_back({{r, Occurrence(), std::nullopt}, 0});
  auto s = trace_stats(tr);
  EXPECT_EQ(s.mult, 4u);
  EXPECT_EQ(s.expo, 1u);
  EXPECT_EQ(s.phases, 2u);
  auto j = stats_to_json(s);
  EXPECT_EQ(j["total"], 5);
  EXPECT_EQ(j["quadratic_ok"], true);
}

TEST(TraceStats, QuadraticOnSmallPureTerms) {
  TermEnumerator en(default_names(), TermClass::Pure);
  en.for_each_up_to(7, [](const Term& t) {
    for (Policy p : {Policy::LeftmostOutermost, Policy::LSFirst, Policy::DBFirst}) {
      Trace tr;
      try {
        tr = normalize(t, {Rule::HeadDB, Rule::HeadLS}, p, 300).trace;
      } catch (const StepLimitExceeded& e) {
        tr = e.trace();
      }
      EXPECT_TRUE(trace_stats(tr).quadratic_ok) << print(t);
    }
  });
}

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "lsc/family.hpp"
#include "lsc/reduction.hpp"
#include "lsc/syntax.hpp"
#include "lsc/unfold_check.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace lsc;

namespace {

Name n(const char* s) { return parse_name(s); }

bool oracle_eq(const Term& a, const Term& b) { return oracle::alpha_eq(oracle::unfold(a), oracle::unfold(b)); }

std::vector<Term> small_terms(std::uint64_t max) {
  std::vector<Term> out;
  TermEnumerator(default_names(), TermClass::Full).for_each_up_to(max, [&](const Term& t) {
    out.push_back(t);
  });
  return out;
}

}  // namespace

TEST(ConstrainingSets, Coherence) {
  ConstrainingSet xy{{n("x"), n("y")}}, xz{{n("x"), n("z")}}, zy{{n("z"), n("y")}};
  EXPECT_TRUE(coherent(xy, xy));
  EXPECT_FALSE(coherent(xy, xz));
  EXPECT_FALSE(coherent(xy, zy));
  EXPECT_TRUE(coherent(ConstrainingSet{}, xz));
  EXPECT_TRUE(xy.auto_coherent());
  EXPECT_FALSE((ConstrainingSet{{n("x"), n("y")}, {n("x"), n("z")}}).auto_coherent());
}

TEST(ConstrainingSets, Combine) {
  Value a = Value::of({{n("x"), n("y")}});
  Value b = Value::of({{n("z"), n("w")}});
  EXPECT_EQ(combine(a, b), Value::of({{n("x"), n("y")}, {n("z"), n("w")}}));
  EXPECT_TRUE(combine(a, Value::of({{n("x"), n("z")}})).is_bottom());
  EXPECT_TRUE(combine(Value::bottom(), Value::of({})).is_bottom());
  EXPECT_EQ(to_string(a), "{x↦y}");
  EXPECT_EQ(to_string(Value::bottom()), "⊥");
}

TEST(ConstrainingSets, CombineIsCommutativeAndAssociative) {
  std::vector<Name> names{n("a"), n("b"), n("c")};
  std::vector<Value> vals{Value::bottom()};
  for (std::uint32_t mask = 0; mask < 512; mask += 7) {
    std::vector<ConstrainingSet::Pair> ps;
    for (int k = 0; k < 9; ++k)
      if (mask & (1u << k)) ps.emplace_back(names[k / 3], names[k % 3]);
    vals.push_back(Value::of(ConstrainingSet(ps)));
  }
  for (const auto& u : vals)
    for (const auto& v : vals) {
      EXPECT_EQ(combine(u, v), combine(v, u));
      for (const auto& w : vals) EXPECT_EQ(combine(combine(u, v), w), combine(u, combine(v, w)));
    }
}

TEST(Preprocess, RenamesApartAndCollectsSubstitutions) {
  auto pp = preprocess(parse("\\x.x"), parse("\\x.x"));
  EXPECT_EQ(print(pp.a), "\\x#1.x#1");
  EXPECT_EQ(print(pp.b), "\\x#2.x#2");
  EXPECT_TRUE(pp.subst_names.empty());

  pp = preprocess(parse("y[x/z]"), parse("w"));
  EXPECT_EQ(print(pp.a), "y#1");
  EXPECT_EQ(print(pp.b), "w#2");
  EXPECT_EQ(pp.rename_a, (std::map<Name, Name>{{n("y"), n("y#1")}}));
  EXPECT_EQ(pp.rename_b, (std::map<Name, Name>{{n("w"), n("w#2")}}));

  pp = preprocess(parse("(x x)[x/\\y.y]"), parse("(\\z.z)(\\w.w)"));
  EXPECT_EQ(pp.subst_names, (std::set<Name>{n("x#1")}));
}

TEST(Preprocess, NameSpacesAreDisjointAndGcNormal) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Term a = random_term(rng, 15, default_names(), TermClass::Full);
    Term b = random_term(rng, 15, default_names(), TermClass::Full);
    auto pp = preprocess(a, b);
    std::map<Name, int> binder_count;
    std::vector<std::pair<Term, bool>> stack{{pp.a, true}, {pp.b, false}};
    std::set<Name> free_a, free_b;
    for (const auto& x : pp.a.free_names()) free_a.insert(x);
    for (const auto& x : pp.b.free_names()) free_b.insert(x);
    while (!stack.empty()) {
      auto [t, left] = stack.back();
      stack.pop_back();
      if (t.is_abs() || t.is_sub()) {
        ++binder_count[t.name()];
        EXPECT_FALSE(free_a.count(t.name()) || free_b.count(t.name()));
        EXPECT_EQ(t.name().tag() % 2, left ? 1u : 0u);
      }
      if (t.is_sub()) EXPECT_TRUE(t.left().has_free(t.name()));
      if (!t.is_var()) stack.emplace_back(t.left(), left);
      if (t.is_app() || t.is_sub()) stack.emplace_back(t.right(), left);
    }
    for (const auto& [x, c] : binder_count) EXPECT_EQ(c, 1) << x.str();
    for (const auto& x : free_a) EXPECT_FALSE(free_b.count(x));
  }
}

TEST(RelativeUnfold, Examples) {
  Term host = parse("(x y)[y/u]");
  EXPECT_TRUE(alpha_eq(relative_unfold(host, Occurrence()), unfold(host)));
  EXPECT_EQ(print(relative_unfold(host, Occurrence({Step::BodyOfSub}))), "x u");
  Term h2 = parse("t[z/q] r");
  EXPECT_EQ(print(relative_unfold(h2, Occurrence({Step::FunOf}))), "t");
  Term h3 = parse("(\\w.(x y)[x/w])[y/z z]");
  EXPECT_EQ(print(relative_unfold(h3, Occurrence({Step::BodyOfSub, Step::BodyOfAbs, Step::BodyOfSub}))),
            "w (z z)");
}

TEST(JudgeCell, Rules) {
  auto pp = preprocess(parse("x"), parse("y"));
  auto none = [](const Occurrence&, const Occurrence&) { return std::optional<Value>(); };
  EXPECT_EQ(judge_cell(pp, {}, {}, none), Value::of({{n("x#1"), n("y#2")}}));

  pp = preprocess(parse("\\x.x"), parse("x y"));
  EXPECT_TRUE(judge_cell(pp, {}, {}, none).is_bottom());

  pp = preprocess(parse("\\x.x"), parse("\\y.y"));
  auto premise = [](const Occurrence&, const Occurrence&) {
    return std::optional<Value>(Value::of({{Name("x", 1), Name("y", 2)}}));
  };
  EXPECT_EQ(judge_cell(pp, {}, {}, premise), Value::of({}));
  EXPECT_THROW(judge_cell(pp, {}, {}, none), BlankPredecessor);
  auto clash = [](const Occurrence&, const Occurrence&) {
    return std::optional<Value>(Value::of({{Name("x", 1), Name("z", 4)}}));
  };
  EXPECT_TRUE(judge_cell(pp, {}, {}, clash).is_bottom());
  auto unrelated = [](const Occurrence&, const Occurrence&) {
    return std::optional<Value>(Value::of({{Name("u", 5), Name("v", 4)}}));
  };
  EXPECT_EQ(judge_cell(pp, {}, {}, unrelated), Value::of({{Name("u", 5), Name("v", 4)}}));
}

TEST(FillMatrix, Examples) {
  auto m = fill_matrix(preprocess(parse("\\x.x"), parse("\\y.y")));
  EXPECT_EQ(m.rows().size() * m.cols().size(), 4u);
  EXPECT_EQ(m.root(), Value::of({}));

  m = fill_matrix(preprocess(parse("(x x)[x/\\y.y]"), parse("(\\z.z)(\\w.w)")));
  EXPECT_EQ(m.root(), Value::of({}));

  m = fill_matrix(preprocess(parse("\\x.x"), parse("\\x.\\y.y")));
  EXPECT_TRUE(m.root().is_bottom());

  std::ostringstream os;
  fill_matrix(preprocess(parse("x"), parse("\\y.y"))).write_tsv(os);
  EXPECT_EQ(os.str(), "\troot\tabs-body\nroot\t⊥\t{x#1↦y#2}\n");
}

TEST(UnfoldEq, Examples) {
  EXPECT_TRUE(unfold_eq(parse("(x x)[x/\\y.y]"), parse("(\\z.z)(\\w.w)")));
  EXPECT_FALSE(unfold_eq(parse("\\x.x"), parse("\\x.x x")));
  EXPECT_TRUE(unfold_eq(parse("x y"), parse("(z y)[z/x]")));
  EXPECT_FALSE(unfold_eq(parse("x y"), parse("y x")));
  EXPECT_FALSE(unfold_eq(parse("x"), parse("y")));
  EXPECT_TRUE(unfold_eq(parse("\\x.y"), parse("(\\x.z)[z/y]")));
}

TEST(UnfoldEq, FamilyCompactForms) {
  auto f = gen_family(18);
  auto lo = normalize(f.t, {Rule::HeadDB, Rule::HeadLS}, Policy::LeftmostOutermost, 100000);
  auto db = normalize(f.t, {Rule::HeadDB, Rule::HeadLS}, Policy::DBFirst, 100000);
  auto r = unfold_eq_detailed(lo.term, db.term);
  EXPECT_TRUE(r.equal);
  EXPECT_GT(unfold(lo.term).size(), 1'000'000u);
  auto wrong = normalize(gen_family(17).t, {Rule::HeadDB, Rule::HeadLS}, Policy::LeftmostOutermost, 100000);
  EXPECT_FALSE(unfold_eq(lo.term, wrong.term));
}

TEST(UnfoldEq, AgreesWithOracleExhaustively) {
  auto terms = small_terms(5);
  for (const auto& a : terms)
    for (const auto& b : terms) {
      if (a.size() + b.size() > 7) continue;
      EXPECT_EQ(unfold_eq(a, b), oracle_eq(a, b)) << print(a) << " vs " << print(b);
    }
}

TEST(UnfoldEq, AgreesWithOracleOnRandomPairs) {
  std::mt19937_64 rng(5);
  int equal = 0;
  for (int i = 0; i < 2000; ++i) {
    Term a = random_term(rng, 8 + i % 12, default_names(), TermClass::Full);
    Term b;
    switch (i % 3) {
      case 0: b = random_term(rng, 8 + i % 12, default_names(), TermClass::Full); break;
      case 1: b = unfold(a); break;
      default:
        b = a;
        for (int k = 0; k < 3; ++k) {
          auto steps = redexes(b, RuleSet{Rule::LS, Rule::GC});
          if (steps.empty()) break;
          b = apply_step(b, steps[rng() % steps.size()]);
        }
        break;
    }
    if (unfold(a).size() > 10000 || unfold(b).size() > 10000) continue;
    bool expect = oracle_eq(a, b);
    equal += expect;
    EXPECT_EQ(unfold_eq(a, b), expect) << print(a) << " vs " << print(b);
  }
  EXPECT_GT(equal, 500);
}

TEST(FillMatrix, CellInvariants) {
  auto terms = small_terms(4);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) terms.push_back(random_term(rng, 9, default_names(), TermClass::Full));
  std::size_t checked = 0;
  for (std::size_t ia = 0; ia < terms.size(); ia += 3)
    for (std::size_t ib = 1; ib < terms.size(); ib += 29) {
      auto msg = props::cell_invariants(terms[ia], terms[ib], &checked);
      ASSERT_TRUE(msg.empty()) << msg;
    }
  EXPECT_GT(checked, 1000u);
}

TEST(Oracle, UnifyingRenaming) {
  EXPECT_EQ(unifying_renaming_oracle(parse("x"), parse("y")), ConstrainingSet({{n("x"), n("y")}}));
  EXPECT_EQ(unifying_renaming_oracle(parse("\\z.x z"), parse("\\z.y z")),
            ConstrainingSet({{n("x"), n("y")}}));
  EXPECT_FALSE(unifying_renaming_oracle(parse("x x"), parse("x y")));
  EXPECT_FALSE(unifying_renaming_oracle(parse("\\z.z"), parse("\\z.x")));
}

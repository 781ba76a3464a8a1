#include <gtest/gtest.h>

#include <random>

#include "lsc/family.hpp"
#include "lsc/syntax.hpp"
#include "lsc/term.hpp"
#include "oracles.hpp"

using namespace lsc;

namespace {

Term P(std::string_view s) { return parse(s); }

std::vector<std::string> foci(const Term& t) {
  std::vector<std::string> out;
  for (const auto& [occ, f] : box_subterms(t)) out.push_back(print(f));
  return out;
}

std::uint64_t count_nodes(const Term& t) {
  switch (t.kind()) {
    case Kind::Var: return 1;
    case Kind::Abs: return 1 + count_nodes(t.left());
    default: return 1 + count_nodes(t.left()) + count_nodes(t.right());
  }
}

}  // namespace

TEST(Parse, Identity) { EXPECT_EQ(P("\\x.x"), lam("x", var("x"))); }

TEST(Parse, NestedSubstitutions) {
  Term expected = sub(sub(app(var("x"), var("y")), Name("x"), app(var("y"), var("r"))), Name("y"),
                      var("u"));
  EXPECT_EQ(P("(x y)[x/y r][y/u]"), expected);
}

TEST(Parse, FixedPointBody) {
  Term expected =
      lam("x", lam("y", app(var("y"), app(app(var("x"), var("x")), var("y")))));
  EXPECT_EQ(P("\\x.\\y.y (x x y)"), expected);
}

TEST(Parse, LambdaGlyphCommentsAndTags) {
  EXPECT_EQ(P("λx.x -- identity\n"), P("\\x.x"));
  Term t = P("x#7 y");
  EXPECT_EQ(t.left().name(), Name("x", 7));
  EXPECT_EQ(print(t), "x#7 y");
}

TEST(Parse, SubstitutionBindsTighterThanApplication) {
  EXPECT_EQ(P("x y[y/z]"), app(var("x"), sub(var("y"), Name("y"), var("z"))));
  EXPECT_EQ(P("x \\y.y z"), app(var("x"), lam("y", app(var("y"), var("z")))));
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse("\\x.\n  (x y");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 7u);
  }
  EXPECT_THROW(parse(""), SyntaxError);
  EXPECT_THROW(parse("x[y z]"), SyntaxError);
  EXPECT_THROW(parse("x#"), SyntaxError);
  EXPECT_THROW(parse("x )"), SyntaxError);
}

TEST(Print, Examples) {
  EXPECT_EQ(print(lam("x", var("x"))), "\\x.x");
  EXPECT_EQ(print(sub(var("y"), Name("x"), var("z"))), "y[x/z]");
  EXPECT_EQ(print(P("(x y)[x/y r][y/u]")), "(x y)[x/y r][y/u]");
  EXPECT_EQ(print(P("(\\x.x) (\\y.y) z")), "(\\x.x) (\\y.y) z");
  EXPECT_EQ(print(P("x (y z)")), "x (y z)");
}

TEST(Print, RoundTripRandom) {
  std::mt19937_64 rng(1);
  std::vector<Name> names{Name("x"), Name("y"), Name("z", 3), Name("w'")};
  for (int i = 0; i < 1000; ++i) {
    Term t = random_term(rng, 1 + rng() % 25, names, TermClass::Full);
    std::string s = print(t);
    ASSERT_EQ(parse(s), t) << s;
    ASSERT_EQ(print(parse(s)), s);
  }
}

TEST(FreeVariables, Examples) {
  EXPECT_EQ(fv(var("x")), NameSet{Name("x")});
  EXPECT_EQ(fv(P("x[x/y]")), NameSet{Name("y")});
  EXPECT_EQ(fv(P("(x y)[x/y r]")), (NameSet{Name("y"), Name("r")}));
}

TEST(FreeVariables, AgreeWithOracle) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    Term t = random_term(rng, 1 + rng() % 20, default_names(), TermClass::Full);
    ASSERT_EQ(fv(t), oracle::fv(t)) << print(t);
  }
}

TEST(Substitution, Examples) {
  EXPECT_EQ(subst(var("x"), Name("x"), P("\\y.y")), P("\\y.y"));
  Term r = subst(P("\\y.x y"), Name("x"), var("y"));
  ASSERT_TRUE(r.is_abs());
  EXPECT_NE(r.name(), Name("y"));
  EXPECT_EQ(r.body(), app(var("y"), var(r.name())));
  EXPECT_EQ(subst(P("x x"), Name("x"), P("y r")), P("(y r) (y r)"));
}

TEST(Substitution, AgreesWithFullRenamingOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    Term t = random_term(rng, 1 + rng() % 16, default_names(), TermClass::Full);
    Term u = random_term(rng, 1 + rng() % 6, default_names(), TermClass::Full);
    Name x = default_names()[rng() % 2];
    Term got = subst(t, x, u);
    ASSERT_TRUE(oracle::alpha_eq(got, oracle::subst_full(t, x, u))) << print(t) << " / " << print(u);
    if (t.has_free(x)) {
      NameSet expected = fv(t);
      expected.erase(x);
      for (const auto& n : u.free_names()) expected.insert(n);
      ASSERT_EQ(fv(got), expected);
    } else {
      ASSERT_TRUE(alpha_eq(got, t));
    }
  }
}

TEST(Alpha, Examples) {
  EXPECT_TRUE(alpha_eq(P("\\x.x"), P("\\y.y")));
  EXPECT_FALSE(alpha_eq(var("x"), var("y")));
  EXPECT_FALSE(alpha_eq(P("(x x)[x/\\y.y]"), P("(x x)[z/\\y.y]")));
  EXPECT_TRUE(alpha_eq(P("(x x)[x/\\y.y]"), P("(z z)[z/\\w.w]")));
}

TEST(Alpha, AgreesWithNamelessOracle) {
  std::mt19937_64 rng(4);
  std::vector<Name> names{Name("x"), Name("y"), Name("z")};
  int equal = 0;
  for (int i = 0; i < 20000; ++i) {
    std::size_t n = 1 + rng() % 9;
    Term a = random_term(rng, n, names, TermClass::Full);
    Term b = (i % 3 == 0) ? freshen_bound(a) : random_term(rng, n, names, TermClass::Full);
    bool got = alpha_eq(a, b);
    ASSERT_EQ(got, oracle::alpha_eq(a, b)) << print(a) << " vs " << print(b);
    if (got) {
      ++equal;
      ASSERT_EQ(alpha_hash(a), alpha_hash(b));
    }
  }
  EXPECT_GT(equal, 6000);
}

TEST(Alpha, EquivalenceRelationOnSmallTerms) {
  TermEnumerator gen(default_names(), TermClass::Full);
  std::vector<Term> ts;
  gen.for_each_up_to(4, [&](const Term& t) { ts.push_back(t); });
  for (const auto& a : ts) {
    ASSERT_TRUE(alpha_eq(a, a));
    ASSERT_TRUE(alpha_eq(a, freshen_bound(a)));
    for (const auto& b : ts) {
      bool ab = alpha_eq(a, b);
      ASSERT_EQ(ab, alpha_eq(b, a));
      ASSERT_EQ(ab, alpha_eq(freshen_bound(a), freshen_bound(b)));
    }
  }
}

TEST(BoxSubterms, Examples) {
  EXPECT_TRUE(box_subterms(P("\\x.x")).empty());
  EXPECT_EQ(foci(P("(x y)[x/u]")), (std::vector<std::string>{"y", "u"}));
  auto boxes = box_subterms(P("(x y)[x/u]"));
  EXPECT_EQ(boxes[0].first.path, (std::vector<Step>{Step::BodyOfSub, Step::ArgOf}));
  EXPECT_EQ(boxes[1].first.path, (std::vector<Step>{Step::ArgOfSub}));
  EXPECT_EQ(foci(P("(\\x.t)[z/w] u")), (std::vector<std::string>{"w", "u"}));
}

TEST(BoxSubterms, PreorderAndFoci) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    Term t = random_term(rng, 1 + rng() % 20, default_names(), TermClass::Full);
    auto boxes = box_subterms(t);
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      const auto& [occ, f] = boxes[k];
      ASSERT_EQ(subterm_at(t, occ), f);
      Step last = occ.path.back();
      ASSERT_TRUE(last == Step::ArgOf || last == Step::ArgOfSub);
      if (k > 0) ASSERT_LT(boxes[k - 1].first, occ);
    }
  }
}

TEST(Shallow, Examples) {
  EXPECT_TRUE(is_shallow(P("\\x.x (y z)")));
  EXPECT_FALSE(is_shallow(P("(x y)[x/(y r)[y/u]]")));
  EXPECT_TRUE(is_shallow(P("((x y)[x/y r])[y/u]")));
  EXPECT_EQ(es_count(P("\\x.x (y z)")), 0u);
  EXPECT_EQ(es_count(P("((x y)[x/y r])[y/u]")), 2u);
}

TEST(Shallow, PureTermsAreShallow) {
  TermEnumerator gen(default_names(), TermClass::Pure);
  gen.for_each_up_to(7, [](const Term& t) { ASSERT_TRUE(is_shallow(t)); });
}

TEST(Occurrence, Predicates) {
  Occurrence o{{Step::FunOf, Step::BodyOfAbs, Step::BodyOfSub}};
  EXPECT_TRUE(o.is_head_context());
  EXPECT_FALSE(o.is_pure_head_context());
  EXPECT_EQ(o.box_depth(), 0u);
  Occurrence p{{Step::ArgOf, Step::ArgOfSub}};
  EXPECT_FALSE(p.is_head_context());
  EXPECT_EQ(p.box_depth(), 2u);
  Term t = P("(\\x.x[y/z]) w");
  EXPECT_TRUE(valid_occurrence(t, o));
  EXPECT_EQ(subterm_at(t, o), var("x"));
  EXPECT_FALSE(valid_occurrence(t, p));
  EXPECT_THROW(subterm_at(t, p), InvalidOccurrence);
  EXPECT_EQ(replace_at(t, o, var("q")), P("(\\x.q[y/z]) w"));
}

TEST(Names, FreshAndTags) {
  Name x("x");
  Name a = x.fresh();
  Name b = x.fresh();
  EXPECT_NE(a, b);
  EXPECT_EQ(a.base(), "x");
  EXPECT_EQ(parse_name(a.str()), a);
  Name big("q", 1000000);
  EXPECT_GT(big.fresh().tag(), 1000000u);
}

TEST(Family, SmallMembers) {
  auto f0 = gen_family(0);
  EXPECT_EQ(f0.t, P("y x x"));
  EXPECT_EQ(f0.r, P("y x x"));
  auto f1 = gen_family(1);
  EXPECT_EQ(f1.t, P("(\\x.y x x) (y x x)"));
  EXPECT_EQ(f1.r, P("y (y x x) (y x x)"));
  EXPECT_EQ(count_nodes(gen_family(10).r), 8189u);
  EXPECT_EQ(gen_family(10).r.size(), 8189u);
  EXPECT_EQ(family_source(1), "(\\x.y x x) (y x x)");
}

TEST(Family, Recurrence) {
  // r_{n+1} = y r_n r_n adds two application nodes and one variable.
  std::uint64_t prev = gen_family(0).r.size();
  for (unsigned n = 1; n <= 14; ++n) {
    auto f = gen_family(n);
    EXPECT_EQ(f.r.size(), 2 * prev + 3);
    EXPECT_EQ(count_nodes(f.r), f.r.size());
    EXPECT_EQ(f.t.size(), 5 + 7 * n);
    prev = f.r.size();
  }
  EXPECT_THROW(gen_family(25), FamilyTooLarge);
  EXPECT_THROW(gen_family(5, 4), FamilyTooLarge);
}

TEST(Enumerator, CountsMatchRecurrence) {
  // c(1)=2, c(n)=2c(n-1)+3·Σ c(i)c(n-1-i) for the full class over two names.
  std::vector<std::uint64_t> c{0, 2};
  for (std::size_t n = 2; n <= 6; ++n) {
    std::uint64_t s = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) s += c[i] * c[n - 1 - i];
    c.push_back(2 * c[n - 1] + 3 * s);
  }
  TermEnumerator gen(default_names(), TermClass::Full);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(gen.of_size(n).size(), c[n]);
  TermEnumerator shallow(default_names(), TermClass::Shallow);
  for (std::size_t n = 1; n <= 6; ++n)
    for (const auto& t : shallow.of_size(n)) ASSERT_TRUE(is_shallow(t));
}

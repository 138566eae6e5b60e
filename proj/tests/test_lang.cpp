#include <doctest.h>

#include "alignppl/anf.hpp"
#include "alignppl/eval.hpp"
#include "alignppl/models.hpp"
#include "alignppl/parser.hpp"
#include "support/gen.hpp"
#include "support/term_interp.hpp"

using namespace alignppl;

TEST_CASE("parse assume of a distribution application") {
  TermPtr t = parse("assume (Bernoulli 0.5)");
  REQUIRE(t->kind == Term::Kind::Assume);
  REQUIRE(t->a->kind == Term::Kind::App);
  CHECK(t->a->a->kind == Term::Kind::Const);
  CHECK(t->a->a->lit.op == OpTag::DistBernoulli);
  CHECK(t->a->b->lit.r == 0.5);
}

TEST_CASE("parse the geometric program structure") {
  TermPtr t = parse(corpusEntry("geometric").source);
  REQUIRE(t->kind == Term::Kind::LetRec);
  CHECK(t->name == "geometric");
  REQUIRE(t->a->kind == Term::Kind::Lam);
  // body contains Bernoulli 0.5, an if, and weight 1.5
  const std::string printed = prettyPrint(t);
  CHECK(printed.find("Bernoulli 0.5") != std::string::npos);
  CHECK(printed.find("weight 1.5") != std::string::npos);
  CHECK(printed.find("if x then") != std::string::npos);
}

TEST_CASE("missing bound expression is a syntax error with position") {
  try {
    parse("let x = in x");
    FAIL("expected a syntax error");
  } catch (const LangError& e) {
    CHECK(e.pos.line == 1);
    CHECK(e.pos.col >= 9);
  }
}

TEST_CASE("reserved word misuse is rejected") {
  CHECK_THROWS_AS(parse("let let = 3 in 1"), LangError);
  CHECK_THROWS_AS(parse("lam in. in"), LangError);
}

TEST_CASE("sequencing sugar desugars to a unit let") {
  TermPtr t = parse("weight 2.0; 4");
  REQUIRE(t->kind == Term::Kind::Let);
  CHECK(t->name == "_");
  CHECK(t->a->kind == Term::Kind::Weight);
}

TEST_CASE("uniquify renames shadowed binders with counter suffixes") {
  TermPtr t = uniquify(parse("let x = 1 in let x = 2 in x"));
  REQUIRE(t->kind == Term::Kind::Let);
  CHECK(t->name == "x");
  CHECK(t->b->name == "x_1");
  CHECK(t->b->b->name == "x_1");
}

TEST_CASE("uniquify keeps already-distinct binders") {
  TermPtr orig = parse("let a = 1 in let b = 2 in a + b");
  TermPtr t = uniquify(orig);
  CHECK(alphaEqual(orig, t));
  CHECK(prettyPrint(orig) == prettyPrint(t));
}

TEST_CASE("unbound variable is an error") {
  CHECK_THROWS_AS(uniquify(parse("y")), LangError);
  CHECK_THROWS_AS(uniquify(parse("let x = y in x")), LangError);
}

TEST_CASE("let rec must bind a lambda") {
  CHECK_THROWS_AS(letrecDesugar(uniquify(parse("let rec f = 3 in f"))), LangError);
  CHECK_NOTHROW(letrecDesugar(uniquify(parse("let rec f = lam x. f x in f"))));
}

TEST_CASE("toANF labels every intermediate and keeps branches nested") {
  ANFProgramPtr p = compileProgram("if (assume (Bernoulli 0.5)) then 1 else 2");
  // root: lets for Bernoulli const, dist app, assume, then the if, then tail
  const ANFTerm* t = p->root;
  std::vector<ANFBound::Kind> kinds;
  while (t->kind == ANFTerm::Kind::Let) {
    kinds.push_back(t->bound.kind);
    t = t->rest;
  }
  REQUIRE(t->kind == ANFTerm::Kind::TailVar);
  REQUIRE(kinds.size() == 4);
  CHECK(kinds[0] == ANFBound::Kind::Const);
  CHECK(kinds[1] == ANFBound::Kind::App);
  CHECK(kinds[2] == ANFBound::Kind::Assume);
  CHECK(kinds[3] == ANFBound::Kind::If);
}

TEST_CASE("toANF is structurally stable on already-ANF input") {
  ANFProgramPtr p = compileProgram(corpusEntry("fig4").source);
  // every let binder in the source survives with its own name, no extras
  std::vector<std::string> sourceNames = {"n1", "n2", "one", "half", "c",  "f1", "t1", "f2",
                                          "t2", "f3", "t3",  "f4",   "t4", "bern", "d1", "a1",
                                          "v1", "v2", "v3",  "f5",   "t5", "v4", "i1", "t6"};
  size_t letCount = 0;
  for (NameId n = 0; n < p->names.size(); ++n) {
    if (p->info[n].letBound) ++letCount;
  }
  CHECK(letCount == sourceNames.size());
  for (const auto& s : sourceNames) {
    NameId id;
    REQUIRE(p->names.find(s, id));
    CHECK(p->info[id].letBound);
  }
}

TEST_CASE("NAME is total and NAMES collects top-level binders") {
  ANFProgramPtr p = compileProgram("let a = 1 in let b = 2 in a + b");
  CHECK(p->nameStr(anfName(p->root)).size() > 0);
  std::vector<NameId> names = anfNames(p->root);
  REQUIRE(names.size() >= 3);  // a, b, and the + chain
  CHECK(p->nameStr(names[0]) == "a");
  CHECK(p->nameStr(names[1]) == "b");
}

TEST_CASE("fig1 ANF binds the Poisson draw to its source name") {
  ANFProgramPtr p = compileProgram(corpusEntry("fig1").source);
  NameId n;
  REQUIRE(p->names.find("n", n));
  CHECK(p->isAssumeBinder(n));
  NameId wObs;
  REQUIRE(p->names.find("wObs", wObs));
  CHECK(p->isWeightBinder(wObs));
}

TEST_CASE("pretty-print round-trips to an alpha-equivalent term") {
  Rng rng = Rng::fromSeed(1234);
  for (int i = 0; i < 200; ++i) {
    testing::ProgramGen gen(rng.child(i));
    std::string src = gen.program();
    CAPTURE(src);
    TermPtr t1 = parse(src);
    std::string printed = prettyPrint(t1);
    CAPTURE(printed);
    TermPtr t2 = parse(printed);
    CHECK(alphaEqual(t1, t2));
    // canonical form is a fixed point
    CHECK(prettyPrint(t2) == printed);
  }
}

TEST_CASE("corpus sources round-trip through the pretty printer") {
  for (const CorpusEntry& e : corpus()) {
    CAPTURE(e.id);
    TermPtr t1 = parse(e.source);
    TermPtr t2 = parse(prettyPrint(t1));
    CHECK(alphaEqual(t1, t2));
  }
}

TEST_CASE("pipeline terminates and every ANF node is reachable from the NAME chain") {
  Rng rng = Rng::fromSeed(99);
  for (int i = 0; i < 200; ++i) {
    testing::ProgramGen gen(rng.child(i));
    std::string src = gen.program();
    CAPTURE(src);
    ANFProgramPtr p = compileProgram(src);
    std::vector<const ANFTerm*> stack = {p->root};
    while (!stack.empty()) {
      const ANFTerm* t = stack.back();
      stack.pop_back();
      CHECK(anfName(t) != kNoName);
      while (t->kind == ANFTerm::Kind::Let) {
        if (t->bound.t1) stack.push_back(t->bound.t1);
        if (t->bound.t2) stack.push_back(t->bound.t2);
        t = t->rest;
      }
    }
  }
}

TEST_CASE("toANF preserves value and weight against the direct interpreter") {
  Rng rng = Rng::fromSeed(4321);
  int checked = 0;
  for (int i = 0; checked < 100 && i < 400; ++i) {
    testing::ProgramGen gen(rng.child(i));
    std::string src = gen.program();
    CAPTURE(src);
    TermPtr term = letrecDesugar(uniquify(parse(src)));
    ANFProgramPtr p = toANF(term);
    // sample a trace from the ANF machine, then replay both interpreters
    EvalOutcome sampled = evalSample(p, Rng::fromSeed(1000 + i));
    EvalOutcome viaAnf = evalReplay(p, sampled.trace);
    testing::TermInterp direct(sampled.trace);
    testing::TermOutcome viaTerm = direct.run(term);
    CHECK(valueEqual(viaAnf.value, viaTerm.value));
    CHECK(viaAnf.logLikelihood == doctest::Approx(viaTerm.logLikelihood).epsilon(1e-12));
    CHECK(viaAnf.logPrior == doctest::Approx(viaTerm.logPrior).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked == 100);
}

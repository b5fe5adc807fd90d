// Copyright 2026 The zkleak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zkleak/defect_patterns.h"

#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <set>

#include "testing/corpus.h"
#include "testing/oracles.h"
#include "testing/program_gen.h"
#include "zkleak/program.h"

namespace zkleak {
namespace {

using Form = PatternUnit::Form;

TEST(CompilePatternTest, MallocAssignment) {
  const DefectPattern p = CompilePattern("%var% = malloc (");
  ASSERT_EQ(p.units.size(), 4u);
  EXPECT_EQ(p.units[0], PatternUnit::Abstract(AbstractKind::kVar));
  EXPECT_EQ(p.units[1], PatternUnit::Literal("="));
  EXPECT_EQ(p.units[2], PatternUnit::Literal("malloc"));
  EXPECT_EQ(p.units[3], PatternUnit::Literal("("));
}

TEST(CompilePatternTest, UnitForms) {
  const DefectPattern p = CompilePattern("[;{}] delete|free| %oror% ||");
  ASSERT_EQ(p.units.size(), 4u);
  EXPECT_EQ(p.units[0].form, Form::kCharClass);
  EXPECT_EQ(p.units[0].chars, ";{}");
  EXPECT_EQ(p.units[1].form, Form::kAlternation);
  EXPECT_EQ(p.units[1].choices, (std::vector<std::string>{"delete", "free"}));
  EXPECT_TRUE(p.units[1].allows_empty);
  EXPECT_EQ(p.units[2], PatternUnit::Abstract(AbstractKind::kOrOr));
  EXPECT_EQ(p.units[3], PatternUnit::Literal("||"));
}

TEST(CompilePatternTest, UnknownAbstractionNamesItsUnit) {
  try {
    CompilePattern("%var% = %bogus%");
    FAIL() << "expected BadPatternUnit";
  } catch (const BadPatternUnit& e) {
    EXPECT_EQ(e.unit_index(), 2u);
  }
  EXPECT_THROW(CompilePattern(""), BadPatternUnit);
  EXPECT_THROW(CompilePattern("a ||| b"), BadPatternUnit);
}

TEST(CompilePatternTest, EveryAbstractionRoundTrips) {
  for (AbstractKind k :
       {AbstractKind::kAny, AbstractKind::kName, AbstractKind::kType, AbstractKind::kNum,
        AbstractKind::kBool, AbstractKind::kComp, AbstractKind::kStr, AbstractKind::kVar,
        AbstractKind::kVarId, AbstractKind::kOp, AbstractKind::kOr, AbstractKind::kOrOr}) {
    const DefectPattern p = CompilePattern(AbstractKindName(k));
    ASSERT_EQ(p.units.size(), 1u);
    EXPECT_EQ(p.units[0], PatternUnit::Abstract(k));
  }
}

TEST(BuiltinPatternsTest, CatalogLabels) {
  const PatternCatalog c = BuiltinPatterns();
  std::vector<std::string> labels;
  for (const DefectPattern& p : c.patterns()) labels.push_back(p.label);
  EXPECT_EQ(labels, (std::vector<std::string>{
                        "alloc.malloc", "alloc.calloc", "alloc.realloc", "alloc.new",
                        "alloc.new_array", "free.free", "free.delete", "free.delete_array",
                        "transfer.assign", "transfer.return", "transfer.inc_post",
                        "transfer.dec_post", "transfer.inc_pre", "transfer.dec_pre",
                        "transfer.null"}));
  EXPECT_EQ(CategoryOf("alloc.new"), PatternCategory::kAlloc);
  EXPECT_EQ(CategoryOf("free.free"), PatternCategory::kFree);
  EXPECT_EQ(CategoryOf("transfer.null"), PatternCategory::kTransfer);
  EXPECT_EQ(CategoryOf("custom"), PatternCategory::kOther);
}

TEST(MatchTest, MallocInFunctionBody) {
  const Program prog = Program::FromText("void f(){ char* p; p = malloc(10); }");
  const TokenStream& ts = prog.stream(0);
  const DefectPattern p = CompilePattern("%var% = malloc (");
  const auto spans = MatchAll(ts, p);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(ts[spans[0].first].text, "p");
  EXPECT_EQ(spans[0].end - spans[0].first, 4u);
  EXPECT_EQ(spans[0].Bound(0), spans[0].first);
}

TEST(MatchTest, NewArrayNeedsBracket) {
  const Program prog = Program::FromText("void f(){ int* p; p = new int[5]; p = new int(5); }",
                                         "a.cpp");
  const PatternCatalog c = BuiltinPatterns();
  const MatchContext ctx{&prog.tree().types(), 0};
  EXPECT_EQ(MatchAll(prog.stream(0), *c.Find("alloc.new_array"), ctx).size(), 1u);
  EXPECT_EQ(MatchAll(prog.stream(0), *c.Find("alloc.new"), ctx).size(), 2u);
}

TEST(MatchTest, VarIdRestrictsToOneVariable) {
  const Program prog = Program::FromText("void f(){ char *a, *b; free(a); free(b); }");
  const TokenStream& ts = prog.stream(0);
  const DefectPattern p = CompilePattern("free ( %varid% )");
  EXPECT_EQ(MatchAll(ts, p).size(), 2u);
  VarId b = 0;
  for (const LexToken& t : ts.tokens()) {
    if (t.text == "b") b = t.var_id;
  }
  const auto spans = MatchAll(ts, p, {nullptr, b});
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(ts[spans[0].first + 2].var_id, b);
}

TEST(MatchTest, OptionalAlternationBacktracks) {
  const TokenStream ts = Tokenize("return ; ; x ;");
  const DefectPattern p = CompilePattern("return|x| ;");
  const auto spans = MatchAll(ts, p);
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[0].end, 2u);
  EXPECT_EQ(spans[1].first, 2u);
  EXPECT_EQ(spans[1].end, 3u);
  EXPECT_EQ(spans[2].first, 3u);
  EXPECT_EQ(spans[2].end, 5u);
}

TEST(MatchTest, LimitIsNeverConsumed) {
  const TokenStream ts = Tokenize("free ( p ) ;");
  const DefectPattern p = CompilePattern("free ( %name% )");
  EXPECT_TRUE(MatchAt(ts, 0, p).has_value());
  EXPECT_FALSE(MatchAt(ts, 0, p, {}, 3).has_value());
  EXPECT_TRUE(MatchAll(ts, p, {}, 0, 3).empty());
}

TEST(MatchTest, AbstractionsClassifyTokens) {
  const TokenStream ts = Tokenize("x 12 true < \"s\" + | ||");
  const auto one = [&](std::string_view pat, std::size_t pos) {
    return MatchAt(ts, pos, CompilePattern(pat)).has_value();
  };
  EXPECT_TRUE(one("%name%", 0));
  EXPECT_FALSE(one("%name%", 1));
  EXPECT_TRUE(one("%num%", 1));
  EXPECT_TRUE(one("%bool%", 2));
  EXPECT_TRUE(one("%comp%", 3));
  EXPECT_TRUE(one("%str%", 4));
  EXPECT_TRUE(one("%op%", 5));
  EXPECT_TRUE(one("%or%", 6));
  EXPECT_TRUE(one("%oror%", 7));
  EXPECT_FALSE(one("%or%", 7));
  EXPECT_FALSE(one("%var%", 0));
  EXPECT_TRUE(one("%any%", 4));
}

TEST(PatternCatalogTest, MergeOverridesAndReportsErrors) {
  PatternCatalog c = BuiltinPatterns();
  const auto errors = c.MergeText(
      "# project allocators\n"
      "alloc.pool: %var% = pool_alloc (\n"
      "\n"
      "alloc.malloc: %var% = xmalloc (  # wrapper\n"
      "broken line\n"
      "alloc.bad: %var% = %nope%\n");
  ASSERT_EQ(errors.size(), 2u);
  EXPECT_EQ(errors[0].line, 5);
  EXPECT_EQ(errors[1].line, 6);
  EXPECT_EQ(errors[1].label, "alloc.bad");
  EXPECT_EQ(c.size(), 16u);
  EXPECT_EQ(c.Find("alloc.malloc")->source, "%var% = xmalloc (");
  EXPECT_NE(c.Find("alloc.pool"), nullptr);
  EXPECT_EQ(c.Find("alloc.bad"), nullptr);
}

TEST(MatchProperty, AgreesWithBruteForce) {
  std::mt19937 rng(777);
  const PatternCatalog catalog = BuiltinPatterns();
  std::vector<DefectPattern> patterns = catalog.patterns();
  patterns.push_back(CompilePattern("delete|free| [(] %name%|%var%|"));
  patterns.push_back(CompilePattern("%any% %op% %num%|%str%|"));
  for (int round = 0; round < 200; ++round) {
    const TokenStream ts = testing::RandomTokenStream(rng, 64);
    for (const DefectPattern& p : patterns) {
      const MatchContext ctx{nullptr, static_cast<VarId>(round % 4)};
      ASSERT_EQ(MatchAll(ts, p, ctx), testing::BruteForceMatchAll(ts, p, ctx))
          << p.source << " on " << ts.Text(0, ts.size());
    }
  }
}

TEST(MatchProperty, MatchesAreDisjointAndOrdered) {
  std::mt19937 rng(99);
  const PatternCatalog catalog = BuiltinPatterns();
  for (int round = 0; round < 100; ++round) {
    const TokenStream ts = testing::RandomTokenStream(rng, 64);
    for (const DefectPattern& p : catalog.patterns()) {
      const auto spans = MatchAll(ts, p);
      for (std::size_t i = 0; i < spans.size(); ++i) {
        EXPECT_LT(spans[i].first, spans[i].end);
        if (i > 0) EXPECT_LE(spans[i - 1].end, spans[i].first);
        EXPECT_EQ(MatchAll(ts, p), spans);
      }
    }
  }
}

TEST(MatchProperty, EveryCatalogPatternHasACorpusExemplar) {
  const Program prog = Program::Build(testing::ReadSources(testing::CorpusDir() + "/defects"));
  const MatchContext ctx{&prog.tree().types(), 0};
  const PatternCatalog catalog = BuiltinPatterns();
  for (const DefectPattern& p : catalog.patterns()) {
    std::size_t hits = 0;
    for (const TokenStream& ts : prog.streams()) hits += MatchAll(ts, p, ctx).size();
    EXPECT_GT(hits, 0u) << p.label;
  }
}

TEST(MatchProperty, DoublingInputAtMostTriplesCost) {
  const DefectPattern p = CompilePattern("%var% = malloc|calloc| (");
  const auto cost = [&](int functions) {
    const Program prog = Program::FromText(testing::LinearSource(functions));
    double best = 1e9;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const std::size_t n = MatchAll(prog.stream(0), p).size();
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      EXPECT_GT(n, 0u);
      best = std::min(best, dt.count());
    }
    return best;
  };
  const double small = cost(400);
  const double large = cost(800);
  EXPECT_LE(large, 3.0 * small + 1e-4) << small << " vs " << large;
}

}  // namespace
}  // namespace zkleak

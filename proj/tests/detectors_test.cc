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

#include "zkleak/detectors.h"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "path_analysis.h"
#include "testing/corpus.h"
#include "zkleak/pipeline.h"

namespace zkleak {
namespace {

std::vector<Defect> General(std::string_view text, std::string path = "input.c") {
  const Program p = Program::FromText(text, std::move(path));
  const Fcg fcg = BuildFcg(p);
  const auto cfgs = BuildAllCfgs(p);
  const PatternCatalog catalog = BuiltinPatterns();
  const UpdateResult u = UpdateAll(p, fcg, cfgs, catalog);
  return GeneralCheck(p, fcg, cfgs, WithRingSummaries(u, fcg), catalog).defects;
}

std::vector<Defect> Special(std::string_view text) {
  return SpecialCheck(Program::FromText(text, "input.cpp"), BuiltinPatterns());
}

Analysis AnalyzeCorpus(std::vector<SourceText> sources) {
  PipelineConfig config;
  config.jobs = 1;
  return AnalyzeSources(std::move(sources), config);
}

TEST(GeneralCheckTest, UnreleasedLocal) {
  const auto d = General("void f(){\n  char* p = malloc(4);\n}\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, DefectKind::kMissingRelease);
  EXPECT_EQ(d[0].line, 2);
  EXPECT_EQ(d[0].func.name, "f");
  EXPECT_FALSE(d[0].trace.empty());
}

TEST(GeneralCheckTest, ReleasedOnOneArmOnly) {
  const auto d = General("void f(int c){ char* p=malloc(4); if(c) free(p); }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, DefectKind::kPathMissingRelease);
  EXPECT_EQ(d[0].path, (PathCondition{{"c", "else"}}));
}

TEST(GeneralCheckTest, MatchedPairIsClean) {
  EXPECT_TRUE(General("void f(){ char* p=malloc(4); free(p); }").empty());
}

TEST(GeneralCheckTest, LoopCarriedReallocation) {
  const auto d = General(
      "void f(int n) {\n"
      "  char* p = NULL;\n"
      "  for (int i = 0; i < n; i++) {\n"
      "    p = malloc(4);\n"
      "  }\n"
      "  free(p);\n"
      "}\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, DefectKind::kPointerOwnershipLost);
  EXPECT_EQ(d[0].line, 4);
}

TEST(GeneralCheckTest, NullGuardedEarlyReturnIsNotALeak) {
  EXPECT_TRUE(General("int f(){ char* p = malloc(4); if (p == NULL) return -1; free(p); "
                      "return 0; }")
                  .empty());
}

TEST(GeneralCheckTest, UnknownTaintKeepsLocalEvidence) {
  const auto d = General(
      "void spin(char* p){ spin(p); }\n"
      "void f(){\n"
      "  char* q = malloc(4);\n"
      "  spin(q);\n"
      "  free(q);\n"
      "  free(q);\n"
      "}\n");
  std::multiset<DefectKind> kinds;
  for (const Defect& x : d) kinds.insert(x.kind);
  EXPECT_EQ(kinds.count(DefectKind::kDoubleFree), 1u);
  EXPECT_EQ(kinds.count(DefectKind::kMissingRelease), 0u);
}

TEST(SpecialCheckTest, ConstructorAllocationNotReleased) {
  const auto d = Special("class A{ char* p; A(){p=new char[4];} ~A(){} };");
  ASSERT_GE(d.size(), 1u);
  EXPECT_EQ(std::count_if(d.begin(), d.end(),
                          [](const Defect& x) { return x.kind == DefectKind::kCtorDtorMismatch; }),
            1);
  EXPECT_NE(d[0].message.find("p"), std::string::npos);
}

TEST(SpecialCheckTest, NonVirtualBaseDestructor) {
  const auto d = Special(
      "class A { public: ~A() {} };\n"
      "class B : public A { public: B() { q = new int; } ~B() { delete q; }\n"
      "  B(const B&) = delete; B& operator=(const B&) = delete; int* q; };\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, DefectKind::kNonVirtualBaseDtor);
  EXPECT_EQ(d[0].line, 1);
  EXPECT_EQ(d[0].func.class_name, "A");
}

TEST(SpecialCheckTest, ImplicitCopyOfOwningMember) {
  const auto d = Special(
      "class C {\n"
      " public:\n"
      "  C() { p = new char[4]; }\n"
      "  ~C() { delete[] p; }\n"
      "  char* p;\n"
      "};\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, DefectKind::kShallowCopy);
  EXPECT_EQ(d[0].line, 1);
}

TEST(SpecialCheckTest, DeepCopyIsClean) {
  EXPECT_TRUE(Special("class C {\n"
                      " public:\n"
                      "  C() { p = new char[4]; }\n"
                      "  C(const C& o) { p = new char[4]; }\n"
                      "  C& operator=(const C& o) { if (this != &o) { p[0] = o.p[0]; } "
                      "return *this; }\n"
                      "  virtual ~C() { delete[] p; }\n"
                      "  char* p;\n"
                      "};\n")
                  .empty());
}

TEST(DetectorProperty, CorpusMatchesAnnotations) {
  for (const char* dir : {"/defects", "/clean", "/known_fp"}) {
    const auto sources = testing::ReadSources(testing::CorpusDir() + dir);
    const Analysis a = AnalyzeCorpus(sources);
    const auto problems =
        testing::CompareWithAnnotations(a.report.defects, testing::InlineAnnotations(sources));
    EXPECT_TRUE(problems.empty()) << dir << ": " << ::testing::PrintToString(problems);
  }
}

TEST(DetectorProperty, CleanTwinsHaveNoDefects) {
  const Analysis a = AnalyzeCorpus(testing::ReadSources(testing::CorpusDir() + "/clean"));
  for (const Defect& d : a.report.defects) {
    ADD_FAILURE() << d.file << ":" << d.line << " " << DefectKindName(d.kind);
  }
}

TEST(DetectorProperty, DeterministicAndDeduplicated) {
  const auto sources = testing::ReadSources(testing::CorpusDir() + "/defects");
  const Analysis first = AnalyzeCorpus(sources);
  const Analysis second = AnalyzeCorpus(sources);
  ASSERT_EQ(first.report.defects.size(), second.report.defects.size());
  std::set<std::tuple<DefectKind, std::string, int, std::string, std::string>> keys;
  for (std::size_t i = 0; i < first.report.defects.size(); ++i) {
    const Defect& a = first.report.defects[i];
    const Defect& b = second.report.defects[i];
    EXPECT_EQ(std::tie(a.kind, a.file, a.line, a.message, a.path, a.trace),
              std::tie(b.kind, b.file, b.line, b.message, b.path, b.trace));
    EXPECT_EQ(a.func, b.func);
    EXPECT_TRUE(keys.insert({a.kind, a.file, a.line, a.func.ToString(), RenderPath(a.path)})
                    .second)
        << a.file << ":" << a.line;
    if (i > 0) {
      const Defect& prev = first.report.defects[i - 1];
      EXPECT_LE(std::tie(prev.file, prev.line), std::tie(a.file, a.line));
    }
  }
}

TEST(DetectorProperty, NormalizeDropsDuplicateKeys) {
  Defect a;
  a.kind = DefectKind::kDoubleFree;
  a.file = "b.c";
  a.line = 3;
  Defect b = a;
  b.message = "same key, other text";
  Defect c = a;
  c.file = "a.c";
  const auto out = NormalizeDefects({a, b, c});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].file, "a.c");
  EXPECT_EQ(out[1].file, "b.c");
}

// Nested branches that each hand a fresh allocation to its own global.
std::string BranchyFunction(std::mt19937& rng, int* allocs) {
  std::string body;
  std::string globals;
  std::function<void(int)> block = [&](int depth) {
    const int stmts = 1 + static_cast<int>(rng() % 3);
    for (int s = 0; s < stmts; ++s) {
      if (depth < 3 && rng() % 2 == 0) {
        body += "if (c" + std::to_string(depth) + ") {\n";
        block(depth + 1);
        body += "} else {\n";
        block(depth + 1);
        body += "}\n";
      } else {
        const std::string g = "g" + std::to_string((*allocs)++);
        globals += "char* " + g + ";\n";
        body += g + " = malloc(1);\n";
      }
    }
  };
  block(0);
  return globals + "void f(int c0, int c1, int c2) {\n" + body + "}\n";
}

TEST(DetectorProperty, JoinsKeepEveryArmsMachines) {
  std::mt19937 rng(31);
  int merged = 0;
  for (int round = 0; round < 100; ++round) {
    int allocs = 0;
    const std::string src = BranchyFunction(rng, &allocs);
    const Program p = Program::FromText(src);
    const Fcg fcg = BuildFcg(p);
    const auto cfgs = BuildAllCfgs(p);
    ASSERT_EQ(cfgs.size(), 1u);
    const PathResult r = RunPaths(p, cfgs.begin()->second, fcg, SummaryStore{},
                                  BuiltinPatterns(), AnalysisOptions{});
    std::set<int> ids;
    for (const Variant& v : r.exits) {
      for (const Machine& m : v.machines.machines()) {
        if (!m.external()) ids.insert(m.alloc().site.line);
      }
    }
    EXPECT_EQ(static_cast<int>(ids.size()), allocs) << src;
    EXPECT_TRUE(r.defects.empty()) << src;
    merged += r.path_insensitive;
  }
  // Both sides of the path budget are exercised.
  EXPECT_GT(merged, 5);
  EXPECT_LT(merged, 95);
}

}  // namespace
}  // namespace zkleak

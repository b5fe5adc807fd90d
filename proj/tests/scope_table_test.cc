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

#include "zkleak/scope_table.h"

#include <gtest/gtest.h>

#include <random>

#include "testing/reference_resolver.h"
#include "zkleak/defect_patterns.h"
#include "zkleak/program.h"

namespace zkleak {
namespace {

std::size_t Find(const TokenStream& ts, std::string_view text, int nth = 0) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].text == text && nth-- == 0) return i;
  }
  return kNoPos;
}

const ClassInfo* ClassNamed(const Program& p, std::string_view name) {
  for (const ClassInfo& c : p.classes()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

TEST(ScopeTreeTest, NestingFollowsBraces) {
  const Program p = Program::FromText("int main(){ if(x){ } }");
  const ScopeTree& tree = p.tree();
  ASSERT_EQ(tree.scope_count(), 3u);
  EXPECT_EQ(tree.root().kind, ScopeKind::kGlobal);
  const ScopeNode& main_fn = tree.node(tree.root().children.at(0));
  EXPECT_EQ(main_fn.kind, ScopeKind::kFunction);
  EXPECT_EQ(main_fn.name, "main");
  ASSERT_EQ(main_fn.children.size(), 1u);
  EXPECT_EQ(tree.node(main_fn.children[0]).kind, ScopeKind::kIf);
}

TEST(ScopeTreeTest, ControlScopesAreDistinguished) {
  const Program p = Program::FromText(
      "void f(int n){ for(;;){} while(n){} do{}while(n); switch(n){} try{}catch(...){} "
      "if(n){}else{} {} }");
  std::vector<ScopeKind> kinds;
  for (const ScopeNode& n : p.tree().nodes()) kinds.push_back(n.kind);
  EXPECT_EQ(kinds, (std::vector<ScopeKind>{
                       ScopeKind::kGlobal, ScopeKind::kFunction, ScopeKind::kFor,
                       ScopeKind::kWhile, ScopeKind::kDoWhile, ScopeKind::kSwitch,
                       ScopeKind::kTry, ScopeKind::kCatch, ScopeKind::kIf, ScopeKind::kElse,
                       ScopeKind::kBlock}));
}

TEST(ScopeTreeTest, ShadowingGetsFreshIds) {
  const Program p = Program::FromText("void f(){ int a; { int a; a = 1; } a = 2; }");
  const TokenStream& ts = p.stream(0);
  const VarId outer = ts[Find(ts, "a", 0)].var_id;
  const VarId inner = ts[Find(ts, "a", 1)].var_id;
  EXPECT_GT(outer, 0);
  EXPECT_GT(inner, 0);
  EXPECT_NE(outer, inner);
  EXPECT_EQ(ts[Find(ts, "a", 2)].var_id, inner);
  EXPECT_EQ(ts[Find(ts, "a", 3)].var_id, outer);
}

TEST(ScopeTreeTest, ResolveWalksAncestors) {
  const Program p = Program::FromText("void f(){ char* p; if (p) { p = 0; } }");
  const ScopeTree& tree = p.tree();
  const ScopeId fn = tree.root().children.at(0);
  const ScopeId if_scope = tree.node(fn).children.at(0);
  const SymbolEntry* local = tree.Resolve("p", fn);
  ASSERT_NE(local, nullptr);
  EXPECT_TRUE(local->is_pointer);
  EXPECT_EQ(tree.Resolve("p", if_scope), local);
  EXPECT_EQ(tree.Resolve("undeclared", if_scope), nullptr);
  EXPECT_EQ(tree.Resolve("undeclared", tree.root().id), nullptr);
}

TEST(ScopeTreeTest, DeclarationsBeforeUseOnly) {
  const Program p = Program::FromText("int g; void f(){ g = 1; int g; g = 2; }");
  const TokenStream& ts = p.stream(0);
  const VarId global = ts[Find(ts, "g", 0)].var_id;
  EXPECT_EQ(ts[Find(ts, "g", 1)].var_id, global);
  EXPECT_NE(ts[Find(ts, "g", 3)].var_id, global);
  EXPECT_TRUE(p.tree().symbol(global).is_global_or_static);
}

TEST(ScopeTreeTest, MultiDeclaratorPointerness) {
  const Program p = Program::FromText("void f(){ int *a, b, **c; }");
  const ScopeTree& tree = p.tree();
  const ScopeId fn = tree.root().children.at(0);
  EXPECT_TRUE(tree.Resolve("a", fn)->is_pointer);
  EXPECT_FALSE(tree.Resolve("b", fn)->is_pointer);
  EXPECT_TRUE(tree.Resolve("c", fn)->is_pointer);
}

TEST(ScopeTreeTest, ParametersCarryIndices) {
  const Program p = Program::FromText("int f(char* s, int n){ return n; }");
  const ScopeTree& tree = p.tree();
  const ScopeId fn = tree.root().children.at(0);
  EXPECT_EQ(tree.node(fn).arity, 2);
  const SymbolEntry* s = tree.Resolve("s", fn);
  ASSERT_NE(s, nullptr);
  EXPECT_TRUE(s->is_param);
  EXPECT_EQ(s->param_index, 0);
  EXPECT_EQ(tree.Resolve("n", fn)->param_index, 1);
}

TEST(ScopeTreeTest, TypedefAliasIsOneLevel) {
  const Program p = Program::FromText(
      "typedef char* str;\ntypedef str text;\nvoid f(){ str a; text b; }");
  const ScopeTree& tree = p.tree();
  EXPECT_TRUE(tree.types().IsType("str"));
  EXPECT_EQ(tree.types().AliasTarget("text").value_or(""), "str");
  const ScopeId fn = tree.FunctionScopes().at(0);
  const SymbolEntry* a = tree.Resolve("a", fn);
  const SymbolEntry* b = tree.Resolve("b", fn);
  ASSERT_NE(a, nullptr);
  ASSERT_NE(b, nullptr);
  EXPECT_FALSE(a->type_unknown);
  EXPECT_TRUE(b->type_unknown);
}

TEST(ScopeTreeTest, UnbalancedBracesAreRecovered) {
  const Program p = Program::FromText("void f(){ if (x) { int a;\n");
  ASSERT_FALSE(p.tree().diagnostics().empty());
  EXPECT_EQ(p.tree().diagnostics()[0].code, ScopeDiagCode::kUnbalancedBraces);
  EXPECT_EQ(p.tree().scope_count(), 3u);
}

TEST(ScopeTreeTest, DumpListsOneScopePerLine) {
  const Program p = Program::FromText("int main()\n{\n  if (x) {\n  }\n}\n");
  EXPECT_EQ(p.tree().Dump(p.stream_ptrs()),
            "eGlobal [1..5]\n  eFunction main [1..5]\n    eIf [3..4]\n");
}

TEST(ClassInfoTest, PointerMembersWithoutSpecialMembers) {
  const Program p = Program::FromText("class A { int* p; };", "a.cpp");
  const ClassInfo* a = ClassNamed(p, "A");
  ASSERT_NE(a, nullptr);
  ASSERT_EQ(a->pointer_members.size(), 1u);
  EXPECT_EQ(p.tree().symbol(a->pointer_members[0]).name, "p");
  EXPECT_TRUE(a->ctors.empty());
  EXPECT_FALSE(a->dtor.has_value());
}

TEST(ClassInfoTest, BasesAndVirtualDestructor) {
  const Program p = Program::FromText("class A {}; class B : public A { virtual ~B(); };",
                                      "b.cpp");
  const ClassInfo* b = ClassNamed(p, "B");
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->bases, std::vector<std::string>{"A"});
  ASSERT_TRUE(b->dtor.has_value());
  EXPECT_TRUE(b->dtor->is_virtual);
  EXPECT_FALSE(b->dtor->has_body);
}

TEST(ClassInfoTest, EmptyStruct) {
  const Program p = Program::FromText("struct S {};", "s.cpp");
  const ClassInfo* s = ClassNamed(p, "S");
  ASSERT_NE(s, nullptr);
  EXPECT_TRUE(s->is_struct);
  EXPECT_TRUE(s->pointer_members.empty());
  EXPECT_FALSE(s->dtor.has_value());
}

// Hand-annotated manifest: the expected special members of each class in
// the fixture below, with their lines.
TEST(ClassInfoTest, SpecialMemberManifest) {
  const char* const kFixture =
      "class A {\n"                                   // 1
      " public:\n"                                    // 2
      "  A();\n"                                      // 3
      "  A(int n) : p(new int[n]) {}\n"               // 4
      "  A(const A& other);\n"                        // 5
      "  A& operator=(const A& other);\n"             // 6
      "  ~A() { delete[] p; }\n"                      // 7
      "  int* p;\n"                                   // 8
      "};\n"                                          // 9
      "A::A() : p(nullptr) {}\n"                      // 10
      "A::A(const A& other) : p(new int[4]) {}\n"     // 11
      "A& A::operator=(const A& other) { return *this; }\n"  // 12
      "struct D : A {\n"                              // 13
      "  D(const D&) = delete;\n"                     // 14
      "  D& operator=(const D&) = default;\n"         // 15
      "  virtual ~D() = default;\n"                   // 16
      "};\n";                                         // 17
  const Program p = Program::FromText(kFixture, "m.cpp");
  const ClassInfo* a = ClassNamed(p, "A");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->line, 1);
  std::vector<int> ctor_lines;
  for (const SpecialMember& m : a->ctors) ctor_lines.push_back(m.line);
  std::sort(ctor_lines.begin(), ctor_lines.end());
  EXPECT_EQ(ctor_lines, (std::vector<int>{4, 10}));
  ASSERT_TRUE(a->copy_ctor.has_value());
  EXPECT_EQ(a->copy_ctor->line, 11);
  EXPECT_TRUE(a->copy_ctor->has_body);
  EXPECT_TRUE(a->copy_ctor->range.valid());
  ASSERT_TRUE(a->assign_op.has_value());
  EXPECT_EQ(a->assign_op->line, 12);
  EXPECT_TRUE(a->assign_op->range.valid());
  ASSERT_TRUE(a->dtor.has_value());
  EXPECT_EQ(a->dtor->line, 7);
  EXPECT_FALSE(a->dtor->is_virtual);
  EXPECT_EQ(a->pointer_members.size(), 1u);

  const ClassInfo* d = ClassNamed(p, "D");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->bases, std::vector<std::string>{"A"});
  ASSERT_TRUE(d->copy_ctor.has_value());
  EXPECT_TRUE(d->copy_ctor->deleted);
  EXPECT_EQ(d->copy_ctor->line, 14);
  ASSERT_TRUE(d->assign_op.has_value());
  EXPECT_TRUE(d->assign_op->defaulted);
  ASSERT_TRUE(d->dtor.has_value());
  EXPECT_TRUE(d->dtor->is_virtual);
}

TEST(ScopeProperty, BindingsAgreeWithReferenceResolver) {
  std::mt19937 rng(31337);
  for (int fixture = 0; fixture < 30; ++fixture) {
    const std::string src = testing::RandomShadowFixture(rng);
    const Program p = Program::FromText(src, "shadow.c");
    const TokenStream& ts = p.stream(0);
    const std::vector<std::size_t> want = testing::ReferenceBindings(ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i].kind != TokenKind::kIdentifier) continue;
      const VarId v = ts[i].var_id;
      if (want[i] == kNoPos) {
        EXPECT_EQ(v, 0) << "fixture " << fixture << " token " << i << "\n" << src;
        continue;
      }
      ASSERT_GT(v, 0) << "fixture " << fixture << " token " << i << " '" << ts[i].text
                      << "' line " << ts[i].line << "\n" << src;
      EXPECT_EQ(p.tree().symbol(v).decl_pos, want[i])
          << "fixture " << fixture << " line " << ts[i].line << "\n" << src;
    }
  }
}

TEST(ScopeProperty, TokenScopeIsInnermostContainingScope) {
  std::mt19937 rng(4242);
  for (int fixture = 0; fixture < 30; ++fixture) {
    const Program p = Program::FromText(testing::RandomShadowFixture(rng), "shadow.c");
    const TokenStream& ts = p.stream(0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const ScopeNode& s = p.tree().node(ts[i].scope_id);
      EXPECT_TRUE(s.Contains(0, i));
      EXPECT_EQ(p.tree().InnermostAt(0, i), ts[i].scope_id);
      for (ScopeId c : s.children) EXPECT_FALSE(p.tree().node(c).Contains(0, i));
    }
  }
}

TEST(ScopeProperty, SymbolCountMatchesDeclarationPattern) {
  std::mt19937 rng(808);
  const DefectPattern decl = CompilePattern("%type% %var%");
  for (int fixture = 0; fixture < 30; ++fixture) {
    const Program p = Program::FromText(testing::RandomShadowFixture(rng), "shadow.c");
    const MatchContext ctx{&p.tree().types(), 0};
    EXPECT_EQ(MatchAll(p.stream(0), decl, ctx).size(), p.tree().symbol_count());
  }
}

}  // namespace
}  // namespace zkleak

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

#include "zkleak/leak_state_machine.h"

#include <gtest/gtest.h>

#include <random>

#include "testing/oracles.h"

namespace zkleak {
namespace {

constexpr VarId kP = 1;
constexpr VarId kQ = 2;
constexpr VarId kG = 7;

bool Never(VarId) { return false; }

TEST(MachineTest, AllocEntersAlloced) {
  const Machine m = Machine::Alloc(1, {0, 3}, kP, AllocFn::kMalloc);
  EXPECT_EQ(m.state(), MemState::kAlloced);
  EXPECT_EQ(m.alloc().owners, std::set<VarId>{kP});
  EXPECT_EQ(m.alloc().fn, AllocFn::kMalloc);
  EXPECT_EQ(m.alloc().site.line, 3);
  EXPECT_FALSE(m.free_record().has_value());
  EXPECT_EQ(Machine::Alloc(2, {0, 3}, kP, AllocFn::kNewArray).alloc().fn, AllocFn::kNewArray);
}

// Hand simulation: p = malloc (line 1); p = malloc (line 2). The second
// allocation strips p from the first machine, which has no owner left.
TEST(MachineTest, ReallocatingAnOwnerLosesTheOldMemory) {
  MachineSet set;
  const int first = set.Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  const int second = set.Alloc(2, {0, 2}, kP, AllocFn::kMalloc);
  EXPECT_EQ(set.Find(first)->state(), MemState::kError);
  EXPECT_EQ(set.Find(first)->error(), ErrorKind::kPointerOwnershipLost);
  EXPECT_EQ(set.Find(first)->error_line(), 2);
  EXPECT_EQ(set.Find(second)->state(), MemState::kAlloced);
  EXPECT_EQ(set.TakeFailed().size(), 1u);
  EXPECT_EQ(set.machines().size(), 1u);
}

TEST(MachineTest, TakenIdsAreBumped) {
  MachineSet set;
  const int a = set.Alloc(5, {0, 1}, kP, AllocFn::kMalloc);
  const int b = set.Alloc(5, {0, 2}, kQ, AllocFn::kMalloc);
  EXPECT_NE(a, b);
  EXPECT_TRUE(set.Contains(a));
  EXPECT_TRUE(set.Contains(b));
}

TEST(MachineTest, AssignAddsAlias) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnAssign(kQ, kP, 2);
  EXPECT_EQ(m.alloc().owners, (std::set<VarId>{kP, kQ}));
  EXPECT_EQ(m.state(), MemState::kAlloced);
}

TEST(MachineTest, PtrArithLosesOwnership) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnPtrArith(kP, 4);
  EXPECT_TRUE(m.alloc().owners.empty());
  EXPECT_EQ(m.state(), MemState::kError);
  EXPECT_EQ(m.error(), ErrorKind::kPointerOwnershipLost);
  EXPECT_EQ(m.error_line(), 4);
}

TEST(MachineTest, NullAfterFreeEnds) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnFree(kP, FreeFn::kFree, {0, 2});
  ASSERT_EQ(m.state(), MemState::kFreed);
  m.OnNullAssign(kP, 3);
  EXPECT_TRUE(m.alloc().owners.empty());
  EXPECT_EQ(m.state(), MemState::kEnd);
}

TEST(MachineTest, ScopeEndRemovesOwners) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnAssign(kQ, kP, 2);
  m.OnScopeEnd({kQ}, 3);
  EXPECT_EQ(m.state(), MemState::kAlloced);
  m.OnScopeEnd({kP}, 4);
  EXPECT_EQ(m.error(), ErrorKind::kPointerOwnershipLost);
}

TEST(MachineTest, ReturnHandsMemoryToCaller) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnReturn(kP, 2);
  EXPECT_EQ(m.alloc().owners, std::set<VarId>{kReturnSlot});
  EXPECT_EQ(m.OnEnd(EndContext::kFunctionExit, [](VarId v) { return v < 0; }, 3),
            MemState::kAlloced);
}

TEST(MachineTest, FreeMatchesAllocator) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnFree(kP, FreeFn::kFree, {0, 2});
  EXPECT_EQ(m.state(), MemState::kFreed);
  ASSERT_TRUE(m.free_record().has_value());
  EXPECT_TRUE(m.free_record()->record);
  EXPECT_EQ(m.free_record()->fn, FreeFn::kFree);
}

TEST(MachineTest, ArrayNewWithScalarDeleteMismatches) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kNewArray);
  m.OnFree(kP, FreeFn::kDelete, {0, 2});
  EXPECT_EQ(m.state(), MemState::kError);
  EXPECT_EQ(m.error(), ErrorKind::kMismatchedAllocFree);
  EXPECT_EQ(m.error_line(), 2);
}

TEST(MachineTest, SecondFreeIsDoubleFree) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnFree(kP, FreeFn::kFree, {0, 2});
  m.OnFree(kP, FreeFn::kFree, {0, 3});
  EXPECT_EQ(m.state(), MemState::kError);
  EXPECT_EQ(m.error(), ErrorKind::kDoubleFree);
  EXPECT_EQ(m.error_line(), 3);
}

TEST(MachineTest, CompatibilityTable) {
  for (AllocFn a : {AllocFn::kMalloc, AllocFn::kCalloc, AllocFn::kRealloc}) {
    EXPECT_TRUE(IsCompatible(a, FreeFn::kFree));
    EXPECT_FALSE(IsCompatible(a, FreeFn::kDelete));
    EXPECT_FALSE(IsCompatible(a, FreeFn::kDeleteArray));
  }
  EXPECT_TRUE(IsCompatible(AllocFn::kNew, FreeFn::kDelete));
  EXPECT_FALSE(IsCompatible(AllocFn::kNew, FreeFn::kDeleteArray));
  EXPECT_TRUE(IsCompatible(AllocFn::kNewArray, FreeFn::kDeleteArray));
  EXPECT_FALSE(IsCompatible(AllocFn::kNewArray, FreeFn::kFree));
  for (FreeFn f : {FreeFn::kFree, FreeFn::kDelete, FreeFn::kDeleteArray}) {
    EXPECT_TRUE(IsCompatible(AllocFn::kExternal, f));
    EXPECT_EQ(FreeFnFromName(FreeFnName(f)), f);
  }
  EXPECT_EQ(AllocFnFromName("new[]"), AllocFn::kNewArray);
  EXPECT_FALSE(AllocFnFromName("alloca").has_value());
}

TEST(MachineTest, LocalAllocationLeaksAtExit) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  EXPECT_EQ(m.OnEnd(EndContext::kFunctionExit, Never, 9), MemState::kError);
  EXPECT_EQ(m.error(), ErrorKind::kMissingRelease);
  EXPECT_EQ(m.error_line(), 9);
}

TEST(MachineTest, FreedEndsAtExit) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnFree(kP, FreeFn::kFree, {0, 2});
  EXPECT_EQ(m.OnEnd(EndContext::kFunctionExit, Never, 3), MemState::kEnd);
}

// Fixture: "char* g; void f() { g = malloc(4); }". g outlives f, so the
// allocation is not a leak at f's exit; at program end it is.
TEST(MachineTest, GlobalOwnerEscapesFunctionButNotProgram) {
  const auto global = [](VarId v) { return v == kG; };
  Machine m = Machine::Alloc(1, {0, 1}, kG, AllocFn::kMalloc);
  EXPECT_EQ(m.OnEnd(EndContext::kFunctionExit, global, 1), MemState::kAlloced);
  EXPECT_EQ(m.error(), ErrorKind::kNone);
  EXPECT_EQ(m.OnEnd(EndContext::kProgramEnd, global, 1), MemState::kError);
}

TEST(MachineTest, TaintedAndExternalMemoryNeverLeaks) {
  Machine t = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  t.Taint(2);
  EXPECT_TRUE(t.tainted());
  EXPECT_NE(t.OnEnd(EndContext::kFunctionExit, Never, 3), MemState::kError);
  Machine e = Machine::External(2, {0, 1}, kP);
  e.OnNullAssign(kP, 2);
  EXPECT_NE(e.state(), MemState::kError);
}

TEST(MachineTest, AliasedFreeReleasesTheObject) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnAssign(kQ, kP, 2);
  m.OnFree(kQ, FreeFn::kFree, {0, 3});
  EXPECT_EQ(m.state(), MemState::kFreed);
  m.OnFree(kP, FreeFn::kFree, {0, 4});
  EXPECT_EQ(m.error(), ErrorKind::kDoubleFree);
}

TEST(MachineTest, StrictTableStripsTheSource) {
  Machine strict = Machine::Alloc(1, {0, 1}, kQ, AllocFn::kMalloc);
  strict.OnAssign(kP, kQ, 2, true);
  EXPECT_EQ(strict.error(), ErrorKind::kPointerOwnershipLost);
  Machine relaxed = Machine::Alloc(1, {0, 1}, kQ, AllocFn::kMalloc);
  relaxed.OnAssign(kP, kQ, 2, false);
  EXPECT_EQ(relaxed.alloc().owners, (std::set<VarId>{kP, kQ}));
}

TEST(MachineTest, TraceRendering) {
  Machine m = Machine::Alloc(1, {0, 3}, kP, AllocFn::kMalloc);
  m.OnFree(kP, FreeFn::kFree, {0, 5});
  m.OnNullAssign(kP, 6);
  EXPECT_EQ(m.RenderTrace(), "3:alloc:Alloced 5:free:Freed 6:null:End");
}

TEST(MachineTest, EventsAfterTerminalStatesAreIgnored) {
  Machine m = Machine::Alloc(1, {0, 1}, kP, AllocFn::kMalloc);
  m.OnPtrArith(kP, 2);
  const std::size_t len = m.trace().size();
  m.OnFree(kP, FreeFn::kFree, {0, 3});
  m.OnAssign(kQ, kP, 4);
  EXPECT_EQ(m.trace().size(), len);
  EXPECT_EQ(m.error(), ErrorKind::kPointerOwnershipLost);
}

// Every sequence of up to four assignments between three variables, each
// initially holding its own object, checked against a pointer graph.
TEST(MachineProperty, OwnersFollowThePointerGraph) {
  std::vector<std::pair<int, int>> steps;
  for (int p = 1; p <= 3; ++p) {
    for (int q = 1; q <= 3; ++q) steps.emplace_back(p, q);
  }
  int sequences = 0;
  std::vector<std::size_t> choice;
  for (int len = 0; len <= 4; ++len) {
    choice.assign(len, 0);
    while (true) {
      MachineSet set;
      for (int v = 1; v <= 3; ++v) set.Alloc(v, {0, 1}, v, AllocFn::kMalloc);
      testing::PointerGraph graph;
      for (int i = 0; i < len; ++i) {
        const auto [p, q] = steps[choice[i]];
        set.Assign(p, q, i + 2, false);
        graph.Assign(p, q);
      }
      for (int object = 1; object <= 3; ++object) {
        const std::set<int> holders = graph.Holders(object);
        const Machine& m = *set.Find(object);
        if (holders.empty()) {
          EXPECT_EQ(m.error(), ErrorKind::kPointerOwnershipLost);
        } else {
          EXPECT_EQ(m.state(), MemState::kAlloced);
          EXPECT_EQ(m.alloc().owners, std::set<VarId>(holders.begin(), holders.end()));
        }
      }
      ++sequences;
      std::size_t k = 0;
      while (k < choice.size() && ++choice[k] == steps.size()) choice[k++] = 0;
      if (k == choice.size()) break;
    }
  }
  EXPECT_EQ(sequences, 1 + 9 + 81 + 729 + 6561);
}

TEST(MachineProperty, RandomRunsStayOnTheSevenEdges) {
  std::mt19937 rng(2026);
  for (int run = 0; run < 5000; ++run) {
    const Machine m = testing::RandomMachineRun(rng, 12);
    MemState before = MemState::kStart;
    bool freed = false;
    for (const MachineEvent& e : m.trace()) {
      EXPECT_TRUE(testing::AllowedTransition(before, e.state_after))
          << m.RenderTrace();
      before = e.state_after;
      if (e.state_after == MemState::kFreed) freed = true;
    }
    if (freed || m.state() == MemState::kEnd) {
      EXPECT_TRUE(m.free_record().has_value() && m.free_record()->record);
    }
    const Machine replayed = Machine::Replay(m.id(), m.trace());
    EXPECT_TRUE(replayed.SameState(m)) << m.RenderTrace();
    EXPECT_EQ(replayed.trace(), m.trace());
  }
}

TEST(MachineProperty, FreeRecordNeverClears) {
  std::mt19937 rng(11);
  for (int run = 0; run < 2000; ++run) {
    const Machine m = testing::RandomMachineRun(rng, 12);
    bool recorded = false;
    for (std::size_t i = 1; i <= m.trace().size(); ++i) {
      const std::vector<MachineEvent> prefix(m.trace().begin(), m.trace().begin() + i);
      const Machine r = Machine::Replay(m.id(), prefix);
      const bool now = r.free_record().has_value() && r.free_record()->record;
      EXPECT_FALSE(recorded && !now);
      recorded = now;
    }
  }
}

TEST(MachineProperty, MisuseOfFreedOrMismatchedMemoryLandsInError) {
  std::mt19937 rng(5);
  for (int run = 0; run < 1000; ++run) {
    const AllocFn a = static_cast<AllocFn>(rng() % 5);
    const FreeFn f = static_cast<FreeFn>(rng() % 3);
    Machine m = Machine::Alloc(1, {0, 1}, kP, a);
    m.OnFree(kP, f, {0, 2});
    if (!IsCompatible(a, f)) {
      EXPECT_EQ(m.error(), ErrorKind::kMismatchedAllocFree);
      continue;
    }
    m.OnFree(kP, static_cast<FreeFn>(rng() % 3), {0, 3});
    EXPECT_EQ(m.error(), ErrorKind::kDoubleFree);
  }
}

}  // namespace
}  // namespace zkleak

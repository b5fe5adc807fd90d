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

#ifndef ZKLEAK_FUNCTION_SUMMARIES_H_
#define ZKLEAK_FUNCTION_SUMMARIES_H_

#include <compare>
#include <functional>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "zkleak/defect.h"
#include "zkleak/defect_patterns.h"
#include "zkleak/leak_state_machine.h"
#include "zkleak/program.h"
#include "zkleak/program_graphs.h"

namespace zkleak {

enum class ActionKind : std::uint8_t { kAllocToExtern, kExternToFree, kUnknown };

struct BehaviorAction {
  ActionKind kind = ActionKind::kUnknown;
  AllocFn alloc = AllocFn::kMalloc;  // kAllocToExtern
  FreeFn free = FreeFn::kFree;       // kExternToFree
  bool flag = false;                 // kExternToFree: freed on every path

  static BehaviorAction AllocToExtern(AllocFn fn);
  static BehaviorAction ExternToFree(FreeFn fn, bool flag);
  static BehaviorAction Unknown();
  std::string ToString() const;
  friend auto operator<=>(const BehaviorAction&, const BehaviorAction&) = default;
};

struct OwnerRef {
  enum class Kind : std::uint8_t { kParam, kReturnValue, kGlobal };
  Kind kind = Kind::kReturnValue;
  int index = 0;  // kParam
  VarId var = 0;  // kGlobal

  static OwnerRef Param(int index);
  static OwnerRef ReturnValue();
  static OwnerRef Global(VarId var);
  std::string ToString() const;
  friend auto operator<=>(const OwnerRef&, const OwnerRef&) = default;
};

struct SummaryEntry {
  std::set<OwnerRef> owners;
  PathCondition path;
  BehaviorAction action;
  friend auto operator<=>(const SummaryEntry&, const SummaryEntry&) = default;
};

struct FunctionSummary {
  FuncId func;
  std::vector<SummaryEntry> entries;

  // Sorts entries by owners then path and keeps one entry per (owners, path).
  void Normalize();
  // "file::Class::func/arity | owners | pathC | action" per entry.
  std::string Dump() const;
  friend bool operator==(const FunctionSummary&, const FunctionSummary&) = default;
};

class SummaryStore {
 public:
  const FunctionSummary* Find(const FuncId& id) const;
  void Put(FunctionSummary summary);
  const std::map<FuncId, FunctionSummary>& all() const { return summaries_; }
  std::size_t size() const { return summaries_.size(); }
  std::string Dump() const;
  friend bool operator==(const SummaryStore&, const SummaryStore&) = default;

 private:
  std::map<FuncId, FunctionSummary> summaries_;
};

struct AnalysisOptions {
  bool strict_table2 = false;
  int path_budget = 64;    // simultaneous variants per node
  int loop_passes = 2;     // loop body traversals
  bool prune_null_guards = true;
};

// Outcome of driving the machines through one function.
struct FunctionAnalysis {
  FunctionSummary summary;
  std::vector<Defect> defects;
  std::vector<std::string> warnings;
  bool path_insensitive = false;
};

// Dataflow over |cfg| with summaries from |store| at call sites.
FunctionAnalysis AnalyzeFunction(const Program& program, const Cfg& cfg,
                                 const Fcg& fcg, const SummaryStore& store,
                                 const PatternCatalog& catalog,
                                 const AnalysisOptions& options = {});

// Summary part of AnalyzeFunction.
FunctionSummary Summarize(const Program& program, const Cfg& cfg, const Fcg& fcg,
                          const SummaryStore& store, const PatternCatalog& catalog,
                          const AnalysisOptions& options = {});

// Caller-side view of one call site.
struct CallBinding {
  std::vector<VarId> args;  // 0 when an argument is not a plain variable
  // Receives the return value: a variable, kReturnSlot, kHeapSlot or kTempSlot.
  VarId result = kTempSlot;
  Site site;
  int id_base = 0;  // machine ids for allocations at this call
  std::string callee;
};

struct SummaryOutcome {
  MachineSet machines;
  std::optional<Guard> guard;  // set when the summary forked the caller
};

// Applies |summary| to |machines|. Conditional entries fork the result.
// |is_external| reports parameters and globals whose memory may be released
// without a local allocation. Arity mismatches suppress every event and
// add a warning.
std::vector<SummaryOutcome> ApplySummary(
    const FunctionSummary& summary, const CallBinding& binding,
    const MachineSet& machines, const std::function<bool(VarId)>& is_external,
    std::vector<std::string>* warnings = nullptr);

struct UpdateResult {
  SummaryStore store;
  std::vector<FuncId> order;          // summarization order
  std::vector<Defect> ring_defects;   // RecursiveCallRing
  std::vector<Ring> rings;
  std::map<FuncId, int> visits;       // summarize calls per function
  std::vector<std::string> warnings;
};

// Bottom-up summary computation over the call graph. Ring members receive
// all-Unknown summaries instead of being summarized.
UpdateResult UpdateAll(const Program& program, const Fcg& fcg,
                       const std::map<FuncId, Cfg>& cfgs,
                       const PatternCatalog& catalog,
                       const AnalysisOptions& options = {});

// All-Unknown summary with no owners: every argument of a call is tainted.
FunctionSummary RingSummary(const FuncId& func);

// |update.store| plus ring summaries for every ring member.
SummaryStore WithRingSummaries(const UpdateResult& update, const Fcg& fcg);

}  // namespace zkleak

#endif  // ZKLEAK_FUNCTION_SUMMARIES_H_

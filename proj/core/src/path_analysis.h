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

// Forward traversal of one CFG with per-path machine sets.

#ifndef ZKLEAK_SRC_PATH_ANALYSIS_H_
#define ZKLEAK_SRC_PATH_ANALYSIS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zkleak/defect.h"
#include "zkleak/function_summaries.h"

namespace zkleak {

// Machine ids of memory that a parameter or global refers to on entry.
inline constexpr int kExternalIdBase = 1 << 29;

struct Variant {
  PathCondition path;
  MachineSet machines;
  std::map<int, int> back_edges;  // loop head node -> back edges taken
};

struct PathResult {
  std::vector<Variant> exits;
  std::vector<Defect> defects;  // errors reached before the exit
  std::vector<std::string> warnings;
  bool path_insensitive = false;
};

PathResult RunPaths(const Program& program, const Cfg& cfg, const Fcg& fcg,
                    const SummaryStore& store, const PatternCatalog& catalog,
                    const AnalysisOptions& options);

// Owners that outlive the function: pseudo-owners, globals and statics,
// members and parameters.
bool Escapes(const ScopeTree& tree, VarId v);

// Interface view of an owner, if it has one.
std::optional<OwnerRef> InterfaceOwner(const ScopeTree& tree, VarId v);

// Defect for a machine in Error. |partial| marks a leak on some paths only.
Defect MachineDefect(const Program& program, const Cfg& cfg, const Machine& m,
                     PathCondition path, bool partial = false);

}  // namespace zkleak

#endif  // ZKLEAK_SRC_PATH_ANALYSIS_H_

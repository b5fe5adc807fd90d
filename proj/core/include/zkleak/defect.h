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

#ifndef ZKLEAK_DEFECT_H_
#define ZKLEAK_DEFECT_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zkleak/program_graphs.h"

namespace zkleak {

enum class DefectKind : std::uint8_t {
  kMissingRelease,
  kPathMissingRelease,
  kPointerOwnershipLost,
  kMismatchedAllocFree,
  kDoubleFree,
  kCtorDtorMismatch,
  kNonVirtualBaseDtor,
  kShallowCopy,
  kRecursiveCallRing,
  kUnbalancedBracesWarning,
  kAmbiguousCallWarning,
};

inline constexpr int kDefectKindCount = 11;

std::string_view DefectKindName(DefectKind kind);
std::optional<DefectKind> DefectKindFromName(std::string_view name);
// Warning kinds never affect the exit status or the metrics.
bool IsWarning(DefectKind kind);

// One branch decision: guard source text and the arm taken.
struct Guard {
  std::string text;
  std::string arm;
  friend auto operator<=>(const Guard&, const Guard&) = default;
};

using PathCondition = std::vector<Guard>;

// "[c:else, i < n:loop]"
std::string RenderPath(const PathCondition& path);

struct Defect {
  DefectKind kind = DefectKind::kMissingRelease;
  std::string file;
  int line = 0;
  FuncId func;
  std::string message;
  PathCondition path;
  std::vector<std::string> trace;  // "line:event:state" steps
};

// Drops entries sharing (kind, file, line, func, path) and sorts by file,
// line, kind.
std::vector<Defect> NormalizeDefects(std::vector<Defect> defects);

}  // namespace zkleak

#endif  // ZKLEAK_DEFECT_H_

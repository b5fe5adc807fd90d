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

#include "zkleak/defect.h"

#include <algorithm>
#include <array>
#include <tuple>

namespace zkleak {

namespace {

constexpr std::array<std::string_view, kDefectKindCount> kNames = {
    "MissingRelease",      "PathMissingRelease",      "PointerOwnershipLost",
    "MismatchedAllocFree", "DoubleFree",              "CtorDtorMismatch",
    "NonVirtualBaseDtor",  "ShallowCopy",             "RecursiveCallRing",
    "UnbalancedBracesWarning", "AmbiguousCallWarning",
};

}  // namespace

std::string_view DefectKindName(DefectKind kind) {
  return kNames.at(static_cast<std::size_t>(kind));
}

std::optional<DefectKind> DefectKindFromName(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<DefectKind>(i);
  }
  return std::nullopt;
}

bool IsWarning(DefectKind kind) {
  return kind == DefectKind::kUnbalancedBracesWarning ||
         kind == DefectKind::kAmbiguousCallWarning;
}

std::string RenderPath(const PathCondition& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += ", ";
    out += path[i].text;
    out += ':';
    out += path[i].arm;
  }
  out += ']';
  return out;
}

std::vector<Defect> NormalizeDefects(std::vector<Defect> defects) {
  auto key = [](const Defect& d) {
    return std::tie(d.file, d.line, d.kind, d.func, d.path);
  };
  std::stable_sort(defects.begin(), defects.end(),
                   [&](const Defect& a, const Defect& b) { return key(a) < key(b); });
  defects.erase(std::unique(defects.begin(), defects.end(),
                            [&](const Defect& a, const Defect& b) { return key(a) == key(b); }),
                defects.end());
  return defects;
}

}  // namespace zkleak

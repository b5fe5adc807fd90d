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

#ifndef ZKLEAK_DETECTORS_H_
#define ZKLEAK_DETECTORS_H_

#include <map>
#include <string>
#include <vector>

#include "zkleak/defect.h"
#include "zkleak/defect_patterns.h"
#include "zkleak/function_summaries.h"
#include "zkleak/program.h"
#include "zkleak/program_graphs.h"

namespace zkleak {

// CFG of every function with a body. Same-key overloads keep the first.
std::map<FuncId, Cfg> BuildAllCfgs(const Program& program);

struct GeneralResult {
  std::vector<Defect> defects;
  std::vector<std::string> warnings;
  std::vector<FuncId> path_insensitive;
};

// Drives the machines through every function, applying |store| at call
// sites. Run UpdateAll first; ring members should carry RingSummary.
GeneralResult GeneralCheck(const Program& program, const Fcg& fcg,
                           const std::map<FuncId, Cfg>& cfgs,
                           const SummaryStore& store, const PatternCatalog& catalog,
                           const AnalysisOptions& options = {});

// Class rules: non-virtual base destructors, constructor allocations not
// released by the destructor, and shallow copies of owning pointer members.
std::vector<Defect> SpecialCheck(const Program& program, const PatternCatalog& catalog);

}  // namespace zkleak

#endif  // ZKLEAK_DETECTORS_H_

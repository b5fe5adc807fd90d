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

namespace zkleak {

std::map<FuncId, Cfg> BuildAllCfgs(const Program& program) {
  std::map<FuncId, Cfg> cfgs;
  for (ScopeId scope : program.tree().FunctionScopes()) {
    Cfg cfg = BuildCfg(program, scope);
    FuncId id = cfg.func;
    cfgs.emplace(std::move(id), std::move(cfg));
  }
  return cfgs;
}

GeneralResult GeneralCheck(const Program& program, const Fcg& fcg,
                           const std::map<FuncId, Cfg>& cfgs,
                           const SummaryStore& store, const PatternCatalog& catalog,
                           const AnalysisOptions& options) {
  GeneralResult out;
  for (const auto& [id, cfg] : cfgs) {
    FunctionAnalysis a = AnalyzeFunction(program, cfg, fcg, store, catalog, options);
    for (Defect& d : a.defects) out.defects.push_back(std::move(d));
    for (std::string& w : a.warnings) out.warnings.push_back(id.ToString() + ": " + w);
    if (a.path_insensitive) out.path_insensitive.push_back(id);
  }
  out.defects = NormalizeDefects(std::move(out.defects));
  return out;
}

}  // namespace zkleak

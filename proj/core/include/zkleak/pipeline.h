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

// End-to-end driver: files -> tokens -> scopes -> graphs -> summaries ->
// detectors -> report.

#ifndef ZKLEAK_PIPELINE_H_
#define ZKLEAK_PIPELINE_H_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zkleak/defect_patterns.h"
#include "zkleak/detectors.h"
#include "zkleak/function_summaries.h"
#include "zkleak/program.h"
#include "zkleak/program_graphs.h"
#include "zkleak/report.h"

namespace zkleak {

struct PipelineConfig {
  std::vector<std::string> extensions{".c", ".h", ".cpp", ".cc", ".cxx", ".hpp"};
  int jobs = 0;  // 0: one per hardware thread
  AnalysisOptions options;
  PatternCatalog catalog = BuiltinPatterns();
};

class NoInputFiles : public std::runtime_error {
 public:
  NoInputFiles() : std::runtime_error("no analyzable input files") {}
};

struct FileError {
  std::string path;
  std::string message;
};

// Files named directly plus matching files under directories, sorted.
// Missing paths go to |errors|.
std::vector<std::string> CollectSourceFiles(const std::vector<std::string>& paths,
                                            const std::vector<std::string>& extensions,
                                            std::vector<FileError>* errors);

struct Analysis {
  std::optional<Program> program;
  Fcg fcg;
  std::map<FuncId, Cfg> cfgs;
  UpdateResult update;
  Report report;
  std::vector<std::string> warnings;
  std::vector<FileError> errors;
};

Analysis AnalyzeSources(std::vector<SourceText> sources, const PipelineConfig& config);

// Reads |paths| and analyzes them. Throws NoInputFiles when nothing could
// be read.
Analysis RunPipeline(const std::vector<std::string>& paths, const PipelineConfig& config);

std::string DumpScopes(const Analysis& analysis);
// CFGs of functions whose name or full id equals |func|.
std::string DumpCfg(const Analysis& analysis, std::string_view func);
std::string DumpFcg(const Analysis& analysis);
std::string DumpSummaries(const Analysis& analysis);

}  // namespace zkleak

#endif  // ZKLEAK_PIPELINE_H_

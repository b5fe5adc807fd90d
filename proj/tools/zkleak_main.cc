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

// zkleak: memory-leak detector for C and C++ sources.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zkleak/pipeline.h"
#include "zkleak/report.h"

namespace {

constexpr int kExitUsage = 2;

constexpr const char* kFooter = R"(Metrics (--metrics):
  C     non-warning defects reported
  FC    reported defects matching no EXPECT-LEAK annotation (same file and
        kind, line within 1), plus those matching an EXPECT-FP annotation
  actC  EXPECT-LEAK annotations
  FPR = FC / C
  FNR = |actC - C| / actC   (absolute value taken literally: reporting more
        defects than annotated raises FNR just as missing them does)
ANNOTATIONS is a JSON array of {file, line, kind, expectFalsePositive}, or
"inline" to read "// EXPECT-LEAK: <Kind>" and "// EXPECT-FP: <Kind>" comments
from the analyzed files.

Exit status: 0 no defects, 1 defects found, 2 usage or input error.
Warnings (UnbalancedBracesWarning, AmbiguousCallWarning) never change it.)";

bool ReadFile(const std::string& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream text;
  text << in.rdbuf();
  *out = text.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zkleak " + std::string(zkleak::kVersion) +
               ": static memory-leak detection for C/C++ sources"};
  app.footer(kFooter);

  std::vector<std::string> paths;
  std::string format = "text";
  std::string patterns_file;
  std::string metrics;
  int jobs = 0;
  bool strict = false;
  bool dump_scopes = false;
  std::string dump_cfg;
  bool dump_fcg = false;
  bool dump_summaries = false;

  app.add_option("paths", paths, "Files or directories to analyze")->required();
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_option("--patterns", patterns_file,
                 "Extra pattern catalog: one 'label: pattern' per line, '#' comments");
  app.add_option("--metrics", metrics, "Score against ANNOTATIONS (manifest path or 'inline')");
  app.add_option("--jobs", jobs, "Tokenizer threads (default: hardware threads)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--strict-table2", strict,
               "Assignment rule where 'p = q' removes q when p does not own");
  auto* scopes_opt = app.add_flag("--dump-scopes", dump_scopes, "Print the scope tree");
  auto* cfg_opt = app.add_option("--dump-cfg", dump_cfg, "Print the CFG of function F");
  auto* fcg_opt = app.add_flag("--dump-fcg", dump_fcg, "Print the function call graph");
  auto* sum_opt = app.add_flag("--dump-summaries", dump_summaries, "Print function summaries");
  scopes_opt->excludes(cfg_opt)->excludes(fcg_opt)->excludes(sum_opt);
  cfg_opt->excludes(fcg_opt)->excludes(sum_opt);
  fcg_opt->excludes(sum_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  zkleak::PipelineConfig config;
  config.jobs = jobs;
  config.options.strict_table2 = strict;
  if (!patterns_file.empty()) {
    std::string text;
    if (!ReadFile(patterns_file, &text)) {
      std::cerr << "zkleak: cannot read " << patterns_file << "\n";
      return kExitUsage;
    }
    const auto errors = config.catalog.MergeText(text);
    for (const auto& e : errors) {
      std::cerr << patterns_file << ":" << e.line << ": " << e.label << ": " << e.message
                << "\n";
    }
    if (!errors.empty()) return kExitUsage;
  }

  zkleak::Analysis analysis;
  try {
    analysis = zkleak::RunPipeline(paths, config);
  } catch (const zkleak::NoInputFiles& e) {
    std::cerr << "zkleak: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& e : analysis.errors) std::cerr << e.path << ": " << e.message << "\n";
  for (const auto& w : analysis.warnings) std::cerr << "warning: " << w << "\n";

  if (dump_scopes) {
    std::cout << zkleak::DumpScopes(analysis);
    return 0;
  }
  if (!dump_cfg.empty()) {
    std::cout << zkleak::DumpCfg(analysis, dump_cfg);
    return 0;
  }
  if (dump_fcg) {
    std::cout << zkleak::DumpFcg(analysis);
    return 0;
  }
  if (dump_summaries) {
    std::cout << zkleak::DumpSummaries(analysis);
    return 0;
  }

  zkleak::Report& report = analysis.report;
  if (!metrics.empty()) {
    std::vector<zkleak::Annotation> annotations;
    if (metrics == "inline") {
      for (const auto& f : report.files) {
        std::string text;
        if (!ReadFile(f.path, &text)) continue;
        std::vector<std::string> errors;
        auto found = zkleak::ParseInlineAnnotations(text, f.path, &errors);
        for (const auto& e : errors) std::cerr << "warning: " << e << "\n";
        annotations.insert(annotations.end(), found.begin(), found.end());
      }
    } else {
      std::string text;
      if (!ReadFile(metrics, &text)) {
        std::cerr << "zkleak: cannot read " << metrics << "\n";
        return kExitUsage;
      }
      try {
        annotations = zkleak::ParseAnnotationManifest(text);
      } catch (const zkleak::ReportParseError& e) {
        std::cerr << "zkleak: " << metrics << ": " << e.what() << "\n";
        return kExitUsage;
      }
    }
    report.metrics = zkleak::Score(report.defects, annotations);
  }

  std::cout << (format == "json" ? zkleak::ToJson(report) : zkleak::ToText(report));
  return report.ExitCode();
}

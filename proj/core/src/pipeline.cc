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

#include "zkleak/pipeline.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace zkleak {

namespace fs = std::filesystem;

namespace {

class PhaseClock {
 public:
  explicit PhaseClock(Timing& timing)
      : timing_(timing), start_(Clock::now()), last_(start_) {}

  void Mark(const std::string& phase) {
    const auto now = Clock::now();
    timing_.phases[phase] += Millis(last_, now);
    last_ = now;
  }

  void Finish() {
    for (auto& [name, ms] : timing_.phases) ms = std::max(ms, kMinMs);
    double max_phase = 0;
    for (const auto& [name, ms] : timing_.phases) max_phase = std::max(max_phase, ms);
    timing_.total_ms = std::max({Millis(start_, Clock::now()), max_phase, kMinMs});
  }

 private:
  using Clock = std::chrono::steady_clock;
  static constexpr double kMinMs = 1e-3;
  static double Millis(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  }

  Timing& timing_;
  Clock::time_point start_;
  Clock::time_point last_;
};

bool HasExtension(const fs::path& p, const std::vector<std::string>& extensions) {
  const std::string ext = p.extension().string();
  return std::find(extensions.begin(), extensions.end(), ext) != extensions.end();
}

}  // namespace

std::vector<std::string> CollectSourceFiles(const std::vector<std::string>& paths,
                                            const std::vector<std::string>& extensions,
                                            std::vector<FileError>* errors) {
  std::vector<std::string> out;
  for (const std::string& p : paths) {
    std::error_code ec;
    const fs::file_status st = fs::status(p, ec);
    if (ec || !fs::exists(st)) {
      if (errors != nullptr) errors->push_back({p, "no such file or directory"});
      continue;
    }
    if (fs::is_directory(st)) {
      std::vector<std::string> found;
      for (auto it = fs::recursive_directory_iterator(p, ec);
           !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (it->is_regular_file() && HasExtension(it->path(), extensions)) {
          found.push_back(it->path().generic_string());
        }
      }
      if (ec && errors != nullptr) errors->push_back({p, ec.message()});
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

Analysis AnalyzeSources(std::vector<SourceText> sources, const PipelineConfig& config) {
  Analysis a;
  PhaseClock clock(a.report.timing);
  const int jobs = config.jobs > 0
                       ? config.jobs
                       : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  a.program.emplace(Program::Build(std::move(sources), jobs));
  const Program& program = *a.program;
  clock.Mark("parse");

  a.cfgs = BuildAllCfgs(program);
  a.fcg = BuildFcg(program);
  clock.Mark("graphs");

  a.update = UpdateAll(program, a.fcg, a.cfgs, config.catalog, config.options);
  clock.Mark("summaries");

  const SummaryStore store = WithRingSummaries(a.update, a.fcg);
  GeneralResult general =
      GeneralCheck(program, a.fcg, a.cfgs, store, config.catalog, config.options);
  clock.Mark("general");

  std::vector<Defect> special = SpecialCheck(program, config.catalog);
  clock.Mark("special");

  std::vector<Defect> all = std::move(general.defects);
  all.insert(all.end(), std::make_move_iterator(special.begin()),
             std::make_move_iterator(special.end()));
  all.insert(all.end(), a.update.ring_defects.begin(), a.update.ring_defects.end());
  for (const ScopeDiagnostic& d : program.tree().diagnostics()) {
    if (d.code == ScopeDiagCode::kUnbalancedBraces) {
      Defect w;
      w.kind = DefectKind::kUnbalancedBracesWarning;
      w.file = program.path(d.file);
      w.line = d.line;
      w.message = d.message;
      all.push_back(std::move(w));
    } else {
      a.warnings.push_back(program.path(d.file) + ":" + std::to_string(d.line) + ": " +
                           d.message);
    }
  }
  for (const FcgWarning& fw : a.fcg.warnings()) {
    Defect w;
    w.kind = DefectKind::kAmbiguousCallWarning;
    w.file = program.path(fw.file);
    w.line = fw.line;
    w.func = ParseFuncId(fw.caller);
    w.message = fw.message;
    all.push_back(std::move(w));
  }
  for (std::size_t f = 0; f < program.file_count(); ++f) {
    const TokenStream& ts = program.stream(static_cast<FileIndex>(f));
    for (const LexDiagnostic& d : ts.diagnostics()) {
      a.warnings.push_back(ts.path() + ":" + std::to_string(d.line) + ":" +
                           std::to_string(d.column) + ": " + d.message);
    }
    a.report.files.push_back(FileStat{ts.path(), ts.loc(), ts.size()});
  }
  for (std::string& w : a.update.warnings) a.warnings.push_back(w);
  for (std::string& w : general.warnings) a.warnings.push_back(std::move(w));
  a.report.defects = NormalizeDefects(std::move(all));
  clock.Mark("report");
  clock.Finish();
  return a;
}

Analysis RunPipeline(const std::vector<std::string>& paths, const PipelineConfig& config) {
  std::vector<FileError> errors;
  const std::vector<std::string> files = CollectSourceFiles(paths, config.extensions, &errors);
  std::vector<SourceText> sources;
  for (const std::string& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) {
      errors.push_back({f, "cannot read file"});
      continue;
    }
    std::ostringstream text;
    text << in.rdbuf();
    sources.push_back(SourceText{f, text.str()});
  }
  if (sources.empty()) throw NoInputFiles();
  Analysis a = AnalyzeSources(std::move(sources), config);
  a.errors = std::move(errors);
  return a;
}

std::string DumpScopes(const Analysis& analysis) {
  const Program& p = *analysis.program;
  return p.tree().Dump(p.stream_ptrs());
}

std::string DumpCfg(const Analysis& analysis, std::string_view func) {
  std::string out;
  for (const auto& [id, cfg] : analysis.cfgs) {
    if (id.name != func && id.ToString() != func) continue;
    out += "# " + id.ToString() + "\n";
    out += cfg.Dump();
  }
  return out;
}

std::string DumpFcg(const Analysis& analysis) { return analysis.fcg.Dump(*analysis.program); }

std::string DumpSummaries(const Analysis& analysis) { return analysis.update.store.Dump(); }

}  // namespace zkleak

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

#include "testing/corpus.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace zkleak::testing {

namespace fs = std::filesystem;

std::string CorpusDir() { return ZKLEAK_TEST_CORPUS_DIR; }
std::string FixtureDir() { return ZKLEAK_TEST_FIXTURE_DIR; }

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<SourceText> ReadSources(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  const std::string prefix = fs::path(dir).filename().string();
  std::vector<SourceText> out;
  for (const fs::path& p : files) {
    out.push_back({prefix + "/" + p.filename().string(), ReadFile(p.string())});
  }
  return out;
}

std::vector<Annotation> InlineAnnotations(const std::vector<SourceText>& sources) {
  std::vector<Annotation> out;
  for (const SourceText& s : sources) {
    for (Annotation& a : ParseInlineAnnotations(s.text, s.path)) out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::string> CompareWithAnnotations(const std::vector<Defect>& defects,
                                                const std::vector<Annotation>& annotations) {
  std::vector<std::string> problems;
  auto hits = [](const Defect& d, const Annotation& a) {
    return d.file == a.file && d.kind == a.kind && std::abs(d.line - a.line) <= 1;
  };
  for (const Annotation& a : annotations) {
    const auto n = std::count_if(defects.begin(), defects.end(),
                                 [&](const Defect& d) { return hits(d, a); });
    if (n != 1) {
      problems.push_back(a.file + ":" + std::to_string(a.line) + " expects one " +
                         std::string(DefectKindName(a.kind)) + ", found " +
                         std::to_string(n));
    }
  }
  for (const Defect& d : defects) {
    if (IsWarning(d.kind)) continue;
    const bool known = std::any_of(annotations.begin(), annotations.end(),
                                   [&](const Annotation& a) { return hits(d, a); });
    if (!known) {
      problems.push_back("unexpected " + std::string(DefectKindName(d.kind)) + " at " +
                         d.file + ":" + std::to_string(d.line) + " (" + d.message + ")");
    }
  }
  return problems;
}

}  // namespace zkleak::testing

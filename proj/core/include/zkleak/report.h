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

#ifndef ZKLEAK_REPORT_H_
#define ZKLEAK_REPORT_H_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zkleak/defect.h"

namespace zkleak {

inline constexpr std::string_view kVersion = "0.3.0";

struct FileStat {
  std::string path;
  int loc = 0;
  std::size_t token_count = 0;
  friend bool operator==(const FileStat&, const FileStat&) = default;
};

struct Metrics {
  int c = 0;       // reported non-warning defects
  int fc = 0;      // false positives
  int act_c = 0;   // annotated true defects
  std::optional<double> fpr;  // unset when c == 0
  std::optional<double> fnr;  // unset when act_c == 0
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct Timing {
  std::map<std::string, double> phases;  // wall milliseconds
  double total_ms = 0;
  friend bool operator==(const Timing&, const Timing&) = default;
};

struct Report {
  std::string version{kVersion};
  std::vector<FileStat> files;
  std::vector<Defect> defects;
  std::optional<Metrics> metrics;
  Timing timing;

  int DefectCount() const;   // warnings excluded
  int WarningCount() const;
  // 1 when DefectCount() > 0, else 0.
  int ExitCode() const;
};

bool operator==(const Defect& a, const Defect& b);
bool operator==(const Report& a, const Report& b);

std::string ToJson(const Report& report);
std::string ToText(const Report& report);

class ReportParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inverse of ToJson.
Report ParseReportJson(std::string_view json);

// Inverse of FuncId::ToString.
FuncId ParseFuncId(std::string_view text);

struct Annotation {
  std::string file;
  int line = 0;
  DefectKind kind = DefectKind::kMissingRelease;
  bool expect_false_positive = false;
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// "// EXPECT-LEAK: <Kind>" and "// EXPECT-FP: <Kind>" comments of |text|.
// Unknown kinds are reported through |errors|.
std::vector<Annotation> ParseInlineAnnotations(std::string_view text,
                                               const std::string& path,
                                               std::vector<std::string>* errors = nullptr);

// JSON array of {file, line, kind, expectFalsePositive}. Throws
// ReportParseError.
std::vector<Annotation> ParseAnnotationManifest(std::string_view json);

class MetricsError : public std::domain_error {
 public:
  enum class Code { kDivisionByZeroDefects, kDivisionByZeroActual };
  MetricsError(Code code, const std::string& what)
      : std::domain_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// FC / C. Throws MetricsError when c == 0.
double ComputeFpr(int c, int fc);
// |actC - C| / actC. Throws MetricsError when act_c == 0.
double ComputeFnr(int act_c, int c);

// A defect matches an annotation with the same file and kind whose line is
// within one of the defect's.
Metrics Score(const std::vector<Defect>& defects,
              const std::vector<Annotation>& annotations);

// Equal paths, or one is a '/'-suffix of the other.
bool SamePath(std::string_view a, std::string_view b);

}  // namespace zkleak

#endif  // ZKLEAK_REPORT_H_

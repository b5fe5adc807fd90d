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

#include "zkleak/report.h"

#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace zkleak {

using nlohmann::json;

int Report::DefectCount() const {
  int n = 0;
  for (const Defect& d : defects) n += IsWarning(d.kind) ? 0 : 1;
  return n;
}

int Report::WarningCount() const {
  return static_cast<int>(defects.size()) - DefectCount();
}

int Report::ExitCode() const { return DefectCount() > 0 ? 1 : 0; }

bool operator==(const Defect& a, const Defect& b) {
  return std::tie(a.kind, a.file, a.line, a.func, a.message, a.path, a.trace) ==
         std::tie(b.kind, b.file, b.line, b.func, b.message, b.path, b.trace);
}

bool operator==(const Report& a, const Report& b) {
  return a.version == b.version && a.files == b.files && a.defects == b.defects &&
         a.metrics == b.metrics && a.timing == b.timing;
}

FuncId ParseFuncId(std::string_view text) {
  FuncId id;
  const std::size_t slash = text.rfind('/');
  if (slash != std::string_view::npos) {
    id.arity = std::atoi(std::string(text.substr(slash + 1)).c_str());
    text = text.substr(0, slash);
  }
  std::size_t sep = text.rfind("::");
  if (sep == std::string_view::npos) {
    id.name = std::string(text);
    return id;
  }
  id.name = std::string(text.substr(sep + 2));
  text = text.substr(0, sep);
  sep = text.rfind("::");
  if (sep == std::string_view::npos) {
    id.file = std::string(text);
  } else {
    id.file = std::string(text.substr(0, sep));
    id.class_name = std::string(text.substr(sep + 2));
  }
  return id;
}

namespace {

json DefectToJson(const Defect& d) {
  json path = json::array();
  for (const Guard& g : d.path) path.push_back({{"guard", g.text}, {"arm", g.arm}});
  return json{{"kind", DefectKindName(d.kind)},
              {"file", d.file},
              {"line", d.line},
              {"function", d.func.ToString()},
              {"message", d.message},
              {"pathC", path},
              {"trace", d.trace}};
}

Defect DefectFromJson(const json& j) {
  Defect d;
  const auto kind = DefectKindFromName(j.at("kind").get<std::string>());
  if (!kind) throw ReportParseError("unknown defect kind " + j.at("kind").dump());
  d.kind = *kind;
  d.file = j.at("file").get<std::string>();
  d.line = j.at("line").get<int>();
  d.func = ParseFuncId(j.at("function").get<std::string>());
  d.message = j.value("message", "");
  for (const json& g : j.value("pathC", json::array())) {
    d.path.push_back(Guard{g.at("guard").get<std::string>(), g.at("arm").get<std::string>()});
  }
  d.trace = j.value("trace", std::vector<std::string>{});
  return d;
}

}  // namespace

std::string ToJson(const Report& report) {
  json j;
  j["version"] = report.version;
  j["files"] = json::array();
  for (const FileStat& f : report.files) {
    j["files"].push_back({{"path", f.path}, {"loc", f.loc}, {"tokenCount", f.token_count}});
  }
  j["defects"] = json::array();
  for (const Defect& d : report.defects) j["defects"].push_back(DefectToJson(d));
  if (report.metrics) {
    const Metrics& m = *report.metrics;
    j["metrics"] = {{"C", m.c}, {"FC", m.fc}, {"actC", m.act_c}};
    j["metrics"]["fpr"] = m.fpr ? json(*m.fpr) : json(nullptr);
    j["metrics"]["fnr"] = m.fnr ? json(*m.fnr) : json(nullptr);
  }
  j["timing"] = {{"phases", report.timing.phases}, {"totalMs", report.timing.total_ms}};
  return j.dump(2) + "\n";
}

Report ParseReportJson(std::string_view text) {
  try {
    const json j = json::parse(text);
    Report r;
    r.version = j.at("version").get<std::string>();
    for (const json& f : j.at("files")) {
      r.files.push_back(FileStat{f.at("path").get<std::string>(), f.at("loc").get<int>(),
                                 f.value("tokenCount", std::size_t{0})});
    }
    for (const json& d : j.at("defects")) r.defects.push_back(DefectFromJson(d));
    if (j.contains("metrics")) {
      const json& m = j.at("metrics");
      Metrics out;
      out.c = m.at("C").get<int>();
      out.fc = m.at("FC").get<int>();
      out.act_c = m.at("actC").get<int>();
      if (!m.at("fpr").is_null()) out.fpr = m.at("fpr").get<double>();
      if (!m.at("fnr").is_null()) out.fnr = m.at("fnr").get<double>();
      r.metrics = out;
    }
    const json& t = j.at("timing");
    r.timing.phases = t.at("phases").get<std::map<std::string, double>>();
    r.timing.total_ms = t.at("totalMs").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ReportParseError(e.what());
  }
}

std::string ToText(const Report& report) {
  std::ostringstream out;
  for (const Defect& d : report.defects) {
    out << d.file << ':' << d.line << ": " << DefectKindName(d.kind) << ": " << d.message;
    if (!d.func.name.empty()) out << " [" << d.func.ToString() << ']';
    if (!d.path.empty()) out << " path " << RenderPath(d.path);
    out << '\n';
    if (!d.trace.empty()) {
      out << "    trace:";
      for (const std::string& step : d.trace) out << ' ' << step;
      out << '\n';
    }
  }
  int loc = 0;
  for (const FileStat& f : report.files) loc += f.loc;
  out << report.DefectCount() << " defect(s), " << report.WarningCount() << " warning(s) in "
      << report.files.size() << " file(s), " << loc << " lines, "
      << report.timing.total_ms << " ms\n";
  if (report.metrics) {
    const Metrics& m = *report.metrics;
    out << "metrics: C=" << m.c << " FC=" << m.fc << " actC=" << m.act_c << " FPR=";
    if (m.fpr) {
      out << *m.fpr;
    } else {
      out << "n/a";
    }
    out << " FNR=";
    if (m.fnr) {
      out << *m.fnr;
    } else {
      out << "n/a";
    }
    out << '\n';
  }
  return out.str();
}

std::vector<Annotation> ParseInlineAnnotations(std::string_view text, const std::string& path,
                                               std::vector<std::string>* errors) {
  static const std::regex kPattern(R"(//.*?EXPECT-(LEAK|FP)\s*:\s*([A-Za-z]+))");
  std::vector<Annotation> out;
  int line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string row(text.substr(start, nl == std::string_view::npos ? text.npos : nl - start));
    ++line;
    for (std::sregex_iterator it(row.begin(), row.end(), kPattern), end; it != end; ++it) {
      const std::string kind_text = (*it)[2].str();
      const auto kind = DefectKindFromName(kind_text);
      if (!kind) {
        if (errors != nullptr) {
          errors->push_back(path + ":" + std::to_string(line) + ": unknown defect kind " +
                            kind_text);
        }
        continue;
      }
      out.push_back(Annotation{path, line, *kind, (*it)[1].str() == "FP"});
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::vector<Annotation> ParseAnnotationManifest(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (!j.is_array()) throw ReportParseError("annotation manifest must be a JSON array");
    std::vector<Annotation> out;
    for (const json& a : j) {
      const auto kind = DefectKindFromName(a.at("kind").get<std::string>());
      if (!kind) throw ReportParseError("unknown defect kind " + a.at("kind").dump());
      out.push_back(Annotation{a.at("file").get<std::string>(), a.at("line").get<int>(), *kind,
                               a.value("expectFalsePositive", false)});
    }
    return out;
  } catch (const json::exception& e) {
    throw ReportParseError(e.what());
  }
}

double ComputeFpr(int c, int fc) {
  if (c <= 0) {
    throw MetricsError(MetricsError::Code::kDivisionByZeroDefects,
                       "FPR undefined: no defects reported");
  }
  return static_cast<double>(fc) / static_cast<double>(c);
}

double ComputeFnr(int act_c, int c) {
  if (act_c <= 0) {
    throw MetricsError(MetricsError::Code::kDivisionByZeroActual,
                       "FNR undefined: no annotated defects");
  }
  return std::abs(static_cast<double>(act_c - c)) / static_cast<double>(act_c);
}

bool SamePath(std::string_view a, std::string_view b) {
  if (a == b) return true;
  if (a.size() < b.size()) std::swap(a, b);
  return a.size() > b.size() && a.ends_with(b) && a[a.size() - b.size() - 1] == '/';
}

Metrics Score(const std::vector<Defect>& defects, const std::vector<Annotation>& annotations) {
  Metrics m;
  for (const Annotation& a : annotations) m.act_c += a.expect_false_positive ? 0 : 1;
  for (const Defect& d : defects) {
    if (IsWarning(d.kind)) continue;
    ++m.c;
    bool true_hit = false;
    bool fp_hit = false;
    for (const Annotation& a : annotations) {
      if (a.kind != d.kind || std::abs(a.line - d.line) > 1 || !SamePath(a.file, d.file)) {
        continue;
      }
      (a.expect_false_positive ? fp_hit : true_hit) = true;
    }
    if (fp_hit || !true_hit) ++m.fc;
  }
  if (m.c > 0) m.fpr = ComputeFpr(m.c, m.fc);
  if (m.act_c > 0) m.fnr = ComputeFnr(m.act_c, m.c);
  return m;
}

}  // namespace zkleak

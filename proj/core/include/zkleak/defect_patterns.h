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

#ifndef ZKLEAK_DEFECT_PATTERNS_H_
#define ZKLEAK_DEFECT_PATTERNS_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zkleak/scope_table.h"
#include "zkleak/token_stream.h"

namespace zkleak {

enum class AbstractKind : std::uint8_t {
  kAny,    // %any%
  kName,   // %name%
  kType,   // %type%
  kNum,    // %num%
  kBool,   // %bool%
  kComp,   // %comp%
  kStr,    // %str%
  kVar,    // %var%
  kVarId,  // %varid%
  kOp,     // %op%
  kOr,     // %or%
  kOrOr,   // %oror%
};

std::string_view AbstractKindName(AbstractKind kind);

struct PatternUnit {
  enum class Form : std::uint8_t { kLiteral, kCharClass, kAlternation, kAbstract };

  Form form = Form::kLiteral;
  std::string text;                  // kLiteral
  std::string chars;                 // kCharClass
  std::vector<std::string> choices;  // kAlternation
  bool allows_empty = false;         // kAlternation
  AbstractKind abstract = AbstractKind::kAny;

  static PatternUnit Literal(std::string text);
  static PatternUnit CharClass(std::string chars);
  static PatternUnit Alternation(std::vector<std::string> choices, bool allows_empty);
  static PatternUnit Abstract(AbstractKind kind);

  friend bool operator==(const PatternUnit&, const PatternUnit&) = default;
};

struct DefectPattern {
  std::vector<PatternUnit> units;
  std::string source;
  std::string label;
};

struct MatchSpan {
  std::size_t first = 0;
  std::size_t end = 0;  // one past the last matched token
  // (unit index, token position) for every abstract unit.
  std::vector<std::pair<int, std::size_t>> bindings;

  std::optional<std::size_t> Bound(int unit) const;
  friend bool operator==(const MatchSpan&, const MatchSpan&) = default;
};

class BadPatternUnit : public std::invalid_argument {
 public:
  BadPatternUnit(std::size_t unit_index, const std::string& what)
      : std::invalid_argument(what), unit_index_(unit_index) {}
  std::size_t unit_index() const { return unit_index_; }

 private:
  std::size_t unit_index_;
};

// Throws BadPatternUnit.
DefectPattern CompilePattern(std::string_view text, std::string label = {});

struct MatchContext {
  const TypeRegistry* types = nullptr;  // builtin type words only when null
  VarId varid = 0;                      // %varid% matches any variable when 0
};

// Tries |pattern| anchored at |pos|; positions >= |limit| are never consumed.
std::optional<MatchSpan> MatchAt(const TokenStream& ts, std::size_t pos,
                                 const DefectPattern& pattern,
                                 const MatchContext& ctx = {},
                                 std::size_t limit = kNoPos);

// Non-overlapping left-to-right matches within [begin, end).
std::vector<MatchSpan> MatchAll(const TokenStream& ts, const DefectPattern& pattern,
                                const MatchContext& ctx = {}, std::size_t begin = 0,
                                std::size_t end = kNoPos);

enum class PatternCategory : std::uint8_t { kAlloc, kFree, kTransfer, kOther };

// "alloc.*" / "free.*" / "transfer.*" prefixes.
PatternCategory CategoryOf(std::string_view label);

struct CatalogError {
  int line = 0;
  std::string label;
  std::string message;
};

class PatternCatalog {
 public:
  // Replaces an existing pattern with the same label.
  void Add(DefectPattern pattern);
  const DefectPattern* Find(std::string_view label) const;
  const std::vector<DefectPattern>& patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }

  // Parses "label: pattern" lines ('#' starts a comment) and merges them
  // over this catalog. Lines that fail to compile are skipped and reported.
  std::vector<CatalogError> MergeText(std::string_view text);

 private:
  std::vector<DefectPattern> patterns_;
};

PatternCatalog BuiltinPatterns();

}  // namespace zkleak

#endif  // ZKLEAK_DEFECT_PATTERNS_H_

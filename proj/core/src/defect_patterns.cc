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

#include "zkleak/defect_patterns.h"

#include <algorithm>
#include <array>
#include <sstream>

#include "syntax.h"

namespace zkleak {

namespace {

constexpr std::array<std::pair<std::string_view, AbstractKind>, 12> kAbstracts = {{
    {"%any%", AbstractKind::kAny},
    {"%name%", AbstractKind::kName},
    {"%type%", AbstractKind::kType},
    {"%num%", AbstractKind::kNum},
    {"%bool%", AbstractKind::kBool},
    {"%comp%", AbstractKind::kComp},
    {"%str%", AbstractKind::kStr},
    {"%var%", AbstractKind::kVar},
    {"%varid%", AbstractKind::kVarId},
    {"%op%", AbstractKind::kOp},
    {"%or%", AbstractKind::kOr},
    {"%oror%", AbstractKind::kOrOr},
}};

bool AbstractMatches(AbstractKind kind, const LexToken& t, const MatchContext& ctx) {
  switch (kind) {
    case AbstractKind::kAny:
      return true;
    case AbstractKind::kName:
      return t.kind == TokenKind::kIdentifier;
    case AbstractKind::kType:
      if (t.kind != TokenKind::kIdentifier && t.kind != TokenKind::kKeyword) {
        return false;
      }
      return syntax::IsBuiltinTypeWord(t.text) ||
             (ctx.types != nullptr && ctx.types->IsType(t.text));
    case AbstractKind::kNum:
      return t.kind == TokenKind::kNumber;
    case AbstractKind::kBool:
      return t.text == "true" || t.text == "false";
    case AbstractKind::kComp:
      return t.text == "<" || t.text == ">" || t.text == "<=" || t.text == ">=" ||
             t.text == "==" || t.text == "!=";
    case AbstractKind::kStr:
      return t.kind == TokenKind::kStringLiteral;
    case AbstractKind::kVar:
      return t.var_id > 0;
    case AbstractKind::kVarId:
      return t.var_id > 0 && (ctx.varid == 0 || t.var_id == ctx.varid);
    case AbstractKind::kOp:
      return t.kind == TokenKind::kOperator;
    case AbstractKind::kOr:
      return t.text == "|";
    case AbstractKind::kOrOr:
      return t.text == "||";
  }
  return false;
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view AbstractKindName(AbstractKind kind) {
  for (const auto& [name, k] : kAbstracts) {
    if (k == kind) return name;
  }
  return "%?%";
}

PatternUnit PatternUnit::Literal(std::string text) {
  PatternUnit u;
  u.form = Form::kLiteral;
  u.text = std::move(text);
  return u;
}

PatternUnit PatternUnit::CharClass(std::string chars) {
  PatternUnit u;
  u.form = Form::kCharClass;
  u.chars = std::move(chars);
  return u;
}

PatternUnit PatternUnit::Alternation(std::vector<std::string> choices,
                                     bool allows_empty) {
  PatternUnit u;
  u.form = Form::kAlternation;
  u.choices = std::move(choices);
  u.allows_empty = allows_empty;
  return u;
}

PatternUnit PatternUnit::Abstract(AbstractKind kind) {
  PatternUnit u;
  u.form = Form::kAbstract;
  u.abstract = kind;
  return u;
}

std::optional<std::size_t> MatchSpan::Bound(int unit) const {
  for (const auto& [u, pos] : bindings) {
    if (u == unit) return pos;
  }
  return std::nullopt;
}

DefectPattern CompilePattern(std::string_view text, std::string label) {
  DefectPattern out;
  out.source = std::string(text);
  out.label = std::move(label);
  std::istringstream in(out.source);
  std::string word;
  std::size_t index = 0;
  while (in >> word) {
    if (word.size() >= 2 && word.front() == '%' && word.back() == '%') {
      auto it = std::find_if(kAbstracts.begin(), kAbstracts.end(),
                             [&](const auto& e) { return e.first == word; });
      if (it == kAbstracts.end()) {
        throw BadPatternUnit(index, "unknown abstraction '" + word + "' at unit " +
                                        std::to_string(index));
      }
      out.units.push_back(PatternUnit::Abstract(it->second));
    } else if (word.size() >= 3 && word.front() == '[' && word.back() == ']') {
      out.units.push_back(PatternUnit::CharClass(word.substr(1, word.size() - 2)));
    } else if (word.size() > 1 && word.find('|') != std::string::npos &&
               word != "||" && word != "|=") {
      std::vector<std::string> choices;
      bool allows_empty = false;
      std::size_t start = 0;
      while (true) {
        const std::size_t bar = word.find('|', start);
        const std::string piece =
            word.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
        if (piece.empty()) {
          allows_empty = true;
        } else {
          choices.push_back(piece);
        }
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
      if (choices.empty()) {
        throw BadPatternUnit(index, "empty alternation at unit " + std::to_string(index));
      }
      out.units.push_back(PatternUnit::Alternation(std::move(choices), allows_empty));
    } else {
      out.units.push_back(PatternUnit::Literal(word));
    }
    ++index;
  }
  if (out.units.empty()) throw BadPatternUnit(0, "empty pattern");
  return out;
}

namespace {

// Matches units [u, n) from |cur|. An optional alternation first tries to
// consume a token and falls back to matching nothing.
bool MatchFrom(const TokenStream& ts, std::size_t cur, std::size_t u,
               const DefectPattern& pattern, const MatchContext& ctx,
               std::size_t end, MatchSpan& span) {
  if (u == pattern.units.size()) {
    span.end = cur;
    return true;
  }
  const PatternUnit& unit = pattern.units[u];
  const LexToken* t = cur < end ? &ts[cur] : nullptr;
  switch (unit.form) {
    case PatternUnit::Form::kLiteral:
      if (t == nullptr || t->text != unit.text) return false;
      return MatchFrom(ts, cur + 1, u + 1, pattern, ctx, end, span);
    case PatternUnit::Form::kCharClass:
      if (t == nullptr || t->text.size() != 1 ||
          unit.chars.find(t->text[0]) == std::string::npos) {
        return false;
      }
      return MatchFrom(ts, cur + 1, u + 1, pattern, ctx, end, span);
    case PatternUnit::Form::kAlternation: {
      const bool hit = t != nullptr &&
                       std::find(unit.choices.begin(), unit.choices.end(),
                                 t->text) != unit.choices.end();
      if (hit && MatchFrom(ts, cur + 1, u + 1, pattern, ctx, end, span)) return true;
      return unit.allows_empty && MatchFrom(ts, cur, u + 1, pattern, ctx, end, span);
    }
    case PatternUnit::Form::kAbstract:
      if (t == nullptr || !AbstractMatches(unit.abstract, *t, ctx)) return false;
      span.bindings.emplace_back(static_cast<int>(u), cur);
      if (MatchFrom(ts, cur + 1, u + 1, pattern, ctx, end, span)) return true;
      span.bindings.pop_back();
      return false;
  }
  return false;
}

}  // namespace

std::optional<MatchSpan> MatchAt(const TokenStream& ts, std::size_t pos,
                                 const DefectPattern& pattern,
                                 const MatchContext& ctx, std::size_t limit) {
  const std::size_t end = std::min(limit, ts.size());
  MatchSpan span;
  span.first = pos;
  if (!MatchFrom(ts, pos, 0, pattern, ctx, end, span) || span.end == pos) {
    return std::nullopt;
  }
  return span;
}

std::vector<MatchSpan> MatchAll(const TokenStream& ts, const DefectPattern& pattern,
                                const MatchContext& ctx, std::size_t begin,
                                std::size_t end) {
  std::vector<MatchSpan> out;
  end = std::min(end, ts.size());
  std::size_t k = begin;
  while (k < end) {
    if (auto m = MatchAt(ts, k, pattern, ctx, end)) {
      k = m->end;
      out.push_back(std::move(*m));
    } else {
      ++k;
    }
  }
  return out;
}

PatternCategory CategoryOf(std::string_view label) {
  if (label.starts_with("alloc.")) return PatternCategory::kAlloc;
  if (label.starts_with("free.")) return PatternCategory::kFree;
  if (label.starts_with("transfer.")) return PatternCategory::kTransfer;
  return PatternCategory::kOther;
}

void PatternCatalog::Add(DefectPattern pattern) {
  for (DefectPattern& p : patterns_) {
    if (p.label == pattern.label) {
      p = std::move(pattern);
      return;
    }
  }
  patterns_.push_back(std::move(pattern));
}

const DefectPattern* PatternCatalog::Find(std::string_view label) const {
  for (const DefectPattern& p : patterns_) {
    if (p.label == label) return &p;
  }
  return nullptr;
}

std::vector<CatalogError> PatternCatalog::MergeText(std::string_view text) {
  std::vector<CatalogError> errors;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const std::size_t colon = trimmed.find(':');
    if (colon == std::string::npos || colon == 0) {
      errors.push_back({number, {}, "expected 'label: pattern'"});
      continue;
    }
    const std::string label = Trim(std::string_view(trimmed).substr(0, colon));
    const std::string source = Trim(std::string_view(trimmed).substr(colon + 1));
    try {
      Add(CompilePattern(source, label));
    } catch (const BadPatternUnit& e) {
      errors.push_back({number, label, e.what()});
    }
  }
  return errors;
}

PatternCatalog BuiltinPatterns() {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 15> kBuiltins = {{
      {"alloc.malloc", "%var% = malloc ("},
      {"alloc.calloc", "%var% = calloc ("},
      {"alloc.realloc", "%var% = realloc ("},
      {"alloc.new", "%var% = new %type%"},
      {"alloc.new_array", "%var% = new %type% ["},
      {"free.free", "free ( %var% )"},
      {"free.delete", "delete %var%"},
      {"free.delete_array", "delete [ ] %var%"},
      {"transfer.assign", "%var% = %var%"},
      {"transfer.return", "return %var%"},
      {"transfer.inc_post", "%var% ++"},
      {"transfer.dec_post", "%var% --"},
      {"transfer.inc_pre", "++ %var%"},
      {"transfer.dec_pre", "-- %var%"},
      {"transfer.null", "%var% = NULL|nullptr|0"},
  }};
  PatternCatalog catalog;
  for (const auto& [label, source] : kBuiltins) {
    catalog.Add(CompilePattern(source, std::string(label)));
  }
  return catalog;
}

}  // namespace zkleak

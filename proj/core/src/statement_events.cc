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

#include "statement_events.h"

#include <algorithm>

namespace zkleak {

namespace {

bool IsAllocName(std::string_view s) {
  return s == "malloc" || s == "calloc" || s == "realloc";
}

bool IsNullLiteral(const LexToken& t) {
  return t.text == "NULL" || t.text == "nullptr" || t.text == "0";
}

int CategoryRank(PatternCategory c) {
  switch (c) {
    case PatternCategory::kAlloc: return 0;
    case PatternCategory::kFree: return 1;
    case PatternCategory::kTransfer: return 2;
    case PatternCategory::kOther: return 3;
  }
  return 3;
}

}  // namespace

AllocFn AllocFnForLabel(std::string_view label) {
  const std::string_view suffix = label.substr(label.find('.') + 1);
  if (suffix == "calloc") return AllocFn::kCalloc;
  if (suffix == "realloc") return AllocFn::kRealloc;
  if (suffix == "new") return AllocFn::kNew;
  if (suffix == "new_array") return AllocFn::kNewArray;
  return AllocFn::kMalloc;
}

FreeFn FreeFnForLabel(std::string_view label) {
  const std::string_view suffix = label.substr(label.find('.') + 1);
  if (suffix == "delete") return FreeFn::kDelete;
  if (suffix == "delete_array") return FreeFn::kDeleteArray;
  return FreeFn::kFree;
}

EventExtractor::EventExtractor(const TokenStream& ts, const ScopeTree& tree,
                               const PatternCatalog& catalog)
    : ts_(ts), tree_(tree), catalog_(catalog), br_(ts) {}

std::size_t EventExtractor::ExprEnd(std::size_t from, std::size_t end) const {
  for (std::size_t i = from; i < end; ++i) {
    const std::string& s = ts_[i].text;
    if (s == "(" || s == "[" || s == "{") {
      const std::size_t m = br_.Match(i);
      if (m == kNoPos || m >= end) return end;
      i = m;
      continue;
    }
    if (s == ")" || s == "]" || s == "}" || s == ";" || s == ",") return i;
  }
  return end;
}

namespace {

bool IsCastGroup(const TokenStream& ts, const ScopeTree& tree, std::size_t open,
                 std::size_t close) {
  if (close <= open + 1) return false;
  bool typed = false;
  for (std::size_t i = open + 1; i < close; ++i) {
    const LexToken& t = ts[i];
    if (t.var_id > 0) return false;
    if (t.text == "*" || t.text == "&" || t.text == "::" || t.text == "const" ||
        t.text == "volatile" || t.text == "struct" || t.text == "unsigned" ||
        t.text == "signed" || t.text == "<" || t.text == ">") {
      continue;
    }
    if (syntax::IsBuiltinTypeWord(t.text) || tree.types().IsType(t.text) ||
        tree.ClassScope(t.text).has_value()) {
      typed = true;
      continue;
    }
    if (t.kind == TokenKind::kIdentifier) {
      typed = true;  // unknown type name such as a library typedef
      continue;
    }
    return false;
  }
  return typed;
}

// "a.v", "a->v" (but not "this->v").
bool MemberAccess(const TokenStream& ts, std::size_t l, std::size_t begin) {
  return l > begin && (ts[l - 1].text == "." || ts[l - 1].text == "->") &&
         !(l >= begin + 2 && ts[l - 2].text == "this");
}

// "*v" with a unary star; declarators such as "char *v" are not.
bool Deref(const TokenStream& ts, const ScopeTree& tree, std::size_t l,
           std::size_t begin) {
  if (l <= begin || ts[l - 1].text != "*") return false;
  const VarId v = ts[l].var_id;
  if (v > 0 && static_cast<std::size_t>(v) <= tree.symbol_count() &&
      tree.symbol(v).decl_pos == l && tree.symbol(v).file == ts[l].file) {
    return false;
  }
  if (l - 1 == begin) return true;
  const LexToken& before = ts[l - 2];
  if (before.text == ")" || before.text == "]") return false;
  return before.kind == TokenKind::kOperator || before.kind == TokenKind::kPunctuator;
}

// Whether the new-expression whose type starts at |j| allocates an array.
bool NewIsArray(const TokenStream& ts, std::size_t j, std::size_t end) {
  while (j < end && (syntax::IsName(ts[j]) || ts[j].kind == TokenKind::kKeyword ||
                     ts[j].text == "::" || ts[j].text == "*")) {
    ++j;
    if (j < end && ts[j].text == "<") {
      const std::size_t a = syntax::SkipAngles(ts, j, end);
      if (a == kNoPos) return false;
      j = a;
    }
  }
  return j < end && ts[j].text == "[";
}

}  // namespace

std::size_t EventExtractor::SkipCastBackward(std::size_t pos, std::size_t begin) const {
  while (pos > begin && ts_[pos - 1].text == ")") {
    const std::size_t m = br_.Match(pos - 1);
    if (m == kNoPos || m < begin || !IsCastGroup(ts_, tree_, m, pos - 1)) break;
    pos = m;
  }
  return pos;
}

std::size_t EventExtractor::SkipCastForward(std::size_t pos, std::size_t end) const {
  while (pos < end && ts_[pos].text == "(") {
    const std::size_t m = br_.Match(pos);
    if (m == kNoPos || m + 1 >= end || !IsCastGroup(ts_, tree_, pos, m)) break;
    pos = m + 1;
  }
  return pos;
}

VarId EventExtractor::PlainVar(std::size_t begin, std::size_t end) const {
  while (end > begin + 1 && ts_[begin].text == "(" && br_.Match(begin) == end - 1) {
    ++begin;
    --end;
  }
  begin = SkipCastForward(begin, end);
  while (end > begin + 1 && ts_[begin].text == "(" && br_.Match(begin) == end - 1) {
    ++begin;
    --end;
  }
  if (end == begin + 1) return ts_[begin].var_id;
  if (end == begin + 3 && ts_[begin].text == "this" && ts_[begin + 1].text == "->") {
    return ts_[begin + 2].var_id;
  }
  return 0;
}

std::optional<VarId> EventExtractor::TargetOf(std::size_t pos, std::size_t begin) const {
  const std::size_t j = SkipCastBackward(pos, begin);
  if (j == begin) return kTempSlot;
  const LexToken& prev = ts_[j - 1];
  if (prev.text == "return") return kReturnSlot;
  if (prev.text == "=" && prev.kind == TokenKind::kOperator) {
    if (j - 1 == begin) return kHeapSlot;
    const std::size_t l = j - 2;
    const LexToken& lhs = ts_[l];
    if (lhs.var_id > 0) {
      if (MemberAccess(ts_, l, begin) || Deref(ts_, tree_, l, begin)) return kHeapSlot;
      return lhs.var_id;
    }
    return kHeapSlot;
  }
  if (prev.text == ";" || prev.text == "{" || prev.text == "}") return kTempSlot;
  return std::nullopt;
}

std::vector<StmtEvent> EventExtractor::Extract(std::size_t begin, std::size_t end) const {
  std::vector<StmtEvent> events;
  if (begin == kNoPos || end == kNoPos || begin >= end) return events;
  end = std::min(end, ts_.size());
  std::vector<bool> covered(end - begin, false);
  auto is_covered = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) {
      if (covered[i - begin]) return true;
    }
    return false;
  };
  auto cover = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b && i < end; ++i) covered[i - begin] = true;
  };
  auto expr_tail = [&](std::size_t pos) {
    return pos >= end || ts_[pos].text == ";" || ts_[pos].text == "," ||
           ts_[pos].text == ")";
  };
  auto add = [&](StmtEvent e) { events.push_back(std::move(e)); };

  // Catalog matches.
  struct Candidate {
    MatchSpan span;
    const DefectPattern* pattern;
    int rank;
  };
  std::vector<Candidate> candidates;
  const MatchContext ctx{&tree_.types(), 0};
  for (const DefectPattern& p : catalog_.patterns()) {
    const PatternCategory cat = CategoryOf(p.label);
    if (cat == PatternCategory::kOther) continue;
    for (MatchSpan& m : MatchAll(ts_, p, ctx, begin, end)) {
      candidates.push_back({std::move(m), &p, CategoryRank(cat)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.span.first != b.span.first) return a.span.first < b.span.first;
                     if (a.rank != b.rank) return a.rank < b.rank;
                     return a.span.end - a.span.first > b.span.end - b.span.first;
                   });
  for (const Candidate& c : candidates) {
    if (is_covered(c.span.first, c.span.end)) continue;
    const std::string& label = c.pattern->label;
    std::vector<VarId> vars;
    for (const auto& [unit, pos] : c.span.bindings) {
      if (ts_[pos].var_id > 0) vars.push_back(ts_[pos].var_id);
    }
    StmtEvent e;
    e.pos = c.span.first;
    e.line = ts_[c.span.first].line;
    e.label = label;
    const PatternCategory cat = CategoryOf(label);
    if (cat == PatternCategory::kAlloc) {
      if (vars.empty()) continue;
      e.target = vars.front();
      e.alloc = AllocFnForLabel(label);
      if (e.alloc == AllocFn::kNew && NewIsArray(ts_, c.span.first + 3, end)) {
        e.alloc = AllocFn::kNewArray;
      }
      const std::size_t lhs = c.span.first;
      if (MemberAccess(ts_, lhs, begin) || Deref(ts_, tree_, lhs, begin)) e.target = kHeapSlot;
      e.order = ExprEnd(c.span.first + 2, end);
      if (e.alloc == AllocFn::kRealloc) {
        e.kind = StmtEvent::Kind::kRealloc;
        const std::size_t open = c.span.end - 1;
        const std::size_t close = br_.Match(open);
        if (close != kNoPos && close <= end) {
          const auto args = syntax::SplitTopLevel(ts_, br_, open + 1, close, ",");
          if (!args.empty()) e.source = PlainVar(args.front().first, args.front().second);
        }
      } else {
        e.kind = StmtEvent::Kind::kAlloc;
      }
      cover(c.span.first, c.span.end);
      add(std::move(e));
      continue;
    }
    if (cat == PatternCategory::kFree) {
      if (vars.empty()) continue;
      if (!expr_tail(c.span.end) && ts_[c.span.end - 1].text != ")") continue;
      e.kind = StmtEvent::Kind::kFree;
      e.target = vars.back();
      e.free = FreeFnForLabel(label);
      e.order = c.span.end - 1;
      cover(c.span.first, c.span.end);
      add(std::move(e));
      continue;
    }
    // Transfers.
    const std::string_view kind = std::string_view(label).substr(label.find('.') + 1);
    if (vars.empty()) continue;
    if (kind == "assign") {
      if (vars.size() < 2) continue;
      if (MemberAccess(ts_, c.span.first, begin) || Deref(ts_, tree_, c.span.first, begin)) {
        continue;
      }
      e.target = vars[0];
      if (expr_tail(c.span.end)) {
        e.kind = StmtEvent::Kind::kAssign;
        e.source = vars[1];
        e.order = c.span.end;
        cover(c.span.first, c.span.end);
      } else {
        // "p = q[i]", "p = q + 1": p takes a non-owning value, unless the
        // right side is a call, which binds its own result.
        const std::size_t rhs = c.span.first + 2;
        if (ts_[rhs + 1].text == "(") continue;
        e.kind = StmtEvent::Kind::kOverwrite;
        e.order = ExprEnd(rhs, end);
        cover(c.span.first, c.span.first + 2);
      }
    } else if (kind == "return") {
      if (!expr_tail(c.span.end)) continue;
      e.kind = StmtEvent::Kind::kReturn;
      e.target = vars[0];
      e.order = c.span.end;
      cover(c.span.first, c.span.end);
    } else if (kind == "null") {
      if (!expr_tail(c.span.end)) continue;
      if (MemberAccess(ts_, c.span.first, begin) || Deref(ts_, tree_, c.span.first, begin)) {
        continue;
      }
      e.kind = StmtEvent::Kind::kNullAssign;
      e.target = vars[0];
      e.order = c.span.end;
      cover(c.span.first, c.span.end);
    } else {
      if (MemberAccess(ts_, c.span.first, begin)) continue;
      e.kind = StmtEvent::Kind::kPtrArith;
      e.target = vars[0];
      e.order = c.span.first;
      cover(c.span.first, c.span.end);
    }
    add(std::move(e));
  }

  // Surface forms outside the catalog.
  for (std::size_t i = begin; i < end; ++i) {
    if (covered[i - begin]) continue;
    const LexToken& t = ts_[i];
    const bool call_shape = i + 1 < end && ts_[i + 1].text == "(";
    if (t.kind == TokenKind::kIdentifier && t.var_id == 0 && call_shape &&
        IsAllocName(t.text)) {
      const std::size_t close = br_.Match(i + 1);
      auto target = TargetOf(i, begin);
      if (!target || close == kNoPos) continue;
      StmtEvent e;
      e.pos = i;
      e.line = t.line;
      e.target = *target;
      e.alloc = t.text == "calloc" ? AllocFn::kCalloc
                : t.text == "realloc" ? AllocFn::kRealloc
                                      : AllocFn::kMalloc;
      e.kind = e.alloc == AllocFn::kRealloc ? StmtEvent::Kind::kRealloc
                                            : StmtEvent::Kind::kAlloc;
      if (e.alloc == AllocFn::kRealloc) {
        const auto args = syntax::SplitTopLevel(ts_, br_, i + 2, close, ",");
        if (!args.empty()) e.source = PlainVar(args.front().first, args.front().second);
      }
      e.order = ExprEnd(i, end);
      cover(i, std::min(close + 1, end));
      add(std::move(e));
      continue;
    }
    if (t.kind == TokenKind::kKeyword && t.text == "new") {
      auto target = TargetOf(i, begin);
      if (!target) continue;
      std::size_t j = i + 1;
      if (j < end && ts_[j].text == "(") {  // placement form
        const std::size_t m = br_.Match(j);
        if (m == kNoPos) continue;
        j = m + 1;
      }
      StmtEvent e;
      e.kind = StmtEvent::Kind::kAlloc;
      e.pos = i;
      e.line = t.line;
      e.target = *target;
      e.alloc = NewIsArray(ts_, j, end) ? AllocFn::kNewArray : AllocFn::kNew;
      e.order = ExprEnd(i, end);
      cover(i, j);
      add(std::move(e));
      continue;
    }
    if (t.kind == TokenKind::kIdentifier && t.text == "free" && t.var_id == 0 &&
        call_shape) {
      const std::size_t close = br_.Match(i + 1);
      if (close == kNoPos || close > end) continue;
      const VarId v = PlainVar(i + 2, close);
      if (v == 0) continue;
      StmtEvent e;
      e.kind = StmtEvent::Kind::kFree;
      e.pos = i;
      e.line = t.line;
      e.target = v;
      e.free = FreeFn::kFree;
      e.order = close;
      cover(i, close + 1);
      add(std::move(e));
      continue;
    }
    if (t.kind == TokenKind::kKeyword && t.text == "delete") {
      std::size_t j = i + 1;
      FreeFn fn = FreeFn::kDelete;
      if (j + 1 < end && ts_[j].text == "[" && ts_[j + 1].text == "]") {
        fn = FreeFn::kDeleteArray;
        j += 2;
      }
      const std::size_t e_end = ExprEnd(j, end);
      const VarId v = PlainVar(j, e_end);
      if (v == 0) continue;
      StmtEvent e;
      e.kind = StmtEvent::Kind::kFree;
      e.pos = i;
      e.line = t.line;
      e.target = v;
      e.free = fn;
      e.order = e_end;
      cover(i, e_end);
      add(std::move(e));
      continue;
    }
    if (t.kind == TokenKind::kKeyword && t.text == "return") {
      const std::size_t e_end = ExprEnd(i + 1, end);
      const VarId v = PlainVar(i + 1, e_end);
      if (v == 0) continue;
      StmtEvent e;
      e.kind = StmtEvent::Kind::kReturn;
      e.pos = i;
      e.line = t.line;
      e.target = v;
      e.order = e_end;
      cover(i, e_end);
      add(std::move(e));
      continue;
    }
    if ((t.text == "+=" || t.text == "-=") && i > begin && ts_[i - 1].var_id > 0 &&
        !MemberAccess(ts_, i - 1, begin) && !Deref(ts_, tree_, i - 1, begin)) {
      StmtEvent e;
      e.kind = StmtEvent::Kind::kPtrArith;
      e.pos = i - 1;
      e.line = t.line;
      e.target = ts_[i - 1].var_id;
      e.order = i;
      add(std::move(e));
      continue;
    }
    if (t.text == "=" && t.kind == TokenKind::kOperator && i > begin &&
        !covered[i - 1 - begin]) {
      const std::size_t l = i - 1;
      const bool member = MemberAccess(ts_, l, begin) || Deref(ts_, tree_, l, begin);
      const std::size_t e_end = ExprEnd(i + 1, end);
      if (member || ts_[l].text == "]") {
        // Stored into a field or element: the value reaches the heap.
        const VarId v = PlainVar(i + 1, e_end);
        if (v == 0) continue;
        StmtEvent e;
        e.kind = StmtEvent::Kind::kAssign;
        e.pos = l;
        e.line = ts_[l].line;
        e.target = kHeapSlot;
        e.source = v;
        e.order = e_end;
        add(std::move(e));
        continue;
      }
      if (ts_[l].var_id <= 0) continue;
      if (e_end <= i + 1) continue;
      const std::size_t rhs = SkipCastForward(i + 1, e_end);
      const LexToken& r = ts_[rhs];
      if (r.text == "new" || (r.var_id == 0 && IsAllocName(r.text))) continue;
      if (syntax::IsName(r) && r.var_id == 0 && rhs + 1 < e_end &&
          ts_[rhs + 1].text == "(" && br_.Match(rhs + 1) + 1 == e_end) {
        continue;  // call result, bound by the call event
      }
      StmtEvent e;
      e.pos = l;
      e.line = ts_[l].line;
      e.target = ts_[l].var_id;
      e.order = e_end;
      const VarId v = PlainVar(i + 1, e_end);
      if (v != 0) {
        e.kind = StmtEvent::Kind::kAssign;
        e.source = v;
      } else if (e_end == rhs + 1 && IsNullLiteral(r)) {
        e.kind = StmtEvent::Kind::kNullAssign;
      } else {
        e.kind = StmtEvent::Kind::kOverwrite;
      }
      add(std::move(e));
      continue;
    }
  }

  // Calls.
  for (std::size_t i = begin; i + 1 < end; ++i) {
    const LexToken& t = ts_[i];
    if (t.kind != TokenKind::kIdentifier || t.var_id != 0 || ts_[i + 1].text != "(") {
      continue;
    }
    if (IsAllocName(t.text) || t.text == "free") continue;
    if (tree_.types().IsType(t.text) || tree_.ClassScope(t.text).has_value()) continue;
    if (i > begin && (ts_[i - 1].text == "new" || ts_[i - 1].text == "operator")) continue;
    const std::size_t close = br_.Match(i + 1);
    if (close == kNoPos || close >= end + 1) continue;
    StmtEvent e;
    e.kind = StmtEvent::Kind::kCall;
    e.pos = i;
    e.line = t.line;
    e.callee = t.text;
    if (close > i + 2) {
      for (auto [a, b] : syntax::SplitTopLevel(ts_, br_, i + 2, close, ",")) {
        std::size_t s = a;
        if (s < b && ts_[s].text == "&") ++s;
        e.args.push_back(PlainVar(s, b));
      }
    }
    std::size_t anchor = i;
    if (i >= begin + 2 && (ts_[i - 1].text == "." || ts_[i - 1].text == "->" ||
                           ts_[i - 1].text == "::")) {
      anchor = i - 2;
      if (anchor >= begin + 2 && ts_[anchor - 1].text == "->" &&
          ts_[anchor].text != "this") {
        anchor = i - 2;
      }
    }
    e.target = TargetOf(anchor, begin).value_or(kTempSlot);
    e.order = close;
    add(std::move(e));
  }

  std::stable_sort(events.begin(), events.end(), [](const StmtEvent& a, const StmtEvent& b) {
    if (a.order != b.order) return a.order < b.order;
    // A call finishes before an assignment that ends at the same token.
    const bool ca = a.kind == StmtEvent::Kind::kCall;
    const bool cb = b.kind == StmtEvent::Kind::kCall;
    if (ca != cb) return ca;
    return a.pos < b.pos;
  });
  return events;
}

std::optional<std::pair<VarId, std::string>> EventExtractor::NullTest(
    std::size_t begin, std::size_t end) const {
  if (begin == kNoPos || end == kNoPos || begin >= end) return std::nullopt;
  while (end > begin + 1 && ts_[begin].text == "(" && br_.Match(begin) == end - 1) {
    ++begin;
    --end;
  }
  for (std::size_t i = begin; i < end; ++i) {
    const std::string& s = ts_[i].text;
    if (s == "&&" || s == "||" || s == "?") return std::nullopt;
    if (s == "(" || s == "[") {
      const std::size_t m = br_.Match(i);
      if (m == kNoPos || m >= end) return std::nullopt;
      i = m;
    }
  }
  // Variable named by an operand: "p", "(p)", "(p = ...)".
  auto operand = [&](std::size_t b, std::size_t e) -> VarId {
    if (const VarId v = PlainVar(b, e)) return v;
    while (e > b + 1 && ts_[b].text == "(" && br_.Match(b) == e - 1) {
      ++b;
      --e;
    }
    if (e > b + 2 && ts_[b].var_id > 0 && ts_[b + 1].text == "=" &&
        ts_[b + 1].kind == TokenKind::kOperator) {
      return ts_[b].var_id;
    }
    return 0;
  };
  if (ts_[begin].text == "!") {
    if (const VarId v = operand(begin + 1, end)) return std::make_pair(v, std::string("then"));
    return std::nullopt;
  }
  for (std::size_t i = begin; i < end; ++i) {
    const std::string& s = ts_[i].text;
    if (s == "(" || s == "[") {
      i = br_.Match(i);
      continue;
    }
    if (s == "==" || s == "!=") {
      const std::string arm = s == "==" ? "then" : "else";
      if (i + 2 == end && IsNullLiteral(ts_[i + 1])) {
        if (const VarId v = operand(begin, i)) return std::make_pair(v, arm);
      }
      if (i == begin + 1 && IsNullLiteral(ts_[begin])) {
        if (const VarId v = operand(i + 1, end)) return std::make_pair(v, arm);
      }
      return std::nullopt;
    }
  }
  if (const VarId v = operand(begin, end)) return std::make_pair(v, std::string("else"));
  return std::nullopt;
}

}  // namespace zkleak

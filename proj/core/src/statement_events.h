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

// Memory-operation events of one statement or guard, recovered from catalog
// matches plus a few surface forms the catalog does not cover (casts,
// "return malloc(...)", member targets).

#ifndef ZKLEAK_SRC_STATEMENT_EVENTS_H_
#define ZKLEAK_SRC_STATEMENT_EVENTS_H_

#include <optional>
#include <string>
#include <vector>

#include "syntax.h"
#include "zkleak/defect_patterns.h"
#include "zkleak/leak_state_machine.h"
#include "zkleak/scope_table.h"

namespace zkleak {

struct StmtEvent {
  enum class Kind : std::uint8_t {
    kAlloc,      // target = owner (may be a pseudo-owner)
    kRealloc,    // target = result owner, source = argument
    kAssign,     // target = source
    kOverwrite,  // target = non-owning value
    kPtrArith,
    kNullAssign,
    kReturn,
    kFree,
    kCall,
  };

  Kind kind = Kind::kAlloc;
  std::size_t pos = 0;    // anchor token
  std::size_t order = 0;  // evaluation point inside the statement
  int line = 0;
  VarId target = 0;
  VarId source = 0;
  AllocFn alloc = AllocFn::kMalloc;
  FreeFn free = FreeFn::kFree;
  // kCall
  std::string callee;
  std::vector<VarId> args;
  std::string label;  // catalog label for catalog-driven events
};

class EventExtractor {
 public:
  EventExtractor(const TokenStream& ts, const ScopeTree& tree,
                 const PatternCatalog& catalog);

  // Ordered events of the tokens [begin, end).
  std::vector<StmtEvent> Extract(std::size_t begin, std::size_t end) const;

  // For "if"/"while" guards of the forms p, !p, p == NULL, p != NULL and
  // (p = ...) == NULL: the tested variable and the arm where it is null.
  std::optional<std::pair<VarId, std::string>> NullTest(std::size_t begin,
                                                       std::size_t end) const;

  const syntax::BracketIndex& brackets() const { return br_; }

 private:
  std::size_t ExprEnd(std::size_t from, std::size_t end) const;
  std::size_t SkipCastBackward(std::size_t pos, std::size_t begin) const;
  std::size_t SkipCastForward(std::size_t pos, std::size_t end) const;
  VarId PlainVar(std::size_t begin, std::size_t end) const;
  // Owner receiving the value of the expression starting at |pos|.
  std::optional<VarId> TargetOf(std::size_t pos, std::size_t begin) const;

  const TokenStream& ts_;
  const ScopeTree& tree_;
  const PatternCatalog& catalog_;
  syntax::BracketIndex br_;
};

AllocFn AllocFnForLabel(std::string_view label);
FreeFn FreeFnForLabel(std::string_view label);

}  // namespace zkleak

#endif  // ZKLEAK_SRC_STATEMENT_EVENTS_H_

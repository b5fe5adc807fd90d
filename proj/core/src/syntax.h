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

// Small token-level helpers shared by the scope, graph and detector passes.

#ifndef ZKLEAK_SRC_SYNTAX_H_
#define ZKLEAK_SRC_SYNTAX_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "zkleak/token_stream.h"

namespace zkleak::syntax {

// Matching partner of every (), [] and {} token; kNoPos when unbalanced.
class BracketIndex {
 public:
  explicit BracketIndex(const TokenStream& ts);
  std::size_t Match(std::size_t pos) const {
    return pos < match_.size() ? match_[pos] : kNoPos;
  }

 private:
  std::vector<std::size_t> match_;
};

bool IsBuiltinTypeWord(std::string_view word);
// Storage classes, cv-qualifiers and other words that may precede a type.
bool IsDeclSpecifier(std::string_view word);
bool IsAccessSpecifier(std::string_view word);
bool IsControlKeyword(std::string_view word);

inline bool IsName(const LexToken& t) {
  return t.kind == TokenKind::kIdentifier;
}

// Skips a template argument list starting at '<'; returns the position after
// the closing '>' or kNoPos. '>>' closes two levels.
std::size_t SkipAngles(const TokenStream& ts, std::size_t lt, std::size_t end);

// Position of the first top-level |text| token in [begin, end), or kNoPos.
std::size_t FindTopLevel(const TokenStream& ts, const BracketIndex& br,
                         std::size_t begin, std::size_t end,
                         std::string_view text);

// Splits [begin, end) on top-level |sep| tokens. With |angles| set, a '<'
// directly after a name opens a template argument list.
std::vector<std::pair<std::size_t, std::size_t>> SplitTopLevel(
    const TokenStream& ts, const BracketIndex& br, std::size_t begin,
    std::size_t end, std::string_view sep = ",", bool angles = false);

}  // namespace zkleak::syntax

#endif  // ZKLEAK_SRC_SYNTAX_H_

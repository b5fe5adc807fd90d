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

#include "syntax.h"

#include <array>
#include <unordered_set>

namespace zkleak::syntax {

BracketIndex::BracketIndex(const TokenStream& ts) : match_(ts.size(), kNoPos) {
  std::vector<std::size_t> parens;
  std::vector<std::size_t> squares;
  std::vector<std::size_t> braces;
  auto close = [&](std::vector<std::size_t>& stack, std::size_t pos) {
    if (stack.empty()) return;
    match_[pos] = stack.back();
    match_[stack.back()] = pos;
    stack.pop_back();
  };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const LexToken& t = ts[i];
    if (t.kind != TokenKind::kPunctuator) continue;
    switch (t.text[0]) {
      case '(': parens.push_back(i); break;
      case '[': squares.push_back(i); break;
      case '{': braces.push_back(i); break;
      case ')': close(parens, i); break;
      case ']': close(squares, i); break;
      case '}':
        // A stray paren left open inside a block must not swallow the
        // block's closing brace.
        if (!braces.empty()) {
          while (!parens.empty() && parens.back() > braces.back()) parens.pop_back();
          while (!squares.empty() && squares.back() > braces.back()) squares.pop_back();
        }
        close(braces, i);
        break;
      default: break;
    }
  }
}

bool IsBuiltinTypeWord(std::string_view word) {
  static const std::unordered_set<std::string_view> kWords = {
      "void", "char", "short", "int", "long", "float", "double", "bool",
      "signed", "unsigned", "wchar_t", "char8_t", "char16_t", "char32_t",
      "auto", "_Bool", "_Complex"};
  return kWords.contains(word);
}

bool IsDeclSpecifier(std::string_view word) {
  static const std::unordered_set<std::string_view> kWords = {
      "static", "extern", "const", "volatile", "register", "mutable",
      "inline", "constexpr", "constinit", "consteval", "thread_local",
      "virtual", "explicit", "typename", "restrict", "__restrict",
      "_Thread_local", "_Atomic", "friend"};
  return kWords.contains(word);
}

bool IsAccessSpecifier(std::string_view word) {
  return word == "public" || word == "private" || word == "protected";
}

bool IsControlKeyword(std::string_view word) {
  static const std::unordered_set<std::string_view> kWords = {
      "if", "else", "for", "while", "do", "switch", "case", "default",
      "return", "break", "continue", "goto", "try", "catch", "throw",
      "sizeof", "new", "delete", "co_return", "co_await", "co_yield"};
  return kWords.contains(word);
}

std::size_t SkipAngles(const TokenStream& ts, std::size_t lt, std::size_t end) {
  int depth = 0;
  for (std::size_t i = lt; i < end; ++i) {
    const std::string& s = ts[i].text;
    if (s == "<") {
      ++depth;
    } else if (s == ">") {
      if (--depth == 0) return i + 1;
    } else if (s == ">>") {
      depth -= 2;
      if (depth <= 0) return i + 1;
    } else if (s == ";" || s == "{" || s == "}") {
      return kNoPos;
    }
  }
  return kNoPos;
}

std::size_t FindTopLevel(const TokenStream& ts, const BracketIndex& br,
                         std::size_t begin, std::size_t end,
                         std::string_view text) {
  for (std::size_t i = begin; i < end; ++i) {
    const LexToken& t = ts[i];
    if (t.text == text) return i;
    if (t.text == "(" || t.text == "[" || t.text == "{") {
      const std::size_t m = br.Match(i);
      if (m == kNoPos || m >= end) return kNoPos;
      i = m;
    }
  }
  return kNoPos;
}

std::vector<std::pair<std::size_t, std::size_t>> SplitTopLevel(
    const TokenStream& ts, const BracketIndex& br, std::size_t begin,
    std::size_t end, std::string_view sep, bool angles) {
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  std::size_t start = begin;
  int angle = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const LexToken& t = ts[i];
    if (t.text == "(" || t.text == "[" || t.text == "{") {
      const std::size_t m = br.Match(i);
      if (m != kNoPos && m < end) i = m;
      continue;
    }
    // Template argument lists in parameter types: "std::map<int, int> m".
    if (angles && t.text == "<" && i > begin && IsName(ts[i - 1])) {
      ++angle;
    } else if (t.text == ">" && angle > 0) {
      --angle;
    } else if (t.text == ">>" && angle > 0) {
      angle = angle >= 2 ? angle - 2 : 0;
    } else if (t.text == sep && angle == 0) {
      parts.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (start < end || !parts.empty()) parts.emplace_back(start, end);
  return parts;
}

}  // namespace zkleak::syntax

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

#ifndef ZKLEAK_TOKEN_STREAM_H_
#define ZKLEAK_TOKEN_STREAM_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace zkleak {

// Index of a source file inside one analyzed program.
using FileIndex = std::int32_t;
// Scope node id; 0 means "not yet assigned".
using ScopeId = std::int32_t;
// Program-wide variable id; 0 means "not a variable".
using VarId = std::int32_t;

inline constexpr std::size_t kNoPos = static_cast<std::size_t>(-1);

enum class TokenKind : std::uint8_t {
  kIdentifier,
  kKeyword,
  kNumber,
  kStringLiteral,
  kCharLiteral,
  kOperator,
  kPunctuator,
};

std::string_view TokenKindName(TokenKind kind);

// One lexical unit. Tokens are owned by a TokenStream and chained both ways.
struct LexToken {
  std::string text;
  TokenKind kind = TokenKind::kIdentifier;
  FileIndex file = 0;
  int line = 0;
  int column = 0;
  ScopeId scope_id = 0;
  VarId var_id = 0;
  std::size_t index = 0;
  LexToken* prev = nullptr;
  LexToken* next = nullptr;

  bool Is(std::string_view s) const { return text == s; }
};

enum class LexErrorCode : std::uint8_t {
  kUnterminatedString,
  kUnterminatedComment,
  kInvalidUtf8,
  kUnknownGlyph,
};

struct LexDiagnostic {
  LexErrorCode code;
  int line = 0;
  int column = 0;
  std::string message;
};

// Doubly linked chain of lexical units for one file. Tokens also live in a
// contiguous buffer so positions can be addressed by index.
class TokenStream {
 public:
  TokenStream() = default;
  TokenStream(const TokenStream&) = delete;
  TokenStream& operator=(const TokenStream&) = delete;
  TokenStream(TokenStream&&) noexcept = default;
  TokenStream& operator=(TokenStream&&) noexcept = default;

  // Builds a stream from already-classified tokens (tests, generators).
  // Links and indices are (re)assigned.
  static TokenStream FromTokens(std::vector<LexToken> tokens,
                                std::string path = {}, FileIndex file = 0);

  const LexToken* head() const { return tokens_.empty() ? nullptr : &tokens_.front(); }
  const LexToken* tail() const { return tokens_.empty() ? nullptr : &tokens_.back(); }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const LexToken& at(std::size_t pos) const { return tokens_.at(pos); }
  const LexToken& operator[](std::size_t pos) const { return tokens_[pos]; }
  LexToken& mutable_at(std::size_t pos) { return tokens_.at(pos); }

  const std::vector<LexToken>& tokens() const { return tokens_; }

  const std::string& path() const { return path_; }
  FileIndex file() const { return file_; }
  int loc() const { return loc_; }
  const std::vector<LexDiagnostic>& diagnostics() const { return diagnostics_; }

  // Joins token texts in [begin, end) with single spaces.
  std::string Text(std::size_t begin, std::size_t end) const;

 private:
  friend class Lexer;
  void Relink();

  std::vector<LexToken> tokens_;
  std::string path_;
  FileIndex file_ = 0;
  int loc_ = 0;
  std::vector<LexDiagnostic> diagnostics_;
};

// Lexes C/C++ source text. Comments and preprocessor directive lines are
// dropped, backslash-newline pairs are spliced first.
TokenStream Tokenize(std::string_view source, std::string path = {},
                     FileIndex file = 0);

// Deterministic classification of a single maximal lexeme.
TokenKind ClassifyText(std::string_view text);

bool IsCppKeyword(std::string_view text);
const std::vector<std::string_view>& CppKeywords();

}  // namespace zkleak

#endif  // ZKLEAK_TOKEN_STREAM_H_

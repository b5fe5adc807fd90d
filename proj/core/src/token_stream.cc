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

#include "zkleak/token_stream.h"

#include <algorithm>
#include <array>
#include <unordered_set>
#include <utility>

namespace zkleak {
namespace {

constexpr std::string_view kReplacementChar = "\xEF\xBF\xBD";

constexpr std::array<std::string_view, 5> kThreeCharOps = {
    ">>=", "<<=", "->*", "...", "<=>"};
constexpr std::array<std::string_view, 22> kTwoCharOps = {
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "::", ".*", "##"};
constexpr std::string_view kOneCharOps = "+-*/%=<>!&|^~?:.#";
constexpr std::string_view kPunctuators = "()[]{};,";

bool IsIdentStart(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c >= 0x80;
}

bool IsIdentChar(unsigned char c) {
  return IsIdentStart(c) || (c >= '0' && c <= '9');
}

bool IsDigit(unsigned char c) { return c >= '0' && c <= '9'; }

bool IsStringPrefix(std::string_view s) {
  return s == "L" || s == "u" || s == "U" || s == "u8";
}

bool IsRawPrefix(std::string_view s) {
  return s == "R" || s == "LR" || s == "uR" || s == "UR" || s == "u8R";
}

bool IsOperatorText(std::string_view text) {
  if (text.size() == 1) return kOneCharOps.find(text[0]) != std::string_view::npos;
  for (auto op : kTwoCharOps) {
    if (op == text) return true;
  }
  for (auto op : kThreeCharOps) {
    if (op == text) return true;
  }
  return false;
}

// Replaces malformed UTF-8 sequences. Returns the number of replacements.
std::size_t SanitizeUtf8(std::string_view in, std::string& out,
                         int& first_bad_line) {
  out.clear();
  out.reserve(in.size());
  std::size_t replaced = 0;
  int line = 1;
  first_bad_line = 0;
  std::size_t i = 0;
  while (i < in.size()) {
    const auto c = static_cast<unsigned char>(in[i]);
    if (c == '\n') ++line;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    std::size_t len = 0;
    if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      len = 4;
    }
    bool ok = len != 0 && i + len <= in.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      ok = (static_cast<unsigned char>(in[i + k]) & 0xC0) == 0x80;
    }
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out.append(kReplacementChar);
      if (replaced == 0) first_bad_line = line;
      ++replaced;
      ++i;
    }
  }
  return replaced;
}

int CountLines(std::string_view source) {
  if (source.empty()) return 0;
  int lines = static_cast<int>(std::count(source.begin(), source.end(), '\n'));
  if (source.back() != '\n') ++lines;
  return lines;
}

}  // namespace

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdentifier: return "Identifier";
    case TokenKind::kKeyword: return "Keyword";
    case TokenKind::kNumber: return "Number";
    case TokenKind::kStringLiteral: return "StringLiteral";
    case TokenKind::kCharLiteral: return "CharLiteral";
    case TokenKind::kOperator: return "Operator";
    case TokenKind::kPunctuator: return "Punctuator";
  }
  return "?";
}

const std::vector<std::string_view>& CppKeywords() {
  static const std::vector<std::string_view> kWords = {
      "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand",
      "bitor", "bool", "break", "case", "catch", "char", "char8_t",
      "char16_t", "char32_t", "class", "compl", "concept", "const",
      "consteval", "constexpr", "constinit", "const_cast", "continue",
      "co_await", "co_return", "co_yield", "decltype", "default", "delete",
      "do", "double", "dynamic_cast", "else", "enum", "explicit", "export",
      "extern", "false", "float", "for", "friend", "goto", "if", "inline",
      "int", "long", "mutable", "namespace", "new", "noexcept", "not",
      "not_eq", "nullptr", "operator", "or", "or_eq", "private", "protected",
      "public", "register", "reinterpret_cast", "requires", "return",
      "short", "signed", "sizeof", "static", "static_assert", "static_cast",
      "struct", "switch", "template", "this", "thread_local", "throw",
      "true", "try", "typedef", "typeid", "typename", "union", "unsigned",
      "using", "virtual", "void", "volatile", "wchar_t", "while", "xor",
      "xor_eq",
      // C-only reserved words.
      "restrict", "_Alignas", "_Alignof", "_Atomic", "_Bool", "_Complex",
      "_Generic", "_Imaginary", "_Noreturn", "_Static_assert",
      "_Thread_local"};
  return kWords;
}

bool IsCppKeyword(std::string_view text) {
  static const std::unordered_set<std::string_view> kSet(CppKeywords().begin(),
                                                         CppKeywords().end());
  return kSet.contains(text);
}

TokenKind ClassifyText(std::string_view text) {
  if (text.empty()) return TokenKind::kOperator;
  if (IsCppKeyword(text)) return TokenKind::kKeyword;
  const auto c0 = static_cast<unsigned char>(text[0]);
  if (IsDigit(c0) ||
      (c0 == '.' && text.size() > 1 &&
       IsDigit(static_cast<unsigned char>(text[1])))) {
    return TokenKind::kNumber;
  }
  const std::size_t quote = text.find_first_of("\"'");
  if (quote != std::string_view::npos) {
    const std::string_view prefix = text.substr(0, quote);
    if (prefix.empty() || IsStringPrefix(prefix) || IsRawPrefix(prefix)) {
      return text[quote] == '"' ? TokenKind::kStringLiteral
                                : TokenKind::kCharLiteral;
    }
  }
  if (text.size() == 1 && kPunctuators.find(text[0]) != std::string_view::npos) {
    return TokenKind::kPunctuator;
  }
  if (IsOperatorText(text)) return TokenKind::kOperator;
  if (IsIdentStart(c0)) return TokenKind::kIdentifier;
  return TokenKind::kOperator;
}

std::string TokenStream::Text(std::size_t begin, std::size_t end) const {
  std::string out;
  end = std::min(end, tokens_.size());
  for (std::size_t i = begin; i < end; ++i) {
    if (i != begin) out.push_back(' ');
    out += tokens_[i].text;
  }
  return out;
}

void TokenStream::Relink() {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    LexToken& t = tokens_[i];
    t.index = i;
    t.file = file_;
    t.prev = i == 0 ? nullptr : &tokens_[i - 1];
    t.next = i + 1 == tokens_.size() ? nullptr : &tokens_[i + 1];
  }
}

TokenStream TokenStream::FromTokens(std::vector<LexToken> tokens,
                                    std::string path, FileIndex file) {
  TokenStream ts;
  ts.tokens_ = std::move(tokens);
  ts.path_ = std::move(path);
  ts.file_ = file;
  int max_line = 0;
  for (const auto& t : ts.tokens_) max_line = std::max(max_line, t.line);
  ts.loc_ = max_line;
  ts.Relink();
  return ts;
}

// Character-level scanner over the spliced buffer.
class Lexer {
 public:
  Lexer(std::string_view source, std::string path, FileIndex file) {
    out_.path_ = std::move(path);
    out_.file_ = file;
    out_.loc_ = CountLines(source);
    int bad_line = 0;
    const std::size_t bad = SanitizeUtf8(source, clean_, bad_line);
    if (bad > 0) {
      out_.diagnostics_.push_back(
          {LexErrorCode::kInvalidUtf8, bad_line, 1,
           std::to_string(bad) + " invalid UTF-8 byte(s) replaced"});
    }
    Splice();
  }

  TokenStream Run() {
    while (pos_ < buf_.size()) Step();
    out_.Relink();
    return std::move(out_);
  }

 private:
  struct Origin {
    int line;
    int column;
  };

  // Removes backslash-newline pairs, remembering each kept char's origin.
  void Splice() {
    buf_.reserve(clean_.size());
    origin_.reserve(clean_.size() + 1);
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < clean_.size(); ++i) {
      const char c = clean_[i];
      if (c == '\\') {
        std::size_t j = i + 1;
        if (j < clean_.size() && clean_[j] == '\r') ++j;
        if (j < clean_.size() && clean_[j] == '\n') {
          i = j;
          ++line;
          col = 1;
          continue;
        }
      }
      buf_.push_back(c);
      origin_.push_back({line, col});
      if (c == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    origin_.push_back({line, col});
  }

  char Peek(std::size_t off = 0) const {
    return pos_ + off < buf_.size() ? buf_[pos_ + off] : '\0';
  }

  void Emit(std::size_t begin, std::size_t end, TokenKind kind) {
    LexToken tok;
    tok.text = buf_.substr(begin, end - begin);
    tok.kind = kind;
    tok.line = origin_[begin].line;
    tok.column = origin_[begin].column;
    out_.tokens_.push_back(std::move(tok));
    at_line_start_ = false;
  }

  void Diagnose(LexErrorCode code, std::size_t at, std::string message) {
    out_.diagnostics_.push_back(
        {code, origin_[at].line, origin_[at].column, std::move(message)});
  }

  void SkipToNextLine(std::size_t from) {
    const std::size_t nl = buf_.find('\n', from);
    pos_ = nl == std::string::npos ? buf_.size() : nl;
  }

  void Step() {
    const char c = Peek();
    if (c == '\n') {
      at_line_start_ = true;
      ++pos_;
      return;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++pos_;
      return;
    }
    if (c == '/' && Peek(1) == '/') {
      SkipToNextLine(pos_);
      return;
    }
    if (c == '/' && Peek(1) == '*') {
      const std::size_t close = buf_.find("*/", pos_ + 2);
      if (close == std::string::npos) {
        Diagnose(LexErrorCode::kUnterminatedComment, pos_,
                 "unterminated block comment");
        SkipToNextLine(pos_);
      } else {
        pos_ = close + 2;
      }
      return;
    }
    if (c == '#' && at_line_start_) {
      SkipToNextLine(pos_);
      return;
    }
    const auto uc = static_cast<unsigned char>(c);
    if (IsDigit(uc) || (c == '.' && IsDigit(static_cast<unsigned char>(Peek(1))))) {
      LexNumber();
      return;
    }
    if (IsIdentStart(uc)) {
      LexIdentifierOrPrefixedLiteral();
      return;
    }
    if (c == '"' || c == '\'') {
      LexQuoted(pos_, pos_);
      return;
    }
    LexOperator();
  }

  void LexNumber() {
    const std::size_t begin = pos_;
    ++pos_;
    while (pos_ < buf_.size()) {
      const auto c = static_cast<unsigned char>(buf_[pos_]);
      if (IsIdentChar(c) || c == '.') {
        ++pos_;
      } else if ((c == '+' || c == '-') &&
                 std::string_view("eEpP").find(buf_[pos_ - 1]) !=
                     std::string_view::npos) {
        ++pos_;
      } else if (c == '\'' && pos_ + 1 < buf_.size() &&
                 IsIdentChar(static_cast<unsigned char>(buf_[pos_ + 1]))) {
        ++pos_;
      } else {
        break;
      }
    }
    Emit(begin, pos_, TokenKind::kNumber);
  }

  void LexIdentifierOrPrefixedLiteral() {
    const std::size_t begin = pos_;
    while (pos_ < buf_.size() &&
           IsIdentChar(static_cast<unsigned char>(buf_[pos_]))) {
      ++pos_;
    }
    const std::string_view word(buf_.data() + begin, pos_ - begin);
    const char next = Peek();
    if (next == '"' && IsRawPrefix(word)) {
      LexRawString(begin);
      return;
    }
    if ((next == '"' || next == '\'') && IsStringPrefix(word)) {
      LexQuoted(begin, pos_);
      return;
    }
    Emit(begin, pos_, IsCppKeyword(word) ? TokenKind::kKeyword
                                         : TokenKind::kIdentifier);
  }

  // Lexes a quoted literal whose opening quote is at |quote|; the token
  // starts at |begin| (before any encoding prefix).
  void LexQuoted(std::size_t begin, std::size_t quote) {
    const char q = buf_[quote];
    std::size_t i = quote + 1;
    while (i < buf_.size() && buf_[i] != q && buf_[i] != '\n') {
      if (buf_[i] == '\\' && i + 1 < buf_.size() && buf_[i + 1] != '\n') ++i;
      ++i;
    }
    const TokenKind kind =
        q == '"' ? TokenKind::kStringLiteral : TokenKind::kCharLiteral;
    if (i < buf_.size() && buf_[i] == q) {
      pos_ = i + 1;
      Emit(begin, pos_, kind);
      return;
    }
    Diagnose(LexErrorCode::kUnterminatedString, begin,
             q == '"' ? "unterminated string literal"
                      : "unterminated character literal");
    pos_ = i;
    Emit(begin, pos_, kind);
  }

  void LexRawString(std::size_t begin) {
    const std::size_t quote = pos_;
    const std::size_t paren = buf_.find('(', quote + 1);
    if (paren == std::string::npos || paren - quote - 1 > 16 ||
        buf_.find('\n', quote) < paren) {
      LexQuoted(begin, quote);
      return;
    }
    const std::string delim = ")" + buf_.substr(quote + 1, paren - quote - 1) + "\"";
    const std::size_t close = buf_.find(delim, paren + 1);
    if (close == std::string::npos) {
      Diagnose(LexErrorCode::kUnterminatedString, begin,
               "unterminated raw string literal");
      SkipToNextLine(quote);
      Emit(begin, pos_, TokenKind::kStringLiteral);
      return;
    }
    pos_ = close + delim.size();
    Emit(begin, pos_, TokenKind::kStringLiteral);
  }

  void LexOperator() {
    const std::size_t begin = pos_;
    const std::string_view rest(buf_.data() + pos_, buf_.size() - pos_);
    for (auto op : kThreeCharOps) {
      if (rest.starts_with(op)) {
        pos_ += 3;
        Emit(begin, pos_, TokenKind::kOperator);
        return;
      }
    }
    for (auto op : kTwoCharOps) {
      if (rest.starts_with(op)) {
        pos_ += 2;
        Emit(begin, pos_, TokenKind::kOperator);
        return;
      }
    }
    const char c = rest[0];
    ++pos_;
    if (kPunctuators.find(c) != std::string_view::npos) {
      Emit(begin, pos_, TokenKind::kPunctuator);
    } else if (kOneCharOps.find(c) != std::string_view::npos) {
      Emit(begin, pos_, TokenKind::kOperator);
    } else {
      Diagnose(LexErrorCode::kUnknownGlyph, begin,
               std::string("unknown glyph '") + c + "'");
      Emit(begin, pos_, TokenKind::kOperator);
    }
  }

  std::string clean_;
  std::string buf_;
  std::vector<Origin> origin_;
  std::size_t pos_ = 0;
  bool at_line_start_ = true;
  TokenStream out_;
};

TokenStream Tokenize(std::string_view source, std::string path,
                     FileIndex file) {
  return Lexer(source, std::move(path), file).Run();
}

}  // namespace zkleak

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

#include "zkleak/scope_table.h"

#include <algorithm>
#include <functional>
#include <sstream>
#include <utility>

#include "syntax.h"

namespace zkleak {

using syntax::BracketIndex;
using syntax::IsName;

std::string_view ScopeKindName(ScopeKind kind) {
  switch (kind) {
    case ScopeKind::kGlobal: return "eGlobal";
    case ScopeKind::kNamespace: return "eNamespace";
    case ScopeKind::kClass: return "eClass";
    case ScopeKind::kStruct: return "eStruct";
    case ScopeKind::kUnion: return "eUnion";
    case ScopeKind::kFunction: return "eFunction";
    case ScopeKind::kIf: return "eIf";
    case ScopeKind::kElse: return "eElse";
    case ScopeKind::kFor: return "eFor";
    case ScopeKind::kWhile: return "eWhile";
    case ScopeKind::kDoWhile: return "eDoWhile";
    case ScopeKind::kSwitch: return "eSwitch";
    case ScopeKind::kTry: return "eTry";
    case ScopeKind::kCatch: return "eCatch";
    case ScopeKind::kBlock: return "eBlock";
  }
  return "e?";
}

bool IsDeclarationLevel(ScopeKind kind) {
  return kind == ScopeKind::kGlobal || kind == ScopeKind::kNamespace ||
         kind == ScopeKind::kClass || kind == ScopeKind::kStruct ||
         kind == ScopeKind::kUnion;
}

namespace {

bool IsClassKind(ScopeKind kind) {
  return kind == ScopeKind::kClass || kind == ScopeKind::kStruct ||
         kind == ScopeKind::kUnion;
}

// Functions and everything nested in them.
bool IsLocalKind(ScopeKind kind) { return !IsDeclarationLevel(kind); }

std::string StripTypeDecorations(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::string last;
  while (in >> word) {
    if (word == "*" || word == "&" || word == "&&" || word == "const" ||
        word == "volatile" || word == "struct" || word == "class" ||
        word == "union" || word == "enum" || word == "typename" ||
        word == "::" || word == "static" || word == "mutable") {
      continue;
    }
    last = word;
  }
  return last;
}

}  // namespace

std::string SymbolEntry::BaseTypeName() const {
  return StripTypeDecorations(type_text);
}

// ---------------------------------------------------------------------------
// TypeRegistry

TypeRegistry::TypeRegistry() {
  for (std::string_view w :
       {"void", "char", "short", "int", "long", "float", "double", "bool",
        "signed", "unsigned", "wchar_t", "char8_t", "char16_t", "char32_t",
        "auto", "_Bool", "size_t", "ssize_t", "ptrdiff_t", "intptr_t",
        "uintptr_t", "int8_t", "int16_t", "int32_t", "int64_t", "uint8_t",
        "uint16_t", "uint32_t", "uint64_t", "FILE", "off_t", "time_t",
        "string", "wstring"}) {
    types_.emplace(w);
  }
}

bool TypeRegistry::IsType(std::string_view word) const {
  return types_.contains(word) || aliases_.contains(word);
}

void TypeRegistry::AddType(std::string name) {
  if (!name.empty()) types_.insert(std::move(name));
}

void TypeRegistry::AddAlias(std::string alias, std::string target) {
  if (alias.empty()) return;
  aliases_[std::move(alias)] = std::move(target);
}

std::optional<std::string> TypeRegistry::AliasTarget(std::string_view name) const {
  auto it = aliases_.find(name);
  if (it == aliases_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// ScopeTree

ScopeTree::ScopeTree() {
  ScopeNode root;
  root.id = 1;
  root.kind = ScopeKind::kGlobal;
  root.file = -1;
  nodes_.push_back(std::move(root));
}

ScopeId ScopeTree::AddScope(ScopeNode node) {
  node.id = static_cast<ScopeId>(nodes_.size() + 1);
  const ScopeId id = node.id;
  const ScopeId parent = node.parent;
  if (IsClassKind(node.kind) && !node.name.empty()) {
    class_scopes_.emplace(node.name, id);
  }
  nodes_.push_back(std::move(node));
  if (parent != 0) nodes_[parent - 1].children.push_back(id);
  return id;
}

VarId ScopeTree::AddSymbol(SymbolEntry entry) {
  entry.var_id = static_cast<VarId>(symbols_.size() + 1);
  const VarId id = entry.var_id;
  nodes_.at(entry.decl_scope - 1).symbols.push_back(id);
  symbols_.push_back(std::move(entry));
  return id;
}

const SymbolEntry* ScopeTree::FindIn(const ScopeNode& scope,
                                     std::string_view name,
                                     std::size_t use_pos,
                                     FileIndex use_file) const {
  const SymbolEntry* best = nullptr;
  const bool local = IsLocalKind(scope.kind);
  for (VarId id : scope.symbols) {
    const SymbolEntry& e = symbols_[id - 1];
    if (e.name != name) continue;
    if (local) {
      if (use_pos != kNoPos && e.file == use_file && e.decl_pos > use_pos) {
        continue;
      }
      if (best == nullptr || e.decl_pos > best->decl_pos) best = &e;
    } else if (best == nullptr) {
      best = &e;
    }
  }
  return best;
}

const SymbolEntry* ScopeTree::FindInClass(std::string_view class_name,
                                          std::string_view name,
                                          int depth) const {
  if (depth > 8) return nullptr;
  auto scope = ClassScope(class_name);
  if (!scope) return nullptr;
  const ScopeNode& cls = node(*scope);
  if (const SymbolEntry* e = FindIn(cls, name, kNoPos, cls.file)) return e;
  for (const std::string& base : cls.bases) {
    if (const SymbolEntry* e = FindInClass(base, name, depth + 1)) return e;
  }
  return nullptr;
}

const SymbolEntry* ScopeTree::Resolve(std::string_view name, ScopeId scope,
                                      std::size_t use_pos) const {
  if (scope == 0) scope = 1;
  ScopeId cur = scope;
  FileIndex use_file = node(scope).file;
  while (cur != 0) {
    const ScopeNode& s = node(cur);
    if (const SymbolEntry* e = FindIn(s, name, use_pos, use_file)) return e;
    if (IsClassKind(s.kind)) {
      for (const std::string& base : s.bases) {
        if (const SymbolEntry* e = FindInClass(base, name, 1)) return e;
      }
    }
    if (s.kind == ScopeKind::kFunction && !s.class_name.empty()) {
      const ScopeNode& parent = node(s.parent);
      if (!(IsClassKind(parent.kind) && parent.name == s.class_name)) {
        if (const SymbolEntry* e = FindInClass(s.class_name, name, 0)) return e;
      }
    }
    cur = s.parent;
  }
  return nullptr;
}

ScopeId ScopeTree::InnermostAt(FileIndex file, std::size_t pos) const {
  ScopeId cur = 1;
  bool descended = true;
  while (descended) {
    descended = false;
    for (ScopeId child : node(cur).children) {
      if (node(child).Contains(file, pos)) {
        cur = child;
        descended = true;
        break;
      }
    }
  }
  return cur;
}

std::optional<ScopeId> ScopeTree::ClassScope(std::string_view class_name) const {
  auto it = class_scopes_.find(std::string(class_name));
  if (it == class_scopes_.end()) return std::nullopt;
  return it->second;
}

std::vector<ScopeId> ScopeTree::FunctionScopes() const {
  std::vector<ScopeId> out;
  for (const ScopeNode& n : nodes_) {
    if (n.kind == ScopeKind::kFunction && n.body_open != kNoPos) {
      out.push_back(n.id);
    }
  }
  std::stable_sort(out.begin(), out.end(), [this](ScopeId a, ScopeId b) {
    const ScopeNode& x = node(a);
    const ScopeNode& y = node(b);
    return std::tie(x.file, x.token_begin) < std::tie(y.file, y.token_begin);
  });
  return out;
}

std::string ScopeTree::Dump(const std::vector<const TokenStream*>& streams) const {
  std::ostringstream out;
  auto line_of = [&](FileIndex f, std::size_t pos) {
    if (f < 0 || static_cast<std::size_t>(f) >= streams.size()) return 0;
    const TokenStream& ts = *streams[f];
    if (ts.empty()) return 0;
    return ts.at(std::min(pos, ts.size() - 1)).line;
  };
  std::function<void(ScopeId, int)> walk = [&](ScopeId id, int depth) {
    const ScopeNode& n = node(id);
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ')
        << ScopeKindName(n.kind);
    if (!n.name.empty()) out << ' ' << n.name;
    if (n.kind == ScopeKind::kGlobal) {
      int last = 0;
      for (const TokenStream* ts : streams) {
        if (ts != nullptr && !ts->empty()) last = std::max(last, ts->tail()->line);
      }
      out << " [1.." << last << "]\n";
    } else {
      out << " [" << line_of(n.file, n.token_begin) << ".."
          << line_of(n.file, n.token_end) << "]\n";
    }
    for (ScopeId c : n.children) walk(c, depth + 1);
  };
  walk(1, 0);
  return out.str();
}

// ---------------------------------------------------------------------------
// Structure pass

namespace {

struct BraceHeader {
  bool is_scope = false;
  ScopeKind kind = ScopeKind::kBlock;
  std::string name;
  std::string class_name;
  std::size_t begin = kNoPos;
  std::size_t name_pos = kNoPos;
  std::size_t header_begin = kNoPos;
  std::size_t params_open = kNoPos;
  std::size_t params_close = kNoPos;
  int arity = 0;
  std::vector<std::string> bases;
  std::string type_name;  // enum name to register
};

class HeaderAnalyzer {
 public:
  HeaderAnalyzer(const TokenStream& ts, const BracketIndex& br)
      : ts_(ts), br_(br) {}

  BraceHeader Analyze(std::size_t brace, ScopeKind parent_kind,
                      const std::string& parent_name) const {
    BraceHeader out;
    bool inside_expression = false;
    const std::size_t hs = HeaderStart(brace, inside_expression);
    out.header_begin = hs;
    if (inside_expression) return out;  // lambda or braced init in an expression
    std::size_t h = hs;
    h = SkipPrefixes(h, brace);
    if (h >= brace) {
      out.is_scope = true;
      out.kind = ScopeKind::kBlock;
      out.begin = brace;
      return out;
    }
    const std::string& first = ts_[h].text;
    auto control = [&](ScopeKind kind, std::size_t kw) {
      std::size_t open = kw + 1;
      if (open < brace && ts_[open].text == "constexpr") ++open;
      out.is_scope = true;
      out.kind = kind;
      out.begin = (open < brace && ts_[open].text == "(") ? open : brace;
      return out;
    };
    if (first == "else") {
      if (h + 1 < brace && ts_[h + 1].text == "if") return control(ScopeKind::kIf, h + 1);
      out.is_scope = true;
      out.kind = ScopeKind::kElse;
      out.begin = brace;
      return out;
    }
    if (first == "if") return control(ScopeKind::kIf, h);
    if (first == "for") return control(ScopeKind::kFor, h);
    if (first == "while") return control(ScopeKind::kWhile, h);
    if (first == "switch") return control(ScopeKind::kSwitch, h);
    if (first == "catch") return control(ScopeKind::kCatch, h);
    if (first == "do") {
      out.is_scope = true;
      out.kind = ScopeKind::kDoWhile;
      out.begin = brace;
      return out;
    }
    if (first == "try") {
      out.is_scope = true;
      out.kind = ScopeKind::kTry;
      out.begin = brace;
      return out;
    }
    if (first == "namespace" || (first == "extern" && h + 1 < brace &&
                                 ts_[h + 1].kind == TokenKind::kStringLiteral)) {
      out.is_scope = true;
      out.kind = ScopeKind::kNamespace;
      out.begin = brace;
      if (first == "namespace") {
        for (std::size_t i = h + 1; i < brace; ++i) {
          if (IsName(ts_[i])) out.name = ts_[i].text;
        }
      }
      return out;
    }
    const bool has_paren = syntax::FindTopLevel(ts_, br_, h, brace, "(") != kNoPos;
    const bool has_assign = HasTopLevelAssign(h, brace);
    if ((first == "class" || first == "struct" || first == "union") &&
        !has_paren && !has_assign) {
      ParseClassHead(h, brace, out);
      return out;
    }
    if (first == "enum") {
      out.is_scope = true;
      out.kind = ScopeKind::kBlock;
      out.begin = brace;
      for (std::size_t i = h + 1; i < brace; ++i) {
        if (ts_[i].text == ":") break;
        if (IsName(ts_[i])) out.type_name = ts_[i].text;
      }
      return out;
    }
    if (has_assign) return out;
    const std::string& last = ts_[brace - 1].text;
    if (last == "return" || last == "," || last == "(" || last == "=") return out;
    if (has_paren) {
      if (IsDeclarationLevel(parent_kind)) {
        ParseFunctionHead(h, brace, parent_kind, parent_name, out);
        return out;
      }
      out.is_scope = true;
      out.kind = ScopeKind::kBlock;
      out.begin = brace;
      return out;
    }
    // "T x{...}", "int a[]{...}": braced initializer.
    if (IsName(ts_[brace - 1]) || last == "]" || last == ">") return out;
    out.is_scope = true;
    out.kind = ScopeKind::kBlock;
    out.begin = brace;
    return out;
  }

 private:
  bool IsLabelColon(std::size_t colon) const {
    std::size_t s = colon;
    while (s > 0) {
      const std::string& t = ts_[s - 1].text;
      if (t == ";" || t == "{" || t == "}" || t == ":") break;
      if (t == ")" || t == "]") {
        const std::size_t m = br_.Match(s - 1);
        if (m == kNoPos) break;
        s = m;
        continue;
      }
      --s;
    }
    if (s >= colon) return false;
    const LexToken& first = ts_[s];
    if (syntax::IsAccessSpecifier(first.text) || first.text == "case" ||
        first.text == "default") {
      return true;
    }
    return s + 1 == colon && IsName(first);
  }

  std::size_t HeaderStart(std::size_t brace, bool& inside_expression) const {
    std::size_t j = brace;
    while (j > 0) {
      const std::size_t k = j - 1;
      const LexToken& t = ts_[k];
      if (t.text == ";" || t.text == "{" || t.text == "}") break;
      if (t.kind == TokenKind::kPunctuator && (t.text == "(" || t.text == "[")) {
        inside_expression = true;
        break;
      }
      if (t.text == ")" || t.text == "]") {
        const std::size_t m = br_.Match(k);
        if (m == kNoPos) break;
        j = m;
        continue;
      }
      if (t.text == ":" && IsLabelColon(k)) break;
      j = k;
    }
    return j;
  }

  std::size_t SkipPrefixes(std::size_t h, std::size_t brace) const {
    while (h < brace) {
      const std::string& t = ts_[h].text;
      if (t == "[" && h + 1 < brace && ts_[h + 1].text == "[") {
        const std::size_t m = br_.Match(h);
        if (m == kNoPos) break;
        h = m + 1;
      } else if (t == "template" && h + 1 < brace && ts_[h + 1].text == "<") {
        const std::size_t e = syntax::SkipAngles(ts_, h + 1, brace);
        if (e == kNoPos) break;
        h = e;
      } else if (t == "typedef" || t == "export" || t == "inline" ||
                 t == "static" || t == "constexpr" ||
                 (t == "extern" && h + 1 < brace &&
                  ts_[h + 1].kind != TokenKind::kStringLiteral)) {
        ++h;
      } else {
        break;
      }
    }
    return h;
  }

  bool HasTopLevelAssign(std::size_t h, std::size_t brace) const {
    for (std::size_t i = h; i < brace; ++i) {
      const std::string& t = ts_[i].text;
      if (t == "(" || t == "[") {
        const std::size_t m = br_.Match(i);
        if (m == kNoPos || m >= brace) return false;
        i = m;
        continue;
      }
      if (t == "=" && !(i > h && ts_[i - 1].text == "operator")) return true;
    }
    return false;
  }

  void ParseClassHead(std::size_t h, std::size_t brace, BraceHeader& out) const {
    const std::string& kw = ts_[h].text;
    out.is_scope = true;
    out.kind = kw == "class" ? ScopeKind::kClass
               : kw == "struct" ? ScopeKind::kStruct
                                : ScopeKind::kUnion;
    out.begin = brace;
    std::size_t i = h + 1;
    std::size_t colon = kNoPos;
    for (; i < brace; ++i) {
      const LexToken& t = ts_[i];
      if (t.text == ":") {
        colon = i;
        break;
      }
      if ((t.text == "alignas" || t.text == "__declspec" ||
           t.text == "__attribute__") && i + 1 < brace && ts_[i + 1].text == "(") {
        const std::size_t m = br_.Match(i + 1);
        if (m == kNoPos) break;
        i = m;
        continue;
      }
      if (t.text == "<") {
        const std::size_t e = syntax::SkipAngles(ts_, i, brace);
        if (e == kNoPos) break;
        i = e - 1;
        continue;
      }
      if (IsName(t) && t.text != "final") {
        out.name = t.text;
        out.name_pos = i;
      }
    }
    if (colon == kNoPos) return;
    for (auto [b, e] : syntax::SplitTopLevel(ts_, br_, colon + 1, brace, ",", true)) {
      std::string base;
      for (std::size_t k = b; k < e; ++k) {
        const LexToken& t = ts_[k];
        if (t.text == "<") break;
        if (IsName(t)) base = t.text;
      }
      if (!base.empty()) out.bases.push_back(base);
    }
  }

  void ParseFunctionHead(std::size_t h, std::size_t brace, ScopeKind parent_kind,
                         const std::string& parent_name, BraceHeader& out) const {
    std::size_t sig_end = brace;
    std::size_t open = kNoPos;
    for (std::size_t i = h; i < brace; ++i) {
      const LexToken& t = ts_[i];
      if (t.text == "operator" && out.name_pos == kNoPos) {
        std::string name = "operator";
        std::size_t k = i + 1;
        if (k + 1 < brace && ts_[k].text == "(" && ts_[k + 1].text == ")") {
          name += "()";
          k += 2;
        } else {
          while (k < brace && ts_[k].text != "(") name += ts_[k++].text;
        }
        if (k < brace && ts_[k].text == "(") {
          out.name = name;
          out.name_pos = i;
          open = k;
          break;
        }
        continue;
      }
      if (t.text == "(" ) {
        const bool named = i > h && (IsName(ts_[i - 1]) || ts_[i - 1].text == ">");
        const std::string& prev = i > h ? ts_[i - 1].text : t.text;
        if (named && prev != "__attribute__" && prev != "__declspec" &&
            prev != "alignas" && prev != "decltype") {
          open = i;
          std::size_t p = i - 1;
          if (ts_[p].text == ">") {
            // f<T>(...): walk back to the template name.
            int depth = 0;
            while (p > h) {
              if (ts_[p].text == ">") ++depth;
              if (ts_[p].text == "<" && --depth == 0) break;
              --p;
            }
            if (p > h) --p;
          }
          out.name = ts_[p].text;
          out.name_pos = p;
          if (p > h && ts_[p - 1].text == "~") {
            out.name = "~" + out.name;
            --p;
          }
          if (p >= h + 2 && ts_[p - 1].text == "::" && IsName(ts_[p - 2])) {
            out.class_name = ts_[p - 2].text;
          }
          break;
        }
        const std::size_t m = br_.Match(i);
        if (m == kNoPos || m >= brace) break;
        i = m;
      }
    }
    if (open == kNoPos) {
      out.is_scope = true;
      out.kind = ScopeKind::kBlock;
      out.begin = brace;
      return;
    }
    if (out.class_name.empty() && out.name_pos != kNoPos &&
        ts_[out.name_pos].text == "operator") {
      const std::size_t p = out.name_pos;
      if (p >= h + 2 && ts_[p - 1].text == "::" && IsName(ts_[p - 2])) {
        out.class_name = ts_[p - 2].text;
      }
    }
    const std::size_t close = br_.Match(open);
    if (close == kNoPos || close > sig_end) {
      out.is_scope = true;
      out.kind = ScopeKind::kBlock;
      out.begin = brace;
      return;
    }
    out.is_scope = true;
    out.kind = ScopeKind::kFunction;
    out.begin = open;
    out.params_open = open;
    out.params_close = close;
    if (out.class_name.empty() && IsClassKind(parent_kind)) {
      out.class_name = parent_name;
    }
    if (close == open + 1 || (close == open + 2 && ts_[open + 1].text == "void")) {
      out.arity = 0;
    } else {
      out.arity = static_cast<int>(
          syntax::SplitTopLevel(ts_, br_, open + 1, close, ",", true).size());
    }
  }

  const TokenStream& ts_;
  const BracketIndex& br_;
};

}  // namespace

void ScopeBuilder::AddFile(TokenStream& stream) {
  streams_.push_back(&stream);
  BuildStructure(stream);
  CollectDeclarations(stream);
}

void ScopeBuilder::Finish() {
  for (TokenStream* ts : streams_) BindUses(*ts);
}

void ScopeBuilder::BuildStructure(TokenStream& ts) {
  const BracketIndex br(ts);
  const HeaderAnalyzer headers(ts, br);
  const FileIndex file = ts.file();
  std::vector<ScopeId> stack{1};
  std::vector<ScopeId> file_scopes;
  auto innermost = [&]() {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      if (*it != 0) return *it;
    }
    return ScopeId{1};
  };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const LexToken& t = ts[i];
    if (t.kind != TokenKind::kPunctuator) continue;
    if (t.text == "{") {
      const ScopeId parent = innermost();
      const ScopeNode& pn = tree_.node(parent);
      BraceHeader h = headers.Analyze(i, pn.kind, pn.name);
      if (!h.type_name.empty()) tree_.types_.AddType(h.type_name);
      if (!h.is_scope) {
        stack.push_back(0);
        continue;
      }
      ScopeNode node;
      node.kind = h.kind;
      node.name = h.kind == ScopeKind::kFunction || IsClassKind(h.kind) ||
                          h.kind == ScopeKind::kNamespace
                      ? h.name
                      : std::string();
      node.parent = parent;
      node.file = file;
      node.token_begin = h.begin;
      node.class_name = h.class_name;
      node.name_pos = h.name_pos;
      node.header_begin = h.header_begin;
      node.params_open = h.params_open;
      node.params_close = h.params_close;
      node.body_open = i;
      node.arity = h.arity;
      node.bases = h.bases;
      if (IsClassKind(h.kind)) tree_.types_.AddType(h.name);
      const ScopeId id = tree_.AddScope(std::move(node));
      file_scopes.push_back(id);
      stack.push_back(id);
    } else if (t.text == "}") {
      if (stack.size() == 1) {
        tree_.diagnostics_.push_back({ScopeDiagCode::kUnbalancedBraces, file,
                                      t.line, "unmatched '}'"});
        continue;
      }
      const ScopeId id = stack.back();
      stack.pop_back();
      if (id != 0) {
        tree_.nodes_[id - 1].token_end = i;
        tree_.nodes_[id - 1].body_close = i;
      }
    }
  }
  if (stack.size() > 1) {
    const int line = ts.empty() ? 0 : ts.tail()->line;
    tree_.diagnostics_.push_back(
        {ScopeDiagCode::kUnbalancedBraces, file, line,
         std::to_string(stack.size() - 1) + " unclosed '{' at end of file"});
    while (stack.size() > 1) {
      const ScopeId id = stack.back();
      stack.pop_back();
      if (id != 0) {
        tree_.nodes_[id - 1].token_end = ts.size() - 1;
        tree_.nodes_[id - 1].body_close = kNoPos;
      }
    }
  }
  // Sweep: file scopes are created in pre-order, so begins are ascending.
  std::vector<ScopeId> open{1};
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < ts.size(); ++pos) {
    while (open.size() > 1 && tree_.node(open.back()).token_end < pos) open.pop_back();
    while (next < file_scopes.size() &&
           tree_.node(file_scopes[next]).token_begin == pos) {
      open.push_back(file_scopes[next++]);
    }
    ts.mutable_at(pos).scope_id = open.back();
  }
}

// ---------------------------------------------------------------------------
// Declaration pass

namespace {

// A statement as seen from one scope: direct tokens plus opaque child scopes.
struct Item {
  std::size_t pos = kNoPos;  // token position, or the child's first token
  ScopeId child = 0;
};

}  // namespace

class DeclarationCollector {
 public:
  DeclarationCollector(ScopeTree& tree, TokenStream& ts, const BracketIndex& br,
                       std::vector<ScopeDiagnostic>& diags)
      : tree_(tree), ts_(ts), br_(br), diags_(diags) {}

  void CollectScope(ScopeId id) {
    const ScopeNode node = tree_.node(id);  // copy: tree grows during collection
    std::size_t body_begin;
    std::size_t body_end;
    if (node.kind == ScopeKind::kGlobal) {
      body_begin = 0;
      body_end = ts_.size();
    } else {
      if (node.kind == ScopeKind::kFunction && node.params_open != kNoPos) {
        DeclareParams(id, node.params_open, node.params_close);
      } else if (node.token_begin != node.body_open &&
                 ts_[node.token_begin].text == "(") {
        const std::size_t close = br_.Match(node.token_begin);
        if (close != kNoPos && close < node.body_open) {
          std::size_t clause_end = syntax::FindTopLevel(
              ts_, br_, node.token_begin + 1, close, ";");
          if (clause_end == kNoPos) clause_end = close;
          std::vector<Item> clause;
          for (std::size_t p = node.token_begin + 1; p < clause_end; ++p) {
            clause.push_back({p, 0});
          }
          clause.push_back({clause_end, 0});
          DeclareStatement(id, clause, /*param=*/-1);
        }
      }
      body_begin = node.body_open + 1;
      body_end = node.token_end == kNoPos ? ts_.size() : node.token_end;
      if (node.body_close == kNoPos) body_end = ts_.size();
    }
    const std::vector<Item> items = GatherItems(node, body_begin, body_end);
    SplitAndDeclare(id, items);
  }

 private:
  const LexToken* Tok(const std::vector<Item>& items, std::size_t k) const {
    if (k >= items.size() || items[k].child != 0) return nullptr;
    return &ts_[items[k].pos];
  }
  bool TokIs(const std::vector<Item>& items, std::size_t k,
             std::string_view text) const {
    const LexToken* t = Tok(items, k);
    return t != nullptr && t->text == text;
  }

  std::vector<Item> GatherItems(const ScopeNode& node, std::size_t begin,
                                std::size_t end) const {
    std::vector<Item> items;
    std::size_t ci = 0;
    std::vector<ScopeId> kids;
    for (ScopeId c : node.children) {
      if (tree_.node(c).file == ts_.file()) kids.push_back(c);
    }
    for (std::size_t p = begin; p < end; ++p) {
      while (ci < kids.size() && tree_.node(kids[ci]).token_begin < p) ++ci;
      if (ci < kids.size() && tree_.node(kids[ci]).token_begin == p) {
        const ScopeNode& c = tree_.node(kids[ci]);
        items.push_back({p, c.id});
        p = c.token_end == kNoPos ? end : c.token_end;
        ++ci;
        continue;
      }
      items.push_back({p, 0});
    }
    return items;
  }

  bool EndsStatement(ScopeId child) const {
    const ScopeKind k = tree_.node(child).kind;
    return !IsClassKind(k) &&
           !(k == ScopeKind::kBlock && tree_.node(child).token_begin > 0 &&
             IsEnumBrace(tree_.node(child).token_begin));
  }

  bool IsEnumBrace(std::size_t brace) const {
    for (std::size_t i = brace; i > 0; --i) {
      const std::string& t = ts_[i - 1].text;
      if (t == ";" || t == "{" || t == "}") return false;
      if (t == "enum") return true;
    }
    return false;
  }

  bool IsLabelPrefix(const std::vector<Item>& cur) const {
    if (cur.empty()) return false;
    const LexToken* first = Tok(cur, 0);
    if (first == nullptr) return false;
    if (syntax::IsAccessSpecifier(first->text) && cur.size() == 1) return true;
    if (first->text == "case" || first->text == "default") return true;
    return cur.size() == 1 && IsName(*first);
  }

  void SplitAndDeclare(ScopeId scope, const std::vector<Item>& items) {
    std::vector<Item> cur;
    for (std::size_t k = 0; k < items.size(); ++k) {
      const Item& it = items[k];
      if (it.child != 0) {
        cur.push_back(it);
        if (EndsStatement(it.child)) {
          DeclareStatement(scope, cur, -1);
          cur.clear();
        }
        continue;
      }
      const LexToken& t = ts_[it.pos];
      if (t.kind == TokenKind::kPunctuator && (t.text == "(" || t.text == "[")) {
        const std::size_t m = br_.Match(it.pos);
        cur.push_back(it);
        if (m == kNoPos) continue;
        while (k + 1 < items.size() && items[k + 1].pos <= m) cur.push_back(items[++k]);
        continue;
      }
      if (t.text == ";") {
        cur.push_back(it);
        DeclareStatement(scope, cur, -1);
        cur.clear();
        continue;
      }
      if (t.text == ":" && IsLabelPrefix(cur)) {
        cur.clear();
        continue;
      }
      cur.push_back(it);
    }
    if (!cur.empty()) DeclareStatement(scope, cur, -1);
  }

  void DeclareParams(ScopeId scope, std::size_t open, std::size_t close) {
    int index = 0;
    if (close == open + 1) return;
    for (auto [b, e] : syntax::SplitTopLevel(ts_, br_, open + 1, close, ",", true)) {
      std::vector<Item> param;
      for (std::size_t p = b; p < e; ++p) param.push_back({p, 0});
      DeclareStatement(scope, param, index++);
    }
  }

  // Registers every declarator of one statement. |param| >= 0 marks a
  // function parameter at that index.
  void DeclareStatement(ScopeId scope, const std::vector<Item>& items, int param) {
    std::size_t k = 0;
    if (items.empty()) return;
    const LexToken* first = Tok(items, 0);
    if (first == nullptr) return;
    if (first->text == "for" && TokIs(items, 1, "(")) {
      const std::size_t close = br_.Match(items[1].pos);
      if (close == kNoPos) return;
      std::vector<Item> clause;
      for (std::size_t j = 2; j < items.size() && items[j].pos < close; ++j) {
        if (TokIs(items, j, ";")) break;
        clause.push_back(items[j]);
      }
      DeclareStatement(scope, clause, -1);
      return;
    }
    // template<...> prefix
    while (TokIs(items, k, "template") && TokIs(items, k + 1, "<")) {
      std::size_t depth = 0;
      std::size_t j = k + 1;
      for (; j < items.size(); ++j) {
        const LexToken* t = Tok(items, j);
        if (t == nullptr) continue;
        if (t->text == "<") ++depth;
        if (t->text == ">" && --depth == 0) break;
        if (t->text == ">>") {
          if (depth <= 2) break;
          depth -= 2;
        }
      }
      k = j + 1;
    }
    if (TokIs(items, k, "typedef")) {
      DeclareTypedef(items, k + 1);
      return;
    }
    if (TokIs(items, k, "using")) {
      if (Tok(items, k + 1) != nullptr && IsName(*Tok(items, k + 1)) &&
          TokIs(items, k + 2, "=")) {
        std::string target;
        for (std::size_t j = k + 3; j < items.size(); ++j) {
          const LexToken* t = Tok(items, j);
          if (t == nullptr || t->text == ";") break;
          if (!target.empty()) target += ' ';
          target += t->text;
        }
        tree_.types_.AddAlias(Tok(items, k + 1)->text, target);
      }
      return;
    }
    const LexToken* head = Tok(items, k);
    if (head != nullptr &&
        (head->text == "friend" || head->text == "return" ||
         head->text == "static_assert" || head->text == "delete" ||
         head->text == "namespace" ||
         (head->kind == TokenKind::kKeyword &&
          syntax::IsControlKeyword(head->text)))) {
      return;
    }
    ParseDeclaration(scope, items, k, param);
  }

  void DeclareTypedef(const std::vector<Item>& items, std::size_t k) {
    std::string alias;
    std::string target;
    std::string child_name;
    bool pointer = false;
    std::size_t end = items.size();
    for (std::size_t j = k; j < items.size(); ++j) {
      if (TokIs(items, j, ";")) {
        end = j;
        break;
      }
    }
    // typedef void (*fp)(int);
    for (std::size_t j = k; j + 2 < end; ++j) {
      if (TokIs(items, j, "(") && TokIs(items, j + 1, "*") &&
          Tok(items, j + 2) != nullptr && IsName(*Tok(items, j + 2))) {
        tree_.types_.AddAlias(Tok(items, j + 2)->text, "void *");
        return;
      }
    }
    std::size_t alias_at = kNoPos;
    for (std::size_t j = end; j > k; --j) {
      const LexToken* t = Tok(items, j - 1);
      if (t != nullptr && t->text == "]") {
        while (j > k && !TokIs(items, j - 1, "[")) --j;
        continue;
      }
      if (t != nullptr && IsName(*t)) {
        alias = t->text;
        alias_at = j - 1;
        break;
      }
    }
    if (alias.empty()) return;
    for (std::size_t j = k; j < alias_at; ++j) {
      if (items[j].child != 0) {
        child_name = tree_.node(items[j].child).name;
        continue;
      }
      const LexToken& t = ts_[items[j].pos];
      if (t.text == "*") pointer = true;
      if (!target.empty()) target += ' ';
      target += t.text;
    }
    if (!child_name.empty()) target = child_name + (pointer ? " *" : "");
    tree_.types_.AddAlias(alias, target);
  }

  bool IsKnownType(std::string_view word) const {
    return tree_.types_.IsType(word) || tree_.ClassScope(word).has_value();
  }

  void ParseDeclaration(ScopeId scope, const std::vector<Item>& items,
                        std::size_t k, int param) {
    bool is_static = false;
    std::string type_text;
    auto append = [&](const std::string& s) {
      if (!type_text.empty()) type_text += ' ';
      type_text += s;
    };
    // Specifiers.
    while (const LexToken* t = Tok(items, k)) {
      if (!syntax::IsDeclSpecifier(t->text)) break;
      if (t->text == "static") is_static = true;
      if (t->text == "const" || t->text == "volatile") append(t->text);
      ++k;
    }
    if (k >= items.size()) return;
    bool typed = false;
    if (items[k].child != 0) {
      const ScopeNode& c = tree_.node(items[k].child);
      if (!IsClassKind(c.kind)) return;
      append(c.name);
      ++k;
      typed = true;
    } else {
      const LexToken& t = ts_[items[k].pos];
      if ((t.text == "struct" || t.text == "class" || t.text == "union" ||
           t.text == "enum") && Tok(items, k + 1) != nullptr &&
          IsName(*Tok(items, k + 1))) {
        append(Tok(items, k + 1)->text);
        k += 2;
        if (k < items.size() && items[k].child != 0) ++k;
        typed = true;
      } else if (syntax::IsBuiltinTypeWord(t.text)) {
        while (const LexToken* w = Tok(items, k)) {
          if (!syntax::IsBuiltinTypeWord(w->text) && w->text != "const" &&
              w->text != "volatile") {
            break;
          }
          append(w->text);
          ++k;
        }
        typed = true;
      } else if (IsName(t) || t.text == "::") {
        std::size_t j = k;
        std::string name;
        if (TokIs(items, j, "::")) ++j;
        while (const LexToken* w = Tok(items, j)) {
          if (!IsName(*w)) break;
          name += (name.empty() ? "" : "::") + w->text;
          ++j;
          if (TokIs(items, j, "<")) {
            int depth = 0;
            for (; j < items.size(); ++j) {
              const LexToken* a = Tok(items, j);
              if (a == nullptr) return;
              if (a->text == "<") ++depth;
              if (a->text == ">") --depth;
              if (a->text == ">>") depth -= 2;
              if (a->text == ";") return;
              if (depth <= 0) break;
            }
            ++j;
          }
          if (TokIs(items, j, "::")) {
            ++j;
            continue;
          }
          break;
        }
        if (name.empty()) return;
        const std::string last = name.substr(name.rfind(':') == std::string::npos
                                                 ? 0
                                                 : name.rfind(':') + 1);
        const bool known = IsKnownType(last) || IsKnownType(name);
        // Unknown words count as types only in "T x", "T* x", "T& x" shapes.
        std::size_t d = j;
        while (const LexToken* w = Tok(items, d)) {
          if (w->text != "*" && w->text != "&" && w->text != "&&" &&
              w->text != "const" && w->text != "volatile") {
            break;
          }
          ++d;
        }
        const LexToken* decl_name = Tok(items, d);
        const LexToken* after = Tok(items, d + 1);
        const bool shaped =
            decl_name != nullptr && IsName(*decl_name) &&
            (after == nullptr || after->text == ";" || after->text == "," ||
             after->text == "=" || after->text == "[" || after->text == ")" ||
             after->text == "(" || after->text == "{" || after->text == ":");
        const bool param_unnamed = param >= 0 && (decl_name == nullptr);
        if (!known && !shaped && !param_unnamed) return;
        if (!known && d == j && param < 0 && after != nullptr &&
            after->text == "(" && IsDeclarationLevel(tree_.node(scope).kind)) {
          // "T f(...)" at file scope: a prototype.
          return;
        }
        append(name);
        k = j;
        typed = true;
      }
    }
    if (!typed) return;
    while (const LexToken* t = Tok(items, k)) {
      if (t->text != "const" && t->text != "volatile") break;
      ++k;
    }
    const ScopeNode& sn = tree_.node(scope);
    const bool decl_level = IsDeclarationLevel(sn.kind);
    // Declarators.
    while (k < items.size()) {
      bool pointer = false;
      std::string marks;
      while (const LexToken* t = Tok(items, k)) {
        if (t->text == "*") {
          pointer = true;
          marks += "*";
        } else if (t->text == "&" || t->text == "&&") {
          marks += t->text;
        } else if (t->text != "const" && t->text != "volatile" &&
                   t->text != "restrict" && t->text != "__restrict") {
          break;
        }
        ++k;
      }
      std::size_t name_at = kNoPos;
      const LexToken* t = Tok(items, k);
      if (t == nullptr) return;
      if (t->text == "(" && (TokIs(items, k + 1, "*") || TokIs(items, k + 1, "&"))) {
        const std::size_t close = br_.Match(items[k].pos);
        for (std::size_t j = k + 1; j < items.size() && items[j].pos < close; ++j) {
          const LexToken* w = Tok(items, j);
          if (w != nullptr && IsName(*w)) name_at = items[j].pos;
        }
        pointer = true;
        while (k < items.size() && items[k].pos <= close) ++k;
        if (TokIs(items, k, "(") || TokIs(items, k, "[")) {
          const std::size_t m = br_.Match(items[k].pos);
          while (k < items.size() && items[k].pos <= m) ++k;
        }
      } else if (IsName(*t)) {
        name_at = items[k].pos;
        ++k;
        if (TokIs(items, k, "(") && decl_level && param < 0) return;  // prototype
        if (k < items.size() && items[k].child != 0 &&
            tree_.node(items[k].child).kind == ScopeKind::kFunction) {
          return;  // function definition
        }
        if (TokIs(items, k, "(")) {
          const std::size_t m = br_.Match(items[k].pos);
          while (k < items.size() && items[k].pos <= m) ++k;
        }
        while (TokIs(items, k, "[")) {
          const std::size_t m = br_.Match(items[k].pos);
          if (m == kNoPos) break;
          while (k < items.size() && items[k].pos <= m) ++k;
          if (param >= 0) pointer = true;  // array parameters decay
        }
        if (TokIs(items, k, ":")) k += 2;  // bit-field
      } else {
        if (param < 0) return;
      }
      if (TokIs(items, k, "=") || TokIs(items, k, "{")) {
        if (TokIs(items, k, "{")) {
          const std::size_t m = br_.Match(items[k].pos);
          while (k < items.size() && items[k].pos <= m) ++k;
        } else {
          ++k;
          while (k < items.size()) {
            const LexToken* w = Tok(items, k);
            if (w == nullptr) {
              ++k;
              continue;
            }
            if (w->text == "," || w->text == ";") break;
            if (w->text == "(" || w->text == "[" || w->text == "{") {
              const std::size_t m = br_.Match(items[k].pos);
              if (m == kNoPos) break;
              while (k < items.size() && items[k].pos <= m) ++k;
              continue;
            }
            ++k;
          }
        }
      }
      if (name_at != kNoPos) {
        Register(scope, name_at, type_text, marks, pointer, is_static, param);
      }
      if (!TokIs(items, k, ",") || param >= 0) break;
      ++k;
    }
  }

  void Register(ScopeId scope, std::size_t name_at, const std::string& type_text,
                const std::string& marks, bool pointer, bool is_static, int param) {
    const ScopeNode& sn = tree_.node(scope);
    LexToken& tok = ts_.mutable_at(name_at);
    if (tok.kind != TokenKind::kIdentifier) return;
    if (!IsLocalKind(sn.kind) && !IsClassKind(sn.kind)) {
      // File-scope redeclaration ("extern int g;" then "int g;") shares the id.
      for (VarId id : sn.symbols) {
        if (tree_.symbol(id).name == tok.text) {
          tok.var_id = id;
          return;
        }
      }
    }
    SymbolEntry e;
    e.name = tok.text;
    e.type_text = type_text + (marks.empty() ? "" : " " + marks);
    e.is_pointer = pointer;
    e.decl_scope = scope;
    e.is_member = IsClassKind(sn.kind);
    e.is_global_or_static = is_static || sn.kind == ScopeKind::kGlobal ||
                            sn.kind == ScopeKind::kNamespace;
    e.is_param = param >= 0;
    e.param_index = param;
    e.file = ts_.file();
    e.decl_pos = name_at;
    e.line = tok.line;
    // One level of alias rewriting.
    const std::string base = StripTypeDecorations(type_text);
    if (auto target = tree_.types_.AliasTarget(base)) {
      e.type_text = *target + (marks.empty() ? "" : " " + marks);
      if (target->find('*') != std::string::npos) e.is_pointer = true;
      const std::string next = StripTypeDecorations(*target);
      if (next != base && tree_.types_.AliasTarget(next).has_value()) {
        e.type_unknown = true;
        diags_.push_back({ScopeDiagCode::kAliasChain, ts_.file(), tok.line,
                          "alias chain deeper than one level for '" + base + "'"});
      }
    }
    tok.var_id = tree_.AddSymbol(std::move(e));
  }

  ScopeTree& tree_;
  TokenStream& ts_;
  const BracketIndex& br_;
  std::vector<ScopeDiagnostic>& diags_;
};

void ScopeBuilder::CollectDeclarations(TokenStream& ts) {
  const BracketIndex br(ts);
  DeclarationCollector collector(tree_, ts, br, tree_.diagnostics_);
  collector.CollectScope(1);
  const std::size_t count = tree_.scope_count();
  for (std::size_t i = 2; i <= count; ++i) {
    if (tree_.node(static_cast<ScopeId>(i)).file == ts.file()) {
      collector.CollectScope(static_cast<ScopeId>(i));
    }
  }
}

void ScopeBuilder::BindUses(TokenStream& ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    LexToken& t = ts.mutable_at(i);
    if (t.kind != TokenKind::kIdentifier || t.var_id != 0) continue;
    const LexToken* prev = t.prev;
    const LexToken* next = t.next;
    if (next != nullptr && next->text == "::") continue;
    ScopeId scope = t.scope_id;
    if (prev != nullptr && (prev->text == "." || prev->text == "->")) {
      if (prev->text == "->" && prev->prev != nullptr && prev->prev->text == "this") {
        // this->member: resolve from the enclosing function.
      } else {
        continue;
      }
    }
    if (prev != nullptr && prev->text == "::") {
      if (prev->prev != nullptr && IsName(*prev->prev)) continue;
      scope = 1;
    }
    if (const SymbolEntry* e = tree_.Resolve(t.text, scope, i)) t.var_id = e->var_id;
  }
}

ScopeTree BuildScopeTree(TokenStream& stream) {
  ScopeTree tree;
  ScopeBuilder builder(tree);
  builder.AddFile(stream);
  builder.Finish();
  return tree;
}

// ---------------------------------------------------------------------------
// Class information

namespace {

struct MemberDecl {
  std::string name;  // "A", "~A", "operator="
  std::size_t name_pos = kNoPos;
  std::size_t open = kNoPos;
  std::size_t close = kNoPos;
  std::size_t end = kNoPos;
  bool is_virtual = false;
  bool deleted = false;
  bool defaulted = false;
};

bool IsCopyParam(const TokenStream& ts, std::size_t open, std::size_t close,
                 const std::string& cls, bool allow_value) {
  if (close <= open + 1) return false;
  const syntax::BracketIndex br(ts);
  bool mentions = false;
  bool ref = false;
  for (std::size_t i = open + 1; i < close; ++i) {
    const std::string& s = ts[i].text;
    if (s == ",") return false;
    if (s == "&&") return false;
    if (s == cls) mentions = true;
    if (s == "&") ref = true;
  }
  return mentions && (ref || allow_value);
}

}  // namespace

std::vector<ClassInfo> CollectClassInfo(
    const ScopeTree& tree, const std::vector<const TokenStream*>& streams) {
  std::vector<ClassInfo> out;
  for (const ScopeNode& n : tree.nodes()) {
    if (n.kind != ScopeKind::kClass && n.kind != ScopeKind::kStruct) continue;
    if (n.name.empty() || n.file < 0 ||
        static_cast<std::size_t>(n.file) >= streams.size()) {
      continue;
    }
    const TokenStream& ts = *streams[n.file];
    const syntax::BracketIndex br(ts);
    ClassInfo info;
    info.name = n.name;
    info.scope = n.id;
    info.file = n.file;
    info.is_struct = n.kind == ScopeKind::kStruct;
    info.bases = n.bases;
    info.line = ts.at(n.token_begin).line;
    for (std::size_t i = n.token_begin; i > 0; --i) {
      if (ts[i - 1].text == n.name) {
        info.line = ts[i - 1].line;
        break;
      }
      if (ts[i - 1].text == ";" || ts[i - 1].text == "}") break;
    }
    for (VarId id : n.symbols) {
      if (tree.symbol(id).is_pointer) info.pointer_members.push_back(id);
    }

    // Declarations in the class body (with or without inline bodies).
    std::vector<MemberDecl> decls;
    const std::size_t end = n.token_end == kNoPos ? ts.size() : n.token_end;
    for (std::size_t i = n.token_begin + 1; i < end; ++i) {
      const LexToken& t = ts[i];
      if (t.scope_id != n.id) continue;
      MemberDecl d;
      if (t.text == n.name && i + 1 < end && ts[i + 1].text == "(" &&
          (i == 0 || ts[i - 1].text != "~")) {
        d.name = n.name;
      } else if (t.text == "~" && i + 2 < end && ts[i + 1].text == n.name &&
                 ts[i + 2].text == "(") {
        d.name = "~" + n.name;
        ++i;
      } else if (t.text == "operator" && i + 2 < end && ts[i + 1].text == "=" &&
                 ts[i + 2].text == "(") {
        d.name = "operator=";
        ++i;
      } else {
        continue;
      }
      d.name_pos = d.name[0] == '~' || d.name == "operator=" ? i - 1 : i;
      d.open = i + 1;
      d.close = br.Match(d.open);
      if (d.close == kNoPos) continue;
      for (std::size_t j = d.name_pos; j > n.token_begin; --j) {
        const std::string& s = ts[j - 1].text;
        if (s == ";" || s == "{" || s == "}" || s == ":") break;
        if (s == "virtual") d.is_virtual = true;
      }
      std::size_t j = d.close + 1;
      while (j < end && ts[j].text != ";" && ts[j].text != "{" &&
             ts[j].scope_id == n.id) {
        if (ts[j].text == "delete" && ts[j - 1].text == "=") d.deleted = true;
        if (ts[j].text == "default" && ts[j - 1].text == "=") d.defaulted = true;
        ++j;
      }
      d.end = j < end ? j : end - 1;
      decls.push_back(d);
      i = d.close;
    }

    auto special_from_decl = [&](const MemberDecl& d) {
      SpecialMember m;
      m.range = {n.file, d.name_pos, d.end};
      m.line = ts[d.name_pos].line;
      m.is_virtual = d.is_virtual;
      m.deleted = d.deleted;
      m.defaulted = d.defaulted;
      return m;
    };
    auto special_from_def = [&](const ScopeNode& f) {
      SpecialMember m;
      m.range = {f.file, f.token_begin, f.token_end};
      const TokenStream& fts = *streams[f.file];
      m.line = f.name_pos != kNoPos ? fts[f.name_pos].line : fts[f.token_begin].line;
      m.has_body = true;
      return m;
    };

    // Member function definitions: inline (child scopes) and out-of-class.
    std::vector<const ScopeNode*> defs;
    for (const ScopeNode& f : tree.nodes()) {
      if (f.kind != ScopeKind::kFunction) continue;
      if (f.parent == n.id || f.class_name == n.name) defs.push_back(&f);
    }
    auto arity_of = [&](const TokenStream& fts, std::size_t open, std::size_t close) {
      if (close == open + 1 || (close == open + 2 && fts[open + 1].text == "void")) return 0;
      const syntax::BracketIndex fbr(fts);
      return static_cast<int>(
          syntax::SplitTopLevel(fts, fbr, open + 1, close, ",", true).size());
    };
    // The inline body of |d| itself, else an out-of-class definition with
    // the same name and parameter count.
    auto find_def = [&](const MemberDecl& d) -> const ScopeNode* {
      for (const ScopeNode* f : defs) {
        if (f->file == n.file && f->params_open == d.open) return f;
      }
      const int arity = arity_of(ts, d.open, d.close);
      const bool copy = IsCopyParam(ts, d.open, d.close, n.name, d.name == "operator=");
      for (const ScopeNode* f : defs) {
        if (f->parent == n.id || f->name != d.name || f->arity != arity) continue;
        const TokenStream& fts = *streams[f->file];
        if (copy == IsCopyParam(fts, f->params_open, f->params_close, n.name,
                                d.name == "operator=")) {
          return f;
        }
      }
      return nullptr;
    };

    for (const MemberDecl& d : decls) {
      const bool copy_shape = IsCopyParam(ts, d.open, d.close, n.name,
                                          d.name == "operator=");
      SpecialMember m = special_from_decl(d);
      if (const ScopeNode* def = find_def(d)) {
        SpecialMember body = special_from_def(*def);
        body.is_virtual = d.is_virtual;
        m = body;
      }
      if (d.name == n.name) {
        if (copy_shape) {
          info.copy_ctor = m;
        } else {
          info.ctors.push_back(m);
        }
      } else if (d.name[0] == '~') {
        info.dtor = m;
      } else if (copy_shape) {
        info.assign_op = m;
      }
    }
    // Out-of-class definitions without an in-class declaration are malformed
    // C++, but still take them.
    for (const ScopeNode* f : defs) {
      if (f->parent == n.id) continue;
      const bool declared = std::any_of(decls.begin(), decls.end(),
                                        [&](const MemberDecl& d) { return d.name == f->name; });
      if (declared) continue;
      const TokenStream& fts = *streams[f->file];
      const bool copy = IsCopyParam(fts, f->params_open, f->params_close, n.name,
                                    f->name == "operator=");
      if (f->name == n.name) {
        if (copy) {
          info.copy_ctor = special_from_def(*f);
        } else {
          info.ctors.push_back(special_from_def(*f));
        }
      } else if (f->name == "~" + n.name) {
        info.dtor = special_from_def(*f);
      } else if (f->name == "operator=" && copy) {
        info.assign_op = special_from_def(*f);
      }
    }
    out.push_back(std::move(info));
  }
  return out;
}

}  // namespace zkleak

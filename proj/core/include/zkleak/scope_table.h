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

#ifndef ZKLEAK_SCOPE_TABLE_H_
#define ZKLEAK_SCOPE_TABLE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "zkleak/token_stream.h"

namespace zkleak {

enum class ScopeKind : std::uint8_t {
  kGlobal,
  kNamespace,
  kClass,
  kStruct,
  kUnion,
  kFunction,
  kIf,
  kElse,
  kFor,
  kWhile,
  kDoWhile,
  kSwitch,
  kTry,
  kCatch,
  kBlock,
};

// "eGlobal", "eFunction", ...
std::string_view ScopeKindName(ScopeKind kind);

// Scopes whose direct statements are declarations rather than code.
bool IsDeclarationLevel(ScopeKind kind);

// Inclusive token range [begin, end] within one file.
struct TokenRange {
  FileIndex file = 0;
  std::size_t begin = kNoPos;
  std::size_t end = kNoPos;

  bool valid() const { return begin != kNoPos; }
  bool Contains(FileIndex f, std::size_t pos) const {
    return valid() && f == file && pos >= begin && pos <= end;
  }
};

struct SymbolEntry {
  std::string name;
  VarId var_id = 0;
  std::string type_text;
  bool is_pointer = false;
  ScopeId decl_scope = 0;
  bool is_member = false;
  bool is_global_or_static = false;
  bool is_param = false;
  int param_index = -1;
  // Set when the declared type went through an alias chain deeper than one.
  bool type_unknown = false;
  FileIndex file = 0;
  std::size_t decl_pos = kNoPos;
  int line = 0;

  // Type name with qualifiers, pointer and reference marks removed.
  std::string BaseTypeName() const;
};

struct ScopeNode {
  ScopeId id = 0;
  ScopeKind kind = ScopeKind::kGlobal;
  std::string name;
  ScopeId parent = 0;
  std::vector<ScopeId> children;
  FileIndex file = -1;
  // Inclusive range; starts at the header '(' for functions and control
  // statements, at '{' otherwise. The root spans every file.
  std::size_t token_begin = 0;
  std::size_t token_end = kNoPos;
  std::vector<VarId> symbols;

  // Functions: qualifying or enclosing class, name token and braces.
  std::string class_name;
  std::size_t name_pos = kNoPos;
  std::size_t header_begin = kNoPos;
  std::size_t params_open = kNoPos;
  std::size_t params_close = kNoPos;
  std::size_t body_open = kNoPos;
  std::size_t body_close = kNoPos;
  int arity = 0;
  // Class scopes: direct base class names.
  std::vector<std::string> bases;

  bool Contains(FileIndex f, std::size_t pos) const {
    return kind == ScopeKind::kGlobal ||
           (f == file && pos >= token_begin && pos <= token_end);
  }
};

enum class ScopeDiagCode : std::uint8_t {
  kUnbalancedBraces,
  kAliasChain,
  kMalformedClass,
};

struct ScopeDiagnostic {
  ScopeDiagCode code;
  FileIndex file = 0;
  int line = 0;
  std::string message;
};

struct SpecialMember {
  TokenRange range;  // definition body if present, else the declaration
  int line = 0;
  bool is_virtual = false;
  bool deleted = false;
  bool defaulted = false;
  bool has_body = false;
};

struct ClassInfo {
  std::string name;
  ScopeId scope = 0;
  FileIndex file = 0;
  int line = 0;
  bool is_struct = false;
  std::vector<std::string> bases;
  std::vector<VarId> pointer_members;
  std::vector<SpecialMember> ctors;
  std::optional<SpecialMember> dtor;
  std::optional<SpecialMember> copy_ctor;
  std::optional<SpecialMember> assign_op;
};

// Type words known to the program: builtin type keywords, library typedefs,
// and every class/struct/union/enum/alias name seen while building.
class TypeRegistry {
 public:
  TypeRegistry();
  bool IsType(std::string_view word) const;
  void AddType(std::string name);
  void AddAlias(std::string alias, std::string target);
  // One-level alias rewrite; nullopt if |name| is not an alias.
  std::optional<std::string> AliasTarget(std::string_view name) const;

 private:
  std::set<std::string, std::less<>> types_;
  std::map<std::string, std::string, std::less<>> aliases_;
};

// Tree-shaped symbol table for a whole analyzed file set. There is a single
// eGlobal root shared by every file.
class ScopeTree {
 public:
  ScopeTree();

  const ScopeNode& root() const { return nodes_.front(); }
  const ScopeNode& node(ScopeId id) const { return nodes_.at(id - 1); }
  std::size_t scope_count() const { return nodes_.size(); }
  const std::vector<ScopeNode>& nodes() const { return nodes_; }

  const SymbolEntry& symbol(VarId id) const { return symbols_.at(id - 1); }
  std::size_t symbol_count() const { return symbols_.size(); }
  const std::vector<SymbolEntry>& symbols() const { return symbols_; }

  const TypeRegistry& types() const { return types_; }
  const std::vector<ScopeDiagnostic>& diagnostics() const { return diagnostics_; }

  // Searches |scope| then its ancestors. Inside function bodies only
  // declarations that precede |use_pos| are visible. Functions qualified
  // with a class also see that class's members (and its bases').
  const SymbolEntry* Resolve(std::string_view name, ScopeId scope,
                             std::size_t use_pos = kNoPos) const;

  // Innermost scope containing (file, pos).
  ScopeId InnermostAt(FileIndex file, std::size_t pos) const;

  std::optional<ScopeId> ClassScope(std::string_view class_name) const;

  // Every eFunction scope that has a body, in file/position order.
  std::vector<ScopeId> FunctionScopes() const;

  // Indented "kind name [beginLine..endLine]" lines.
  std::string Dump(const std::vector<const TokenStream*>& streams) const;

 private:
  friend class ScopeBuilder;
  friend class DeclarationCollector;

  ScopeId AddScope(ScopeNode node);
  VarId AddSymbol(SymbolEntry entry);
  const SymbolEntry* FindIn(const ScopeNode& scope, std::string_view name,
                            std::size_t use_pos, FileIndex use_file) const;
  const SymbolEntry* FindInClass(std::string_view class_name,
                                 std::string_view name, int depth) const;

  std::vector<ScopeNode> nodes_;
  std::vector<SymbolEntry> symbols_;
  TypeRegistry types_;
  std::unordered_map<std::string, ScopeId> class_scopes_;
  std::vector<ScopeDiagnostic> diagnostics_;
};

// Builds one tree over several files. Call AddFile for every stream, then
// Finish() to bind identifier uses to declarations (annotating var_id).
class ScopeBuilder {
 public:
  explicit ScopeBuilder(ScopeTree& tree) : tree_(tree) {}

  void AddFile(TokenStream& stream);
  void Finish();

 private:
  void BuildStructure(TokenStream& stream);
  void CollectDeclarations(TokenStream& stream);
  void BindUses(TokenStream& stream);

  ScopeTree& tree_;
  std::vector<TokenStream*> streams_;
};

// Convenience for a single file.
ScopeTree BuildScopeTree(TokenStream& stream);

std::vector<ClassInfo> CollectClassInfo(
    const ScopeTree& tree, const std::vector<const TokenStream*>& streams);

}  // namespace zkleak

#endif  // ZKLEAK_SCOPE_TABLE_H_

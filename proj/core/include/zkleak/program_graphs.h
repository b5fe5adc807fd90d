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

#ifndef ZKLEAK_PROGRAM_GRAPHS_H_
#define ZKLEAK_PROGRAM_GRAPHS_H_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zkleak/program.h"
#include "zkleak/scope_table.h"
#include "zkleak/token_stream.h"

namespace zkleak {

struct FuncId {
  std::string file;        // empty for external functions
  std::string class_name;  // empty for free functions
  std::string name;
  int arity = 0;

  bool external() const { return file.empty(); }
  // "file::Class::func/arity", or "file::func/arity" without a class.
  std::string ToString() const;

  friend auto operator<=>(const FuncId&, const FuncId&) = default;
  friend bool operator==(const FuncId&, const FuncId&) = default;
};

// FuncId of a function definition scope.
FuncId FuncIdOf(const Program& program, ScopeId function_scope);

enum class CfgNodeKind : std::uint8_t {
  kEntry,
  kExit,
  kStatement,
  kBranch,
  kJoin,
  kLoopHead,
  kReturn,
};

std::string_view CfgNodeKindName(CfgNodeKind kind);

struct CfgEdge {
  int to = 0;
  // "then", "else", "loop", "case:<k>", "default"; empty on plain edges.
  std::string arm;
  friend bool operator==(const CfgEdge&, const CfgEdge&) = default;
};

struct CfgNode {
  int id = 0;
  CfgNodeKind kind = CfgNodeKind::kStatement;
  // Token range [begin, end) of the statement or guard; empty for
  // synthetic nodes.
  std::size_t begin = kNoPos;
  std::size_t end = kNoPos;
  int line = 0;
  std::vector<CfgEdge> succs;
  std::vector<int> preds;
  bool unreachable = false;
};

struct Cfg {
  FuncId func;
  ScopeId scope = 0;
  FileIndex file = 0;
  std::vector<CfgNode> nodes;
  int entry = 0;
  int exit = 1;
  bool degraded = false;  // goto/labels: linear chain
  std::vector<std::string> warnings;

  std::size_t EdgeCount() const;
  // Space-joined guard/statement tokens of a node.
  std::string NodeText(const TokenStream& ts, int node) const;
  // "id kind line -> succIds" lines.
  std::string Dump() const;
};

Cfg BuildCfg(const Program& program, ScopeId function_scope);

struct FcgNode {
  FuncId id;
  ScopeId scope = 0;  // 0 for external functions
  bool external() const { return scope == 0; }
};

struct FcgEdge {
  int caller = 0;  // node indices
  int callee = 0;
  FileIndex file = 0;
  std::size_t pos = kNoPos;  // callee-name token of the call site
  int line = 0;
};

struct FcgWarning {
  FileIndex file = 0;
  int line = 0;
  std::string caller;
  std::string message;
};

class Fcg {
 public:
  const std::vector<FcgNode>& nodes() const { return nodes_; }
  const std::vector<FcgEdge>& edges() const { return edges_; }
  const std::vector<FcgWarning>& warnings() const { return warnings_; }

  std::optional<int> IndexOf(const FuncId& id) const;
  // Distinct callee indices in first-call order.
  std::vector<int> Callees(int node) const;
  std::vector<int> Callers(int node) const;
  // Edge for the call whose name token is at (file, pos).
  const FcgEdge* EdgeAt(FileIndex file, std::size_t pos) const;
  std::size_t defined_count() const;

  // "caller -> callee @file:line" lines.
  std::string Dump(const Program& program) const;

 private:
  friend Fcg BuildFcg(const Program& program);
  int AddNode(FcgNode node);

  std::vector<FcgNode> nodes_;
  std::vector<FcgEdge> edges_;
  std::vector<FcgWarning> warnings_;
  std::map<FuncId, int> index_;
  std::map<std::pair<FileIndex, std::size_t>, std::size_t> by_site_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

Fcg BuildFcg(const Program& program);

struct Ring {
  std::vector<int> members;  // sorted node indices
  std::vector<int> cycle;    // witness, starting at members.front()
};

// One entry per strongly connected component with two or more nodes or a
// self-loop.
std::vector<Ring> FindRings(const Fcg& fcg);

// Tarjan over an adjacency list; components in reverse topological order.
std::vector<std::vector<int>> StronglyConnectedComponents(
    const std::vector<std::vector<int>>& adjacency);

}  // namespace zkleak

#endif  // ZKLEAK_PROGRAM_GRAPHS_H_

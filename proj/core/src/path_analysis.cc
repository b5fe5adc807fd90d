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

#include "path_analysis.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "statement_events.h"

namespace zkleak {

namespace {

constexpr int kMaxVisits = 1 << 18;

struct NodeInfo {
  bool ready = false;
  std::vector<StmtEvent> events;
  std::optional<std::pair<VarId, std::string>> null_test;
  std::string guard;
};

PathCondition CommonPrefix(const PathCondition& a, const PathCondition& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return PathCondition(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
}

class Engine {
 public:
  Engine(const Program& program, const Cfg& cfg, const Fcg& fcg,
         const SummaryStore& store, const PatternCatalog& catalog,
         const AnalysisOptions& options)
      : program_(program),
        cfg_(cfg),
        fcg_(fcg),
        store_(store),
        options_(options),
        ts_(program.stream(cfg.file)),
        tree_(program.tree()),
        extractor_(ts_, tree_, catalog),
        info_(cfg.nodes.size()) {}

  PathResult Run();

 private:
  const NodeInfo& Info(int node);
  std::vector<Variant> Step(int node, Variant v);
  void ApplyCall(const StmtEvent& e, int id_base, std::vector<Variant>& out,
                 Variant v);
  void Collect(Variant& v);
  // Merges variants with equal machine states; the first one's guards
  // stay as the witness path.
  std::vector<Variant> Compact(std::vector<Variant> variants);
  bool IsExternal(VarId v) const;
  void EnsureExternal(MachineSet& machines, VarId v, int line) const;
  Variant Initial() const;
  void ComputeOrder();

  const Program& program_;
  const Cfg& cfg_;
  const Fcg& fcg_;
  const SummaryStore& store_;
  const AnalysisOptions& options_;
  const TokenStream& ts_;
  const ScopeTree& tree_;
  EventExtractor extractor_;
  std::vector<NodeInfo> info_;
  std::vector<int> rpo_;
  PathResult result_;
};

void Engine::ComputeOrder() {
  const std::size_t n = cfg_.nodes.size();
  rpo_.assign(n, -1);
  std::vector<int> post;
  std::vector<bool> seen(n, false);
  auto dfs = [&](int root) {
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    seen[root] = true;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& succs = cfg_.nodes[node].succs;
      if (next < succs.size()) {
        const int to = succs[next++].to;
        if (!seen[to]) {
          seen[to] = true;
          stack.push_back({to, 0});
        }
        continue;
      }
      post.push_back(node);
      stack.pop_back();
    }
  };
  dfs(cfg_.entry);
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) dfs(static_cast<int>(i));
  }
  int index = 0;
  for (auto it = post.rbegin(); it != post.rend(); ++it) rpo_[*it] = index++;
}

const NodeInfo& Engine::Info(int node) {
  NodeInfo& info = info_[node];
  if (info.ready) return info;
  info.ready = true;
  const CfgNode& n = cfg_.nodes[node];
  if (n.begin == kNoPos || n.end == kNoPos || n.begin >= n.end) return info;
  info.events = extractor_.Extract(n.begin, n.end);
  if (n.kind == CfgNodeKind::kBranch || n.kind == CfgNodeKind::kLoopHead) {
    info.guard = cfg_.NodeText(ts_, node);
    if (options_.prune_null_guards) info.null_test = extractor_.NullTest(n.begin, n.end);
  }
  return info;
}

bool Engine::IsExternal(VarId v) const {
  if (v <= 0 || static_cast<std::size_t>(v) > tree_.symbol_count()) return false;
  const SymbolEntry& s = tree_.symbol(v);
  return s.is_param || s.is_global_or_static || s.is_member;
}

void Engine::EnsureExternal(MachineSet& machines, VarId v, int line) const {
  if (machines.OwnerOf(v) != nullptr || !IsExternal(v)) return;
  machines.AddExternal(kExternalIdBase + v, Site{cfg_.file, line}, v);
}

Variant Engine::Initial() const {
  Variant v;
  const ScopeNode& fn = tree_.node(cfg_.scope);
  for (VarId id : fn.symbols) {
    const SymbolEntry& s = tree_.symbol(id);
    if (s.is_param && s.is_pointer) {
      v.machines.AddExternal(kExternalIdBase + id, Site{cfg_.file, s.line}, id);
    }
  }
  return v;
}

void Engine::Collect(Variant& v) {
  for (const Machine& m : v.machines.TakeFailed()) {
    result_.defects.push_back(MachineDefect(program_, cfg_, m, {}));
  }
}

void Engine::ApplyCall(const StmtEvent& e, int id_base, std::vector<Variant>& out,
                       Variant v) {
  const FcgEdge* edge = fcg_.EdgeAt(cfg_.file, e.pos);
  const FunctionSummary* summary = nullptr;
  if (edge != nullptr) {
    const FcgNode& callee = fcg_.nodes()[edge->callee];
    if (!callee.external()) summary = store_.Find(callee.id);
  }
  if (summary == nullptr) {
    if (e.target > 0) v.machines.Assign(e.target, 0, e.line, options_.strict_table2);
    out.push_back(std::move(v));
    return;
  }
  CallBinding binding;
  binding.args = e.args;
  binding.result = e.target;
  binding.site = Site{cfg_.file, e.line};
  binding.id_base = id_base;
  binding.callee = e.callee;
  std::vector<std::string> warnings;
  auto outcomes = ApplySummary(*summary, binding, v.machines,
                               [this](VarId x) { return IsExternal(x); }, &warnings);
  for (std::string& w : warnings) {
    result_.warnings.push_back(std::to_string(e.line) + ": " + w);
  }
  for (SummaryOutcome& o : outcomes) {
    Variant w;
    w.path = v.path;
    if (o.guard) w.path.push_back(*o.guard);
    w.machines = std::move(o.machines);
    w.back_edges = v.back_edges;
    out.push_back(std::move(w));
  }
}

std::vector<Variant> Engine::Step(int node, Variant start) {
  const NodeInfo& info = Info(node);
  std::vector<Variant> current;
  current.push_back(std::move(start));
  const bool strict = options_.strict_table2;
  for (std::size_t idx = 0; idx < info.events.size(); ++idx) {
    const StmtEvent& e = info.events[idx];
    const int id_base = (node + 1) * 4096 + static_cast<int>(idx) * 16;
    const Site site{cfg_.file, e.line};
    std::vector<Variant> next;
    for (Variant& v : current) {
      MachineSet& ms = v.machines;
      switch (e.kind) {
        case StmtEvent::Kind::kAlloc:
          if (e.target != kHeapSlot) ms.Alloc(id_base, site, e.target, e.alloc);
          break;
        case StmtEvent::Kind::kRealloc:
          if (e.source != 0) {
            EnsureExternal(ms, e.source, e.line);
            ms.Free(e.source, FreeFn::kFree, site);
          }
          if (e.target != kHeapSlot) ms.Alloc(id_base, site, e.target, AllocFn::kRealloc);
          break;
        case StmtEvent::Kind::kAssign:
          if (e.target == kHeapSlot) {
            if (Machine* m = ms.OwnerOf(e.source)) m->OnAssign(kHeapSlot, e.source, e.line);
          } else {
            ms.Assign(e.target, e.source, e.line, strict);
          }
          break;
        case StmtEvent::Kind::kOverwrite:
          ms.Assign(e.target, 0, e.line, strict);
          break;
        case StmtEvent::Kind::kPtrArith:
          ms.PtrArith(e.target, e.line);
          break;
        case StmtEvent::Kind::kNullAssign:
          ms.NullAssign(e.target, e.line);
          break;
        case StmtEvent::Kind::kReturn:
          ms.Return(e.target, e.line);
          break;
        case StmtEvent::Kind::kFree:
          EnsureExternal(ms, e.target, e.line);
          ms.Free(e.target, e.free, site);
          break;
        case StmtEvent::Kind::kCall: {
          std::vector<Variant> forks;
          ApplyCall(e, id_base, forks, std::move(v));
          for (Variant& f : forks) {
            f.machines.Assign(kTempSlot, 0, e.line, false);
            Collect(f);
            next.push_back(std::move(f));
          }
          continue;
        }
      }
      ms.Assign(kTempSlot, 0, e.line, false);
      Collect(v);
      next.push_back(std::move(v));
    }
    current = std::move(next);
  }
  return current;
}

std::vector<Variant> Engine::Compact(std::vector<Variant> variants) {
  std::vector<Variant> out;
  for (Variant& v : variants) {
    auto same = std::find_if(out.begin(), out.end(), [&](const Variant& u) {
      return u.machines.SameState(v.machines);
    });
    if (same == out.end()) {
      out.push_back(std::move(v));
      continue;
    }
    for (const auto& [head, count] : v.back_edges) {
      int& mine = same->back_edges[head];
      mine = std::max(mine, count);
    }
  }
  if (static_cast<int>(out.size()) <= options_.path_budget) return out;
  if (!result_.path_insensitive) {
    result_.path_insensitive = true;
    result_.warnings.push_back("path budget exceeded; merging paths");
  }
  std::map<int, Machine> merged;
  Variant joined;
  joined.path = out.front().path;
  for (Variant& v : out) {
    joined.path = CommonPrefix(joined.path, v.path);
    for (const auto& [head, count] : v.back_edges) {
      int& mine = joined.back_edges[head];
      mine = std::max(mine, count);
    }
    for (const Machine& m : v.machines.machines()) {
      auto it = merged.find(m.id());
      if (it == merged.end()) {
        merged.emplace(m.id(), m);
      } else if (it->second.state() != MemState::kAlloced &&
                 m.state() == MemState::kAlloced) {
        it->second = m;
      }
    }
  }
  for (auto& [id, m] : merged) joined.machines.mutable_machines().push_back(std::move(m));
  std::vector<Variant> single;
  single.push_back(std::move(joined));
  return single;
}

PathResult Engine::Run() {
  ComputeOrder();
  std::map<int, std::vector<Variant>> pending;
  std::set<std::pair<int, int>> queue;  // (rpo index, node)
  auto push = [&](int node, Variant v) {
    pending[node].push_back(std::move(v));
    queue.insert({rpo_[node], node});
  };
  push(cfg_.entry, Initial());
  for (const CfgNode& n : cfg_.nodes) {
    if (n.unreachable && n.preds.empty() && n.id != cfg_.entry) push(n.id, Variant{});
  }
  std::vector<Variant> exits;
  int visits = 0;
  while (!queue.empty()) {
    const int node = queue.begin()->second;
    queue.erase(queue.begin());
    std::vector<Variant> here = Compact(std::move(pending[node]));
    pending.erase(node);
    if (node == cfg_.exit) {
      for (Variant& v : here) exits.push_back(std::move(v));
      continue;
    }
    if (++visits > kMaxVisits) {
      result_.warnings.push_back("traversal limit reached");
      result_.path_insensitive = true;
      break;
    }
    const CfgNode& n = cfg_.nodes[node];
    const NodeInfo& info = Info(node);
    const bool guarded = n.kind == CfgNodeKind::kBranch || n.kind == CfgNodeKind::kLoopHead;
    for (Variant& start : here) {
      for (Variant& v : Step(node, std::move(start))) {
        for (const CfgEdge& edge : n.succs) {
          const bool back = rpo_[edge.to] <= rpo_[node];
          if (back && v.back_edges[edge.to] >= options_.loop_passes - 1) continue;
          Variant w = v;
          if (back) ++w.back_edges[edge.to];
          if (guarded && !edge.arm.empty()) {
            w.path.push_back(Guard{info.guard, edge.arm});
            if (info.null_test) {
              const std::string& null_arm = info.null_test->second;
              const bool true_arm = edge.arm == "then" || edge.arm == "loop";
              const bool false_arm = edge.arm == "else";
              if ((null_arm == "then" && true_arm) || (null_arm == "else" && false_arm)) {
                std::vector<int> owned;
                for (const Machine& m : w.machines.machines()) {
                  if (m.Owns(info.null_test->first)) owned.push_back(m.id());
                }
                for (int id : owned) w.machines.Remove(id);
              }
            }
          }
          push(edge.to, std::move(w));
        }
      }
    }
  }
  result_.exits = Compact(std::move(exits));
  return std::move(result_);
}

std::string AllocPhrase(const Machine& m) {
  return std::string(AllocFnName(m.alloc().fn));
}

}  // namespace

bool Escapes(const ScopeTree& tree, VarId v) {
  if (v < 0) return true;
  if (v == 0 || static_cast<std::size_t>(v) > tree.symbol_count()) return false;
  const SymbolEntry& s = tree.symbol(v);
  return s.is_global_or_static || s.is_member || s.is_param;
}

std::optional<OwnerRef> InterfaceOwner(const ScopeTree& tree, VarId v) {
  if (v == kReturnSlot) return OwnerRef::ReturnValue();
  if (v <= 0 || static_cast<std::size_t>(v) > tree.symbol_count()) return std::nullopt;
  const SymbolEntry& s = tree.symbol(v);
  if (s.is_param && s.param_index >= 0) return OwnerRef::Param(s.param_index);
  if (s.is_global_or_static && !s.is_member) return OwnerRef::Global(v);
  return std::nullopt;
}

Defect MachineDefect(const Program& program, const Cfg& cfg, const Machine& m,
                     PathCondition path, bool partial) {
  Defect d;
  d.file = program.path(cfg.file);
  d.func = cfg.func;
  d.path = std::move(path);
  const int alloc_line = m.alloc().site.line;
  switch (m.error()) {
    case ErrorKind::kMissingRelease:
    case ErrorKind::kNone:
      d.kind = partial ? DefectKind::kPathMissingRelease : DefectKind::kMissingRelease;
      d.line = alloc_line;
      d.message = "memory allocated by " + AllocPhrase(m) + " at line " +
                  std::to_string(alloc_line) + " is not released" +
                  (partial ? " on every path" : std::string());
      break;
    case ErrorKind::kPointerOwnershipLost:
      d.kind = DefectKind::kPointerOwnershipLost;
      d.line = m.error_line();
      d.message = "last reference to memory allocated by " + AllocPhrase(m) +
                  " at line " + std::to_string(alloc_line) + " is lost";
      break;
    case ErrorKind::kMismatchedAllocFree: {
      d.kind = DefectKind::kMismatchedAllocFree;
      d.line = m.error_line();
      std::string freed = "free";
      for (const MachineEvent& e : m.trace()) {
        if (e.kind == EventKind::kFree) freed = std::string(FreeFnName(e.free));
      }
      d.message = "memory allocated by " + AllocPhrase(m) + " at line " +
                  std::to_string(alloc_line) + " is released with " + freed;
      break;
    }
    case ErrorKind::kDoubleFree:
      d.kind = DefectKind::kDoubleFree;
      d.line = m.error_line();
      d.message = "memory allocated at line " + std::to_string(alloc_line) +
                  " is released twice";
      break;
  }
  std::istringstream steps(m.RenderTrace());
  for (std::string step; steps >> step;) d.trace.push_back(step);
  return d;
}

PathResult RunPaths(const Program& program, const Cfg& cfg, const Fcg& fcg,
                    const SummaryStore& store, const PatternCatalog& catalog,
                    const AnalysisOptions& options) {
  Engine engine(program, cfg, fcg, store, catalog, options);
  return engine.Run();
}

}  // namespace zkleak

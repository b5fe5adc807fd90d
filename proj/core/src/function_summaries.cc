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

#include "zkleak/function_summaries.h"

#include <algorithm>
#include <deque>
#include <set>

#include "path_analysis.h"

namespace zkleak {

BehaviorAction BehaviorAction::AllocToExtern(AllocFn fn) {
  BehaviorAction a;
  a.kind = ActionKind::kAllocToExtern;
  a.alloc = fn;
  return a;
}

BehaviorAction BehaviorAction::ExternToFree(FreeFn fn, bool flag) {
  BehaviorAction a;
  a.kind = ActionKind::kExternToFree;
  a.free = fn;
  a.flag = flag;
  return a;
}

BehaviorAction BehaviorAction::Unknown() { return BehaviorAction{}; }

std::string BehaviorAction::ToString() const {
  switch (kind) {
    case ActionKind::kAllocToExtern:
      return "AllocToExtern(" + std::string(AllocFnName(alloc)) + ")";
    case ActionKind::kExternToFree:
      return "ExternToFree(" + std::string(FreeFnName(free)) + ", " +
             (flag ? "true" : "false") + ")";
    case ActionKind::kUnknown:
      break;
  }
  return "Unknown";
}

OwnerRef OwnerRef::Param(int index) {
  OwnerRef r;
  r.kind = Kind::kParam;
  r.index = index;
  return r;
}

OwnerRef OwnerRef::ReturnValue() { return OwnerRef{}; }

OwnerRef OwnerRef::Global(VarId var) {
  OwnerRef r;
  r.kind = Kind::kGlobal;
  r.var = var;
  return r;
}

std::string OwnerRef::ToString() const {
  switch (kind) {
    case Kind::kParam: return "Param(" + std::to_string(index) + ")";
    case Kind::kGlobal: return "Global(" + std::to_string(var) + ")";
    case Kind::kReturnValue: break;
  }
  return "ReturnValue";
}

void FunctionSummary::Normalize() {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const SummaryEntry& a, const SummaryEntry& b) {
                              return a.owners == b.owners && a.path == b.path;
                            }),
                entries.end());
}

std::string FunctionSummary::Dump() const {
  std::string out;
  for (const SummaryEntry& e : entries) {
    out += func.ToString();
    out += " | {";
    bool first = true;
    for (const OwnerRef& o : e.owners) {
      if (!first) out += ", ";
      first = false;
      out += o.ToString();
    }
    out += "} | ";
    out += RenderPath(e.path);
    out += " | ";
    out += e.action.ToString();
    out += '\n';
  }
  return out;
}

const FunctionSummary* SummaryStore::Find(const FuncId& id) const {
  auto it = summaries_.find(id);
  return it == summaries_.end() ? nullptr : &it->second;
}

void SummaryStore::Put(FunctionSummary summary) {
  summary.Normalize();
  FuncId id = summary.func;
  summaries_.insert_or_assign(std::move(id), std::move(summary));
}

std::string SummaryStore::Dump() const {
  std::string out;
  for (const auto& [id, s] : summaries_) out += s.Dump();
  return out;
}

namespace {

// Caller variables bound to the owners of an entry. 0 marks an unbound slot.
std::vector<VarId> Bind(const std::set<OwnerRef>& owners, const CallBinding& b,
                        bool include_result) {
  std::vector<VarId> vars;
  for (const OwnerRef& o : owners) {
    switch (o.kind) {
      case OwnerRef::Kind::kParam:
        if (o.index >= 0 && static_cast<std::size_t>(o.index) < b.args.size() &&
            b.args[o.index] != 0) {
          vars.push_back(b.args[o.index]);
        }
        break;
      case OwnerRef::Kind::kGlobal:
        vars.push_back(o.var);
        break;
      case OwnerRef::Kind::kReturnValue:
        if (include_result && b.result != 0) vars.insert(vars.begin(), b.result);
        break;
    }
  }
  return vars;
}

bool HasReturnValue(const SummaryEntry& e) {
  return std::any_of(e.owners.begin(), e.owners.end(), [](const OwnerRef& o) {
    return o.kind == OwnerRef::Kind::kReturnValue;
  });
}

void AllocFor(MachineSet& ms, const std::vector<VarId>& vars, const CallBinding& b,
              int& serial, AllocFn fn) {
  std::vector<VarId> owners;
  for (VarId v : vars) {
    if (v != kHeapSlot && std::find(owners.begin(), owners.end(), v) == owners.end()) {
      owners.push_back(v);
    }
  }
  if (owners.empty()) return;
  ms.Alloc(b.id_base + serial++, b.site, owners.front(), fn);
  for (std::size_t i = 1; i < owners.size(); ++i) {
    ms.Assign(owners[i], owners.front(), b.site.line, false);
  }
}

void ApplyEntries(const std::vector<const SummaryEntry*>& entries, const CallBinding& b,
                  MachineSet& ms, const std::function<bool(VarId)>& is_external) {
  int serial = 0;
  auto ensure = [&](VarId v) {
    if (v > 0 && ms.OwnerOf(v) == nullptr && is_external && is_external(v)) {
      ms.AddExternal(kExternalIdBase + v, b.site, v);
    }
  };
  for (const SummaryEntry* e : entries) {
    switch (e->action.kind) {
      case ActionKind::kExternToFree:
        for (VarId v : Bind(e->owners, b, false)) {
          ensure(v);
          ms.Free(v, e->action.free, b.site);
        }
        break;
      case ActionKind::kUnknown: {
        std::vector<VarId> vars;
        if (e->owners.empty()) {
          for (VarId v : b.args) {
            if (v != 0) vars.push_back(v);
          }
        } else {
          vars = Bind(e->owners, b, false);
        }
        for (VarId v : vars) {
          ensure(v);
          ms.Taint(v, b.site.line);
        }
        break;
      }
      case ActionKind::kAllocToExtern:
        if (!HasReturnValue(*e)) AllocFor(ms, Bind(e->owners, b, false), b, serial, e->action.alloc);
        break;
    }
  }
  if (b.result > 0) ms.Assign(b.result, 0, b.site.line, false);
  for (const SummaryEntry* e : entries) {
    if (e->action.kind == ActionKind::kAllocToExtern && HasReturnValue(*e)) {
      AllocFor(ms, Bind(e->owners, b, true), b, serial, e->action.alloc);
    }
  }
  for (const SummaryEntry* e : entries) {
    if (e->action.kind == ActionKind::kUnknown && HasReturnValue(*e) && b.result != 0) {
      ms.Taint(b.result, b.site.line);
    }
  }
}

std::string JoinGuards(const PathCondition& path) {
  std::string out;
  for (const Guard& g : path) {
    if (!out.empty()) out += ',';
    out += g.text;
    out += ':';
    out += g.arm;
  }
  return out;
}

}  // namespace

std::vector<SummaryOutcome> ApplySummary(const FunctionSummary& summary,
                                         const CallBinding& binding,
                                         const MachineSet& machines,
                                         const std::function<bool(VarId)>& is_external,
                                         std::vector<std::string>* warnings) {
  std::vector<SummaryOutcome> out;
  if (static_cast<int>(binding.args.size()) != summary.func.arity) {
    if (warnings != nullptr) {
      warnings->push_back("arity mismatch calling " + summary.func.ToString() + " with " +
                          std::to_string(binding.args.size()) + " arguments");
    }
    out.push_back({machines, std::nullopt});
    return out;
  }
  std::vector<const SummaryEntry*> always;
  std::map<PathCondition, std::vector<const SummaryEntry*>> conditional;
  for (const SummaryEntry& e : summary.entries) {
    if (e.path.empty()) {
      always.push_back(&e);
    } else {
      conditional[e.path].push_back(&e);
    }
  }
  if (conditional.empty()) {
    SummaryOutcome o{machines, std::nullopt};
    ApplyEntries(always, binding, o.machines, is_external);
    out.push_back(std::move(o));
    return out;
  }
  for (const auto& [path, entries] : conditional) {
    std::vector<const SummaryEntry*> all = always;
    all.insert(all.end(), entries.begin(), entries.end());
    SummaryOutcome o{machines, Guard{binding.callee + ":" + JoinGuards(path), "then"}};
    ApplyEntries(all, binding, o.machines, is_external);
    out.push_back(std::move(o));
  }
  SummaryOutcome rest{machines, Guard{binding.callee, "else"}};
  ApplyEntries(always, binding, rest.machines, is_external);
  out.push_back(std::move(rest));
  return out;
}

FunctionAnalysis AnalyzeFunction(const Program& program, const Cfg& cfg, const Fcg& fcg,
                                 const SummaryStore& store, const PatternCatalog& catalog,
                                 const AnalysisOptions& options) {
  const ScopeTree& tree = program.tree();
  PathResult paths = RunPaths(program, cfg, fcg, store, catalog, options);
  FunctionAnalysis out;
  out.defects = std::move(paths.defects);
  for (const std::string& w : cfg.warnings) out.warnings.push_back(w);
  for (std::string& w : paths.warnings) out.warnings.push_back(std::move(w));
  out.path_insensitive = paths.path_insensitive;
  out.summary.func = cfg.func;

  const int exit_line = cfg.nodes.size() > static_cast<std::size_t>(cfg.exit)
                            ? cfg.nodes[cfg.exit].line
                            : 0;
  auto escapes = [&tree](VarId v) { return Escapes(tree, v); };

  struct Leak {
    int contained = 0;
    int leaking = 0;
    const Variant* first = nullptr;
    Machine sample;
  };
  struct Escape {
    int count = 0;
    const Variant* first = nullptr;
    BehaviorAction action;
  };
  struct Release {
    int contained = 0;
    int freed = 0;
    const Variant* first = nullptr;
    FreeFn fn = FreeFn::kFree;
    std::optional<OwnerRef> owner;
    bool tainted = false;
  };
  std::map<int, Leak> leaks;
  std::map<std::pair<int, std::set<OwnerRef>>, Escape> escapes_by_owner;
  std::map<int, Release> releases;

  for (const Variant& v : paths.exits) {
    for (const Machine& m : v.machines.machines()) {
      if (m.external()) {
        Release& r = releases[m.id()];
        ++r.contained;
        if (!r.owner && !m.trace().empty()) r.owner = InterfaceOwner(tree, m.trace()[0].a);
        if (m.free_record()) {
          if (r.freed++ == 0) {
            r.first = &v;
            r.fn = m.free_record()->fn;
          }
        }
        r.tainted = r.tainted || m.tainted();
        continue;
      }
      Leak& leak = leaks[m.id()];
      ++leak.contained;
      Machine end = m;
      end.OnEnd(EndContext::kFunctionExit, escapes, exit_line);
      if (end.state() == MemState::kError) {
        if (leak.leaking++ == 0) {
          leak.first = &v;
          leak.sample = end;
        }
      }
      if (m.state() == MemState::kAlloced) {
        std::set<OwnerRef> owners;
        for (VarId o : m.alloc().owners) {
          if (auto ref = InterfaceOwner(tree, o)) owners.insert(*ref);
        }
        if (!owners.empty()) {
          Escape& e = escapes_by_owner[{m.id(), owners}];
          if (e.count++ == 0) {
            e.first = &v;
            e.action = m.tainted() ? BehaviorAction::Unknown()
                                   : BehaviorAction::AllocToExtern(m.alloc().fn);
          }
        }
      }
    }
  }

  for (const auto& [id, leak] : leaks) {
    if (leak.leaking == 0) continue;
    const bool partial = leak.leaking < leak.contained;
    PathCondition path;
    if (partial) path = leak.first->path;
    out.defects.push_back(MachineDefect(program, cfg, leak.sample, std::move(path), partial));
  }
  for (const auto& [key, e] : escapes_by_owner) {
    SummaryEntry entry;
    entry.owners = key.second;
    if (e.count < static_cast<int>(paths.exits.size())) entry.path = e.first->path;
    entry.action = e.action;
    out.summary.entries.push_back(std::move(entry));
  }
  for (const auto& [id, r] : releases) {
    if (!r.owner) continue;
    if (r.freed > 0) {
      SummaryEntry entry;
      entry.owners = {*r.owner};
      const bool all = r.freed == r.contained;
      if (!all) entry.path = r.first->path;
      entry.action = BehaviorAction::ExternToFree(r.fn, all);
      out.summary.entries.push_back(std::move(entry));
    } else if (r.tainted) {
      SummaryEntry entry;
      entry.owners = {*r.owner};
      entry.action = BehaviorAction::Unknown();
      out.summary.entries.push_back(std::move(entry));
    }
  }
  out.summary.Normalize();
  return out;
}

FunctionSummary Summarize(const Program& program, const Cfg& cfg, const Fcg& fcg,
                          const SummaryStore& store, const PatternCatalog& catalog,
                          const AnalysisOptions& options) {
  return AnalyzeFunction(program, cfg, fcg, store, catalog, options).summary;
}

FunctionSummary RingSummary(const FuncId& func) {
  FunctionSummary s;
  s.func = func;
  s.entries.push_back(SummaryEntry{{}, {}, BehaviorAction::Unknown()});
  return s;
}

SummaryStore WithRingSummaries(const UpdateResult& update, const Fcg& fcg) {
  SummaryStore store = update.store;
  for (const Ring& ring : update.rings) {
    for (int member : ring.members) store.Put(RingSummary(fcg.nodes()[member].id));
  }
  return store;
}

UpdateResult UpdateAll(const Program& program, const Fcg& fcg,
                       const std::map<FuncId, Cfg>& cfgs, const PatternCatalog& catalog,
                       const AnalysisOptions& options) {
  UpdateResult result;
  result.rings = FindRings(fcg);
  const std::size_t n = fcg.nodes().size();
  std::vector<bool> in_ring(n, false);
  SummaryStore working;
  for (const Ring& ring : result.rings) {
    std::string names;
    for (int member : ring.cycle) {
      if (!names.empty()) names += " -> ";
      names += fcg.nodes()[member].id.ToString();
    }
    names += " -> " + fcg.nodes()[ring.cycle.front()].id.ToString();
    for (int member : ring.members) {
      in_ring[member] = true;
      working.Put(RingSummary(fcg.nodes()[member].id));
    }
    const FcgNode& head = fcg.nodes()[ring.members.front()];
    Defect d;
    d.kind = DefectKind::kRecursiveCallRing;
    d.func = head.id;
    d.file = head.id.file;
    const ScopeNode& scope = program.tree().node(head.scope);
    if (scope.file >= 0 && scope.name_pos != kNoPos) {
      d.file = program.path(scope.file);
      d.line = program.stream(scope.file)[scope.name_pos].line;
    }
    d.message = "recursive call ring " + names + "; members are not summarized";
    result.ring_defects.push_back(std::move(d));
  }

  auto pending = [&](int node) {
    const FcgNode& f = fcg.nodes()[node];
    return !f.external() && !in_ring[node] && cfgs.contains(f.id);
  };
  std::vector<bool> done(n, false);
  auto ready = [&](int node) {
    for (int callee : fcg.Callees(node)) {
      if (callee != node && pending(callee) && !done[callee]) return false;
    }
    return true;
  };
  auto summarize = [&](int node) {
    const FcgNode& f = fcg.nodes()[node];
    const Cfg& cfg = cfgs.at(f.id);
    FunctionAnalysis a = AnalyzeFunction(program, cfg, fcg, working, catalog, options);
    for (std::string& w : a.warnings) {
      result.warnings.push_back(f.id.ToString() + ": " + std::move(w));
    }
    done[node] = true;
    ++result.visits[f.id];
    result.order.push_back(f.id);
    working.Put(a.summary);
    result.store.Put(std::move(a.summary));
  };

  // Leaves first; a function joins the list once all its callees are done.
  std::deque<int> worklist;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending(static_cast<int>(i)) && ready(static_cast<int>(i))) {
      worklist.push_back(static_cast<int>(i));
    }
  }
  while (!worklist.empty()) {
    const int node = worklist.front();
    worklist.pop_front();
    if (done[node] || !ready(node)) continue;
    summarize(node);
    for (int caller : fcg.Callers(node)) {
      if (pending(caller) && !done[caller] && ready(caller)) worklist.push_back(caller);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (pending(static_cast<int>(i)) && !done[i]) summarize(static_cast<int>(i));
  }
  return result;
}

}  // namespace zkleak

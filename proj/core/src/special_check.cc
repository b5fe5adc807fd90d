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

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "statement_events.h"
#include "zkleak/detectors.h"

namespace zkleak {

namespace {

struct MemberAlloc {
  VarId var = 0;
  AllocFn fn = AllocFn::kMalloc;
  int line = 0;
};

struct MemberFree {
  VarId var = 0;
  FreeFn fn = FreeFn::kFree;
};

class ClassRules {
 public:
  ClassRules(const Program& program, const PatternCatalog& catalog)
      : program_(program), tree_(program.tree()), catalog_(catalog) {}

  std::vector<Defect> Run();

 private:
  const EventExtractor& Extractor(FileIndex file);
  const ScopeNode* FunctionAt(const TokenRange& range) const;
  bool IsMember(VarId v) const {
    return v > 0 && static_cast<std::size_t>(v) <= tree_.symbol_count() &&
           tree_.symbol(v).is_member;
  }
  std::vector<MemberAlloc> Allocs(const ScopeNode& fn);
  std::vector<MemberFree> Frees(const ScopeNode& fn);
  // Owning member copied without a fresh allocation.
  std::optional<VarId> CopiedRaw(const ScopeNode& fn, const std::set<VarId>& owning);
  std::vector<const ScopeNode*> Methods(const ClassInfo& info) const;

  void BaseRule(const ClassInfo& info, std::vector<Defect>& out);
  void CtorDtorRule(const ClassInfo& info, std::vector<Defect>& out);
  void CopyRule(const ClassInfo& info, std::vector<Defect>& out);

  const Program& program_;
  const ScopeTree& tree_;
  const PatternCatalog& catalog_;
  std::map<FileIndex, std::unique_ptr<EventExtractor>> extractors_;
  std::map<std::string, const ClassInfo*> by_name_;
};

const EventExtractor& ClassRules::Extractor(FileIndex file) {
  auto& slot = extractors_[file];
  if (!slot) slot = std::make_unique<EventExtractor>(program_.stream(file), tree_, catalog_);
  return *slot;
}

const ScopeNode* ClassRules::FunctionAt(const TokenRange& range) const {
  for (const ScopeNode& n : tree_.nodes()) {
    if (n.kind == ScopeKind::kFunction && n.file == range.file &&
        n.token_begin == range.begin) {
      return &n;
    }
  }
  return nullptr;
}

std::vector<const ScopeNode*> ClassRules::Methods(const ClassInfo& info) const {
  std::vector<const ScopeNode*> out;
  for (const ScopeNode& n : tree_.nodes()) {
    if (n.kind != ScopeKind::kFunction || n.body_open == kNoPos) continue;
    if (n.parent == info.scope || n.class_name == info.name) out.push_back(&n);
  }
  return out;
}

std::vector<MemberAlloc> ClassRules::Allocs(const ScopeNode& fn) {
  std::vector<MemberAlloc> out;
  if (fn.body_open == kNoPos || fn.body_close == kNoPos) return out;
  const TokenStream& ts = program_.stream(fn.file);
  const EventExtractor& ex = Extractor(fn.file);
  for (const StmtEvent& e : ex.Extract(fn.body_open + 1, fn.body_close)) {
    if ((e.kind == StmtEvent::Kind::kAlloc || e.kind == StmtEvent::Kind::kRealloc) &&
        IsMember(e.target)) {
      out.push_back({e.target, e.alloc, e.line});
    }
  }
  // Initializer list: "member ( new T [ n ] )", "member ( malloc ( n ) )".
  if (fn.params_close == kNoPos) return out;
  for (std::size_t i = fn.params_close + 1; i + 1 < fn.body_open; ++i) {
    if (!syntax::IsName(ts[i]) || (ts[i + 1].text != "(" && ts[i + 1].text != "{")) continue;
    const std::size_t close = ex.brackets().Match(i + 1);
    if (close == kNoPos || close > fn.body_open) break;
    VarId var = ts[i].var_id;
    if (var == 0) {
      if (const SymbolEntry* s = tree_.Resolve(ts[i].text, fn.id)) var = s->var_id;
    }
    std::size_t k = i + 2;
    while (k < close && ts[k].text == "(") {
      const std::size_t m = ex.brackets().Match(k);
      if (m == kNoPos || m >= close) break;
      k = m + 1;
    }
    if (IsMember(var) && k < close) {
      const std::string& w = ts[k].text;
      if (w == "new") {
        AllocFn fn_kind = AllocFn::kNew;
        for (std::size_t j = k + 1; j < close; ++j) {
          if (ts[j].text == "[") fn_kind = AllocFn::kNewArray;
          if (ts[j].text == "(" || ts[j].text == "[") break;
        }
        out.push_back({var, fn_kind, ts[k].line});
      } else if (w == "malloc" || w == "calloc" || w == "realloc") {
        out.push_back({var,
                       w == "calloc" ? AllocFn::kCalloc
                       : w == "realloc" ? AllocFn::kRealloc
                                        : AllocFn::kMalloc,
                       ts[k].line});
      }
    }
    i = close;
  }
  return out;
}

std::vector<MemberFree> ClassRules::Frees(const ScopeNode& fn) {
  std::vector<MemberFree> out;
  if (fn.body_open == kNoPos || fn.body_close == kNoPos) return out;
  for (const StmtEvent& e : Extractor(fn.file).Extract(fn.body_open + 1, fn.body_close)) {
    if (e.kind == StmtEvent::Kind::kFree && IsMember(e.target)) {
      out.push_back({e.target, e.free});
    } else if (e.kind == StmtEvent::Kind::kRealloc && IsMember(e.source)) {
      out.push_back({e.source, FreeFn::kFree});
    }
  }
  return out;
}

std::optional<VarId> ClassRules::CopiedRaw(const ScopeNode& fn,
                                           const std::set<VarId>& owning) {
  if (fn.params_close == kNoPos || fn.body_close == kNoPos) return std::nullopt;
  std::set<VarId> fresh;
  for (const MemberAlloc& a : Allocs(fn)) fresh.insert(a.var);
  std::map<std::string, VarId> names;
  for (VarId v : owning) {
    if (!fresh.contains(v)) names.emplace(tree_.symbol(v).name, v);
  }
  const TokenStream& ts = program_.stream(fn.file);
  auto source_is = [&](std::size_t at, const std::string& member) {
    return at + 2 < fn.body_close && syntax::IsName(ts[at]) &&
           (ts[at + 1].text == "." || ts[at + 1].text == "->") &&
           ts[at + 2].text == member;
  };
  for (std::size_t i = fn.params_close + 1; i + 4 < fn.body_close; ++i) {
    auto it = names.find(ts[i].text);
    if (it == names.end()) continue;
    if (i >= 2 && (ts[i - 1].text == "." || ts[i - 1].text == "->") &&
        ts[i - 2].text != "this") {
      continue;
    }
    if ((ts[i + 1].text == "=" || ts[i + 1].text == "(" || ts[i + 1].text == "{") &&
        source_is(i + 2, it->first)) {
      return it->second;
    }
  }
  return std::nullopt;
}

void ClassRules::BaseRule(const ClassInfo& info, std::vector<Defect>& out) {
  for (const std::string& base : info.bases) {
    auto it = by_name_.find(base);
    if (it == by_name_.end()) continue;
    const ClassInfo& b = *it->second;
    if (b.dtor && b.dtor->is_virtual) continue;
    Defect d;
    d.kind = DefectKind::kNonVirtualBaseDtor;
    d.file = program_.path(b.file);
    d.line = b.dtor ? b.dtor->line : b.line;
    d.func = FuncId{d.file, b.name, "~" + b.name, 0};
    d.message = "base class " + b.name + " of " + info.name +
                (b.dtor ? " has a non-virtual destructor" : " declares no destructor");
    out.push_back(std::move(d));
  }
}

void ClassRules::CtorDtorRule(const ClassInfo& info, std::vector<Defect>& out) {
  std::vector<MemberFree> frees;
  if (info.dtor && info.dtor->has_body) {
    if (const ScopeNode* fn = FunctionAt(info.dtor->range)) frees = Frees(*fn);
  }
  std::vector<const SpecialMember*> ctors;
  for (const SpecialMember& c : info.ctors) ctors.push_back(&c);
  if (info.copy_ctor) ctors.push_back(&*info.copy_ctor);
  for (const SpecialMember* c : ctors) {
    if (!c->has_body) continue;
    const ScopeNode* fn = FunctionAt(c->range);
    if (fn == nullptr) continue;
    for (const MemberAlloc& a : Allocs(*fn)) {
      const bool released = std::any_of(frees.begin(), frees.end(), [&](const MemberFree& f) {
        return f.var == a.var && IsCompatible(a.fn, f.fn);
      });
      if (released) continue;
      Defect d;
      d.kind = DefectKind::kCtorDtorMismatch;
      d.file = program_.path(fn->file);
      d.line = a.line;
      d.func = FuncIdOf(program_, fn->id);
      const std::string member = tree_.symbol(a.var).name;
      d.message = "member " + member + " allocated by " + std::string(AllocFnName(a.fn)) +
                  " in a constructor of " + info.name +
                  " is not released by a matching call in the destructor";
      out.push_back(std::move(d));
    }
  }
}

void ClassRules::CopyRule(const ClassInfo& info, std::vector<Defect>& out) {
  std::set<VarId> pointer(info.pointer_members.begin(), info.pointer_members.end());
  std::set<VarId> owning;
  for (const ScopeNode* fn : Methods(info)) {
    for (const MemberAlloc& a : Allocs(*fn)) {
      if (pointer.contains(a.var)) owning.insert(a.var);
    }
  }
  if (owning.empty()) return;
  const std::string file = program_.path(info.file);
  const std::string first = tree_.symbol(*owning.begin()).name;
  auto check = [&](const std::optional<SpecialMember>& m, const std::string& what,
                   const std::string& fname, int arity) {
    Defect d;
    d.kind = DefectKind::kShallowCopy;
    d.file = file;
    if (!m) {
      d.line = info.line;
      d.func = FuncId{file, info.name, "", 0};
      d.message = "class " + info.name + " owns pointer member " + first +
                  " but relies on the implicit " + what;
    } else if (m->deleted) {
      return;
    } else if (m->defaulted) {
      d.line = m->line;
      d.func = FuncId{file, info.name, fname, arity};
      d.message = "defaulted " + what + " of " + info.name + " copies pointer member " + first;
    } else if (!m->has_body) {
      return;
    } else {
      const ScopeNode* fn = FunctionAt(m->range);
      if (fn == nullptr) return;
      auto raw = CopiedRaw(*fn, owning);
      if (!raw) return;
      d.line = m->line;
      d.func = FuncIdOf(program_, fn->id);
      d.message = what + " of " + info.name + " copies pointer member " +
                  tree_.symbol(*raw).name + " without reallocating";
    }
    out.push_back(std::move(d));
  };
  check(info.copy_ctor, "copy constructor", info.name, 1);
  check(info.assign_op, "copy assignment", "operator=", 1);
}

std::vector<Defect> ClassRules::Run() {
  for (const ClassInfo& c : program_.classes()) by_name_.emplace(c.name, &c);
  std::vector<Defect> out;
  for (const ClassInfo& c : program_.classes()) {
    BaseRule(c, out);
    CtorDtorRule(c, out);
    CopyRule(c, out);
  }
  return NormalizeDefects(std::move(out));
}

}  // namespace

std::vector<Defect> SpecialCheck(const Program& program, const PatternCatalog& catalog) {
  ClassRules rules(program, catalog);
  return rules.Run();
}

}  // namespace zkleak

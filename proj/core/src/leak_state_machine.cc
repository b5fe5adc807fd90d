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

#include "zkleak/leak_state_machine.h"

#include <algorithm>
#include <cassert>

namespace zkleak {

std::string_view MemStateName(MemState s) {
  switch (s) {
    case MemState::kStart: return "Start";
    case MemState::kAlloced: return "Alloced";
    case MemState::kFreed: return "Freed";
    case MemState::kEnd: return "End";
    case MemState::kError: return "Error";
  }
  return "?";
}

std::string_view ErrorKindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::kNone: return "None";
    case ErrorKind::kMissingRelease: return "MissingRelease";
    case ErrorKind::kPointerOwnershipLost: return "PointerOwnershipLost";
    case ErrorKind::kMismatchedAllocFree: return "MismatchedAllocFree";
    case ErrorKind::kDoubleFree: return "DoubleFree";
  }
  return "?";
}

std::string_view AllocFnName(AllocFn f) {
  switch (f) {
    case AllocFn::kMalloc: return "malloc";
    case AllocFn::kCalloc: return "calloc";
    case AllocFn::kRealloc: return "realloc";
    case AllocFn::kNew: return "new";
    case AllocFn::kNewArray: return "new[]";
    case AllocFn::kExternal: return "external";
  }
  return "?";
}

std::string_view FreeFnName(FreeFn f) {
  switch (f) {
    case FreeFn::kFree: return "free";
    case FreeFn::kDelete: return "delete";
    case FreeFn::kDeleteArray: return "delete[]";
  }
  return "?";
}

std::optional<AllocFn> AllocFnFromName(std::string_view name) {
  for (AllocFn f : {AllocFn::kMalloc, AllocFn::kCalloc, AllocFn::kRealloc,
                    AllocFn::kNew, AllocFn::kNewArray, AllocFn::kExternal}) {
    if (AllocFnName(f) == name) return f;
  }
  return std::nullopt;
}

std::optional<FreeFn> FreeFnFromName(std::string_view name) {
  for (FreeFn f : {FreeFn::kFree, FreeFn::kDelete, FreeFn::kDeleteArray}) {
    if (FreeFnName(f) == name) return f;
  }
  return std::nullopt;
}

bool IsCompatible(AllocFn alloc, FreeFn free) {
  switch (alloc) {
    case AllocFn::kMalloc:
    case AllocFn::kCalloc:
    case AllocFn::kRealloc:
      return free == FreeFn::kFree;
    case AllocFn::kNew:
      return free == FreeFn::kDelete;
    case AllocFn::kNewArray:
      return free == FreeFn::kDeleteArray;
    case AllocFn::kExternal:
      return true;
  }
  return false;
}

std::string_view EventKindName(EventKind k) {
  switch (k) {
    case EventKind::kAlloc: return "alloc";
    case EventKind::kAssign: return "assign";
    case EventKind::kScopeEnd: return "scope_end";
    case EventKind::kPtrArith: return "ptr_arith";
    case EventKind::kNullAssign: return "null";
    case EventKind::kReturn: return "return";
    case EventKind::kFree: return "free";
    case EventKind::kTaint: return "taint";
    case EventKind::kEnd: return "end";
  }
  return "?";
}

Machine Machine::Alloc(int id, Site site, VarId owner, AllocFn fn) {
  Machine m;
  m.id_ = id;
  MachineEvent e;
  e.kind = EventKind::kAlloc;
  e.line = site.line;
  e.file = site.file;
  e.a = owner;
  e.alloc = fn;
  m.Apply(e);
  return m;
}

Machine Machine::External(int id, Site site, VarId owner) {
  return Alloc(id, site, owner, AllocFn::kExternal);
}

void Machine::OnAssign(VarId p, VarId q, int line, bool strict) {
  MachineEvent e;
  e.kind = EventKind::kAssign;
  e.line = line;
  e.a = p;
  e.b = q;
  e.strict = strict;
  Apply(e);
}

void Machine::OnScopeEnd(const std::vector<VarId>& vars, int line) {
  MachineEvent e;
  e.kind = EventKind::kScopeEnd;
  e.line = line;
  e.vars = vars;
  Apply(e);
}

void Machine::OnPtrArith(VarId v, int line) {
  MachineEvent e;
  e.kind = EventKind::kPtrArith;
  e.line = line;
  e.a = v;
  Apply(e);
}

void Machine::OnNullAssign(VarId v, int line) {
  MachineEvent e;
  e.kind = EventKind::kNullAssign;
  e.line = line;
  e.a = v;
  Apply(e);
}

void Machine::OnReturn(VarId v, int line) {
  MachineEvent e;
  e.kind = EventKind::kReturn;
  e.line = line;
  e.a = v;
  Apply(e);
}

void Machine::OnFree(VarId v, FreeFn fn, Site site) {
  MachineEvent e;
  e.kind = EventKind::kFree;
  e.line = site.line;
  e.file = site.file;
  e.a = v;
  e.free = fn;
  Apply(e);
}

void Machine::Taint(int line) {
  MachineEvent e;
  e.kind = EventKind::kTaint;
  e.line = line;
  Apply(e);
}

MemState Machine::OnEnd(EndContext context, const std::function<bool(VarId)>& escapes,
                        int line) {
  MachineEvent e;
  e.kind = EventKind::kEnd;
  e.line = line;
  e.context = context;
  for (VarId v : alloc_.owners) {
    if (escapes && escapes(v)) e.escaping.push_back(v);
  }
  Apply(e);
  return state_;
}

Machine Machine::Replay(int id, const std::vector<MachineEvent>& trace) {
  Machine m;
  m.id_ = id;
  for (const MachineEvent& e : trace) m.Apply(e);
  return m;
}

void Machine::RemoveOwners(const std::vector<VarId>& vars) {
  for (VarId v : vars) alloc_.owners.erase(v);
}

void Machine::Fail(ErrorKind kind, int line) {
  state_ = MemState::kError;
  error_ = kind;
  error_line_ = line;
}

void Machine::Apply(const MachineEvent& in) {
  if (in.kind == EventKind::kAlloc) {
    if (state_ != MemState::kStart) return;
  } else if (!live()) {
    return;
  }
  MachineEvent e = in;
  bool check_empty = false;
  switch (e.kind) {
    case EventKind::kAlloc:
      state_ = MemState::kAlloced;
      alloc_.owners = {e.a};
      alloc_.fn = e.alloc;
      alloc_.site = {e.file, e.line};
      free_.reset();
      break;
    case EventKind::kAssign: {
      const VarId p = e.a;
      const VarId q = e.b;
      if (p == q) break;
      if (e.strict) {
        if (q != 0 && Owns(q) && !Owns(p)) alloc_.owners.erase(q);
      } else if (q != 0 && Owns(q)) {
        alloc_.owners.insert(p);
      } else {
        alloc_.owners.erase(p);
      }
      check_empty = true;
      break;
    }
    case EventKind::kScopeEnd:
      RemoveOwners(e.vars);
      check_empty = true;
      break;
    case EventKind::kPtrArith:
    case EventKind::kNullAssign:
      alloc_.owners.erase(e.a);
      check_empty = true;
      break;
    case EventKind::kReturn:
      if (Owns(e.a)) {
        alloc_.owners.erase(e.a);
        alloc_.owners.insert(kReturnSlot);
      }
      break;
    case EventKind::kFree:
      if (state_ == MemState::kFreed && free_ && free_->record) {
        Fail(ErrorKind::kDoubleFree, e.line);
      } else if (!IsCompatible(alloc_.fn, e.free)) {
        free_ = FreeRecord{e.free, true, {e.file, e.line}};
        Fail(ErrorKind::kMismatchedAllocFree, e.line);
      } else {
        state_ = MemState::kFreed;
        free_ = FreeRecord{e.free, true, {e.file, e.line}};
      }
      break;
    case EventKind::kTaint:
      tainted_ = true;
      break;
    case EventKind::kEnd:
      if (state_ == MemState::kFreed) {
        state_ = MemState::kEnd;
      } else if (state_ == MemState::kAlloced && !tainted_ && !external()) {
        const bool escaped = e.context == EndContext::kFunctionExit &&
                             !e.escaping.empty();
        if (!escaped) Fail(ErrorKind::kMissingRelease, e.line);
      }
      break;
  }
  if (check_empty && alloc_.owners.empty()) {
    if (state_ == MemState::kAlloced && !external()) {
      Fail(ErrorKind::kPointerOwnershipLost, e.line);
    } else if (state_ == MemState::kFreed) {
      state_ = MemState::kEnd;
    }
  }
  e.state_after = state_;
  trace_.push_back(std::move(e));
}

std::string Machine::RenderTrace() const {
  std::string out;
  for (const MachineEvent& e : trace_) {
    if (!out.empty()) out += ' ';
    out += std::to_string(e.line);
    out += ':';
    out += EventKindName(e.kind);
    out += ':';
    out += MemStateName(e.state_after);
  }
  return out;
}

bool Machine::SameState(const Machine& other) const {
  return id_ == other.id_ && state_ == other.state_ && error_ == other.error_ &&
         alloc_ == other.alloc_ && free_ == other.free_ && tainted_ == other.tainted_;
}

int MachineSet::Alloc(int id, Site site, VarId owner, AllocFn fn) {
  for (Machine& m : machines_) {
    if (m.Owns(owner)) m.OnAssign(owner, 0, site.line);
  }
  while (Contains(id)) id += 1 << 24;
  Machine m = Machine::Alloc(id, site, owner, fn);
  auto pos = std::lower_bound(machines_.begin(), machines_.end(), id,
                              [](const Machine& a, int b) { return a.id() < b; });
  machines_.insert(pos, std::move(m));
  return id;
}

int MachineSet::AddExternal(int id, Site site, VarId owner) {
  while (Contains(id)) id += 1 << 24;
  Machine m = Machine::External(id, site, owner);
  auto pos = std::lower_bound(machines_.begin(), machines_.end(), id,
                              [](const Machine& a, int b) { return a.id() < b; });
  machines_.insert(pos, std::move(m));
  return id;
}

bool MachineSet::Contains(int id) const {
  return std::any_of(machines_.begin(), machines_.end(),
                     [id](const Machine& m) { return m.id() == id; });
}

Machine* MachineSet::Find(int id) {
  for (Machine& m : machines_) {
    if (m.id() == id) return &m;
  }
  return nullptr;
}

Machine* MachineSet::OwnerOf(VarId v) {
  for (Machine& m : machines_) {
    if (m.live() && m.Owns(v)) return &m;
  }
  return nullptr;
}

void MachineSet::Assign(VarId p, VarId q, int line, bool strict) {
  for (Machine& m : machines_) {
    if (m.Owns(p) || (q != 0 && m.Owns(q))) m.OnAssign(p, q, line, strict);
  }
}

void MachineSet::PtrArith(VarId v, int line) {
  for (Machine& m : machines_) {
    if (m.Owns(v)) m.OnPtrArith(v, line);
  }
}

void MachineSet::NullAssign(VarId v, int line) {
  for (Machine& m : machines_) {
    if (m.Owns(v)) m.OnNullAssign(v, line);
  }
}

void MachineSet::Return(VarId v, int line) {
  for (Machine& m : machines_) {
    if (m.Owns(v)) m.OnReturn(v, line);
  }
}

bool MachineSet::Free(VarId v, FreeFn fn, Site site) {
  Machine* m = OwnerOf(v);
  if (m == nullptr) return false;
  m->OnFree(v, fn, site);
  return true;
}

void MachineSet::Taint(VarId v, int line) {
  for (Machine& m : machines_) {
    if (m.Owns(v)) m.Taint(line);
  }
}

void MachineSet::Remove(int id) {
  machines_.erase(std::remove_if(machines_.begin(), machines_.end(),
                                 [id](const Machine& m) { return m.id() == id; }),
                  machines_.end());
}

std::vector<Machine> MachineSet::TakeFailed() {
  std::vector<Machine> failed;
  auto it = std::stable_partition(machines_.begin(), machines_.end(), [](const Machine& m) {
    return m.state() != MemState::kError;
  });
  failed.assign(std::make_move_iterator(it), std::make_move_iterator(machines_.end()));
  machines_.erase(it, machines_.end());
  return failed;
}

bool MachineSet::SameState(const MachineSet& other) const {
  if (machines_.size() != other.machines_.size()) return false;
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    if (!machines_[i].SameState(other.machines_[i])) return false;
  }
  return true;
}

}  // namespace zkleak

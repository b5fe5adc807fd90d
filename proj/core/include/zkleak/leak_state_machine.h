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

#ifndef ZKLEAK_LEAK_STATE_MACHINE_H_
#define ZKLEAK_LEAK_STATE_MACHINE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zkleak/token_stream.h"

namespace zkleak {

enum class MemState : std::uint8_t { kStart, kAlloced, kFreed, kEnd, kError };

enum class ErrorKind : std::uint8_t {
  kNone,
  kMissingRelease,
  kPointerOwnershipLost,
  kMismatchedAllocFree,
  kDoubleFree,
};

// kExternal marks memory that entered the function from outside (a pointer
// parameter or global); it is compatible with every release function.
enum class AllocFn : std::uint8_t { kMalloc, kCalloc, kRealloc, kNew, kNewArray, kExternal };
enum class FreeFn : std::uint8_t { kFree, kDelete, kDeleteArray };

std::string_view MemStateName(MemState s);
std::string_view ErrorKindName(ErrorKind k);
std::string_view AllocFnName(AllocFn f);  // "malloc", ..., "new[]"
std::string_view FreeFnName(FreeFn f);    // "free", "delete", "delete[]"
std::optional<AllocFn> AllocFnFromName(std::string_view name);
std::optional<FreeFn> FreeFnFromName(std::string_view name);

// {malloc, calloc, realloc} pair with free, new with delete, new[] with delete[].
bool IsCompatible(AllocFn alloc, FreeFn free);

// Owners that are not program variables.
inline constexpr VarId kReturnSlot = -1;  // value returned from the function
inline constexpr VarId kHeapSlot = -2;    // stored into a member, field or element
inline constexpr VarId kTempSlot = -3;    // unnamed call result

struct Site {
  FileIndex file = 0;
  int line = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

struct AllocRecord {
  std::set<VarId> owners;
  AllocFn fn = AllocFn::kMalloc;
  Site site;
  friend bool operator==(const AllocRecord&, const AllocRecord&) = default;
};

struct FreeRecord {
  FreeFn fn = FreeFn::kFree;
  bool record = false;
  Site site;
  friend bool operator==(const FreeRecord&, const FreeRecord&) = default;
};

enum class EndContext : std::uint8_t { kFunctionExit, kProgramEnd };

enum class EventKind : std::uint8_t {
  kAlloc,
  kAssign,     // p = q; q == 0 is an overwrite with a non-owning value
  kScopeEnd,
  kPtrArith,
  kNullAssign,
  kReturn,
  kFree,
  kTaint,
  kEnd,
};

std::string_view EventKindName(EventKind k);

// One replayable step of a machine's history.
struct MachineEvent {
  EventKind kind = EventKind::kAlloc;
  int line = 0;
  VarId a = 0;               // owner / p / freed var / returned var
  VarId b = 0;               // q for kAssign
  std::vector<VarId> vars;   // kScopeEnd set
  AllocFn alloc = AllocFn::kMalloc;
  FreeFn free = FreeFn::kFree;
  FileIndex file = 0;
  bool strict = false;       // kAssign under the literal table
  EndContext context = EndContext::kFunctionExit;
  std::vector<VarId> escaping;  // kEnd: owners that outlive the function
  MemState state_after = MemState::kStart;

  friend bool operator==(const MachineEvent&, const MachineEvent&) = default;
};

// Per-allocation automaton. Transitions are limited to Start->Alloced,
// Alloced->Alloced, Alloced->Freed, Freed->Freed, Freed->End, Alloced->Error
// and Freed->Error.
class Machine {
 public:
  Machine() = default;

  // Start -> Alloced.
  static Machine Alloc(int id, Site site, VarId owner, AllocFn fn);
  // Placeholder for memory owned by |owner| on entry (parameter or global).
  static Machine External(int id, Site site, VarId owner);

  int id() const { return id_; }
  MemState state() const { return state_; }
  ErrorKind error() const { return error_; }
  const AllocRecord& alloc() const { return alloc_; }
  const std::optional<FreeRecord>& free_record() const { return free_; }
  bool tainted() const { return tainted_; }
  bool external() const { return alloc_.fn == AllocFn::kExternal; }
  bool live() const { return state_ == MemState::kAlloced || state_ == MemState::kFreed; }
  bool Owns(VarId v) const { return alloc_.owners.contains(v); }
  const std::vector<MachineEvent>& trace() const { return trace_; }
  // Line of the event that moved the machine into Error.
  int error_line() const { return error_line_; }

  // Under the default rule p joins the owners when q owns, and leaves them
  // otherwise. |strict| applies the literal table: q leaves when p does not own.
  void OnAssign(VarId p, VarId q, int line, bool strict = false);
  void OnScopeEnd(const std::vector<VarId>& vars, int line);
  void OnPtrArith(VarId v, int line);
  void OnNullAssign(VarId v, int line);
  // |v| hands the memory to the caller.
  void OnReturn(VarId v, int line);
  void OnFree(VarId v, FreeFn fn, Site site);
  void Taint(int line);
  // |escapes| tells whether an owner outlives the function.
  MemState OnEnd(EndContext context, const std::function<bool(VarId)>& escapes,
                 int line);

  // Replays |trace| from Start.
  static Machine Replay(int id, const std::vector<MachineEvent>& trace);

  // "line:event:state" steps joined by spaces.
  std::string RenderTrace() const;

  // Equality of observable state (trace excluded).
  bool SameState(const Machine& other) const;

 private:
  void Apply(const MachineEvent& e);
  void RemoveOwners(const std::vector<VarId>& vars);
  void Fail(ErrorKind kind, int line);

  int id_ = 0;
  MemState state_ = MemState::kStart;
  ErrorKind error_ = ErrorKind::kNone;
  AllocRecord alloc_;
  std::optional<FreeRecord> free_;
  bool tainted_ = false;
  int error_line_ = 0;
  std::vector<MachineEvent> trace_;
};

// Live machines of one analysis path. Machine ids are unique within a set.
class MachineSet {
 public:
  const std::vector<Machine>& machines() const { return machines_; }
  std::vector<Machine>& mutable_machines() { return machines_; }
  bool empty() const { return machines_.empty(); }

  // Starts a machine owned by |owner|; |owner| first leaves every other
  // machine. A taken id is bumped to the next free one. Returns the id.
  int Alloc(int id, Site site, VarId owner, AllocFn fn);
  int AddExternal(int id, Site site, VarId owner);
  bool Contains(int id) const;
  Machine* Find(int id);
  // Machine that |v| currently owns, if any.
  Machine* OwnerOf(VarId v);

  void Assign(VarId p, VarId q, int line, bool strict);
  void PtrArith(VarId v, int line);
  void NullAssign(VarId v, int line);
  void Return(VarId v, int line);
  // False when no machine is owned by |v|.
  bool Free(VarId v, FreeFn fn, Site site);
  void Taint(VarId v, int line);
  void Remove(int id);

  // Removes and returns machines that reached Error.
  std::vector<Machine> TakeFailed();

  // Same ids with the same observable state.
  bool SameState(const MachineSet& other) const;

 private:
  std::vector<Machine> machines_;  // sorted by id
};

}  // namespace zkleak

#endif  // ZKLEAK_LEAK_STATE_MACHINE_H_

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
#include <deque>
#include <sstream>

#include "syntax.h"
#include "zkleak/program_graphs.h"

namespace zkleak {

std::string FuncId::ToString() const {
  std::string out = file;
  out += "::";
  if (!class_name.empty()) {
    out += class_name;
    out += "::";
  }
  out += name;
  out += '/';
  out += std::to_string(arity);
  return out;
}

FuncId FuncIdOf(const Program& program, ScopeId function_scope) {
  const ScopeNode& n = program.tree().node(function_scope);
  FuncId id;
  id.file = program.path(n.file);
  id.class_name = n.class_name;
  id.name = n.name;
  id.arity = n.arity;
  return id;
}

std::string_view CfgNodeKindName(CfgNodeKind kind) {
  switch (kind) {
    case CfgNodeKind::kEntry: return "Entry";
    case CfgNodeKind::kExit: return "Exit";
    case CfgNodeKind::kStatement: return "Statement";
    case CfgNodeKind::kBranch: return "Branch";
    case CfgNodeKind::kJoin: return "Join";
    case CfgNodeKind::kLoopHead: return "LoopHead";
    case CfgNodeKind::kReturn: return "Return";
  }
  return "?";
}

std::size_t Cfg::EdgeCount() const {
  std::size_t n = 0;
  for (const CfgNode& node : nodes) n += node.succs.size();
  return n;
}

std::string Cfg::NodeText(const TokenStream& ts, int node) const {
  const CfgNode& n = nodes.at(node);
  if (n.begin == kNoPos || n.end == kNoPos || n.begin >= n.end) return {};
  return ts.Text(n.begin, n.end);
}

std::string Cfg::Dump() const {
  std::ostringstream out;
  for (const CfgNode& n : nodes) {
    out << n.id << ' ' << CfgNodeKindName(n.kind) << ' ' << n.line << " ->";
    for (const CfgEdge& e : n.succs) out << ' ' << e.to;
    out << '\n';
  }
  return out.str();
}

namespace {

struct Pending {
  int from;
  std::string arm;
};
using Frontier = std::vector<Pending>;

class CfgBuilder {
 public:
  CfgBuilder(const TokenStream& ts, Cfg& cfg) : ts_(ts), br_(ts), cfg_(cfg) {}

  void Build(const ScopeNode& fn) {
    const int exit_line = fn.body_close != kNoPos ? ts_[fn.body_close].line
                                                  : ts_.tail()->line;
    cfg_.entry = NewNode(CfgNodeKind::kEntry, kNoPos, kNoPos,
                         ts_[fn.body_open].line);
    cfg_.exit = NewNode(CfgNodeKind::kExit, kNoPos, kNoPos, exit_line);
    const std::size_t begin = fn.body_open + 1;
    const std::size_t end = fn.body_close != kNoPos ? fn.body_close : ts_.size();
    Frontier f{{cfg_.entry, ""}};
    if (HasGotoOrLabel(begin, end)) {
      cfg_.degraded = true;
      cfg_.warnings.push_back("goto/label in '" + fn.name +
                              "': analyzed as a linear chain");
      Linear(begin, end, f);
    } else {
      Sequence(begin, end, f);
    }
    Connect(f, cfg_.exit);
    MarkUnreachable();
  }

 private:
  struct Context {
    bool is_switch = false;
    Frontier breaks;
    Frontier continues;
  };

  int NewNode(CfgNodeKind kind, std::size_t begin, std::size_t end, int line) {
    CfgNode n;
    n.id = static_cast<int>(cfg_.nodes.size());
    n.kind = kind;
    n.begin = begin;
    n.end = end;
    n.line = line;
    cfg_.nodes.push_back(std::move(n));
    return cfg_.nodes.back().id;
  }

  void AddEdge(int from, int to, const std::string& arm) {
    CfgNode& a = cfg_.nodes[from];
    for (const CfgEdge& e : a.succs) {
      if (e.to == to && e.arm == arm) return;
    }
    a.succs.push_back({to, arm});
    auto& preds = cfg_.nodes[to].preds;
    if (std::find(preds.begin(), preds.end(), from) == preds.end()) {
      preds.push_back(from);
    }
  }

  void Connect(const Frontier& f, int to) {
    for (const Pending& p : f) AddEdge(p.from, to, p.arm);
  }

  static void Append(Frontier& into, const Frontier& from) {
    into.insert(into.end(), from.begin(), from.end());
  }

  std::size_t Match(std::size_t pos) const { return br_.Match(pos); }

  bool HasGotoOrLabel(std::size_t begin, std::size_t end) const {
    for (std::size_t i = begin; i < end; ++i) {
      const LexToken& t = ts_[i];
      if (t.text == "goto" && t.kind == TokenKind::kKeyword) return true;
      if (syntax::IsName(t) && i + 1 < end && ts_[i + 1].text == ":" && i > 0) {
        const std::string& prev = ts_[i - 1].text;
        if (prev == ";" || prev == "{" || prev == "}") return true;
      }
    }
    return false;
  }

  // Position of the statement-ending ';' (groups skipped), or |end|.
  std::size_t StatementEnd(std::size_t i, std::size_t end) const {
    for (; i < end; ++i) {
      const std::string& s = ts_[i].text;
      if (s == ";") return i;
      if (s == "(" || s == "[" || s == "{") {
        const std::size_t m = Match(i);
        if (m == kNoPos || m >= end) return end;
        i = m;
      }
    }
    return end;
  }

  void Linear(std::size_t begin, std::size_t end, Frontier& f) {
    std::size_t start = begin;
    for (std::size_t i = begin; i <= end; ++i) {
      const bool boundary =
          i == end || ts_[i].text == ";" || ts_[i].text == "{" || ts_[i].text == "}";
      if (!boundary) continue;
      if (i > start) {
        const int s = NewNode(CfgNodeKind::kStatement, start, i, ts_[start].line);
        Connect(f, s);
        f = {{s, ""}};
      }
      start = i + 1;
    }
  }

  void Sequence(std::size_t begin, std::size_t end, Frontier& f) {
    std::size_t i = begin;
    while (i < end) i = Statement(i, end, f);
  }

  // Parses an arm and inserts an empty node when it produced none.
  void Arm(std::size_t& i, std::size_t end, Frontier& f, int branch,
           const std::string& arm, int line) {
    const Frontier before = f;
    if (i < end) i = Statement(i, end, f);
    const bool untouched = f.size() == 1 && before.size() == 1 &&
                           f[0].from == branch && f[0].arm == arm;
    if (untouched) {
      const int s = NewNode(CfgNodeKind::kStatement, kNoPos, kNoPos, line);
      Connect(f, s);
      f = {{s, ""}};
    }
  }

  std::size_t Statement(std::size_t i, std::size_t end, Frontier& f) {
    const LexToken& t = ts_[i];
    const std::string& s = t.text;
    if (s == "{") {
      const std::size_t m = Match(i);
      const std::size_t close = (m == kNoPos || m > end) ? end : m;
      Sequence(i + 1, close, f);
      return close + 1;
    }
    if (s == ";") return i + 1;
    if (t.kind == TokenKind::kKeyword) {
      if (s == "if") return If(i, end, f);
      if (s == "while") return While(i, end, f);
      if (s == "for") return For(i, end, f);
      if (s == "do") return Do(i, end, f);
      if (s == "switch") return Switch(i, end, f);
      if (s == "try") return Try(i, end, f);
      if (s == "return" || s == "co_return") {
        const std::size_t e = StatementEnd(i, end);
        const int r = NewNode(CfgNodeKind::kReturn, i, e, t.line);
        Connect(f, r);
        AddEdge(r, cfg_.exit, "");
        f.clear();
        return e + 1;
      }
      if (s == "break" || s == "continue") {
        const std::size_t e = StatementEnd(i, end);
        for (auto it = contexts_.rbegin(); it != contexts_.rend(); ++it) {
          if (s == "break") {
            Append(it->breaks, f);
            break;
          }
          if (!it->is_switch) {
            Append(it->continues, f);
            break;
          }
        }
        f.clear();
        return e + 1;
      }
      if (s == "case" || s == "default") {
        // Outside a switch body: skip the label.
        std::size_t j = i + 1;
        while (j < end && ts_[j].text != ":") ++j;
        return j + 1;
      }
      if (s == "else") return i + 1;
    }
    const std::size_t e = StatementEnd(i, end);
    const int n = NewNode(CfgNodeKind::kStatement, i, e, t.line);
    Connect(f, n);
    f = {{n, ""}};
    return e + 1;
  }

  // Returns the '(' after a control keyword, skipping "constexpr".
  std::size_t HeaderOpen(std::size_t kw, std::size_t end) const {
    std::size_t open = kw + 1;
    if (open < end && ts_[open].text == "constexpr") ++open;
    return open;
  }

  std::size_t If(std::size_t i, std::size_t end, Frontier& f) {
    const std::size_t open = HeaderOpen(i, end);
    const std::size_t close = open < end ? Match(open) : kNoPos;
    if (close == kNoPos || close >= end) return Fallback(i, end, f);
    const int line = ts_[i].line;
    const int b = NewNode(CfgNodeKind::kBranch, open + 1, close, line);
    Connect(f, b);
    Frontier then_f{{b, "then"}};
    std::size_t j = close + 1;
    Arm(j, end, then_f, b, "then", line);
    Frontier else_f{{b, "else"}};
    if (j < end && ts_[j].text == "else") {
      ++j;
      Arm(j, end, else_f, b, "else", ts_[j - 1].line);
    }
    Frontier exits = then_f;
    Append(exits, else_f);
    if (exits.empty()) {
      f.clear();
    } else {
      const int join = NewNode(CfgNodeKind::kJoin, kNoPos, kNoPos,
                               ts_[std::min(j, end) - 1].line);
      Connect(exits, join);
      f = {{join, ""}};
    }
    return j;
  }

  std::size_t While(std::size_t i, std::size_t end, Frontier& f) {
    const std::size_t open = i + 1;
    const std::size_t close = open < end ? Match(open) : kNoPos;
    if (close == kNoPos || close >= end) return Fallback(i, end, f);
    const int head = NewNode(CfgNodeKind::kLoopHead, open + 1, close, ts_[i].line);
    Connect(f, head);
    contexts_.push_back({});
    Frontier body{{head, "loop"}};
    std::size_t j = close + 1;
    Arm(j, end, body, head, "loop", ts_[i].line);
    Context ctx = std::move(contexts_.back());
    contexts_.pop_back();
    Connect(body, head);
    Connect(ctx.continues, head);
    f = {{head, "else"}};
    Append(f, ctx.breaks);
    return j;
  }

  std::size_t For(std::size_t i, std::size_t end, Frontier& f) {
    const std::size_t open = i + 1;
    const std::size_t close = open < end ? Match(open) : kNoPos;
    if (close == kNoPos || close >= end) return Fallback(i, end, f);
    const int line = ts_[i].line;
    const auto parts = syntax::SplitTopLevel(ts_, br_, open + 1, close, ";");
    std::size_t cond_b = open + 1;
    std::size_t cond_e = close;
    std::size_t inc_b = kNoPos;
    std::size_t inc_e = kNoPos;
    if (parts.size() == 3) {
      if (parts[0].second > parts[0].first) {
        const int init = NewNode(CfgNodeKind::kStatement, parts[0].first,
                                 parts[0].second, ts_[parts[0].first].line);
        Connect(f, init);
        f = {{init, ""}};
      }
      cond_b = parts[1].first;
      cond_e = parts[1].second;
      inc_b = parts[2].first;
      inc_e = parts[2].second;
    }
    const int head = NewNode(CfgNodeKind::kLoopHead, cond_b, cond_e, line);
    Connect(f, head);
    contexts_.push_back({});
    Frontier body{{head, "loop"}};
    std::size_t j = close + 1;
    Arm(j, end, body, head, "loop", line);
    Context ctx = std::move(contexts_.back());
    contexts_.pop_back();
    Append(body, ctx.continues);
    if (inc_b != kNoPos && inc_e > inc_b) {
      const int inc = NewNode(CfgNodeKind::kStatement, inc_b, inc_e, ts_[inc_b].line);
      Connect(body, inc);
      AddEdge(inc, head, "");
    } else {
      Connect(body, head);
    }
    f = {{head, "else"}};
    Append(f, ctx.breaks);
    return j;
  }

  std::size_t Do(std::size_t i, std::size_t end, Frontier& f) {
    const std::size_t first_new = cfg_.nodes.size();
    contexts_.push_back({});
    std::size_t j = i + 1;
    Frontier body = f;
    if (j < end) j = Statement(j, end, body);
    int body_entry;
    if (cfg_.nodes.size() > first_new) {
      body_entry = static_cast<int>(first_new);
    } else {
      body_entry = NewNode(CfgNodeKind::kStatement, kNoPos, kNoPos, ts_[i].line);
      Connect(body, body_entry);
      body = {{body_entry, ""}};
    }
    Context ctx = std::move(contexts_.back());
    contexts_.pop_back();
    if (j >= end || ts_[j].text != "while") {
      f = body;
      Append(f, ctx.breaks);
      return j;
    }
    const std::size_t open = j + 1;
    const std::size_t close = open < end ? Match(open) : kNoPos;
    if (close == kNoPos || close >= end) return Fallback(j, end, f);
    const int head = NewNode(CfgNodeKind::kLoopHead, open + 1, close, ts_[j].line);
    Connect(body, head);
    Connect(ctx.continues, head);
    AddEdge(head, body_entry, "loop");
    f = {{head, "else"}};
    Append(f, ctx.breaks);
    std::size_t k = close + 1;
    if (k < end && ts_[k].text == ";") ++k;
    return k;
  }

  std::size_t Switch(std::size_t i, std::size_t end, Frontier& f) {
    const std::size_t open = i + 1;
    const std::size_t close = open < end ? Match(open) : kNoPos;
    if (close == kNoPos || close >= end) return Fallback(i, end, f);
    const int branch = NewNode(CfgNodeKind::kBranch, open + 1, close, ts_[i].line);
    Connect(f, branch);
    std::size_t j = close + 1;
    if (j >= end || ts_[j].text != "{") {
      f = {{branch, "default"}};
      return j;
    }
    const std::size_t body_close = std::min(Match(j) == kNoPos ? end : Match(j), end);
    contexts_.push_back({true, {}, {}});
    Frontier cur;
    bool has_default = false;
    std::size_t k = j + 1;
    while (k < body_close) {
      const std::string& s = ts_[k].text;
      if (s == "case" || s == "default") {
        std::size_t colon = k + 1;
        while (colon < body_close && ts_[colon].text != ":") ++colon;
        std::string arm = "default";
        if (s == "case") {
          arm = "case:";
          for (std::size_t q = k + 1; q < colon; ++q) arm += ts_[q].text;
        } else {
          has_default = true;
        }
        const int label = NewNode(CfgNodeKind::kStatement, k, colon, ts_[k].line);
        Connect(cur, label);
        AddEdge(branch, label, arm);
        cur = {{label, ""}};
        k = colon + 1;
        continue;
      }
      k = Statement(k, body_close, cur);
    }
    Context ctx = std::move(contexts_.back());
    contexts_.pop_back();
    Frontier exits = cur;
    Append(exits, ctx.breaks);
    if (!has_default) exits.push_back({branch, "default"});
    if (exits.empty()) {
      f.clear();
    } else {
      const int join = NewNode(CfgNodeKind::kJoin, kNoPos, kNoPos,
                               ts_[std::min(body_close, ts_.size() - 1)].line);
      Connect(exits, join);
      f = {{join, ""}};
    }
    // Continue statements inside the switch belong to an enclosing loop.
    for (auto it = contexts_.rbegin(); it != contexts_.rend(); ++it) {
      if (!it->is_switch) {
        Append(it->continues, ctx.continues);
        break;
      }
    }
    return body_close + 1;
  }

  std::size_t Try(std::size_t i, std::size_t end, Frontier& f) {
    std::size_t j = i + 1;
    if (j < end) j = Statement(j, end, f);
    while (j < end && ts_[j].text == "catch") {
      const std::size_t open = j + 1;
      const std::size_t close = open < end ? Match(open) : kNoPos;
      if (close == kNoPos || close >= end) break;
      Frontier handler;  // exceptional edges are not modeled
      j = close + 1;
      if (j < end) j = Statement(j, end, handler);
      Append(f, handler);
    }
    return j;
  }

  std::size_t Fallback(std::size_t i, std::size_t end, Frontier& f) {
    cfg_.warnings.push_back("malformed control statement at line " +
                            std::to_string(ts_[i].line));
    const std::size_t e = StatementEnd(i, end);
    const int n = NewNode(CfgNodeKind::kStatement, i, e, ts_[i].line);
    Connect(f, n);
    f = {{n, ""}};
    return e + 1;
  }

  void MarkUnreachable() {
    std::vector<bool> seen(cfg_.nodes.size(), false);
    std::deque<int> queue{cfg_.entry};
    seen[cfg_.entry] = true;
    while (!queue.empty()) {
      const int n = queue.front();
      queue.pop_front();
      for (const CfgEdge& e : cfg_.nodes[n].succs) {
        if (!seen[e.to]) {
          seen[e.to] = true;
          queue.push_back(e.to);
        }
      }
    }
    for (CfgNode& n : cfg_.nodes) n.unreachable = !seen[n.id];
  }

  const TokenStream& ts_;
  const syntax::BracketIndex br_;
  Cfg& cfg_;
  std::vector<Context> contexts_;
};

}  // namespace

Cfg BuildCfg(const Program& program, ScopeId function_scope) {
  const ScopeNode& fn = program.tree().node(function_scope);
  Cfg cfg;
  cfg.func = FuncIdOf(program, function_scope);
  cfg.scope = function_scope;
  cfg.file = fn.file;
  if (fn.kind != ScopeKind::kFunction || fn.body_open == kNoPos) return cfg;
  CfgBuilder(program.stream(fn.file), cfg).Build(fn);
  return cfg;
}

}  // namespace zkleak

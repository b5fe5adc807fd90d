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
#include <functional>
#include <set>
#include <sstream>

#include "syntax.h"
#include "zkleak/program_graphs.h"

namespace zkleak {

std::optional<int> Fcg::IndexOf(const FuncId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Fcg::Callees(int node) const { return out_.at(node); }
std::vector<int> Fcg::Callers(int node) const { return in_.at(node); }

const FcgEdge* Fcg::EdgeAt(FileIndex file, std::size_t pos) const {
  auto it = by_site_.find({file, pos});
  return it == by_site_.end() ? nullptr : &edges_[it->second];
}

std::size_t Fcg::defined_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const FcgNode& n) { return !n.external(); }));
}

int Fcg::AddNode(FcgNode node) {
  auto it = index_.find(node.id);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(nodes_.size());
  index_.emplace(node.id, id);
  nodes_.push_back(std::move(node));
  out_.emplace_back();
  in_.emplace_back();
  return id;
}

std::string Fcg::Dump(const Program& program) const {
  std::ostringstream out;
  for (const FcgEdge& e : edges_) {
    out << nodes_[e.caller].id.ToString() << " -> " << nodes_[e.callee].id.ToString()
        << " @" << program.path(e.file) << ':' << e.line << '\n';
  }
  return out.str();
}

Fcg BuildFcg(const Program& program) {
  Fcg fcg;
  const ScopeTree& tree = program.tree();
  const std::vector<ScopeId> functions = tree.FunctionScopes();
  std::map<std::pair<std::string, int>, std::vector<int>> by_name;
  for (ScopeId s : functions) {
    const int id = fcg.AddNode({FuncIdOf(program, s), s});
    if (fcg.nodes_[id].scope != s) continue;  // duplicate definition
    by_name[{tree.node(s).name, tree.node(s).arity}].push_back(id);
  }
  std::vector<std::set<int>> out_seen(fcg.nodes_.size());

  for (ScopeId s : functions) {
    const ScopeNode& fn = tree.node(s);
    const auto caller = fcg.IndexOf(FuncIdOf(program, s));
    if (!caller || fcg.nodes_[*caller].scope != s) continue;
    const TokenStream& ts = program.stream(fn.file);
    const syntax::BracketIndex br(ts);
    const std::size_t end = fn.body_close != kNoPos ? fn.body_close : ts.size();
    for (std::size_t i = fn.body_open + 1; i + 1 < end; ++i) {
      const LexToken& t = ts[i];
      if (t.kind != TokenKind::kIdentifier || ts[i + 1].text != "(") continue;
      if (t.var_id != 0) continue;  // "T x(...)" or a function pointer
      if (tree.ClassScope(t.text).has_value() || tree.types().IsType(t.text)) continue;
      const std::size_t close = br.Match(i + 1);
      if (close == kNoPos) continue;
      int arity = 0;
      if (close > i + 2) {
        arity = static_cast<int>(
            syntax::SplitTopLevel(ts, br, i + 2, close, ",", false).size());
      }
      // Receiver class.
      std::string receiver;
      bool member_call = false;
      if (i >= 2 && (ts[i - 1].text == "." || ts[i - 1].text == "->")) {
        member_call = true;
        const LexToken& obj = ts[i - 2];
        if (obj.text == "this") {
          receiver = fn.class_name;
        } else if (obj.var_id > 0) {
          receiver = tree.symbol(obj.var_id).BaseTypeName();
        }
      } else if (i >= 2 && ts[i - 1].text == "::" && syntax::IsName(ts[i - 2])) {
        receiver = ts[i - 2].text;
        member_call = true;
      }
      std::vector<int> candidates;
      auto it = by_name.find({t.text, arity});
      if (it != by_name.end()) {
        auto pick = [&](const std::function<bool(const FuncId&)>& keep) {
          std::vector<int> out;
          for (int c : it->second) {
            if (keep(fcg.nodes_[c].id)) out.push_back(c);
          }
          return out;
        };
        if (member_call) {
          if (!receiver.empty()) {
            candidates = pick([&](const FuncId& f) { return f.class_name == receiver; });
          }
          if (candidates.empty() && receiver.empty()) {
            candidates = pick([](const FuncId& f) { return !f.class_name.empty(); });
          }
        } else {
          if (!fn.class_name.empty()) {
            candidates =
                pick([&](const FuncId& f) { return f.class_name == fn.class_name; });
          }
          if (candidates.empty()) {
            candidates = pick([](const FuncId& f) { return f.class_name.empty(); });
          }
        }
      }
      int callee;
      if (candidates.empty()) {
        FuncId ext;
        ext.class_name = member_call ? receiver : std::string();
        ext.name = t.text;
        ext.arity = arity;
        callee = fcg.AddNode({ext, 0});
      } else {
        std::vector<int> same_file;
        for (int c : candidates) {
          if (tree.node(fcg.nodes_[c].scope).file == fn.file) same_file.push_back(c);
        }
        const std::vector<int>& pool = same_file.empty() ? candidates : same_file;
        callee = pool.front();
        if (candidates.size() > 1) {
          fcg.warnings_.push_back(
              {fn.file, t.line, fcg.nodes_[*caller].id.ToString(),
               "ambiguous call to '" + t.text + "/" + std::to_string(arity) +
                   "': " + std::to_string(candidates.size()) +
                   " candidates, chose " + fcg.nodes_[callee].id.ToString()});
        }
      }
      FcgEdge edge;
      edge.caller = *caller;
      edge.callee = callee;
      edge.file = fn.file;
      edge.pos = i;
      edge.line = t.line;
      fcg.by_site_[{fn.file, i}] = fcg.edges_.size();
      fcg.edges_.push_back(edge);
      if (out_seen[*caller].insert(callee).second) {
        fcg.out_[*caller].push_back(callee);
        fcg.in_[callee].push_back(*caller);
      }
    }
  }
  return fcg;
}

std::vector<std::vector<int>> StronglyConnectedComponents(
    const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<int> index(n, -1);
  std::vector<int> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;
  // Iterative Tarjan: (node, next successor offset).
  std::vector<std::pair<int, std::size_t>> call;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < adjacency[v].size()) {
        const int w = adjacency[v][next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      const int finished = v;
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return components;
}

std::vector<Ring> FindRings(const Fcg& fcg) {
  const std::size_t n = fcg.nodes().size();
  std::vector<std::vector<int>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v] = fcg.Callees(static_cast<int>(v));
  std::vector<Ring> rings;
  for (const std::vector<int>& comp : StronglyConnectedComponents(adj)) {
    const int first = comp.front();
    const bool self_loop =
        std::find(adj[first].begin(), adj[first].end(), first) != adj[first].end();
    if (comp.size() < 2 && !self_loop) continue;
    Ring ring;
    ring.members = comp;
    if (comp.size() == 1) {
      ring.cycle = {first};
    } else {
      // BFS inside the component from a successor of |first| back to it.
      const std::set<int> in_comp(comp.begin(), comp.end());
      std::vector<int> parent(n, -2);
      std::vector<int> queue{first};
      parent[first] = -1;
      bool done = false;
      int last = first;
      for (std::size_t q = 0; q < queue.size() && !done; ++q) {
        for (int w : adj[queue[q]]) {
          if (!in_comp.contains(w)) continue;
          if (w == first) {
            last = queue[q];
            done = true;
            break;
          }
          if (parent[w] == -2) {
            parent[w] = queue[q];
            queue.push_back(w);
          }
        }
      }
      std::vector<int> path;
      for (int v = last; v != -1; v = parent[v]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      ring.cycle = path;
    }
    rings.push_back(std::move(ring));
  }
  std::sort(rings.begin(), rings.end(),
            [](const Ring& a, const Ring& b) { return a.members < b.members; });
  return rings;
}

}  // namespace zkleak

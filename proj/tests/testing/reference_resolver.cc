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

#include "testing/reference_resolver.h"

#include <map>

namespace zkleak::testing {

std::vector<std::size_t> ReferenceBindings(const TokenStream& ts) {
  std::vector<std::size_t> out(ts.size(), kNoPos);
  // Each frame maps names to declaring tokens. Statement headers push a
  // frame that the following brace reuses.
  std::vector<std::map<std::string, std::size_t>> frames(1);
  std::vector<int> pops;  // frames to drop at each '}'
  int header_frames = 0;
  int paren_depth = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const LexToken& t = ts[i];
    if ((t.text == "for" || t.text == "if" || t.text == "while") && i + 1 < ts.size() &&
        ts[i + 1].text == "(") {
      frames.emplace_back();
      ++header_frames;
      continue;
    }
    if (t.text == "(") {
      ++paren_depth;
      // Function parameters live in the body frame.
      if (i > 0 && ts[i - 1].kind == TokenKind::kIdentifier && header_frames == 0 &&
          paren_depth == 1 && frames.size() == 1) {
        frames.emplace_back();
        ++header_frames;
      }
      continue;
    }
    if (t.text == ")") {
      --paren_depth;
      continue;
    }
    if (t.text == "{") {
      frames.emplace_back();
      pops.push_back(1 + header_frames);
      header_frames = 0;
      continue;
    }
    if (t.text == "}") {
      for (int k = 0; k < pops.back(); ++k) frames.pop_back();
      pops.pop_back();
      continue;
    }
    if (t.text == ";" && header_frames > 0 && paren_depth == 0) {
      // Prototype or braceless statement: drop the pending frames.
      for (; header_frames > 0; --header_frames) frames.pop_back();
      continue;
    }
    if (t.kind != TokenKind::kIdentifier) continue;
    const bool declared = i > 0 && (ts[i - 1].text == "int" || ts[i - 1].text == "*") &&
                          !(i + 1 < ts.size() && ts[i + 1].text == "(");
    if (declared) {
      frames.back()[t.text] = i;
      out[i] = i;
      continue;
    }
    for (auto f = frames.rbegin(); f != frames.rend(); ++f) {
      auto it = f->find(t.text);
      if (it != f->end()) {
        out[i] = it->second;
        break;
      }
    }
  }
  return out;
}

namespace {

class ShadowWriter {
 public:
  explicit ShadowWriter(std::mt19937& rng) : rng_(rng) {}

  std::string Run() {
    const std::string first = Name();
    if (Roll() < 60) out_ += "int " + first + ";\n";
    if (Roll() < 30) {
      std::string second = Name();
      if (second == first) second = "d";
      out_ += "int " + second + ";\n";
    }
    const int funcs = 1 + Roll() % 2;
    for (int f = 0; f < funcs; ++f) {
      out_ += "void fn" + std::to_string(f) + "(int " + Name() + ") {\n";
      Block(1);
      out_ += "}\n";
    }
    return out_;
  }

 private:
  int Roll() { return std::uniform_int_distribution<int>(0, 99)(rng_); }
  std::string Name() {
    static const char* kNames[] = {"a", "b", "c"};
    return kNames[Roll() % 3];
  }
  void Indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 2, ' '); }

  void Block(int depth) {
    const int stmts = 1 + Roll() % 5;
    for (int s = 0; s < stmts; ++s) {
      const int r = Roll();
      Indent(depth);
      if (r < 30) {
        out_ += "int " + Name() + " = " + Name() + ";\n";
      } else if (r < 55 || depth >= 4) {
        out_ += Name() + " = " + Name() + " + 1;\n";
      } else if (r < 68) {
        out_ += "{\n";
        Block(depth + 1);
        Indent(depth);
        out_ += "}\n";
      } else if (r < 80) {
        out_ += "if (" + Name() + ") {\n";
        Block(depth + 1);
        Indent(depth);
        out_ += "}\n";
      } else if (r < 90) {
        const std::string v = Name();
        out_ += "for (int " + v + " = 0; " + v + " < " + Name() + "; " + v + "++) {\n";
        Block(depth + 1);
        Indent(depth);
        out_ += "}\n";
      } else {
        out_ += "while (" + Name() + ") {\n";
        Block(depth + 1);
        Indent(depth);
        out_ += "}\n";
      }
    }
  }

  std::mt19937& rng_;
  std::string out_;
};

}  // namespace

std::string RandomShadowFixture(std::mt19937& rng) { return ShadowWriter(rng).Run(); }

}  // namespace zkleak::testing

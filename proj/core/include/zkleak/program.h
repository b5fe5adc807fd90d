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

#ifndef ZKLEAK_PROGRAM_H_
#define ZKLEAK_PROGRAM_H_

#include <string>
#include <vector>

#include "zkleak/scope_table.h"
#include "zkleak/token_stream.h"

namespace zkleak {

struct SourceText {
  std::string path;
  std::string text;
};

// Token streams of every analyzed file plus the shared scope tree.
class Program {
 public:
  // Tokenizes |sources| (up to |jobs| threads) and builds the scope tree.
  static Program Build(std::vector<SourceText> sources, int jobs = 1);
  // Convenience for tests: a single in-memory file.
  static Program FromText(std::string_view text, std::string path = "input.c");

  Program(Program&&) = default;
  Program& operator=(Program&&) = default;

  std::size_t file_count() const { return streams_.size(); }
  const TokenStream& stream(FileIndex f) const { return streams_.at(f); }
  const std::vector<TokenStream>& streams() const { return streams_; }
  std::vector<const TokenStream*> stream_ptrs() const;
  const std::string& path(FileIndex f) const { return streams_.at(f).path(); }

  const ScopeTree& tree() const { return tree_; }
  const std::vector<ClassInfo>& classes() const { return classes_; }

 private:
  Program() = default;

  std::vector<TokenStream> streams_;
  ScopeTree tree_;
  std::vector<ClassInfo> classes_;
};

}  // namespace zkleak

#endif  // ZKLEAK_PROGRAM_H_

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

#include "zkleak/program.h"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

namespace zkleak {

Program Program::Build(std::vector<SourceText> sources, int jobs) {
  Program program;
  const std::size_t n = sources.size();
  std::vector<std::optional<TokenStream>> lexed(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      lexed[i].emplace(Tokenize(sources[i].text, sources[i].path,
                                static_cast<FileIndex>(i)));
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  program.streams_.reserve(n);
  for (auto& ts : lexed) program.streams_.push_back(std::move(*ts));

  ScopeBuilder builder(program.tree_);
  for (TokenStream& ts : program.streams_) builder.AddFile(ts);
  builder.Finish();
  program.classes_ = CollectClassInfo(program.tree_, program.stream_ptrs());
  return program;
}

Program Program::FromText(std::string_view text, std::string path) {
  std::vector<SourceText> sources;
  sources.push_back({std::move(path), std::string(text)});
  return Build(std::move(sources), 1);
}

std::vector<const TokenStream*> Program::stream_ptrs() const {
  std::vector<const TokenStream*> out;
  out.reserve(streams_.size());
  for (const TokenStream& ts : streams_) out.push_back(&ts);
  return out;
}

}  // namespace zkleak

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

// Name-resolution oracle for block-structured fixtures built from "int x;"
// declarations, "{ }" blocks, if/while/for statements and simple uses.

#ifndef ZKLEAK_TESTS_TESTING_REFERENCE_RESOLVER_H_
#define ZKLEAK_TESTS_TESTING_REFERENCE_RESOLVER_H_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "zkleak/token_stream.h"

namespace zkleak::testing {

// For every token: index of the declaring token of the name it denotes,
// the token itself for declarations, kNoPos for non-variables.
std::vector<std::size_t> ReferenceBindings(const TokenStream& ts);

// Globals, then one or two functions with nested shadowing blocks over the
// names a, b and c.
std::string RandomShadowFixture(std::mt19937& rng);

}  // namespace zkleak::testing

#endif  // ZKLEAK_TESTS_TESTING_REFERENCE_RESOLVER_H_

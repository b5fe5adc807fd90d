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

// Straight-line character scanner used as the lexer oracle. It handles the
// subset produced by RandomLexFixture: no line splices, raw strings or
// malformed input.

#ifndef ZKLEAK_TESTS_TESTING_REFERENCE_SCANNER_H_
#define ZKLEAK_TESTS_TESTING_REFERENCE_SCANNER_H_

#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace zkleak::testing {

struct RefToken {
  std::string lexeme;
  int line = 0;
  int column = 0;
  friend bool operator==(const RefToken&, const RefToken&) = default;
};

std::vector<RefToken> ReferenceScan(std::string_view source);

// A small C-like source file with comments, directives, literals and
// operator runs.
std::string RandomLexFixture(std::mt19937& rng);

}  // namespace zkleak::testing

#endif  // ZKLEAK_TESTS_TESTING_REFERENCE_SCANNER_H_

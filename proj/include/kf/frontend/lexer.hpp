// Copyright 2026 The KernelForge Authors
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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kf/frontend/source.hpp"

namespace kf {

enum class TokenKind { kIdent, kInt, kFloat, kString, kPunct, kEof };

struct Token {
  TokenKind kind = TokenKind::kEof;
  // Identifier/punctuator spelling, literal source text, or string contents.
  std::string text;
  std::size_t offset = 0;
  SourceLocation loc;
};

// Tokenizes `src`, skipping whitespace and comments. On a lexical error the
// returned token list ends early and `diags` holds the error.
std::vector<Token> tokenize(const SourceUnit& src, Diagnostics& diags);

}  // namespace kf

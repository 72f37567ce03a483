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

#include "kf/frontend/lexer.hpp"

#include <array>
#include <cctype>
#include <string_view>

#include <fmt/format.h>

namespace kf {
namespace {

constexpr std::array<std::string_view, 13> kTwoCharPuncts = {
    "<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%="};

constexpr std::string_view kOneCharPuncts = "+-*/%<>=!(){}[];,";

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> tokenize(const SourceUnit& src, Diagnostics& diags) {
  const std::string& s = src.text();
  std::vector<Token> out;
  std::size_t i = 0;

  auto fail = [&](std::size_t at, std::string msg) {
    diags.push_back({Severity::kError, std::move(msg), src.location_of(at)});
  };

  if (const auto bad = find_invalid_utf8(s); bad != std::string_view::npos) {
    fail(bad, "invalid UTF-8 sequence in source");
    return out;
  }

  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const std::size_t end = s.find("*/", i + 2);
      if (end == std::string::npos) {
        fail(i, "unterminated block comment");
        return out;
      }
      i = end + 2;
      continue;
    }

    Token tok;
    tok.offset = i;
    tok.loc = src.location_of(i);

    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      tok.kind = TokenKind::kIdent;
      tok.text = s.substr(i, j - i);
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < s.size() &&
                std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      bool is_float = false;
      if (c == '0' && j + 1 < s.size() && (s[j + 1] == 'x' || s[j + 1] == 'X')) {
        j += 2;
        while (j < s.size() && std::isxdigit(static_cast<unsigned char>(s[j]))) ++j;
      } else {
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j < s.size() && s[j] == '.') {
          is_float = true;
          ++j;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
        if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
          if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
            is_float = true;
            j = k;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
          }
        }
      }
      if (j < s.size() && (s[j] == 'f' || s[j] == 'F')) {
        is_float = true;
        ++j;
      } else if (!is_float && j < s.size() && (s[j] == 'u' || s[j] == 'U')) {
        ++j;
      }
      if (j < s.size() && is_ident_char(s[j])) {
        fail(j, fmt::format("invalid suffix '{}' on numeric literal", s[j]));
        return out;
      }
      tok.kind = is_float ? TokenKind::kFloat : TokenKind::kInt;
      tok.text = s.substr(i, j - i);
      i = j;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"' && s[j] != '\n') ++j;
      if (j >= s.size() || s[j] != '"') {
        fail(i, "unterminated string literal");
        return out;
      }
      tok.kind = TokenKind::kString;
      tok.text = s.substr(i + 1, j - i - 1);
      i = j + 1;
    } else {
      bool matched = false;
      if (i + 1 < s.size()) {
        const std::string_view two(s.data() + i, 2);
        for (auto p : kTwoCharPuncts) {
          if (p == two) {
            tok.kind = TokenKind::kPunct;
            tok.text = std::string(p);
            i += 2;
            matched = true;
            break;
          }
        }
      }
      if (!matched && kOneCharPuncts.find(c) != std::string_view::npos) {
        tok.kind = TokenKind::kPunct;
        tok.text = std::string(1, c);
        ++i;
        matched = true;
      }
      if (!matched) {
        const auto uc = static_cast<unsigned char>(c);
        if (uc >= 0x20 && uc < 0x7F) {
          fail(i, fmt::format("unexpected character '{}'", c));
        } else {
          fail(i, fmt::format("unexpected character 0x{:02x}", uc));
        }
        return out;
      }
    }
    out.push_back(std::move(tok));
  }

  Token eof;
  eof.kind = TokenKind::kEof;
  eof.offset = s.size();
  eof.loc = src.location_of(s.size());
  out.push_back(std::move(eof));
  return out;
}

}  // namespace kf

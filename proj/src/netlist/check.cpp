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

#include <cctype>
#include <map>
#include <set>

#include <fmt/format.h>

#include "kf/netlist/netlist.hpp"

namespace kf::netlist {

namespace {

struct Tok {
  enum class Kind : std::uint8_t { kIdent, kNumber, kPunct, kDirective, kSystem, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  int line = 0;
};

const std::set<std::string, std::less<>> kSubsetKeywords = {
    "module", "endmodule", "input", "output", "wire", "reg",     "assign",  "always",
    "posedge", "begin",    "end",   "if",     "else", "case",    "endcase", "default",
    "parameter",
};
const std::set<std::string, std::less<>> kDirectives = {"`ifndef", "`define", "`endif"};
const std::set<std::string, std::less<>> kSystem = {"$signed"};

std::vector<Tok> lex(std::string_view s, std::vector<HdlViolation>& out) {
  std::vector<Tok> toks;
  int line = 1;
  std::size_t i = 0;
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (s.substr(i, 2) == "//") {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '`' || c == '$' || std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < s.size() && ident_char(s[j])) ++j;
      const auto kind = c == '`' ? Tok::Kind::kDirective : c == '$' ? Tok::Kind::kSystem : Tok::Kind::kIdent;
      toks.push_back({kind, std::string(s.substr(i, j - i)), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '\'') {
        ++j;
        if (j < s.size() && (s[j] == 'b' || s[j] == 'd' || s[j] == 'h')) {
          ++j;
          while (j < s.size() && (std::isxdigit(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        } else {
          out.push_back({line, "malformed sized literal"});
        }
      }
      toks.push_back({Tok::Kind::kNumber, std::string(s.substr(i, j - i)), line});
      i = j;
    } else {
      static const char* kTwo[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>"};
      std::string p(1, c);
      for (const char* t : kTwo) {
        if (s.substr(i, 2) == t) p = t;
      }
      if (p.size() == 1 && std::string_view("()[]{};:,.=#+-*/%&|^~!?<>@").find(c) == std::string_view::npos) {
        out.push_back({line, fmt::format("unexpected character '{}'", c)});
        ++i;
        continue;
      }
      toks.push_back({Tok::Kind::kPunct, p, line});
      i += p.size();
    }
  }
  toks.push_back({Tok::Kind::kEnd, "", line});
  return toks;
}

class Checker {
 public:
  Checker(std::vector<Tok> toks, std::vector<HdlViolation>& out) : t_(std::move(toks)), out_(out) {}

  void run() {
    whitelist();
    balance();
    structure();
  }

 private:
  const Tok& at(std::size_t i) const { return t_[std::min(i, t_.size() - 1)]; }
  bool is(std::size_t i, std::string_view text) const { return at(i).text == text && at(i).kind != Tok::Kind::kEnd; }
  void report(int line, std::string msg) { out_.push_back({line, std::move(msg)}); }

  void whitelist() {
    for (const auto& k : t_) {
      if (k.kind == Tok::Kind::kIdent && is_reserved_word(k.text) && kSubsetKeywords.count(k.text) == 0) {
        report(k.line, fmt::format("token '{}' is outside the HDL subset", k.text));
      } else if (k.kind == Tok::Kind::kDirective && kDirectives.count(k.text) == 0) {
        report(k.line, fmt::format("directive '{}' is outside the HDL subset", k.text));
      } else if (k.kind == Tok::Kind::kSystem && kSystem.count(k.text) == 0) {
        report(k.line, fmt::format("system function '{}' is outside the HDL subset", k.text));
      }
    }
  }

  void balance() {
    static const std::map<std::string, std::string, std::less<>> kClose = {
        {"endmodule", "module"}, {"end", "begin"}, {"endcase", "case"}, {"`endif", "`ifndef"}};
    std::vector<const Tok*> stack;
    for (const auto& k : t_) {
      if (k.kind != Tok::Kind::kIdent && k.kind != Tok::Kind::kDirective) continue;
      if (k.text == "module" || k.text == "begin" || k.text == "case" || k.text == "`ifndef") {
        stack.push_back(&k);
        continue;
      }
      auto it = kClose.find(k.text);
      if (it == kClose.end()) continue;
      if (stack.empty()) {
        report(k.line, fmt::format("'{}' without an open '{}'", k.text, it->second));
      } else if (stack.back()->text != it->second) {
        report(k.line, fmt::format("'{}' closes '{}' opened at line {}", k.text, stack.back()->text,
                                   stack.back()->line));
        stack.pop_back();
      } else {
        stack.pop_back();
      }
    }
    for (const Tok* k : stack) report(k->line, fmt::format("'{}' is never closed", k->text));
  }

  // Declarations, uses and drivers, module by module.
  void structure() {
    std::size_t i = 0;
    while (at(i).kind != Tok::Kind::kEnd) {
      if (is(i, "module")) {
        i = module(i);
      } else {
        ++i;
      }
    }
  }

  void use(const Tok& k) {
    if (k.kind != Tok::Kind::kIdent || is_reserved_word(k.text)) return;
    if (declared_.count(k.text) == 0 && reported_.insert(k.text).second) {
      report(k.line, fmt::format("identifier '{}' used before declaration", k.text));
    }
  }
  void declare(const Tok& k, bool needs_width, bool has_width) {
    if (needs_width && !has_width) report(k.line, fmt::format("signal '{}' declared without width", k.text));
    if (!declared_.insert(k.text).second) report(k.line, fmt::format("'{}' declared twice", k.text));
  }
  void drive(const Tok& k, int group) {
    auto& d = drivers_[k.text];
    if (d.insert(group).second && d.size() == 2) {
      report(k.line, fmt::format("signal '{}' has more than one driver", k.text));
    }
    auto dir = dirs_.find(k.text);
    if (dir != dirs_.end() && dir->second == Dir::kIn) {
      report(k.line, fmt::format("input '{}' is driven inside its module", k.text));
    }
  }

  // Skips a balanced bracket group starting at i; visits tokens inside.
  template <typename F>
  std::size_t group(std::size_t i, F&& visit) {
    const std::string open = at(i).text;
    const std::string close = open == "(" ? ")" : open == "[" ? "]" : "}";
    int depth = 0;
    for (;; ++i) {
      if (at(i).kind == Tok::Kind::kEnd) return i;
      if (at(i).text == open) ++depth;
      if (at(i).text == close && --depth == 0) return i + 1;
      visit(i);
    }
  }

  std::size_t expr_uses(std::size_t i, std::string_view stop) {
    while (at(i).kind != Tok::Kind::kEnd && !is(i, stop)) {
      if (is(i, ".")) {
        i += 2;
        continue;
      }
      use(at(i));
      ++i;
    }
    return i;
  }

  std::size_t module(std::size_t i) {
    declared_.clear();
    drivers_.clear();
    dirs_.clear();
    reported_.clear();
    int groups = 0;
    ++i;
    const std::string name = at(i).text;
    ++i;
    auto& ports = module_ports_[name];
    if (is(i, "#")) {
      i = group(i + 1, [&](std::size_t j) {
        if (is(j, "parameter")) declare(at(j + 1), false, false);
      });
    }
    if (is(i, "(")) {
      i = group(i, [&](std::size_t j) {
        if (!is(j, "input") && !is(j, "output")) return;
        const Dir dir = is(j, "input") ? Dir::kIn : Dir::kOut;
        std::size_t k = j + 1;
        if (is(k, "wire") || is(k, "reg")) ++k;
        const bool width = is(k, "[");
        if (width) {
          k = group(k, [&](std::size_t x) { use(at(x)); });
        }
        declare(at(k), true, width);
        dirs_[at(k).text] = dir;
        ports[at(k).text] = dir;
      });
    }
    if (is(i, ";")) ++i;
    while (at(i).kind != Tok::Kind::kEnd && !is(i, "endmodule")) {
      const Tok& k = at(i);
      if (is(i, "wire") || is(i, "reg") || is(i, "input") || is(i, "output")) {
        std::size_t j = i + 1;
        if ((is(i, "input") || is(i, "output")) && (is(j, "wire") || is(j, "reg"))) ++j;
        const bool width = is(j, "[");
        if (width) j = group(j, [&](std::size_t x) { use(at(x)); });
        declare(at(j), true, width);
        ++j;
        if (is(j, "[")) j = group(j, [&](std::size_t x) { use(at(x)); });
        i = expr_uses(j, ";") + 1;
      } else if (is(i, "parameter")) {
        declare(at(i + 1), false, false);
        i = expr_uses(i + 2, ";") + 1;
      } else if (is(i, "assign")) {
        use(at(i + 1));
        drive(at(i + 1), groups++);
        i = expr_uses(i + 2, ";") + 1;
      } else if (is(i, "always")) {
        i = always(i + 1, groups++);
      } else if (k.kind == Tok::Kind::kIdent && !is_reserved_word(k.text)) {
        i = instance(i, groups);
      } else if (k.kind == Tok::Kind::kDirective) {
        i += 2;
      } else {
        report(k.line, fmt::format("unexpected '{}' in module body", k.text));
        ++i;
      }
    }
    return i + 1;
  }

  std::size_t always(std::size_t i, int g) {
    // Sensitivity list.
    if (is(i, "@")) {
      ++i;
      if (is(i, "(")) i = group(i, [&](std::size_t j) { use(at(j)); });
    }
    int depth = 0;
    std::size_t j = i;
    for (;; ++j) {
      const Tok& k = at(j);
      if (k.kind == Tok::Kind::kEnd) return j;
      if (is(j, "begin") || is(j, "case")) ++depth;
      if (is(j, "end") || is(j, "endcase")) --depth;
      if (k.kind == Tok::Kind::kIdent && !is_reserved_word(k.text)) {
        const std::string& prev = at(j - 1).text;
        const bool stmt = prev == ";" || prev == "begin" || prev == "else" || prev == ")" || prev == ":" ||
                          prev == "end";
        std::size_t n = j + 1;
        if (is(n, "[")) n = group(n, [](std::size_t) {});
        if (stmt && is(n, "<=")) drive(k, g);
        use(k);
      }
      // A single statement body ends at its semicolon.
      if (depth == 0 && (is(j, ";") || is(j, "end") || is(j, "endcase"))) return j + 1;
    }
  }

  std::size_t instance(std::size_t i, int& groups) {
    const std::string type = at(i).text;
    ++i;
    if (is(i, "#")) i = group(i + 1, [](std::size_t) {});
    ++i;  // instance name
    const auto mp = module_ports_.find(type);
    if (is(i, "(")) {
      i = group(i, [&](std::size_t j) {
        if (!is(j, ".") || !is(j + 2, "(")) {
          if (!is(j - 1, ".")) use(at(j));
          return;
        }
        const std::string& port = at(j + 1).text;
        if (mp != module_ports_.end()) {
          auto pit = mp->second.find(port);
          if (pit == mp->second.end()) {
            report(at(j).line, fmt::format("module '{}' has no port '{}'", type, port));
          } else if (pit->second == Dir::kOut && at(j + 3).kind == Tok::Kind::kIdent) {
            drive(at(j + 3), groups++);
          }
        }
      });
    }
    if (is(i, ";")) ++i;
    return i;
  }

  std::vector<Tok> t_;
  std::vector<HdlViolation>& out_;
  std::set<std::string> declared_;
  std::set<std::string> reported_;
  std::map<std::string, std::set<int>> drivers_;
  std::map<std::string, Dir> dirs_;
  std::map<std::string, std::map<std::string, Dir>> module_ports_;
};

}  // namespace

std::vector<HdlViolation> check_hdl(std::string_view text) {
  std::vector<HdlViolation> out;
  auto toks = lex(text, out);
  Checker(std::move(toks), out).run();
  std::stable_sort(out.begin(), out.end(),
                   [](const HdlViolation& a, const HdlViolation& b) { return a.line < b.line; });
  return out;
}

}  // namespace kf::netlist

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

#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "kf/netlist/netlist.hpp"
#include "test_kernels.hpp"

namespace kf::netlist {
namespace {

sched::DesignSchedule scheduled(const std::string& text) {
  return sched::schedule_design(testing::design(text), sched::LatencyTable::defaults());
}

int count_matches(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += std::regex_search(line, re) ? 1 : 0;
  return n;
}

std::string violations(const std::vector<HdlViolation>& v) {
  std::string s;
  for (const auto& x : v) s += std::to_string(x.line) + ": " + x.message + "\n";
  return s;
}

constexpr const char* kVadd =
    "kernel void vadd(global const int* a, global const int* b, global int* c) {"
    " int i = get_global_id(0); c[i] = a[i] + b[i]; }";

TEST(Elaborate, RegisterCensusMatchesSchedule) {
  for (const char* k : testing::kSmallKernels) {
    const auto ds = scheduled(k);
    const Module m = elaborate(ds);
    int expected = 0;
    for (std::size_t b = 0; b < ds.blocks.size(); ++b) {
      expected += sched::count_registers(ds.design.blocks[b], ds.blocks[b]);
    }
    EXPECT_EQ(static_cast<int>(m.registers.size()), expected) << k;
    // Census from the emitted text: one declaration per pipeline register.
    const auto hdl = emit_hdl(m);
    EXPECT_EQ(count_matches(hdl.text, R"(^  reg \[\d+:0\] r_b\d+_[nv]\d+_s\d+;$)"), expected) << k;
  }
}

TEST(Elaborate, LongLivedValueGetsOneRegisterPerBoundary) {
  // The id feeds the load address at cycle 0 and the store address after
  // the multiply chain, so it crosses every boundary before the store.
  const auto ds = scheduled(
      "kernel void k(global int* a) { int i = get_global_id(0); a[i] = a[i] * 3 * 5; }");
  const Module m = elaborate(ds);
  const auto& g = ds.design.blocks[0];
  dfg::NodeId id = dfg::kNoNode;
  int store_start = -1;
  for (const auto& n : g.nodes) {
    if (n.kind == dfg::NodeKind::kIdGen) id = n.id;
    if (n.kind == dfg::NodeKind::kStreamStore) store_start = ds.blocks[0].start[n.id];
  }
  ASSERT_NE(id, dfg::kNoNode);
  EXPECT_EQ(store_start, 1 + 3 + 3);
  int regs = 0;
  for (const auto& r : m.registers) {
    if (r.source.node == id) {
      EXPECT_EQ(r.stage, regs);
      ++regs;
    }
  }
  EXPECT_EQ(regs, store_start);
}

TEST(Elaborate, PipeReadIsConsumerInterface) {
  const Module m = elaborate(scheduled(
      "kernel void k(read_only pipe int p, global int* o) { o[0] = read_pipe(p); }"));
  std::map<std::string, Dir> ports;
  for (const auto& p : m.ports) ports[p.name] = p.dir;
  ASSERT_TRUE(ports.count("pipe_p_data"));
  EXPECT_EQ(ports["pipe_p_data"], Dir::kIn);
  EXPECT_EQ(ports["pipe_p_req"], Dir::kOut);
  EXPECT_EQ(ports["pipe_p_grant"], Dir::kIn);
  EXPECT_TRUE(m.fifos.empty());
}

TEST(Elaborate, PipeWriteOwnsFifo) {
  const Module m = elaborate(scheduled(testing::kSmallKernels[7]));
  ASSERT_EQ(m.fifos.size(), 1u);
  EXPECT_EQ(m.fifos[0].kind, FifoInstance::Kind::kPipe);
  const auto hdl = emit_hdl(m);
  EXPECT_EQ(count_matches(hdl.text, R"(^  kf_fifo #)"), 1);
}

TEST(Elaborate, EmptyKernelHasHandshakePinsOnly) {
  const Module m = elaborate(scheduled("kernel void k() { }"));
  std::vector<std::string> names;
  for (const auto& p : m.ports) names.push_back(p.name);
  EXPECT_EQ(names, (std::vector<std::string>{"clk", "rst", "launch_req", "launch_ack", "launch_items",
                                             "done_req", "done_ack"}));
  EXPECT_TRUE(m.registers.empty());
  EXPECT_EQ(m.fsms.size(), 2u);
}

TEST(Elaborate, SyncGetsSram) {
  const Module m = elaborate(scheduled(testing::kSmallKernels[4]), {.sram_words = 16});
  ASSERT_EQ(m.srams.size(), 1u);
  EXPECT_EQ(m.srams[0].words, 16);
}

TEST(Emit, VaddHasOneAdder) {
  const auto hdl = emit_hdl(elaborate(scheduled(kVadd)));
  EXPECT_EQ(count_matches(hdl.text, R"(^  kf_add_\w+ u_)"), 1);
  EXPECT_EQ(count_matches(hdl.text, R"(^  kf_\w+ u_)"), 1);
  EXPECT_NE(hdl.text.find("module vadd ("), std::string::npos);
}

TEST(Emit, Deterministic) {
  for (const char* k : testing::kSmallKernels) {
    const auto a = emit_hdl(elaborate(scheduled(k)));
    const auto b = emit_hdl(elaborate(scheduled(k)));
    EXPECT_EQ(a.text, b.text);
  }
}

TEST(Emit, ManifestCoversModules) {
  const auto hdl = emit_hdl(elaborate(scheduled(kVadd)));
  ASSERT_FALSE(hdl.manifest.empty());
  EXPECT_EQ(hdl.manifest.back().name, "vadd");
  std::vector<std::string> lines;
  std::istringstream in(hdl.text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  for (const auto& span : hdl.manifest) {
    EXPECT_TRUE(lines[static_cast<std::size_t>(span.first_line - 1)].starts_with("module " + span.name))
        << span.name;
    EXPECT_EQ(lines[static_cast<std::size_t>(span.last_line - 1)], "endmodule") << span.name;
  }
}

TEST(Emit, ReservedKernelNamesAreMangled) {
  const auto a = elaborate(scheduled("kernel void wire() { }"));
  EXPECT_EQ(a.name, "wire_m1");
  EXPECT_NE(emit_hdl(a).text.find("module wire_m1 ("), std::string::npos);
  const auto net = elaborate({scheduled("kernel void kf_hs4() { }"), scheduled("kernel void module() { }"),
                              scheduled("kernel void plain() { }")});
  EXPECT_EQ(net.modules[0].name, "kf_hs4_m1");
  EXPECT_EQ(net.modules[1].name, "module_m2");
  EXPECT_EQ(net.modules[2].name, "plain");
  EXPECT_EQ(net.find("module"), &net.modules[1]);
}

TEST(Emit, CheckerAcceptsEveryEmission) {
  for (const char* k : testing::kSmallKernels) {
    const auto hdl = emit_hdl(elaborate(scheduled(k)));
    const auto v = check_hdl(hdl.text);
    EXPECT_TRUE(v.empty()) << k << "\n" << violations(v);
  }
  const auto enq = emit_hdl(elaborate(scheduled(
      "kernel void child(global int* o, int v) { o[0] = v; }\n"
      "kernel void k(queue_t q, global int* o) { if (get_local_id(0) == 0) {"
      " enqueue_kernel(q, 1, 1, \"child\", o, get_group_id(0)); } }")));
  EXPECT_TRUE(check_hdl(enq.text).empty()) << violations(check_hdl(enq.text));
}

TEST(Emit, OnlySubsetTokens) {
  const std::regex word(R"([`$]?[A-Za-z_][A-Za-z0-9_]*)");
  const std::set<std::string> keywords = {"module", "endmodule", "input",  "output", "wire", "reg",
                                          "assign", "always",    "posedge", "begin", "end",  "if",
                                          "else",   "case",      "endcase", "default", "parameter",
                                          "`ifndef", "`define",  "`endif",  "$signed"};
  for (const char* k : testing::kSmallKernels) {
    const auto hdl = emit_hdl(elaborate(scheduled(k)));
    for (auto it = std::sregex_iterator(hdl.text.begin(), hdl.text.end(), word); it != std::sregex_iterator();
         ++it) {
      const std::string w = it->str();
      if (w[0] == '`' || w[0] == '$' || is_reserved_word(w)) { EXPECT_TRUE(keywords.count(w)) << w; }
    }
  }
}

TEST(Check, UndeclaredSignalIsNamed) {
  const auto v = check_hdl(
      "module m (\n  input wire [0:0] a,\n  output wire [0:0] y\n);\n  assign y = a & ghost;\nendmodule\n");
  ASSERT_EQ(v.size(), 1u) << violations(v);
  EXPECT_EQ(v[0].line, 5);
  EXPECT_NE(v[0].message.find("'ghost'"), std::string::npos);
}

TEST(Check, UnbalancedModuleHasLine) {
  const auto v = check_hdl("module m (\n  input wire [0:0] a\n);\n  wire [0:0] b;\n");
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].line, 1);
  EXPECT_NE(v[0].message.find("never closed"), std::string::npos);
  const auto w = check_hdl("module m (\n  input wire [0:0] a\n);\nend\nendmodule\n");
  ASSERT_FALSE(w.empty());
  EXPECT_EQ(w[0].line, 4);
}

TEST(Check, WidthDriversAndTokens) {
  auto v = check_hdl("module m (\n  input wire a\n);\nendmodule\n");
  ASSERT_EQ(v.size(), 1u) << violations(v);
  EXPECT_NE(v[0].message.find("without width"), std::string::npos);

  v = check_hdl(
      "module m (\n  input wire [0:0] a,\n  output wire [0:0] y\n);\n  assign y = a;\n  assign y = ~a;\n"
      "endmodule\n");
  ASSERT_EQ(v.size(), 1u) << violations(v);
  EXPECT_EQ(v[0].line, 6);
  EXPECT_NE(v[0].message.find("more than one driver"), std::string::npos);

  v = check_hdl("module m (\n  input wire [0:0] a\n);\n  assign a = 1'b0;\nendmodule\n");
  ASSERT_EQ(v.size(), 1u) << violations(v);
  EXPECT_NE(v[0].message.find("input 'a'"), std::string::npos);

  v = check_hdl("module m (\n  input wire [0:0] a\n);\n  initial begin\n  end\nendmodule\n");
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v[0].message.find("'initial'"), std::string::npos);

  // Instance outputs count as drivers.
  v = check_hdl(
      "module p (\n  input wire [0:0] i,\n  output wire [0:0] o\n);\n  assign o = i;\nendmodule\n"
      "module m (\n  input wire [0:0] a,\n  output wire [0:0] y\n);\n  p u0 (.i(a), .o(y));\n"
      "  p u1 (.i(a), .o(y));\nendmodule\n");
  ASSERT_EQ(v.size(), 1u) << violations(v);
  EXPECT_EQ(v[0].line, 12);
}

}  // namespace
}  // namespace kf::netlist

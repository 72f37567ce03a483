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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kf/sched/sched.hpp"

namespace kf::netlist {

enum class Dir : std::uint8_t { kIn, kOut };

struct Port {
  std::string name;
  Dir dir = Dir::kIn;
  int width = 1;
  friend bool operator==(const Port&, const Port&) = default;
};

// A scheduled HwNode placed in hardware. `primitive` is empty for nodes that
// become plain wiring (constants, ids, arguments, memory and pipe pins).
struct Unit {
  ir::BlockId block = 0;
  dfg::HwNode node;
  int start = 0;
  int latency = 0;
  int ii = 1;
  std::string instance;
  std::string primitive;
};

// Holds `source` across the boundary between cycle `stage` and `stage + 1`
// of its block.
struct PipelineRegister {
  ir::BlockId block = 0;
  dfg::Input source;
  int stage = 0;
  int width = 32;
  std::string name;
};

struct HandshakeFsm {
  int link = 0;
  std::string name;
};

struct SramInstance {
  ir::BlockId block = 0;
  dfg::NodeId node = 0;
  int words = 0;
  int width = 32;
  std::string name;
};

struct FifoInstance {
  enum class Kind : std::uint8_t { kPipe, kQueue };
  Kind kind = Kind::kPipe;
  int param = -1;
  int width = 32;
  int depth = 16;
  std::string name;
};

struct Module {
  // HDL module name, mangled when the kernel name is not usable as is.
  std::string name;
  sched::DesignSchedule schedule;
  std::vector<Port> ports;
  // units[b][n] is node n of block b.
  std::vector<std::vector<Unit>> units;
  std::vector<PipelineRegister> registers;
  std::vector<HandshakeFsm> fsms;
  std::vector<SramInstance> srams;
  std::vector<FifoInstance> fifos;

  const dfg::KernelDesign& design() const { return schedule.design; }
  const std::string& kernel() const { return schedule.design.name; }
};

struct Netlist {
  std::vector<Module> modules;
  const Module* find(std::string_view kernel) const;
};

struct ElaborateOptions {
  // Words per sync SRAM; one per work-item of a group.
  int sram_words = 256;
  // FIFO depth emitted for pipe write ports (a generic default; the
  // simulator uses the host-side depth).
  int pipe_depth = 16;
  int queue_depth = 16;
};

Module elaborate(const sched::DesignSchedule& ds, const ElaborateOptions& opt = {});
// Elaborates every kernel and assigns collision-free module names.
Netlist elaborate(const std::vector<sched::DesignSchedule>& designs,
                  const ElaborateOptions& opt = {});

// Name of the behavioral primitive implementing an arithmetic or phi node:
// kf_<op>_<type>_l<latency>. Float arithmetic maps to black-box kf_bb_*.
std::string primitive_name(const dfg::HwNode& n, int latency);

bool is_reserved_word(std::string_view s);
// Appends _m<n> to names that are Verilog keywords or use the kf_ prefix;
// `counter` supplies n and is advanced on every rename.
std::string mangle(std::string_view name, int& counter);

struct ModuleSpan {
  std::string name;
  int first_line = 0;
  int last_line = 0;
};

struct HdlText {
  std::string text;
  std::vector<ModuleSpan> manifest;
};

// Self-contained Verilog for one kernel module and the primitives it uses.
HdlText emit_hdl(const Module& m);

struct HdlViolation {
  int line = 0;
  std::string message;
};

// Structural well-formedness of the HDL subset: balanced blocks, declared
// identifiers, one driver per signal, width annotations, token whitelist.
std::vector<HdlViolation> check_hdl(std::string_view text);

}  // namespace kf::netlist

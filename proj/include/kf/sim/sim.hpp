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
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kf/netlist/netlist.hpp"
#include "kf/runtime/device.hpp"

namespace kf::sim {

struct SimConfig {
  std::uint64_t max_cycles = 1'000'000;
  int pipe_depth_default = 16;
  // Global memory read latency in cycles; 0 keeps the latency table's
  // `lat.load`. Applied before scheduling, see apply_memory_latency.
  int mem_latency = 0;
  bool trace = false;
};

// Throws ConfigError when max_cycles or pipe_depth_default is 0 or
// mem_latency is negative.
void validate(const SimConfig& cfg);

// Sets lat.load when cfg.mem_latency is nonzero.
void apply_memory_latency(sched::LatencyTable& t, const SimConfig& cfg);

struct RunResult {
  std::uint64_t cycles = 0;
  std::vector<rt::Buffer> buffers;
  std::vector<rt::PipeResidue> pipes;
  std::uint64_t child_launches = 0;
  // `cycle,block,event,detail` lines; empty unless tracing.
  std::string trace;
};

// Token accounting over all launches so far. Every admitted item is in
// exactly one place until it retires.
struct Census {
  std::uint64_t admitted = 0;
  std::uint64_t retired = 0;
  std::uint64_t in_pipeline = 0;
  std::uint64_t in_links = 0;
  std::uint64_t at_sync = 0;
};

// Corrupts the first matching unit of the netlist: `swap-add-sub` turns an
// integer add into a subtract, `flip-const` flips bit 0 of a constant.
// Returns false when no unit matches. Throws ConfigError for unknown names.
bool inject_fault(netlist::Netlist& n, std::string_view fault);

class Simulator {
 public:
  // Launches `roots` together. The netlist and device state must outlive
  // the simulator. Throws rt::RuntimeError when a launch is rejected.
  Simulator(const netlist::Netlist& net, rt::DeviceState& dev, std::vector<rt::LaunchRecord> roots,
            SimConfig cfg = {});
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Advances one clock edge. Returns false once every launch, including
  // queued children, has completed; further calls only count cycles.
  // Throws rt::RuntimeError on faults, deadlock and watchdog expiry.
  bool step();
  bool done() const;
  // Steps until cycle() == `cycle`, idling once done.
  void run_until(std::uint64_t cycle);
  RunResult run();

  std::uint64_t cycle() const;
  Census census() const;
  // Canonical text of the complete simulator state.
  std::string snapshot() const;
  std::string_view trace() const;
  // Called after every step.
  void set_observer(std::function<void(const Simulator&)> f);
  const rt::DeviceState& device() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs `roots` to completion, then the queued children, and collects the
// final device state.
RunResult run_ndrange(const netlist::Netlist& net, rt::DeviceState& dev, std::vector<rt::LaunchRecord> roots,
                      const SimConfig& cfg = {});

}  // namespace kf::sim

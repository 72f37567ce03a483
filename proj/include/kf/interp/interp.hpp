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
#include <vector>

#include "kf/frontend/ast.hpp"
#include "kf/runtime/device.hpp"

namespace kf::interp {

struct InterpConfig {
  // Statements and loop iterations over the whole run before the watchdog
  // fires.
  std::uint64_t max_steps = 100'000'000;
};

// One entry of the per-item event log; see docs/event-log.md.
struct Event {
  enum class Kind : std::uint8_t { kRegion, kSync, kFinish, kEnqueue };
  // Launch index in execution order: roots first, then children.
  std::uint32_t launch = 0;
  std::string kernel;
  std::uint32_t group = 0;
  std::uint32_t region = 0;
  std::uint32_t item = 0;
  Kind kind = Kind::kRegion;
  std::string detail;
};

std::string_view event_kind_name(Event::Kind k);
// `launch,kernel,group,region,item,event,detail` lines.
std::string format_events(const std::vector<Event>& events);

struct InterpResult {
  std::vector<rt::Buffer> buffers;
  std::vector<rt::PipeResidue> pipes;
  std::uint64_t child_launches = 0;
  std::uint64_t steps = 0;
  std::vector<Event> events;
};

// Executes `roots` together over the type-checked `prog`, then the queued
// children one at a time. Groups run in ascending order; within a group every
// item runs up to the next sync before any item passes it. Co-launched
// kernels take turns whenever one blocks on a pipe.
//
// Throws rt::RuntimeError for bad launches, divergent syncs, out-of-bounds
// accesses, deadlock and watchdog expiry.
InterpResult interpret(const Program& prog, rt::DeviceState& dev, std::vector<rt::LaunchRecord> roots,
                       const InterpConfig& cfg = {});

}  // namespace kf::interp

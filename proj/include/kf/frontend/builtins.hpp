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
#include <span>
#include <string_view>

namespace kf {

enum class Builtin : std::uint8_t {
  kNone,
  kGlobalId,
  kLocalId,
  kGroupId,
  kGlobalSize,
  kLocalSize,
  kBarrier,
  kWgBroadcast,
  kWgReduceAdd,
  kWgReduceMin,
  kWgReduceMax,
  kReadPipe,
  kWritePipe,
  kEnqueueKernel,
};

enum class BuiltinClass : std::uint8_t {
  kIdQuery,       // pure, one literal dimension argument
  kBarrier,       // work-group synchronization, no data
  kWorkGroup,     // work-group synchronization with data
  kPipe,          // blocking FIFO access
  kEnqueue,       // device-side launch
};

struct BuiltinInfo {
  std::string_view name;
  Builtin id;
  BuiltinClass cls;
  // Fixed argument count, or the minimum count when `variadic`.
  int arity;
  bool variadic;
};

// Version of the builtin signature table documented in docs/builtins.md.
inline constexpr int kBuiltinTableVersion = 1;

std::span<const BuiltinInfo> builtin_table();
const BuiltinInfo* find_builtin(std::string_view name);
const BuiltinInfo& builtin_info(Builtin id);

inline bool is_sync_builtin(Builtin b) {
  return b == Builtin::kBarrier || b == Builtin::kWgBroadcast ||
         b == Builtin::kWgReduceAdd || b == Builtin::kWgReduceMin ||
         b == Builtin::kWgReduceMax;
}

inline bool is_id_builtin(Builtin b) {
  return b == Builtin::kGlobalId || b == Builtin::kLocalId ||
         b == Builtin::kGroupId || b == Builtin::kGlobalSize ||
         b == Builtin::kLocalSize;
}

}  // namespace kf

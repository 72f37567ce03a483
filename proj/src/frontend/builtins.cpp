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

#include "kf/frontend/builtins.hpp"

#include <array>
#include <cstdlib>

namespace kf {
namespace {

constexpr std::array kTable = {
    BuiltinInfo{"get_global_id", Builtin::kGlobalId, BuiltinClass::kIdQuery, 1, false},
    BuiltinInfo{"get_local_id", Builtin::kLocalId, BuiltinClass::kIdQuery, 1, false},
    BuiltinInfo{"get_group_id", Builtin::kGroupId, BuiltinClass::kIdQuery, 1, false},
    BuiltinInfo{"get_global_size", Builtin::kGlobalSize, BuiltinClass::kIdQuery, 1, false},
    BuiltinInfo{"get_local_size", Builtin::kLocalSize, BuiltinClass::kIdQuery, 1, false},
    BuiltinInfo{"barrier", Builtin::kBarrier, BuiltinClass::kBarrier, 0, false},
    BuiltinInfo{"work_group_broadcast", Builtin::kWgBroadcast, BuiltinClass::kWorkGroup, 2, false},
    BuiltinInfo{"work_group_reduce_add", Builtin::kWgReduceAdd, BuiltinClass::kWorkGroup, 1, false},
    BuiltinInfo{"work_group_reduce_min", Builtin::kWgReduceMin, BuiltinClass::kWorkGroup, 1, false},
    BuiltinInfo{"work_group_reduce_max", Builtin::kWgReduceMax, BuiltinClass::kWorkGroup, 1, false},
    BuiltinInfo{"read_pipe", Builtin::kReadPipe, BuiltinClass::kPipe, 1, false},
    BuiltinInfo{"write_pipe", Builtin::kWritePipe, BuiltinClass::kPipe, 2, false},
    BuiltinInfo{"enqueue_kernel", Builtin::kEnqueueKernel, BuiltinClass::kEnqueue, 4, true},
};

}  // namespace

std::span<const BuiltinInfo> builtin_table() { return kTable; }

const BuiltinInfo* find_builtin(std::string_view name) {
  for (const auto& b : kTable) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const BuiltinInfo& builtin_info(Builtin id) {
  for (const auto& b : kTable) {
    if (b.id == id) return b;
  }
  std::abort();
}

}  // namespace kf

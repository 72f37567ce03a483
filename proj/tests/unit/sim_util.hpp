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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kf/frontend/typecheck.hpp"
#include "kf/ir/build.hpp"
#include "kf/ir/cse.hpp"
#include "kf/ir/ssa.hpp"
#include "kf/netlist/netlist.hpp"

namespace kf::testing {

// Every kernel of `text` through the whole compiler.
inline netlist::Netlist build_netlist(const std::string& text, bool cse = true,
                                      const sched::LatencyTable& t = sched::LatencyTable::defaults()) {
  auto r = compile_source(SourceUnit("t.mcl", text));
  EXPECT_TRUE(r.program.has_value()) << (r.diags.empty() ? "" : r.diags[0].message);
  if (!r.program) return {};
  std::vector<sched::DesignSchedule> designs;
  for (const auto& k : r.program->kernels) {
    ir::Function f = ir::build_cfg(*r.program, k);
    ir::to_ssa(f);
    if (cse) ir::run_cse(f);
    designs.push_back(sched::schedule_design(dfg::lower_function(f), t));
  }
  return netlist::elaborate(designs);
}

}  // namespace kf::testing

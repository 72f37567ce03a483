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

#include <vector>

#include "kf/ir/ir.hpp"

namespace kf::ir {

// Dominator tree over the blocks reachable from the entry
// (Cooper, Harvey and Kennedy's iterative algorithm).
class DominatorTree {
 public:
  explicit DominatorTree(const Function& f);

  // Immediate dominator; the entry is its own idom. kNoBlock if unreachable.
  BlockId idom(BlockId b) const { return idom_[b]; }
  bool reachable(BlockId b) const { return idom_[b] != kNoBlock; }
  bool dominates(BlockId a, BlockId b) const;
  const std::vector<BlockId>& children(BlockId b) const { return children_[b]; }
  const std::vector<BlockId>& rpo() const { return rpo_; }

  // Dominance frontier of every block.
  std::vector<std::vector<BlockId>> frontiers(const Function& f) const;

 private:
  BlockId entry_ = 0;
  std::vector<BlockId> rpo_;
  std::vector<int> order_;
  std::vector<BlockId> idom_;
  std::vector<std::vector<BlockId>> children_;
};

}  // namespace kf::ir

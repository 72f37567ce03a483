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

#include "kf/ir/dominance.hpp"

#include <algorithm>

namespace kf::ir {

DominatorTree::DominatorTree(const Function& f)
    : entry_(f.entry),
      rpo_(reverse_post_order(f)),
      order_(f.blocks.size(), -1),
      idom_(f.blocks.size(), kNoBlock),
      children_(f.blocks.size()) {
  if (rpo_.empty()) return;
  for (std::size_t i = 0; i < rpo_.size(); ++i) order_[rpo_[i]] = static_cast<int>(i);
  const auto preds = f.predecessors();
  idom_[entry_] = entry_;
  auto intersect = [&](BlockId a, BlockId b) {
    while (a != b) {
      while (order_[a] > order_[b]) a = idom_[a];
      while (order_[b] > order_[a]) b = idom_[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 1; i < rpo_.size(); ++i) {
      const BlockId b = rpo_[i];
      BlockId next = kNoBlock;
      for (BlockId p : preds[b]) {
        if (order_[p] < 0 || idom_[p] == kNoBlock) continue;
        next = next == kNoBlock ? p : intersect(p, next);
      }
      if (next != idom_[b]) {
        idom_[b] = next;
        changed = true;
      }
    }
  }
  for (BlockId b : rpo_) {
    if (b != entry_) children_[idom_[b]].push_back(b);
  }
}

bool DominatorTree::dominates(BlockId a, BlockId b) const {
  if (!reachable(a) || !reachable(b)) return false;
  while (true) {
    if (a == b) return true;
    if (b == entry_) return false;
    b = idom_[b];
  }
}

std::vector<std::vector<BlockId>> DominatorTree::frontiers(const Function& f) const {
  std::vector<std::vector<BlockId>> df(f.blocks.size());
  const auto preds = f.predecessors();
  for (BlockId b : rpo_) {
    if (preds[b].size() < 2) continue;
    for (BlockId p : preds[b]) {
      if (!reachable(p)) continue;
      BlockId runner = p;
      while (runner != idom_[b]) {
        if (std::find(df[runner].begin(), df[runner].end(), b) == df[runner].end())
          df[runner].push_back(b);
        if (runner == entry_) break;
        runner = idom_[runner];
      }
    }
  }
  return df;
}

}  // namespace kf::ir

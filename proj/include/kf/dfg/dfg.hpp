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

#include "kf/ir/ir.hpp"

namespace kf::dfg {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind : std::uint8_t {
  kArith,
  kConst,
  kIdGen,
  kArg,  // scalar kernel argument, constant for a launch
  kStreamLoad,
  kStreamStore,
  kSync,
  kPipeRead,
  kPipeWrite,
  kEnqueue,
  kPhi,
};

enum class ArithOp : std::uint8_t {
  kAdd, kSub, kMul, kDiv, kRem,
  kLt, kLe, kGt, kGe, kEq, kNe,
  kAnd, kOr, kXor, kNeg,
  kIToF, kUToF, kFToI, kFToU, kBitcast, kBoolToInt,
  kSelect,
};

enum class SyncKind : std::uint8_t { kBarrier, kBroadcast, kReduce };

std::string_view node_kind_name(NodeKind k);
std::string_view arith_op_name(ArithOp op);

// Source of one input slot: a node of the same block, or a value that arrives
// with the token from a predecessor block.
struct Input {
  NodeId node = kNoNode;
  ir::ValueId value = ir::kNoValue;
  bool from_node() const { return node != kNoNode; }
};

struct HwNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::kConst;
  // kArith: the operation and the type it operates on.
  ArithOp arith = ArithOp::kAdd;
  Type op_type = Type::kI32;
  // Result type, kVoid for nodes without a result.
  Type out_type = Type::kVoid;
  int out_width = 0;
  // kConst: raw bits.
  std::uint32_t value = 0;
  // kIdGen.
  Builtin id_query = Builtin::kNone;
  int dim = 0;
  // kStreamLoad/kStreamStore.
  int stream = -1;
  // kSync.
  SyncKind sync = SyncKind::kBarrier;
  ir::WgOp reduce = ir::WgOp::kReduceAdd;
  // Buffer, pipe, queue or scalar parameter index.
  int port = -1;
  // kEnqueue: child kernel and one entry per child argument; handle
  // arguments name a parameter of this kernel, the others are value ports
  // (inputs 2.. in order).
  std::string callee;
  std::vector<int> handle_args;
  // kPhi: incoming value per predecessor block.
  std::vector<std::pair<ir::BlockId, ir::ValueId>> phi_incoming;

  std::vector<Input> inputs;
  std::vector<int> in_widths;
  // SSA value defined by this node, if any.
  ir::ValueId result = ir::kNoValue;
  SourceLocation loc;
};

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  // Consumer input slot, or -1 for an ordering-only edge.
  int slot = -1;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct BlockGraph {
  ir::BlockId block = 0;
  std::vector<HwNode> nodes;
  std::vector<Edge> edges;
  // Values consumed from predecessor blocks (including phi inputs).
  std::vector<ir::ValueId> live_in;
  // Values handed to successor blocks.
  std::vector<ir::ValueId> live_out;
  // Values sent along each successor edge, in terminator order.
  std::vector<std::vector<ir::ValueId>> edge_payload;
  // Instructions replaced by constants during lowering.
  std::size_t folded = 0;
  ir::Terminator term;
  // Input feeding a conditional branch.
  Input cond;
  NodeId sync_node = kNoNode;
};

struct AffineTerm {
  enum class Kind : std::uint8_t { kGlobalId, kLocalId, kGroupId, kLoopCounter };
  Kind kind = Kind::kGlobalId;
  // Dimension for id terms; the phi value id for loop counters.
  std::uint32_t which = 0;
  std::int64_t coeff = 0;
  friend bool operator==(const AffineTerm&, const AffineTerm&) = default;
};

struct IndexClass {
  bool is_static = false;
  std::int64_t constant = 0;
  // Sorted by (kind, which); no zero coefficients.
  std::vector<AffineTerm> terms;
  friend bool operator==(const IndexClass&, const IndexClass&) = default;
};

std::string index_class_text(const IndexClass& c);

struct StreamDescriptor {
  int id = 0;
  int param = -1;
  bool is_write = false;
  IndexClass index;
  ir::BlockId block = 0;
  NodeId node = 0;
};

struct KernelDesign {
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<BlockGraph> blocks;
  ir::BlockId entry = 0;
  std::vector<std::pair<ir::BlockId, ir::BlockId>> control_edges;
  std::vector<StreamDescriptor> streams;
  std::vector<int> pipe_ports;
  std::vector<int> queue_ports;
  // Bit d set when dimension d of any id query is used.
  unsigned id_dims = 0;
  std::vector<Type> value_types;
};

// Values live on entry to each block, excluding that block's phi results.
struct Liveness {
  std::vector<std::vector<ir::ValueId>> live_in;
  // payload[p][k]: values sent along the k-th successor edge of block p.
  std::vector<std::vector<std::vector<ir::ValueId>>> payload;
};
Liveness compute_liveness(const ir::Function& f);

IndexClass classify_index(const ir::Function& f, ir::ValueId idx);

// Maps an id query, barrier, work-group, pipe or enqueue instruction to its
// hardware node. Inputs are left empty.
HwNode map_builtin(const ir::Instr& in);

KernelDesign lower_function(const ir::Function& f);

struct GraphViolation {
  ir::BlockId block = 0;
  std::string message;
};
// Checks acyclicity, edge widths, sync placement and node/instruction
// accounting where it can be recomputed from the graph.
std::vector<GraphViolation> verify_design(const KernelDesign& d);

std::string dump_design(const KernelDesign& d);

}  // namespace kf::dfg

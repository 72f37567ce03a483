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

#include <array>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kf/frontend/ast.hpp"

namespace kf::rt {

// Host protocol violations and execution faults. All are reported with exit
// code 4 by the command-line driver.
class RuntimeError : public std::runtime_error {
 public:
  enum class Kind : std::uint8_t {
    kOwnership,     // host/device access to a buffer it does not own
    kState,         // double map or unmap
    kPrecondition,  // bad sizes, unknown names, argument mismatch
    kBounds,        // out-of-bounds buffer access
    kDivergence,    // some but not all items of a group reach a sync
    kDeadlock,      // no progress possible
    kWatchdog,      // cycle or step budget exceeded
  };
  RuntimeError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view error_kind_name(RuntimeError::Kind k);

struct NdRange {
  int dims = 1;
  std::array<std::uint32_t, 3> global{1, 1, 1};
  std::array<std::uint32_t, 3> local{1, 1, 1};

  static NdRange linear(std::uint32_t global, std::uint32_t local) {
    NdRange nd;
    nd.global[0] = global;
    nd.local[0] = local;
    return nd;
  }
  // Throws RuntimeError(kPrecondition) unless 1 <= dims <= 3, all sizes are
  // at least 1 and every local size divides its global size.
  void validate() const;
  std::uint32_t groups(int d) const { return global[static_cast<std::size_t>(d)] / local[static_cast<std::size_t>(d)]; }
  std::uint32_t group_count() const { return groups(0) * groups(1) * groups(2); }
  std::uint32_t group_size() const { return local[0] * local[1] * local[2]; }

  friend bool operator==(const NdRange&, const NdRange&) = default;
};

// Per-item ids of linear group `group` and linear local id `item`; dimension
// 0 varies fastest.
struct ItemIds {
  std::array<std::uint32_t, 3> local{0, 0, 0};
  std::array<std::uint32_t, 3> group{0, 0, 0};
  std::array<std::uint32_t, 3> global{0, 0, 0};
};
ItemIds item_ids(const NdRange& nd, std::uint32_t group, std::uint32_t item);
// Value of an id or size query for dimension `dim`; out-of-range dimensions
// give 0 for ids and 1 for sizes.
std::uint32_t query_id(Builtin q, int dim, const NdRange& nd, const ItemIds& ids);

struct ArgValue {
  enum class Kind : std::uint8_t { kBuffer, kPipe, kQueue, kScalar };
  Kind kind = Kind::kScalar;
  // Buffer or pipe index in the DeviceState.
  int index = -1;
  // Scalar bits.
  std::uint32_t bits = 0;

  static ArgValue buffer(int i) { return {Kind::kBuffer, i, 0}; }
  static ArgValue pipe(int i) { return {Kind::kPipe, i, 0}; }
  static ArgValue queue() { return {Kind::kQueue, -1, 0}; }
  static ArgValue scalar(std::uint32_t bits) { return {Kind::kScalar, -1, bits}; }
  friend bool operator==(const ArgValue&, const ArgValue&) = default;
};

struct LaunchRecord {
  std::string kernel;
  NdRange nd;
  std::vector<ArgValue> args;
  friend bool operator==(const LaunchRecord&, const LaunchRecord&) = default;
};

struct Buffer {
  std::string name;
  std::vector<std::uint32_t> words;
  bool host_mapped = false;
};

struct Pipe {
  std::string name;
  int width = 32;
  int depth = 1;
  std::deque<std::uint32_t> contents;
  int occupancy() const { return static_cast<int>(contents.size()); }
};

// Pipe contents left over when a run ends, oldest first.
struct PipeResidue {
  std::string name;
  int depth = 0;
  std::vector<std::uint32_t> contents;
  friend bool operator==(const PipeResidue&, const PipeResidue&) = default;
};

// Host-visible device state: global buffers with coarse-grained SVM
// ownership, pipes and the device work queue.
class DeviceState {
 public:
  int create_buffer(std::string name, std::size_t words);
  // Throws RuntimeError(kPrecondition) when depth < 1.
  int create_pipe(int width, int depth, std::string name = {});

  // Initial contents supplied at creation, before any launch (the
  // equivalent of creating a buffer from host data).
  void initialize(int buffer, std::vector<std::uint32_t> words);

  void svm_map(int buffer);
  void svm_unmap(int buffer);
  // Host accesses require the buffer to be mapped.
  void host_write(int buffer, std::size_t index, std::uint32_t value);
  std::uint32_t host_read(int buffer, std::size_t index) const;

  // Checks a launch's arguments against the kernel signature and buffer
  // ownership.
  void check_launch(std::string_view kernel, const std::vector<ParamDecl>& params,
                    const std::vector<ArgValue>& args) const;

  std::vector<PipeResidue> residues() const;

  int find_buffer(std::string_view name) const;
  int find_pipe(std::string_view name) const;

  std::vector<Buffer> buffers;
  std::vector<Pipe> pipes;
  std::deque<LaunchRecord> work_queue;
  std::uint64_t child_launches = 0;

 private:
  Buffer& buffer_at(int i);
  const Buffer& buffer_at(int i) const;
};

// Launches that run concurrently must not race: no buffer written by one may
// be bound to another, each pipe has at most one writing and one reading
// launch, and at most one launch holds the device queue. `params[i]` is the
// signature of roots[i].
void check_co_launch(const std::vector<LaunchRecord>& roots,
                     const std::vector<const std::vector<ParamDecl>*>& params);

// Memfile: one 32-bit word per line as lowercase hex without prefix. Parse
// errors throw ConfigError naming the path and line.
std::vector<std::uint32_t> parse_memfile(std::string_view text, std::string_view path = "memfile");
std::string format_memfile(const std::vector<std::uint32_t>& words);

}  // namespace kf::rt

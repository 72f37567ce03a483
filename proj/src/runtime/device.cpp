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

#include "kf/runtime/device.hpp"

#include <charconv>
#include <map>
#include <set>

#include <fmt/format.h>

#include "kf/support/error.hpp"

namespace kf::rt {

namespace {

[[noreturn]] void fail(RuntimeError::Kind k, const std::string& msg) { throw RuntimeError(k, msg); }

std::string_view kind_word(ParamKind k) {
  switch (k) {
    case ParamKind::kGlobalBuffer: return "buffer";
    case ParamKind::kPipe: return "pipe";
    case ParamKind::kDeviceQueue: return "queue";
    case ParamKind::kScalar: return "scalar";
  }
  return "?";
}

ArgValue::Kind expected_kind(ParamKind k) {
  switch (k) {
    case ParamKind::kGlobalBuffer: return ArgValue::Kind::kBuffer;
    case ParamKind::kPipe: return ArgValue::Kind::kPipe;
    case ParamKind::kDeviceQueue: return ArgValue::Kind::kQueue;
    case ParamKind::kScalar: break;
  }
  return ArgValue::Kind::kScalar;
}

}  // namespace

std::string_view error_kind_name(RuntimeError::Kind k) {
  switch (k) {
    case RuntimeError::Kind::kOwnership: return "ownership error";
    case RuntimeError::Kind::kState: return "state error";
    case RuntimeError::Kind::kPrecondition: return "precondition error";
    case RuntimeError::Kind::kBounds: return "out-of-bounds access";
    case RuntimeError::Kind::kDivergence: return "divergent sync";
    case RuntimeError::Kind::kDeadlock: return "deadlock";
    case RuntimeError::Kind::kWatchdog: return "watchdog";
  }
  return "error";
}

void NdRange::validate() const {
  if (dims < 1 || dims > 3) fail(RuntimeError::Kind::kPrecondition, fmt::format("ndrange has {} dimensions", dims));
  for (int d = 0; d < 3; ++d) {
    const auto g = global[static_cast<std::size_t>(d)];
    const auto l = local[static_cast<std::size_t>(d)];
    if (g < 1 || l < 1) {
      fail(RuntimeError::Kind::kPrecondition, fmt::format("ndrange size 0 in dimension {}", d));
    }
    if (g % l != 0) {
      fail(RuntimeError::Kind::kPrecondition,
           fmt::format("local size {} does not divide global size {} in dimension {}", l, g, d));
    }
  }
}

ItemIds item_ids(const NdRange& nd, std::uint32_t group, std::uint32_t item) {
  ItemIds ids;
  for (std::size_t d = 0; d < 3; ++d) {
    const auto groups = nd.global[d] / nd.local[d];
    ids.local[d] = item % nd.local[d];
    item /= nd.local[d];
    ids.group[d] = group % groups;
    group /= groups;
    ids.global[d] = ids.group[d] * nd.local[d] + ids.local[d];
  }
  return ids;
}

std::uint32_t query_id(Builtin q, int dim, const NdRange& nd, const ItemIds& ids) {
  if (dim < 0 || dim > 2) return q == Builtin::kGlobalSize || q == Builtin::kLocalSize ? 1 : 0;
  const auto d = static_cast<std::size_t>(dim);
  switch (q) {
    case Builtin::kGlobalId: return ids.global[d];
    case Builtin::kLocalId: return ids.local[d];
    case Builtin::kGroupId: return ids.group[d];
    case Builtin::kGlobalSize: return nd.global[d];
    case Builtin::kLocalSize: return nd.local[d];
    default: return 0;
  }
}

int DeviceState::create_buffer(std::string name, std::size_t words) {
  buffers.push_back({std::move(name), std::vector<std::uint32_t>(words, 0), false});
  return static_cast<int>(buffers.size() - 1);
}

int DeviceState::create_pipe(int width, int depth, std::string name) {
  if (depth < 1) fail(RuntimeError::Kind::kPrecondition, fmt::format("pipe depth must be at least 1, got {}", depth));
  if (width != 32) fail(RuntimeError::Kind::kPrecondition, fmt::format("pipe element width must be 32, got {}", width));
  if (name.empty()) name = fmt::format("pipe{}", pipes.size());
  pipes.push_back({std::move(name), width, depth, {}});
  return static_cast<int>(pipes.size() - 1);
}

Buffer& DeviceState::buffer_at(int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= buffers.size()) {
    fail(RuntimeError::Kind::kPrecondition, fmt::format("no buffer {}", i));
  }
  return buffers[static_cast<std::size_t>(i)];
}

const Buffer& DeviceState::buffer_at(int i) const { return const_cast<DeviceState*>(this)->buffer_at(i); }

void DeviceState::initialize(int buffer, std::vector<std::uint32_t> words) {
  Buffer& b = buffer_at(buffer);
  if (words.size() > b.words.size()) {
    fail(RuntimeError::Kind::kPrecondition,
         fmt::format("initial data for buffer '{}' has {} words, buffer holds {}", b.name, words.size(),
                     b.words.size()));
  }
  std::copy(words.begin(), words.end(), b.words.begin());
}

void DeviceState::svm_map(int buffer) {
  Buffer& b = buffer_at(buffer);
  if (b.host_mapped) fail(RuntimeError::Kind::kState, fmt::format("buffer '{}' is already mapped", b.name));
  b.host_mapped = true;
}

void DeviceState::svm_unmap(int buffer) {
  Buffer& b = buffer_at(buffer);
  if (!b.host_mapped) fail(RuntimeError::Kind::kState, fmt::format("buffer '{}' is not mapped", b.name));
  b.host_mapped = false;
}

void DeviceState::host_write(int buffer, std::size_t index, std::uint32_t value) {
  Buffer& b = buffer_at(buffer);
  if (!b.host_mapped) {
    fail(RuntimeError::Kind::kOwnership, fmt::format("host write to buffer '{}' while it is device-owned", b.name));
  }
  if (index >= b.words.size()) {
    fail(RuntimeError::Kind::kBounds,
         fmt::format("host write to buffer '{}' at index {} (size {})", b.name, index, b.words.size()));
  }
  b.words[index] = value;
}

std::uint32_t DeviceState::host_read(int buffer, std::size_t index) const {
  const Buffer& b = buffer_at(buffer);
  if (!b.host_mapped) {
    fail(RuntimeError::Kind::kOwnership, fmt::format("host read of buffer '{}' while it is device-owned", b.name));
  }
  if (index >= b.words.size()) {
    fail(RuntimeError::Kind::kBounds,
         fmt::format("host read of buffer '{}' at index {} (size {})", b.name, index, b.words.size()));
  }
  return b.words[index];
}

void DeviceState::check_launch(std::string_view kernel, const std::vector<ParamDecl>& params,
                               const std::vector<ArgValue>& args) const {
  if (args.size() != params.size()) {
    fail(RuntimeError::Kind::kPrecondition,
         fmt::format("kernel '{}' takes {} arguments, got {}", kernel, params.size(), args.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    const auto& a = args[i];
    if (a.kind != expected_kind(p.kind)) {
      fail(RuntimeError::Kind::kPrecondition,
           fmt::format("argument {} ('{}') of kernel '{}' must be a {}", i, p.name, kernel, kind_word(p.kind)));
    }
    if (a.kind == ArgValue::Kind::kBuffer) {
      const Buffer& b = buffer_at(a.index);
      if (b.host_mapped) {
        fail(RuntimeError::Kind::kOwnership,
             fmt::format("kernel '{}' launched with buffer '{}' mapped to the host", kernel, b.name));
      }
    }
    if (a.kind == ArgValue::Kind::kPipe && (a.index < 0 || static_cast<std::size_t>(a.index) >= pipes.size())) {
      fail(RuntimeError::Kind::kPrecondition, fmt::format("no pipe {}", a.index));
    }
  }
}

std::vector<PipeResidue> DeviceState::residues() const {
  std::vector<PipeResidue> r;
  for (const auto& p : pipes) r.push_back({p.name, p.depth, {p.contents.begin(), p.contents.end()}});
  return r;
}

int DeviceState::find_buffer(std::string_view name) const {
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    if (buffers[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int DeviceState::find_pipe(std::string_view name) const {
  for (std::size_t i = 0; i < pipes.size(); ++i) {
    if (pipes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void check_co_launch(const std::vector<LaunchRecord>& roots,
                     const std::vector<const std::vector<ParamDecl>*>& params) {
  if (roots.size() < 2) return;
  // Per resource: the launches touching it and whether any writes.
  std::map<int, std::pair<std::set<std::size_t>, bool>> bufs;
  std::map<std::pair<int, bool>, std::set<std::size_t>> pipes;
  std::set<std::size_t> queues;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    const auto& ps = *params[r];
    for (std::size_t i = 0; i < roots[r].args.size() && i < ps.size(); ++i) {
      const auto& a = roots[r].args[i];
      if (a.kind == ArgValue::Kind::kBuffer) {
        auto& e = bufs[a.index];
        e.first.insert(r);
        e.second |= !ps[i].is_const;
      } else if (a.kind == ArgValue::Kind::kPipe) {
        pipes[{a.index, ps[i].dir == PipeDir::kWrite}].insert(r);
      } else if (a.kind == ArgValue::Kind::kQueue) {
        queues.insert(r);
      }
    }
  }
  for (const auto& [b, e] : bufs) {
    if (e.first.size() > 1 && e.second) {
      fail(RuntimeError::Kind::kPrecondition,
           fmt::format("buffer {} is written by one of several concurrent launches", b));
    }
  }
  for (const auto& [key, users] : pipes) {
    if (users.size() > 1) {
      fail(RuntimeError::Kind::kPrecondition,
           fmt::format("pipe {} has more than one {} launch", key.first, key.second ? "writing" : "reading"));
    }
  }
  if (queues.size() > 1) {
    fail(RuntimeError::Kind::kPrecondition, "more than one concurrent launch uses the device queue");
  }
}

std::vector<std::uint32_t> parse_memfile(std::string_view text, std::string_view path) {
  std::vector<std::uint32_t> words;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v, 16);
    const bool lower = line.find_first_of("ABCDEF") == std::string_view::npos;
    if (ec != std::errc() || p != line.data() + line.size() || line.size() > 8 || !lower) {
      throw ConfigError(fmt::format("{}:{}: expected up to 8 lowercase hex digits, got '{}'", path, line_no, line));
    }
    words.push_back(v);
  }
  return words;
}

std::string format_memfile(const std::vector<std::uint32_t>& words) {
  std::string out;
  out.reserve(words.size() * 9);
  for (auto w : words) out += fmt::format("{:08x}\n", w);
  return out;
}

}  // namespace kf::rt

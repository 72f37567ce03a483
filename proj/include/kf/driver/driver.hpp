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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kf/dfg/dfg.hpp"
#include "kf/frontend/ast.hpp"
#include "kf/interp/interp.hpp"
#include "kf/ir/ir.hpp"
#include "kf/netlist/netlist.hpp"
#include "kf/runtime/device.hpp"
#include "kf/sim/sim.hpp"

namespace kf::driver {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFrontend = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitSimFault = 4;
inline constexpr int kExitDivergence = 5;

// --- Manifest ------------------------------------------------------------------
//
// Flat text, `[section name]` headers and `key = value` lines; see
// docs/manifest.md.

struct BufferDef {
  std::string name;
  std::uint32_t size = 0;
  std::optional<std::filesystem::path> init;
};

struct PipeDef {
  std::string name;
  int width = 32;
  // 0 takes the sim default.
  int depth = 0;
};

struct LaunchDef {
  std::string kernel;
  rt::NdRange nd;
  // Buffer or pipe names, `queue`, or scalar literals.
  std::vector<std::string> args;
  int line = 0;
};

struct HostOp {
  enum class Kind : std::uint8_t { kMap, kUnmap, kWrite };
  Kind kind = Kind::kMap;
  std::string buffer;
  std::uint32_t index = 0;
  std::uint32_t value = 0;
};

struct SimOverrides {
  std::optional<std::uint64_t> max_cycles;
  std::optional<int> pipe_depth_default;
  std::optional<int> mem_latency;
};

struct RunDef {
  std::string name;
  // Launched together.
  std::vector<LaunchDef> launches;
  // Applied in order before the launches.
  std::vector<HostOp> host;
  SimOverrides sim;
};

struct Manifest {
  std::filesystem::path path;
  std::vector<std::filesystem::path> sources;
  std::optional<std::filesystem::path> latency_table;
  std::vector<BufferDef> buffers;
  std::vector<PipeDef> pipes;
  std::vector<RunDef> runs;
  SimOverrides sim;

  const RunDef& run(std::string_view name) const;
};

// Relative paths resolve against `dir`. Throws ConfigError naming the line.
Manifest parse_manifest(std::string_view text, const std::filesystem::path& path,
                        const std::filesystem::path& dir);
// Also checks that every referenced file exists.
Manifest load_manifest(const std::filesystem::path& path);

// --- Compilation ---------------------------------------------------------------

// Frontend failure; what() holds the formatted diagnostics.
class FrontendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompileOptions {
  bool cse = true;
  // Overrides the manifest's table.
  std::optional<std::filesystem::path> latency_table;
  bool color = false;
};

struct Project {
  Manifest manifest;
  Program program;
  std::vector<ir::Function> functions;
  std::vector<sched::DesignSchedule> schedules;
  netlist::Netlist net;
  // The table the kernels were scheduled with.
  sched::LatencyTable table;
};

// Reads, type-checks and compiles every kernel of the manifest's sources.
// Throws FrontendError or ConfigError.
Project compile_project(Manifest m, const CompileOptions& opt = {});

// Sim configuration of `run`: defaults, then the manifest, then the run.
sim::SimConfig sim_config(const Manifest& m, const RunDef& run);

// Fresh device state for `run` with the host operations applied, and its
// root launches. Throws ConfigError for bindings that do not match the
// kernel signatures and rt::RuntimeError for failed host operations.
struct BoundRun {
  rt::DeviceState dev;
  std::vector<rt::LaunchRecord> roots;
  // Buffers bound to a writable buffer parameter of some root.
  std::vector<int> outputs;
};
BoundRun bind_run(const Project& p, const RunDef& run, const sim::SimConfig& cfg);

struct Divergence {
  std::string what;
};

// First difference between the simulated and interpreted final states, or
// nullopt when buffers, pipe residues and child launch counts all match.
std::optional<Divergence> compare(const sim::RunResult& s, const interp::InterpResult& r);

// --- Commands ------------------------------------------------------------------

struct Options {
  std::filesystem::path manifest;
  std::string run;
  // Defaults to `out` next to the manifest.
  std::optional<std::filesystem::path> out_dir;
  bool dump_ir = false;
  bool dump_dfg = false;
  bool trace = false;
  std::optional<std::filesystem::path> latency_table;
  std::optional<std::uint64_t> max_cycles;
  bool no_cse = false;
  std::string inject_fault;
  bool color = false;
};

// Each returns the process exit code and reports errors on `err`.
int cmd_compile(const Options& o, std::ostream& out, std::ostream& err);
int cmd_sim(const Options& o, std::ostream& out, std::ostream& err);
int cmd_verify(const Options& o, std::ostream& out, std::ostream& err);

// Writes through a temporary file in the same directory and renames it over
// `path`. Throws ConfigError when the file cannot be written.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace kf::driver

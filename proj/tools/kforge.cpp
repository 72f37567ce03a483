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

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kf/driver/driver.hpp"

namespace {

// KERNELFORGE_COLOR=1 colors diagnostics; unset or 0 leaves them plain.
int color_from_env(bool& color) {
  const char* v = std::getenv("KERNELFORGE_COLOR");
  const std::string s = v == nullptr ? "0" : v;
  if (s != "0" && s != "1") {
    std::cerr << "kforge: error: KERNELFORGE_COLOR must be 0 or 1, got '" << s << "'\n";
    return kf::driver::kExitConfig;
  }
  color = s == "1";
  return kf::driver::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KernelForge: MiniCL to cycle-accurate HDL"};
  app.require_subcommand(1);
  kf::driver::Options o;
  std::string manifest;
  std::string out_dir;
  std::string table;
  std::uint64_t max_cycles = 0;

  auto common = [&](CLI::App* c) {
    c->add_option("manifest", manifest, "Project manifest")->required();
    c->add_option("--out-dir", out_dir, "Output directory (default: out/ next to the manifest)");
    c->add_option("--latency-table", table, "Latency table overriding the manifest's");
    c->add_flag("--no-cse", o.no_cse, "Disable common subexpression elimination");
  };
  auto running = [&](CLI::App* c) {
    c->add_option("--run", o.run, "Run section to execute (optional when the manifest has one)");
    c->add_option("--max-cycles", max_cycles, "Watchdog limit in cycles")->check(CLI::PositiveNumber);
    c->add_flag("--trace", o.trace, "Write the cycle trace");
    c->add_option("--inject-fault", o.inject_fault)->group("");
  };

  CLI::App* compile = app.add_subcommand("compile", "Emit HDL and the resource report");
  common(compile);
  compile->add_flag("--dump-ir", o.dump_ir, "Write <kernel>.ir");
  compile->add_flag("--dump-dfg", o.dump_dfg, "Write <kernel>.dfg");
  CLI::App* sim = app.add_subcommand("sim", "Simulate a run cycle by cycle");
  common(sim);
  running(sim);
  CLI::App* verify = app.add_subcommand("verify", "Check a run against the reference interpreter");
  common(verify);
  running(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kf::driver::kExitConfig;
  }
  if (const int rc = color_from_env(o.color); rc != 0) return rc;
  o.manifest = manifest;
  if (!out_dir.empty()) o.out_dir = out_dir;
  if (!table.empty()) o.latency_table = table;
  if (max_cycles > 0) o.max_cycles = max_cycles;

  if (compile->parsed()) return kf::driver::cmd_compile(o, std::cout, std::cerr);
  if (sim->parsed()) return kf::driver::cmd_sim(o, std::cout, std::cerr);
  return kf::driver::cmd_verify(o, std::cout, std::cerr);
}

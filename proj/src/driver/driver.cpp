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

#include "kf/driver/driver.hpp"

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "kf/frontend/typecheck.hpp"
#include "kf/ir/build.hpp"
#include "kf/ir/cse.hpp"
#include "kf/ir/dump.hpp"
#include "kf/ir/ssa.hpp"
#include "kf/support/error.hpp"

namespace kf::driver {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class ManifestParser {
 public:
  ManifestParser(const fs::path& path, const fs::path& dir) : dir_(dir) { m_.path = path; }

  Manifest parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = std::min(text.find('\n', pos), text.size());
      ++line_;
      std::string_view l = text.substr(pos, nl - pos);
      if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
      l = trim(l);
      if (!l.empty()) (l.front() == '[') ? section(l) : entry(l);
      pos = nl + 1;
    }
    finish();
    return std::move(m_);
  }

 private:
  enum class Sec : std::uint8_t { kNone, kProject, kSim, kBuffer, kPipe, kRun };

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(fmt::format("{}:{}: {}", m_.path.string(), line_, msg));
  }

  void section(std::string_view l) {
    if (l.back() != ']') fail("section header must end with ']'");
    const auto parts = split_ws(l.substr(1, l.size() - 2));
    if (parts.empty() || parts.size() > 2) fail("expected '[kind]' or '[kind name]'");
    const std::string& kind = parts[0];
    keys_.clear();
    const bool named = kind == "buffer" || kind == "pipe" || kind == "run";
    if (named != (parts.size() == 2)) {
      fail(named ? fmt::format("section '{}' needs a name", kind) : fmt::format("section '{}' takes no name", kind));
    }
    if (named) {
      if (!is_identifier(parts[1])) fail(fmt::format("invalid name '{}'", parts[1]));
      if (!names_[kind].insert(parts[1]).second) fail(fmt::format("duplicate {} '{}'", kind, parts[1]));
    } else if (!singletons_.insert(kind).second) {
      fail(fmt::format("duplicate section '{}'", kind));
    }
    if (kind == "project") {
      sec_ = Sec::kProject;
    } else if (kind == "sim") {
      sec_ = Sec::kSim;
    } else if (kind == "buffer") {
      sec_ = Sec::kBuffer;
      m_.buffers.push_back({parts[1], 0, std::nullopt});
      sizes_.push_back(line_);
    } else if (kind == "pipe") {
      sec_ = Sec::kPipe;
      m_.pipes.push_back({parts[1]});
    } else if (kind == "run") {
      sec_ = Sec::kRun;
      m_.runs.push_back({parts[1]});
    } else {
      fail(fmt::format("unknown section '{}'", kind));
    }
  }

  std::uint64_t number(std::string_view key, std::string_view v, std::uint64_t lo, std::uint64_t hi) const {
    const auto n = to_u64(v);
    if (!n || *n < lo || *n > hi) fail(fmt::format("'{}' must be an integer in [{}, {}], got '{}'", key, lo, hi, v));
    return *n;
  }

  void sim_key(SimOverrides& s, const std::string& key, std::string_view v) {
    if (key == "max_cycles") {
      s.max_cycles = number(key, v, 1, UINT64_MAX);
    } else if (key == "pipe_depth_default") {
      s.pipe_depth_default = static_cast<int>(number(key, v, 1, 1 << 20));
    } else if (key == "mem_latency") {
      s.mem_latency = static_cast<int>(number(key, v, 0, 1024));
    } else {
      fail(fmt::format("unknown key '{}'", key));
    }
  }

  rt::NdRange parse_sizes(std::string_view g, std::string_view l) const {
    auto dims = [&](std::string_view s, std::array<std::uint32_t, 3>& out) {
      int n = 0;
      std::size_t pos = 0;
      while (true) {
        const auto x = s.find('x', pos);
        const auto part = s.substr(pos, x == std::string_view::npos ? std::string_view::npos : x - pos);
        if (n == 3) fail(fmt::format("more than three dimensions in '{}'", s));
        out[static_cast<std::size_t>(n++)] = static_cast<std::uint32_t>(number("size", part, 1, UINT32_MAX));
        if (x == std::string_view::npos) break;
        pos = x + 1;
      }
      return n;
    };
    rt::NdRange nd;
    const int gd = dims(g, nd.global);
    const int ld = dims(l, nd.local);
    if (gd != ld) fail(fmt::format("global size '{}' and local size '{}' differ in dimensions", g, l));
    nd.dims = gd;
    for (int d = 0; d < gd; ++d) {
      if (nd.global[static_cast<std::size_t>(d)] % nd.local[static_cast<std::size_t>(d)] != 0) {
        fail(fmt::format("local size does not divide global size in dimension {}", d));
      }
    }
    return nd;
  }

  HostOp host_op(std::string_view v) const {
    const auto t = split_ws(v);
    HostOp op;
    if (t.size() == 2 && (t[0] == "map" || t[0] == "unmap")) {
      op.kind = t[0] == "map" ? HostOp::Kind::kMap : HostOp::Kind::kUnmap;
    } else if (t.size() == 4 && t[0] == "write") {
      op.kind = HostOp::Kind::kWrite;
      op.index = static_cast<std::uint32_t>(number("index", t[2], 0, UINT32_MAX));
      op.value = static_cast<std::uint32_t>(number("value", t[3], 0, UINT32_MAX));
    } else {
      fail(fmt::format("expected 'map <buffer>', 'unmap <buffer>' or 'write <buffer> <index> <value>', got '{}'", v));
    }
    op.buffer = t[1];
    return op;
  }

  void entry(std::string_view l) {
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(trim(l.substr(0, eq)));
    const std::string_view v = trim(l.substr(eq + 1));
    if (key.empty() || v.empty()) fail("expected 'key = value'");
    const bool repeatable = sec_ == Sec::kRun && (key == "launch" || key == "host");
    if (!repeatable && !keys_.insert(key).second) fail(fmt::format("duplicate key '{}'", key));
    switch (sec_) {
      case Sec::kNone: fail("key outside of a section");
      case Sec::kProject:
        if (key == "sources") {
          for (auto& s : split_ws(v)) m_.sources.push_back(dir_ / s);
        } else if (key == "latency_table") {
          m_.latency_table = dir_ / std::string(v);
        } else {
          fail(fmt::format("unknown key '{}'", key));
        }
        break;
      case Sec::kSim: sim_key(m_.sim, key, v); break;
      case Sec::kBuffer: {
        BufferDef& b = m_.buffers.back();
        if (key == "size") {
          b.size = static_cast<std::uint32_t>(number(key, v, 1, 1u << 26));
        } else if (key == "init") {
          b.init = dir_ / std::string(v);
        } else {
          fail(fmt::format("unknown key '{}'", key));
        }
        break;
      }
      case Sec::kPipe: {
        PipeDef& p = m_.pipes.back();
        if (key == "depth") {
          p.depth = static_cast<int>(number(key, v, 1, 1 << 20));
        } else if (key == "width") {
          p.width = static_cast<int>(number(key, v, 32, 32));
        } else {
          fail(fmt::format("unknown key '{}'", key));
        }
        break;
      }
      case Sec::kRun: {
        RunDef& r = m_.runs.back();
        if (key == "launch") {
          const auto t = split_ws(v);
          if (t.size() < 3) fail("expected 'launch = <kernel> <global> <local> [args...]'");
          LaunchDef ld{t[0], parse_sizes(t[1], t[2]), {t.begin() + 3, t.end()}, line_};
          r.launches.push_back(std::move(ld));
        } else if (key == "host") {
          r.host.push_back(host_op(v));
        } else {
          sim_key(r.sim, key, v);
        }
        break;
      }
    }
  }

  void finish() {
    if (m_.sources.empty()) throw ConfigError(fmt::format("{}: [project] sources missing", m_.path.string()));
    for (std::size_t i = 0; i < m_.buffers.size(); ++i) {
      if (m_.buffers[i].size == 0) {
        line_ = sizes_[i];
        fail(fmt::format("buffer '{}' has no size", m_.buffers[i].name));
      }
    }
    for (const auto& r : m_.runs) {
      if (r.launches.empty()) throw ConfigError(fmt::format("{}: run '{}' has no launch", m_.path.string(), r.name));
    }
  }

  fs::path dir_;
  Manifest m_;
  int line_ = 0;
  Sec sec_ = Sec::kNone;
  std::set<std::string> keys_;
  std::set<std::string> singletons_;
  std::map<std::string, std::set<std::string>> names_;
  std::vector<int> sizes_;
};

std::uint32_t scalar_bits(std::string_view s, Type t, const std::string& where) {
  auto bad = [&]() -> std::uint32_t {
    throw ConfigError(fmt::format("{}: '{}' is not a valid {} literal", where, s, type_spelling(t)));
  };
  switch (t) {
    case Type::kBool:
      if (s == "true") return 1;
      if (s == "false") return 0;
      return bad();
    case Type::kF32: {
      std::string_view x = s;
      if (!x.empty() && (x.back() == 'f' || x.back() == 'F')) x.remove_suffix(1);
      float f = 0;
      const auto [p, ec] = std::from_chars(x.data(), x.data() + x.size(), f);
      if (x.empty() || ec != std::errc() || p != x.data() + x.size()) return bad();
      return std::bit_cast<std::uint32_t>(f);
    }
    case Type::kU32: {
      std::string_view x = s;
      if (!x.empty() && (x.back() == 'u' || x.back() == 'U')) x.remove_suffix(1);
      const auto v = to_u64(x);
      if (!v || *v > UINT32_MAX) return bad();
      return static_cast<std::uint32_t>(*v);
    }
    default: {
      std::string_view x = s;
      const bool neg = !x.empty() && x.front() == '-';
      if (neg) x.remove_prefix(1);
      const auto v = to_u64(x);
      if (!v) return bad();
      const bool hex = x.size() > 2 && x[1] == 'x';
      if (neg ? *v > 0x80000000ull : *v > (hex ? 0xffffffffull : 0x7fffffffull)) return bad();
      return neg ? static_cast<std::uint32_t>(0 - *v) : static_cast<std::uint32_t>(*v);
    }
  }
}

// Maps a line of the concatenated sources back to its file.
struct SourceMap {
  struct Part {
    std::string path;
    int first_line;
  };
  std::vector<Part> parts;

  std::pair<std::string, int> locate(int line) const {
    const Part* p = &parts.front();
    for (const auto& x : parts) {
      if (x.first_line <= line) p = &x;
    }
    return {p->path, line - p->first_line + 1};
  }
};

bool kernel_writes(const KernelDecl& k, std::size_t param) {
  return k.params[param].kind == ParamKind::kGlobalBuffer && !k.params[param].is_const;
}

}  // namespace

const RunDef& Manifest::run(std::string_view name) const {
  for (const auto& r : runs) {
    if (r.name == name) return r;
  }
  if (name.empty() && runs.size() == 1) return runs[0];
  if (name.empty()) throw ConfigError(fmt::format("{}: --run is required, the manifest has {} runs", path.string(), runs.size()));
  throw ConfigError(fmt::format("{}: no run named '{}'", path.string(), name));
}

Manifest parse_manifest(std::string_view text, const fs::path& path, const fs::path& dir) {
  return ManifestParser(path, dir).parse(text);
}

Manifest load_manifest(const fs::path& path) {
  Manifest m = parse_manifest(read_file(path), path, path.parent_path());
  auto must_exist = [&](const fs::path& f) {
    if (!fs::is_regular_file(f)) throw ConfigError(fmt::format("{}: file '{}' does not exist", path.string(), f.string()));
  };
  for (const auto& s : m.sources) must_exist(s);
  if (m.latency_table) must_exist(*m.latency_table);
  for (const auto& b : m.buffers) {
    if (b.init) must_exist(*b.init);
  }
  return m;
}

Project compile_project(Manifest m, const CompileOptions& opt) {
  std::string text;
  SourceMap map;
  int line = 1;
  for (const auto& s : m.sources) {
    std::string body = read_file(s);
    if (!body.empty() && body.back() != '\n') body += '\n';
    map.parts.push_back({s.string(), line});
    line += static_cast<int>(std::count(body.begin(), body.end(), '\n'));
    text += body;
  }
  FrontendResult fr = compile_source(SourceUnit(m.sources.front().string(), text));
  if (!fr.program) {
    std::string msg;
    for (const auto& d : fr.diags) {
      auto [path, l] = map.locate(d.location.line);
      Diagnostic local = d;
      local.location.line = l;
      msg += format_diagnostic(local, path, opt.color);
      if (msg.back() != '\n') msg += '\n';
    }
    throw FrontendError(msg);
  }

  sched::LatencyTable table = sched::LatencyTable::defaults();
  const auto table_path = opt.latency_table ? opt.latency_table : m.latency_table;
  if (table_path) {
    try {
      table = sched::LatencyTable::parse(read_file(*table_path));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", table_path->string(), e.what()));
    }
  }
  sim::SimConfig base;
  if (m.sim.mem_latency) base.mem_latency = *m.sim.mem_latency;
  sim::apply_memory_latency(table, base);

  Project p{std::move(m), std::move(*fr.program), {}, {}, {}, table};
  for (const auto& k : p.program.kernels) {
    ir::Function f = ir::build_cfg(p.program, k);
    ir::to_ssa(f);
    if (opt.cse) ir::run_cse(f);
    p.schedules.push_back(sched::schedule_design(dfg::lower_function(f), table));
    p.functions.push_back(std::move(f));
  }
  p.net = netlist::elaborate(p.schedules);
  return p;
}

sim::SimConfig sim_config(const Manifest& m, const RunDef& run) {
  sim::SimConfig cfg;
  for (const SimOverrides* s : {&m.sim, &run.sim}) {
    if (s->max_cycles) cfg.max_cycles = *s->max_cycles;
    if (s->pipe_depth_default) cfg.pipe_depth_default = *s->pipe_depth_default;
    if (s->mem_latency) cfg.mem_latency = *s->mem_latency;
  }
  return cfg;
}

BoundRun bind_run(const Project& p, const RunDef& run, const sim::SimConfig& cfg) {
  const Manifest& m = p.manifest;
  BoundRun b;
  for (const auto& def : m.buffers) {
    const int i = b.dev.create_buffer(def.name, def.size);
    if (def.init) {
      auto words = rt::parse_memfile(read_file(*def.init), def.init->string());
      if (words.size() > def.size) {
        throw ConfigError(fmt::format("{}: {} words for buffer '{}' of size {}", def.init->string(), words.size(),
                                      def.name, def.size));
      }
      b.dev.initialize(i, std::move(words));
    }
  }
  for (const auto& def : m.pipes) b.dev.create_pipe(def.width, def.depth > 0 ? def.depth : cfg.pipe_depth_default, def.name);

  std::set<int> outputs;
  for (const auto& l : run.launches) {
    const std::string where = fmt::format("{}:{}", m.path.string(), l.line);
    const KernelDecl* k = p.program.find_kernel(l.kernel);
    if (k == nullptr) throw ConfigError(fmt::format("{}: unknown kernel '{}'", where, l.kernel));
    if (l.args.size() != k->params.size()) {
      throw ConfigError(fmt::format("{}: kernel '{}' takes {} arguments, {} given", where, l.kernel, k->params.size(),
                                    l.args.size()));
    }
    rt::LaunchRecord rec{l.kernel, l.nd, {}};
    for (std::size_t a = 0; a < l.args.size(); ++a) {
      const ParamDecl& prm = k->params[a];
      const std::string& s = l.args[a];
      auto need = [&](int idx, const char* what) {
        if (idx < 0) {
          throw ConfigError(fmt::format("{}: parameter '{}' of '{}' needs a {}, '{}' is not one", where, prm.name,
                                        l.kernel, what, s));
        }
        return idx;
      };
      switch (prm.kind) {
        case ParamKind::kGlobalBuffer: {
          const int i = need(b.dev.find_buffer(s), "buffer");
          rec.args.push_back(rt::ArgValue::buffer(i));
          if (kernel_writes(*k, a)) outputs.insert(i);
          break;
        }
        case ParamKind::kPipe:
          rec.args.push_back(rt::ArgValue::pipe(need(b.dev.find_pipe(s), "pipe")));
          break;
        case ParamKind::kDeviceQueue:
          need(s == "queue" ? 0 : -1, "queue");
          rec.args.push_back(rt::ArgValue::queue());
          break;
        case ParamKind::kScalar:
          rec.args.push_back(rt::ArgValue::scalar(
              scalar_bits(s, prm.elem, fmt::format("{}: parameter '{}'", where, prm.name))));
          break;
      }
    }
    b.roots.push_back(std::move(rec));
  }
  b.outputs.assign(outputs.begin(), outputs.end());

  for (const auto& op : run.host) {
    const int i = b.dev.find_buffer(op.buffer);
    if (i < 0) throw ConfigError(fmt::format("{}: run '{}': unknown buffer '{}'", m.path.string(), run.name, op.buffer));
    switch (op.kind) {
      case HostOp::Kind::kMap: b.dev.svm_map(i); break;
      case HostOp::Kind::kUnmap: b.dev.svm_unmap(i); break;
      case HostOp::Kind::kWrite: b.dev.host_write(i, op.index, op.value); break;
    }
  }
  return b;
}

std::optional<Divergence> compare(const sim::RunResult& s, const interp::InterpResult& r) {
  if (s.buffers.size() != r.buffers.size()) {
    return Divergence{fmt::format("buffer count: sim {} interp {}", s.buffers.size(), r.buffers.size())};
  }
  for (std::size_t b = 0; b < s.buffers.size(); ++b) {
    const auto& x = s.buffers[b].words;
    const auto& y = r.buffers[b].words;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
      if (x[i] != y[i]) {
        return Divergence{fmt::format("buffer '{}' index {}: sim 0x{:08x} interp 0x{:08x}", s.buffers[b].name, i, x[i],
                                      y[i])};
      }
    }
  }
  for (std::size_t p = 0; p < std::min(s.pipes.size(), r.pipes.size()); ++p) {
    const auto& x = s.pipes[p].contents;
    const auto& y = r.pipes[p].contents;
    if (x.size() != y.size()) {
      return Divergence{fmt::format("pipe '{}' residue: sim {} words interp {} words", s.pipes[p].name, x.size(),
                                    y.size())};
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != y[i]) {
        return Divergence{
            fmt::format("pipe '{}' residue index {}: sim 0x{:08x} interp 0x{:08x}", s.pipes[p].name, i, x[i], y[i])};
      }
    }
  }
  if (s.child_launches != r.child_launches) {
    return Divergence{fmt::format("child launches: sim {} interp {}", s.child_launches, r.child_launches)};
  }
  return std::nullopt;
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += fmt::format(".tmp{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  }
}

// --- Commands ------------------------------------------------------------------

namespace {

fs::path out_dir(const Options& o) { return o.out_dir ? *o.out_dir : o.manifest.parent_path() / "out"; }

Project load(const Options& o) {
  Manifest m = load_manifest(o.manifest);
  if (o.latency_table && !fs::is_regular_file(*o.latency_table)) {
    throw ConfigError(fmt::format("latency table '{}' does not exist", o.latency_table->string()));
  }
  return compile_project(std::move(m), {.cse = !o.no_cse, .latency_table = o.latency_table, .color = o.color});
}

sched::ResourceParams resource_params(const Project& p, const std::string& kernel) {
  sched::ResourceParams rp;
  std::uint32_t group = 0;
  for (const auto& r : p.manifest.runs) {
    const sim::SimConfig cfg = sim_config(p.manifest, r);
    for (const auto& l : r.launches) {
      if (l.kernel != kernel) continue;
      group = std::max(group, l.nd.group_size());
      const KernelDecl* k = p.program.find_kernel(kernel);
      for (std::size_t a = 0; k != nullptr && a < std::min(l.args.size(), k->params.size()); ++a) {
        if (k->params[a].kind != ParamKind::kPipe) continue;
        for (const auto& pd : p.manifest.pipes) {
          if (pd.name == l.args[a]) rp.pipe_depth.emplace(static_cast<int>(a), pd.depth > 0 ? pd.depth : cfg.pipe_depth_default);
        }
      }
    }
  }
  if (group > 0) rp.group_size = static_cast<int>(group);
  if (p.manifest.sim.pipe_depth_default) rp.pipe_depth_default = *p.manifest.sim.pipe_depth_default;
  return rp;
}

struct Prepared {
  Project project;
  const RunDef* run;
  sim::SimConfig cfg;
};

Prepared prepare(const Options& o) {
  Project p = load(o);
  const RunDef& run = p.manifest.run(o.run);
  sim::SimConfig cfg = sim_config(p.manifest, run);
  if (o.max_cycles) cfg.max_cycles = *o.max_cycles;
  cfg.trace = o.trace;
  sim::validate(cfg);
  if (!o.inject_fault.empty() && !sim::inject_fault(p.net, o.inject_fault)) {
    throw ConfigError(fmt::format("fault '{}' matches no unit of the design", o.inject_fault));
  }
  return {std::move(p), &run, cfg};
}

template <typename F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const FrontendError& e) {
    err << e.what();
    return kExitFrontend;
  } catch (const ConfigError& e) {
    err << "kforge: error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rt::RuntimeError& e) {
    err << "kforge: " << rt::error_kind_name(e.kind()) << " fault: " << e.what() << '\n';
    return kExitSimFault;
  }
}

}  // namespace

int cmd_compile(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Project p = load(o);
    const fs::path dir = out_dir(o);
    std::vector<sched::ResourceReport> reports;
    for (std::size_t i = 0; i < p.net.modules.size(); ++i) {
      const auto& mod = p.net.modules[i];
      const std::string& k = mod.kernel();
      write_file_atomic(dir / (k + ".v"), netlist::emit_hdl(mod).text);
      reports.push_back(sched::estimate_resources(p.schedules[i], resource_params(p, k)));
      if (o.dump_ir) write_file_atomic(dir / (k + ".ir"), ir::dump(p.functions[i]));
      if (o.dump_dfg) write_file_atomic(dir / (k + ".dfg"), dfg::dump_design(p.schedules[i].design));
    }
    write_file_atomic(dir / "report.json", sched::report_json(reports));
    out << fmt::format("compiled {} kernel{} into {}\n", reports.size(), reports.size() == 1 ? "" : "s", dir.string());
    return kExitOk;
  });
}

namespace {

std::string residue_text(const rt::PipeResidue& r) {
  std::string s = fmt::format("pipe {}: {} of {} words left", r.name, r.contents.size(), r.depth);
  for (std::size_t i = 0; i < r.contents.size(); ++i) s += fmt::format("{}{:08x}", i == 0 ? " [" : " ", r.contents[i]);
  if (!r.contents.empty()) s += "]";
  return s + "\n";
}

}  // namespace

int cmd_sim(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Prepared pr = prepare(o);
    BoundRun b = bind_run(pr.project, *pr.run, pr.cfg);
    const fs::path dir = out_dir(o);
    const std::string& name = pr.run->name;
    std::optional<sim::RunResult> r;
    std::string trace;
    {
      sim::Simulator s(pr.project.net, b.dev, b.roots, pr.cfg);
      try {
        r = s.run();
      } catch (const rt::RuntimeError&) {
        if (o.trace) write_file_atomic(dir / (name + ".trace.csv"), s.trace());
        throw;
      }
    }
    for (int i : b.outputs) {
      const auto& buf = r->buffers[static_cast<std::size_t>(i)];
      write_file_atomic(dir / fmt::format("{}.{}.mem", name, buf.name), rt::format_memfile(buf.words));
    }
    if (o.trace) write_file_atomic(dir / (name + ".trace.csv"), r->trace);
    out << fmt::format("run {}: {} cycles\n", name, r->cycles);
    for (const auto& p : r->pipes) out << residue_text(p);
    if (r->child_launches > 0) out << fmt::format("child launches: {}\n", r->child_launches);
    return kExitOk;
  });
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Prepared pr = prepare(o);
    const fs::path dir = out_dir(o);
    const std::string& name = pr.run->name;
    BoundRun bs = bind_run(pr.project, *pr.run, pr.cfg);
    BoundRun bi = bind_run(pr.project, *pr.run, pr.cfg);
    const sim::RunResult s = sim::run_ndrange(pr.project.net, bs.dev, bs.roots, pr.cfg);
    const interp::InterpResult r = interp::interpret(pr.project.program, bi.dev, bi.roots);
    if (o.trace) {
      write_file_atomic(dir / (name + ".trace.csv"), s.trace);
      write_file_atomic(dir / (name + ".events.csv"), interp::format_events(r.events));
    }
    if (const auto d = compare(s, r)) {
      out << "DIVERGENCE " << d->what << '\n';
      return kExitDivergence;
    }
    out << fmt::format("PASS run {}: {} buffers, {} pipes, {} child launches compared; {} cycles\n", name,
                       s.buffers.size(), s.pipes.size(), s.child_launches, s.cycles);
    return kExitOk;
  });
}

}  // namespace kf::driver

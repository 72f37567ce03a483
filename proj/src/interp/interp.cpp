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

#include "kf/interp/interp.hpp"

#include <bit>
#include <cmath>
#include <coroutine>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <utility>

#include <fmt/format.h>

namespace kf::interp {

namespace {

using rt::RuntimeError;

// --- Coroutine task ----------------------------------------------------------
//
// Lazily started; awaiting a task runs it and resumes the awaiter when it
// finishes. A Pause suspends the whole chain back to whoever resumed it.

template <typename T>
class Task;

struct PromiseBase {
  std::coroutine_handle<> cont = std::noop_coroutine();
  std::exception_ptr error;
  std::suspend_always initial_suspend() noexcept { return {}; }
  struct Final {
    bool await_ready() noexcept { return false; }
    template <typename P>
    std::coroutine_handle<> await_suspend(std::coroutine_handle<P> h) noexcept {
      return h.promise().cont;
    }
    void await_resume() noexcept {}
  };
  Final final_suspend() noexcept { return {}; }
  void unhandled_exception() { error = std::current_exception(); }
};

template <typename T>
struct Promise : PromiseBase {
  T value{};
  Task<T> get_return_object();
  void return_value(T v) { value = std::move(v); }
};

template <>
struct Promise<void> : PromiseBase {
  Task<void> get_return_object();
  void return_void() {}
};

template <typename T>
class [[nodiscard]] Task {
 public:
  using promise_type = Promise<T>;
  using Handle = std::coroutine_handle<promise_type>;

  explicit Task(Handle h) : h_(h) {}
  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task& operator=(Task&&) = delete;
  ~Task() {
    if (h_) h_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> parent) noexcept {
    h_.promise().cont = parent;
    return h_;
  }
  T await_resume() {
    if (h_.promise().error) std::rethrow_exception(h_.promise().error);
    if constexpr (!std::is_void_v<T>) return std::move(h_.promise().value);
  }
  Handle handle() const { return h_; }

 private:
  Handle h_;
};

template <typename T>
Task<T> Promise<T>::get_return_object() {
  return Task<T>(std::coroutine_handle<Promise<T>>::from_promise(*this));
}
inline Task<void> Promise<void>::get_return_object() {
  return Task<void>(std::coroutine_handle<Promise<void>>::from_promise(*this));
}

// --- Arithmetic ----------------------------------------------------------------

float f32(std::uint32_t v) { return std::bit_cast<float>(v); }
std::uint32_t bits(float f) { return std::bit_cast<std::uint32_t>(f); }
std::int64_t s64(std::uint32_t v) { return static_cast<std::int32_t>(v); }

std::uint32_t binary(BinaryOp op, Type t, std::uint32_t a, std::uint32_t b) {
  if (t == Type::kF32) {
    const float x = f32(a);
    const float y = f32(b);
    switch (op) {
      case BinaryOp::kAdd: return bits(x + y);
      case BinaryOp::kSub: return bits(x - y);
      case BinaryOp::kMul: return bits(x * y);
      case BinaryOp::kDiv: return bits(x / y);
      case BinaryOp::kRem: return bits(std::fmod(x, y));
      case BinaryOp::kLt: return x < y;
      case BinaryOp::kLe: return x <= y;
      case BinaryOp::kGt: return x > y;
      case BinaryOp::kGe: return x >= y;
      case BinaryOp::kEq: return x == y;
      case BinaryOp::kNe: return x != y;
      default: break;
    }
    return 0;
  }
  const bool sign = t == Type::kI32;
  // 64-bit signed arithmetic truncated back to 32 bits gives wraparound,
  // including INT_MIN / -1 == INT_MIN.
  const std::int64_t x = sign ? s64(a) : static_cast<std::int64_t>(a);
  const std::int64_t y = sign ? s64(b) : static_cast<std::int64_t>(b);
  switch (op) {
    case BinaryOp::kAdd: return static_cast<std::uint32_t>(x + y);
    case BinaryOp::kSub: return static_cast<std::uint32_t>(x - y);
    case BinaryOp::kMul: return static_cast<std::uint32_t>(static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(y));
    case BinaryOp::kDiv: return y == 0 ? 0 : static_cast<std::uint32_t>(x / y);
    case BinaryOp::kRem: return y == 0 ? 0 : static_cast<std::uint32_t>(x % y);
    case BinaryOp::kLt: return x < y;
    case BinaryOp::kLe: return x <= y;
    case BinaryOp::kGt: return x > y;
    case BinaryOp::kGe: return x >= y;
    case BinaryOp::kEq: return x == y;
    case BinaryOp::kNe: return x != y;
    default: break;
  }
  return 0;
}

std::uint32_t cast(Type from, Type to, std::uint32_t v) {
  if (from == to) return v;
  if (to == Type::kBool) return from == Type::kF32 ? f32(v) != 0.0f : v != 0;
  if (from == Type::kBool) return v;
  if (to == Type::kF32) return bits(from == Type::kI32 ? static_cast<float>(static_cast<std::int32_t>(v)) : static_cast<float>(v));
  if (from == Type::kF32) {
    const double d = f32(v);
    if (std::isnan(d)) return 0;
    if (to == Type::kI32) {
      if (d >= 2147483647.0) return 0x7fffffffu;
      if (d <= -2147483648.0) return 0x80000000u;
      return static_cast<std::uint32_t>(static_cast<std::int32_t>(d));
    }
    if (d >= 4294967295.0) return 0xffffffffu;
    if (d <= 0.0) return 0;
    return static_cast<std::uint32_t>(d);
  }
  return v;
}

// --- Execution state -------------------------------------------------------------

struct Item {
  std::uint32_t lid = 0;
  std::vector<std::uint32_t> env;
  std::optional<Task<void>> root;
  std::coroutine_handle<> leaf;
  enum class State : std::uint8_t { kRun, kSync, kDone } state = State::kRun;
  enum class Paused : std::uint8_t { kNone, kSync, kBlocked } paused = Paused::kNone;
  const Expr* sync = nullptr;
  std::uint32_t x = 0;
  std::uint32_t src = 0;
  std::uint32_t result = 0;
  std::string blocked;
  std::int64_t logged_region = -1;
};

struct Pause {
  Item& it;
  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<> h) noexcept { it.leaf = h; }
  void await_resume() const noexcept {}
};

struct Launch {
  std::uint32_t index = 0;
  const KernelDecl* k = nullptr;
  rt::LaunchRecord rec;
  std::uint32_t group = 0;
  std::uint32_t region = 0;
  std::size_t cur = 0;
  std::vector<std::unique_ptr<Item>> items;
  bool done = false;
};

enum class Status : std::uint8_t { kProgress, kBlocked, kDone };

class Interpreter {
 public:
  Interpreter(const Program& prog, rt::DeviceState& dev, const InterpConfig& cfg)
      : prog_(prog), dev_(dev), cfg_(cfg) {}

  InterpResult run(std::vector<rt::LaunchRecord> roots) {
    std::vector<const std::vector<ParamDecl>*> params;
    for (const auto& r : roots) params.push_back(&kernel(r.kernel).params);
    rt::check_co_launch(roots, params);
    std::vector<Launch*> active;
    for (auto& r : roots) active.push_back(start(std::move(r)));
    while (true) {
      std::erase_if(active, [](const Launch* l) { return l->done; });
      if (active.empty()) {
        if (dev_.work_queue.empty()) break;
        rt::LaunchRecord next = std::move(dev_.work_queue.front());
        dev_.work_queue.pop_front();
        active.push_back(start(std::move(next)));
        continue;
      }
      const std::uint64_t before = progress_;
      bool moved = false;
      for (Launch* L : active) {
        for (int turn = 0; turn < kTurn; ++turn) {
          const Status s = advance(*L);
          if (s != Status::kProgress) break;
          moved = true;
        }
      }
      if (!moved && progress_ == before) deadlock(active);
    }
    InterpResult r;
    r.buffers = dev_.buffers;
    r.pipes = dev_.residues();
    r.child_launches = dev_.child_launches;
    r.steps = steps_;
    r.events = std::move(events_);
    return r;
  }

 private:
  static constexpr int kTurn = 1024;

  const KernelDecl& kernel(const std::string& name) const {
    const KernelDecl* k = prog_.find_kernel(name);
    if (k == nullptr) throw RuntimeError(RuntimeError::Kind::kPrecondition, fmt::format("unknown kernel '{}'", name));
    return *k;
  }

  Launch* start(rt::LaunchRecord rec) {
    const KernelDecl& k = kernel(rec.kernel);
    rec.nd.validate();
    dev_.check_launch(rec.kernel, k.params, rec.args);
    auto L = std::make_unique<Launch>();
    L->index = static_cast<std::uint32_t>(launches_.size());
    L->k = &k;
    L->rec = std::move(rec);
    start_group(*L);
    launches_.push_back(std::move(L));
    return launches_.back().get();
  }

  void start_group(Launch& L) {
    L.items.clear();
    for (std::uint32_t i = 0; i < L.rec.nd.group_size(); ++i) {
      auto it = std::make_unique<Item>();
      it->lid = i;
      it->env.assign(L.k->symbols.size(), 0);
      L.items.push_back(std::move(it));
    }
    L.region = 0;
    L.cur = 0;
  }

  void log(const Launch& L, const Item& it, Event::Kind kind, std::string detail = {}) {
    events_.push_back({L.index, L.rec.kernel, L.group, L.region, it.lid, kind, std::move(detail)});
  }

  void tick(const Launch& L) {
    ++progress_;
    if (++steps_ > cfg_.max_steps) {
      throw RuntimeError(RuntimeError::Kind::kWatchdog,
                         fmt::format("watchdog: step budget {} exceeded in kernel '{}'", cfg_.max_steps,
                                     L.rec.kernel));
    }
  }

  Status advance(Launch& L) {
    if (L.done) return Status::kDone;
    Item& it = *L.items[L.cur];
    if (!it.root) {
      it.root.emplace(exec_list(L, it, L.k->body));
      it.leaf = it.root->handle();
    }
    if (it.logged_region != static_cast<std::int64_t>(L.region)) {
      it.logged_region = L.region;
      log(L, it, Event::Kind::kRegion);
    }
    const std::uint64_t before = progress_;
    it.paused = Item::Paused::kNone;
    it.leaf.resume();
    const auto h = it.root->handle();
    if (h.done()) {
      if (h.promise().error) std::rethrow_exception(h.promise().error);
      it.state = Item::State::kDone;
      log(L, it, Event::Kind::kFinish);
      next_item(L);
      return Status::kProgress;
    }
    if (it.paused == Item::Paused::kSync) {
      it.state = Item::State::kSync;
      log(L, it, Event::Kind::kSync, fmt::format("line={}", it.sync->loc.line));
      next_item(L);
      return Status::kProgress;
    }
    return progress_ != before ? Status::kProgress : Status::kBlocked;
  }

  void next_item(Launch& L) {
    ++progress_;
    if (++L.cur < L.items.size()) return;
    // Region boundary: every item has finished or reached a sync.
    const Expr* sync = nullptr;
    std::size_t at_sync = 0;
    std::size_t finished = 0;
    bool same = true;
    for (const auto& it : L.items) {
      if (it->state == Item::State::kDone) {
        ++finished;
        continue;
      }
      ++at_sync;
      if (sync != nullptr && sync != it->sync) same = false;
      sync = it->sync;
    }
    if (at_sync == 0) {
      if (++L.group < L.rec.nd.group_count()) {
        start_group(L);
      } else {
        L.done = true;
      }
      return;
    }
    if (finished != 0 || !same) {
      throw RuntimeError(RuntimeError::Kind::kDivergence,
                         fmt::format("divergent sync in kernel '{}' group {}: {} of {} items reached a sync, "
                                     "{} finished{}",
                                     L.rec.kernel, L.group, at_sync, L.items.size(), finished,
                                     same ? "" : ", not all at the same sync"));
    }
    resolve(L, *sync);
    ++L.region;
    L.cur = 0;
    for (auto& it : L.items) it->state = Item::State::kRun;
  }

  void resolve(Launch& L, const Expr& e) {
    const std::size_t n = L.items.size();
    switch (e.builtin) {
      case Builtin::kWgBroadcast:
        for (auto& it : L.items) {
          if (it->src >= n) {
            throw RuntimeError(RuntimeError::Kind::kBounds,
                               fmt::format("work_group_broadcast in kernel '{}' selects item {} of a group of {}",
                                           L.rec.kernel, it->src, n));
          }
          it->result = L.items[it->src]->x;
        }
        break;
      case Builtin::kWgReduceAdd:
      case Builtin::kWgReduceMin:
      case Builtin::kWgReduceMax: {
        std::uint32_t acc = L.items[0]->x;
        for (std::size_t i = 1; i < n; ++i) {
          const std::uint32_t v = L.items[i]->x;
          if (e.builtin == Builtin::kWgReduceAdd) {
            acc = binary(BinaryOp::kAdd, e.type, acc, v);
          } else if (e.builtin == Builtin::kWgReduceMin) {
            if (binary(BinaryOp::kLt, e.type, v, acc)) acc = v;
          } else if (binary(BinaryOp::kGt, e.type, v, acc)) {
            acc = v;
          }
        }
        for (auto& it : L.items) it->result = acc;
        break;
      }
      default:
        for (auto& it : L.items) it->result = 0;
        break;
    }
  }

  [[noreturn]] void deadlock(const std::vector<Launch*>& active) {
    std::string msg = "deadlock: no launch can progress; blocked:";
    for (const Launch* L : active) {
      const Item& it = *L->items[L->cur];
      msg += fmt::format(" {} group {} item {} {};", L->rec.kernel, L->group, it.lid, it.blocked);
    }
    msg += " pipes:";
    for (const auto& p : dev_.pipes) msg += fmt::format(" {}={}/{}", p.name, p.occupancy(), p.depth);
    throw RuntimeError(RuntimeError::Kind::kDeadlock, msg);
  }

  // --- Expressions -------------------------------------------------------------

  // Whether evaluating `e` can pause the item.
  bool pauses(const Expr& e) {
    auto it = pauses_.find(&e);
    if (it != pauses_.end()) return it->second;
    bool r = e.kind == ExprKind::kCall && !is_id_builtin(e.builtin);
    for (const auto& o : e.operands) r = pauses(*o) || r;
    pauses_.emplace(&e, r);
    return r;
  }

  const rt::ArgValue& arg_of(const Launch& L, const Expr& handle) const {
    const int p = L.k->symbols[static_cast<std::size_t>(handle.symbol)].param;
    return L.rec.args[static_cast<std::size_t>(p)];
  }

  std::uint32_t id_query(const Launch& L, const Item& it, Builtin q, std::uint32_t dim) const {
    const auto& nd = L.rec.nd;
    if (dim > 2) return q == Builtin::kGlobalSize || q == Builtin::kLocalSize ? 1 : 0;
    const std::uint32_t l0 = nd.local[0];
    const std::uint32_t l1 = nd.local[1];
    const std::uint32_t g0 = nd.global[0] / l0;
    const std::uint32_t g1 = nd.global[1] / l1;
    const std::uint32_t local[3] = {it.lid % l0, it.lid / l0 % l1, it.lid / (l0 * l1)};
    const std::uint32_t group[3] = {L.group % g0, L.group / g0 % g1, L.group / (g0 * g1)};
    switch (q) {
      case Builtin::kLocalId: return local[dim];
      case Builtin::kGroupId: return group[dim];
      case Builtin::kGlobalId: return group[dim] * nd.local[dim] + local[dim];
      case Builtin::kGlobalSize: return nd.global[dim];
      case Builtin::kLocalSize: return nd.local[dim];
      default: return 0;
    }
  }

  std::uint32_t& word(const Launch& L, const Expr& buffer, std::uint32_t index, const char* what) {
    auto& b = dev_.buffers[static_cast<std::size_t>(arg_of(L, buffer).index)];
    if (index >= b.words.size()) {
      throw RuntimeError(RuntimeError::Kind::kBounds,
                         fmt::format("out-of-bounds {} in kernel '{}': buffer '{}' index {} (size {})", what,
                                     L.rec.kernel, b.name, index, b.words.size()));
    }
    return b.words[index];
  }

  std::uint32_t var(const Launch& L, const Item& it, const Expr& e) const {
    const auto& sym = L.k->symbols[static_cast<std::size_t>(e.symbol)];
    if (sym.param >= 0) return L.rec.args[static_cast<std::size_t>(sym.param)].bits;
    return it.env[static_cast<std::size_t>(e.symbol)];
  }

  static std::uint32_t unary(const Expr& e, std::uint32_t v) {
    if (e.unary_op == UnaryOp::kNot) return v == 0;
    if (e.type == Type::kF32) return bits(-f32(v));
    return binary(BinaryOp::kSub, e.type, 0, v);
  }

  static bool short_circuits(const Expr& e, std::uint32_t lhs) {
    return e.binary_op == BinaryOp::kLogicalAnd ? lhs == 0 : lhs != 0;
  }

  // Expressions that cannot pause.
  std::uint32_t eval_now(Launch& L, Item& it, const Expr& e) {
    switch (e.kind) {
      case ExprKind::kIntLit: return e.int_value;
      case ExprKind::kFloatLit: return bits(e.float_value);
      case ExprKind::kBoolLit: return e.bool_value;
      case ExprKind::kStringLit: return 0;
      case ExprKind::kVar: return var(L, it, e);
      case ExprKind::kIndex: return word(L, e, eval_now(L, it, *e.operands[0]), "load");
      case ExprKind::kUnary: return unary(e, eval_now(L, it, *e.operands[0]));
      case ExprKind::kCast: return cast(e.operands[0]->type, e.cast_type, eval_now(L, it, *e.operands[0]));
      case ExprKind::kBinary: {
        const std::uint32_t a = eval_now(L, it, *e.operands[0]);
        if (e.binary_op == BinaryOp::kLogicalAnd || e.binary_op == BinaryOp::kLogicalOr) {
          if (short_circuits(e, a)) return a;
          return eval_now(L, it, *e.operands[1]) != 0;
        }
        return binary(e.binary_op, e.operands[0]->type, a, eval_now(L, it, *e.operands[1]));
      }
      case ExprKind::kCall: return id_query(L, it, e.builtin, e.operands[0]->int_value);
    }
    return 0;
  }

  Task<std::uint32_t> eval(Launch& L, Item& it, const Expr& e) {
    if (!pauses(e)) co_return eval_now(L, it, e);
    switch (e.kind) {
      case ExprKind::kIndex: {
        const std::uint32_t idx = co_await eval(L, it, *e.operands[0]);
        co_return word(L, e, idx, "load");
      }
      case ExprKind::kUnary: co_return unary(e, co_await eval(L, it, *e.operands[0]));
      case ExprKind::kCast:
        co_return cast(e.operands[0]->type, e.cast_type, co_await eval(L, it, *e.operands[0]));
      case ExprKind::kBinary: {
        const std::uint32_t a = co_await eval(L, it, *e.operands[0]);
        if (e.binary_op == BinaryOp::kLogicalAnd || e.binary_op == BinaryOp::kLogicalOr) {
          if (short_circuits(e, a)) co_return a;
          co_return (co_await eval(L, it, *e.operands[1])) != 0;
        }
        const std::uint32_t b = co_await eval(L, it, *e.operands[1]);
        co_return binary(e.binary_op, e.operands[0]->type, a, b);
      }
      case ExprKind::kCall: co_return co_await call(L, it, e);
      default: break;
    }
    co_return eval_now(L, it, e);
  }

  Task<std::uint32_t> call(Launch& L, Item& it, const Expr& e) {
    switch (builtin_info(e.builtin).cls) {
      case BuiltinClass::kIdQuery: co_return eval_now(L, it, e);
      case BuiltinClass::kBarrier:
      case BuiltinClass::kWorkGroup: {
        it.x = e.operands.empty() ? 0 : co_await eval(L, it, *e.operands[0]);
        it.src = e.operands.size() > 1 ? co_await eval(L, it, *e.operands[1]) : 0;
        it.sync = &e;
        it.paused = Item::Paused::kSync;
        co_await Pause{it};
        co_return it.result;
      }
      case BuiltinClass::kPipe: {
        auto& pipe = dev_.pipes[static_cast<std::size_t>(arg_of(L, *e.operands[0]).index)];
        if (e.builtin == Builtin::kReadPipe) {
          while (pipe.contents.empty()) {
            it.blocked = fmt::format("read from empty pipe '{}'", pipe.name);
            it.paused = Item::Paused::kBlocked;
            co_await Pause{it};
          }
          const std::uint32_t v = pipe.contents.front();
          pipe.contents.pop_front();
          ++progress_;
          co_return v;
        }
        const std::uint32_t v = co_await eval(L, it, *e.operands[1]);
        while (pipe.occupancy() >= pipe.depth) {
          it.blocked = fmt::format("write to full pipe '{}' (occupancy {}/{})", pipe.name, pipe.occupancy(),
                                   pipe.depth);
          it.paused = Item::Paused::kBlocked;
          co_await Pause{it};
        }
        pipe.contents.push_back(v);
        ++progress_;
        co_return 0;
      }
      case BuiltinClass::kEnqueue: {
        rt::LaunchRecord child;
        child.kernel = e.operands[3]->text;
        const std::uint32_t gsize = co_await eval(L, it, *e.operands[1]);
        const std::uint32_t lsize = co_await eval(L, it, *e.operands[2]);
        child.nd = rt::NdRange::linear(gsize, lsize);
        const KernelDecl& ck = prog_.kernels[static_cast<std::size_t>(e.callee_kernel)];
        for (std::size_t a = 0; a < ck.params.size(); ++a) {
          const Expr& x = *e.operands[4 + a];
          if (ck.params[a].kind == ParamKind::kScalar) {
            child.args.push_back(rt::ArgValue::scalar(co_await eval(L, it, x)));
          } else {
            child.args.push_back(arg_of(L, x));
          }
        }
        log(L, it, Event::Kind::kEnqueue, fmt::format("kernel={} gsize={} lsize={}", child.kernel, gsize, lsize));
        dev_.work_queue.push_back(std::move(child));
        ++dev_.child_launches;
        co_return 0;
      }
    }
    co_return 0;
  }

  // --- Statements --------------------------------------------------------------

  Task<void> exec_list(Launch& L, Item& it, const StmtList& list) {
    for (const auto& s : list) co_await exec(L, it, *s);
  }

  Task<void> exec(Launch& L, Item& it, const Stmt& s) {
    tick(L);
    switch (s.kind) {
      case StmtKind::kDecl:
        it.env[static_cast<std::size_t>(s.symbol)] = s.value ? co_await eval(L, it, *s.value) : 0;
        break;
      case StmtKind::kAssign: {
        const Expr& t = *s.target;
        if (t.kind == ExprKind::kVar) {
          it.env[static_cast<std::size_t>(t.symbol)] = co_await eval(L, it, *s.value);
          break;
        }
        const std::uint32_t idx = co_await eval(L, it, *t.operands[0]);
        const std::uint32_t v = co_await eval(L, it, *s.value);
        word(L, t, idx, "store") = v;
        break;
      }
      case StmtKind::kIf:
        if (co_await eval(L, it, *s.cond)) {
          co_await exec_list(L, it, s.body);
        } else if (s.has_else) {
          co_await exec_list(L, it, s.else_body);
        }
        break;
      case StmtKind::kFor:
      case StmtKind::kWhile:
        if (s.init) co_await exec(L, it, *s.init);
        while (true) {
          tick(L);
          if (s.cond && !(co_await eval(L, it, *s.cond))) break;
          co_await exec_list(L, it, s.body);
          if (s.step) co_await exec(L, it, *s.step);
        }
        break;
      case StmtKind::kExpr: co_await eval(L, it, *s.value); break;
      case StmtKind::kBlock: co_await exec_list(L, it, s.body); break;
    }
  }

  const Program& prog_;
  rt::DeviceState& dev_;
  InterpConfig cfg_;
  std::vector<std::unique_ptr<Launch>> launches_;
  std::vector<Event> events_;
  std::map<const Expr*, bool> pauses_;
  std::uint64_t steps_ = 0;
  std::uint64_t progress_ = 0;
};

}  // namespace

std::string_view event_kind_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::kRegion: return "region";
    case Event::Kind::kSync: return "sync";
    case Event::Kind::kFinish: return "finish";
    case Event::Kind::kEnqueue: return "enqueue";
  }
  return "?";
}

std::string format_events(const std::vector<Event>& events) {
  std::string s;
  for (const auto& e : events) {
    s += fmt::format("{},{},{},{},{},{},{}\n", e.launch, e.kernel, e.group, e.region, e.item,
                     event_kind_name(e.kind), e.detail);
  }
  return s;
}

InterpResult interpret(const Program& prog, rt::DeviceState& dev, std::vector<rt::LaunchRecord> roots,
                       const InterpConfig& cfg) {
  Interpreter in(prog, dev, cfg);
  return in.run(std::move(roots));
}

}  // namespace kf::interp

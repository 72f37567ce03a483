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

#include "kf/dfg/arith.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace kf::dfg {
namespace {

float as_f(std::uint32_t v) { return std::bit_cast<float>(v); }
std::uint32_t from_f(float f) { return std::bit_cast<std::uint32_t>(f); }
std::int32_t as_i(std::uint32_t v) { return static_cast<std::int32_t>(v); }

std::uint32_t b(bool x) { return x ? 1u : 0u; }

std::uint32_t float_op(ir::BinOp op, float x, float y) {
  using ir::BinOp;
  switch (op) {
    case BinOp::kAdd: return from_f(x + y);
    case BinOp::kSub: return from_f(x - y);
    case BinOp::kMul: return from_f(x * y);
    case BinOp::kDiv: return from_f(x / y);
    case BinOp::kRem: return from_f(std::fmod(x, y));
    case BinOp::kLt: return b(x < y);
    case BinOp::kLe: return b(x <= y);
    case BinOp::kGt: return b(x > y);
    case BinOp::kGe: return b(x >= y);
    case BinOp::kEq: return b(x == y);
    case BinOp::kNe: return b(x != y);
    case BinOp::kNeg: return from_f(x) ^ 0x80000000u;
    default: return 0;
  }
}

}  // namespace

std::uint32_t eval_binop(ir::BinOp op, Type t, std::uint32_t x, std::uint32_t y) {
  using ir::BinOp;
  if (t == Type::kF32) return float_op(op, as_f(x), as_f(y));
  const bool is_signed = t == Type::kI32;
  switch (op) {
    case BinOp::kAdd: return x + y;
    case BinOp::kSub: return x - y;
    case BinOp::kMul: return x * y;
    case BinOp::kDiv:
      if (y == 0) return 0;
      if (!is_signed) return x / y;
      if (x == 0x80000000u && y == 0xffffffffu) return x;
      return static_cast<std::uint32_t>(as_i(x) / as_i(y));
    case BinOp::kRem:
      if (y == 0) return 0;
      if (!is_signed) return x % y;
      if (x == 0x80000000u && y == 0xffffffffu) return 0;
      return static_cast<std::uint32_t>(as_i(x) % as_i(y));
    case BinOp::kLt: return is_signed ? b(as_i(x) < as_i(y)) : b(x < y);
    case BinOp::kLe: return is_signed ? b(as_i(x) <= as_i(y)) : b(x <= y);
    case BinOp::kGt: return is_signed ? b(as_i(x) > as_i(y)) : b(x > y);
    case BinOp::kGe: return is_signed ? b(as_i(x) >= as_i(y)) : b(x >= y);
    case BinOp::kEq: return b(x == y);
    case BinOp::kNe: return b(x != y);
    case BinOp::kAnd: return x & y;
    case BinOp::kOr: return x | y;
    case BinOp::kXor: return x ^ y;
    case BinOp::kNeg: return 0u - x;
  }
  return 0;
}

std::uint32_t eval_cast(ir::CastOp op, std::uint32_t a) {
  using ir::CastOp;
  switch (op) {
    case CastOp::kIToF: return from_f(static_cast<float>(as_i(a)));
    case CastOp::kUToF: return from_f(static_cast<float>(a));
    case CastOp::kFToI: {
      const float f = as_f(a);
      if (std::isnan(f)) return 0;
      if (f <= -2147483648.0f) return 0x80000000u;
      if (f >= 2147483648.0f) return 0x7fffffffu;
      return static_cast<std::uint32_t>(static_cast<std::int32_t>(f));
    }
    case CastOp::kFToU: {
      const float f = as_f(a);
      if (std::isnan(f) || f <= 0.0f) return 0;
      if (f >= 4294967296.0f) return 0xffffffffu;
      return static_cast<std::uint32_t>(f);
    }
    case CastOp::kBitcast:
    case CastOp::kBoolToInt:
      return a;
  }
  return a;
}

std::uint32_t eval_arith(ArithOp op, Type t, std::span<const std::uint32_t> in) {
  using ir::BinOp;
  using ir::CastOp;
  switch (op) {
    case ArithOp::kAdd: return eval_binop(BinOp::kAdd, t, in[0], in[1]);
    case ArithOp::kSub: return eval_binop(BinOp::kSub, t, in[0], in[1]);
    case ArithOp::kMul: return eval_binop(BinOp::kMul, t, in[0], in[1]);
    case ArithOp::kDiv: return eval_binop(BinOp::kDiv, t, in[0], in[1]);
    case ArithOp::kRem: return eval_binop(BinOp::kRem, t, in[0], in[1]);
    case ArithOp::kLt: return eval_binop(BinOp::kLt, t, in[0], in[1]);
    case ArithOp::kLe: return eval_binop(BinOp::kLe, t, in[0], in[1]);
    case ArithOp::kGt: return eval_binop(BinOp::kGt, t, in[0], in[1]);
    case ArithOp::kGe: return eval_binop(BinOp::kGe, t, in[0], in[1]);
    case ArithOp::kEq: return eval_binop(BinOp::kEq, t, in[0], in[1]);
    case ArithOp::kNe: return eval_binop(BinOp::kNe, t, in[0], in[1]);
    case ArithOp::kAnd: return eval_binop(BinOp::kAnd, t, in[0], in[1]);
    case ArithOp::kOr: return eval_binop(BinOp::kOr, t, in[0], in[1]);
    case ArithOp::kXor: return eval_binop(BinOp::kXor, t, in[0], in[1]);
    case ArithOp::kNeg: return eval_binop(BinOp::kNeg, t, in[0], 0);
    case ArithOp::kIToF: return eval_cast(CastOp::kIToF, in[0]);
    case ArithOp::kUToF: return eval_cast(CastOp::kUToF, in[0]);
    case ArithOp::kFToI: return eval_cast(CastOp::kFToI, in[0]);
    case ArithOp::kFToU: return eval_cast(CastOp::kFToU, in[0]);
    case ArithOp::kBitcast: return eval_cast(CastOp::kBitcast, in[0]);
    case ArithOp::kBoolToInt: return eval_cast(CastOp::kBoolToInt, in[0]);
    case ArithOp::kSelect: return in[0] ? in[1] : in[2];
  }
  return 0;
}

std::uint32_t eval_reduce(ir::WgOp op, Type t, std::uint32_t acc, std::uint32_t v) {
  using ir::BinOp;
  switch (op) {
    case ir::WgOp::kReduceAdd: return eval_binop(BinOp::kAdd, t, acc, v);
    case ir::WgOp::kReduceMin: return eval_binop(BinOp::kLt, t, v, acc) ? v : acc;
    case ir::WgOp::kReduceMax: return eval_binop(BinOp::kGt, t, v, acc) ? v : acc;
    case ir::WgOp::kBroadcast: return acc;
  }
  return acc;
}

}  // namespace kf::dfg

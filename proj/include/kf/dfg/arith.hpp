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

#include <span>

#include "kf/dfg/dfg.hpp"
#include "kf/ir/ir.hpp"

namespace kf::dfg {

// Bit-level semantics of the hardware arithmetic units. Values are raw 32-bit
// patterns; bool is 0 or 1.
//
// Integer division and remainder by zero yield 0; INT_MIN / -1 wraps to
// INT_MIN and INT_MIN % -1 is 0. Float to integer conversion truncates,
// saturates at the target range and maps NaN to 0.
std::uint32_t eval_binop(ir::BinOp op, Type operand_type, std::uint32_t a, std::uint32_t b);
std::uint32_t eval_cast(ir::CastOp op, std::uint32_t a);
// Evaluates an arithmetic node on its input bits.
std::uint32_t eval_arith(ArithOp op, Type op_type, std::span<const std::uint32_t> in);
std::uint32_t eval_reduce(ir::WgOp op, Type t, std::uint32_t acc, std::uint32_t v);

}  // namespace kf::dfg

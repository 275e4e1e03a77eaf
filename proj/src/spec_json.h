// Copyright 2026 The Tilewright Authors
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

// JSON form of a KernelSpec.
//
// Statements and application expressions are objects tagged by "t";
// arrangement ops are tagged by "op". Symbolic expressions are written
// compactly: an integer, a symbol name, or
// [op, lhs, rhs] / ["neg", x]. Arrangement arguments are -1 (default), an
// expression, or {"shape_of": param, "level": l, "dim": d}. Non-finite
// numbers (load fill values) are the strings "inf", "-inf" and "nan".
//
// Parse errors throw Error(kSpec) and name the JSON pointer of the offending
// value.

#ifndef TILEWRIGHT_SRC_SPEC_JSON_H_
#define TILEWRIGHT_SRC_SPEC_JSON_H_

#include <string>

#include <nlohmann/json.hpp>

#include "tileir.h"

namespace tw {

KernelSpec ParseSpec(const nlohmann::ordered_json& j);
KernelSpec ParseSpecText(const std::string& text);

nlohmann::ordered_json SerializeSpec(const KernelSpec& spec);
// Pretty-printed with two-space indentation and a trailing newline.
std::string SerializeSpecText(const KernelSpec& spec);

// Compact expression form used by specs and manifests.
nlohmann::ordered_json CompactExprJson(const SymExpr& e);
SymExpr CompactExprFromJson(const nlohmann::ordered_json& j,
                            const std::string& path = "");

}  // namespace tw

#endif  // TILEWRIGHT_SRC_SPEC_JSON_H_

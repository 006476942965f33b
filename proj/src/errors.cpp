// Copyright 2026 The qhomog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qhomog/errors.hpp"

namespace qhomog {

QubitBudgetError::QubitBudgetError(int required, int budget, const std::string& context)
    : Error((context.empty() ? "" : context + ": ") + "statevector emulation needs " +
            std::to_string(required) + " qubits but the budget is " + std::to_string(budget) +
            "; rerun with --mode count or raise max_qubits"),
      required_(required),
      budget_(budget) {}

}  // namespace qhomog

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

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qhomog/statevector.hpp"

namespace qhomog {

class CircuitBlock;
using BlockPtr = std::shared_ptr<const CircuitBlock>;

struct BlockItem {
  std::vector<Gate> gate;  // holds exactly one gate, or is empty for a child
  BlockPtr block;
  std::vector<Control> controls;
  bool adjoint = false;
  bool frame = false;
};

/// Named, composable unitary. Children carry extra controls and an adjoint
/// flag so large circuits share structure instead of copying gates.
class CircuitBlock {
 public:
  using Path = std::vector<std::string>;
  using Visitor = std::function<void(const Gate&, const Path&)>;

  explicit CircuitBlock(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const std::vector<BlockItem>& items() const { return items_; }
  bool empty() const { return items_.empty(); }

  CircuitBlock& add(Gate g);
  CircuitBlock& add(BlockPtr child, std::vector<Control> controls = {},
                    bool adjoint = false, bool frame = false);

  /// Visits every primitive gate in execution order with accumulated
  /// controls. path lists block names from this block down.
  void for_each_gate(const Visitor& fn) const;

 private:
  void walk(const Visitor& fn, const std::vector<Control>& extra, bool adjoint,
            Path& path) const;

  std::string name_;
  std::vector<BlockItem> items_;
};

inline BlockPtr share(CircuitBlock&& b) {
  return std::make_shared<const CircuitBlock>(std::move(b));
}

void apply_block(StateVector& state, const CircuitBlock& block);
std::size_t gate_count(const CircuitBlock& block);

/// QFT on a little-endian register: H plus controlled phases. Without the
/// swap network the output value is stored bit-reversed, i.e. its
/// little-endian view is the reversed qubit list.
BlockPtr qft_block(const std::vector<int>& qubits, bool with_swaps,
                   const std::string& name = "qft");

/// Uniformly controlled RY: for control value j the target sees RY(theta[j]).
/// Gray-code construction with 2^c rotations and 2^c CNOTs.
BlockPtr multiplexed_ry(const std::vector<int>& controls, int target,
                        const std::vector<double>& theta,
                        const std::string& name = "mux_ry");

/// Maps |0...0> to sum_k v[k] |k> for a real vector v of unit norm.
BlockPtr state_prep(const std::vector<int>& qubits,
                    const std::vector<double>& v,
                    const std::string& name = "state_prep");

/// Reversed copy of a qubit list.
std::vector<int> reversed(std::vector<int> q);

}  // namespace qhomog

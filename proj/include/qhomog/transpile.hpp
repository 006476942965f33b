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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qhomog/circuit.hpp"

namespace qhomog {

struct LoweredGate {
  enum Kind { CNOT, U3 } kind = U3;
  int control = -1;
  int target = 0;
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
};

struct LoweringOptions {
  // Preferred helper for multi-controlled X with >= 3 controls. It is used
  // in a state-restoring way, so any idle qubit would do; -1 picks the
  // highest idle qubit below num_qubits.
  int work_qubit = -1;
  int num_qubits = 0;
  bool merge_u3 = false;
};

using GateSink = std::function<void(const LoweredGate&)>;

/// Lowers one gate to {CNOT, U3}. Returns the global phase of the emitted
/// sequence relative to the gate.
double lower_gate(const Gate& g, const LoweringOptions& opts,
                  const GateSink& sink);

struct LoweredCircuit {
  std::vector<LoweredGate> gates;
  double global_phase = 0.0;  // block = e^{i phase} * product of gates
};

LoweredCircuit lower(const CircuitBlock& block, const LoweringOptions& opts);
void apply_lowered(StateVector& state, const LoweredCircuit& c);
Gate to_gate(const LoweredGate& g);

struct GateCounts {
  std::uint64_t cnot = 0;
  std::uint64_t u3 = 0;
  std::uint64_t total = 0;
  std::uint64_t depth = 0;
  bool operator==(const GateCounts&) const = default;
};

struct GateCountReport {
  GateCounts counts;
  // Keyed by slash-joined block path, e.g. "u_iter/u_irve_0/s3_gamma".
  // Depth is only tracked for the whole circuit.
  std::map<std::string, GateCounts> per_block;
};

GateCountReport count(const CircuitBlock& block, const LoweringOptions& opts);

struct ScalingPoint {
  long long index = 0;
  GateCountReport report;
};

/// Counts a family of circuits indexed by N or M.
std::vector<ScalingPoint> scaling_table(
    const std::vector<long long>& indices,
    const std::function<std::pair<BlockPtr, LoweringOptions>(long long)>& make);

/// CSV with header index,cnot,u3,total,depth.
std::string counts_csv(const std::vector<ScalingPoint>& rows);

/// U3 parameters and phase alpha with m = e^{i alpha} U3(theta, phi, lambda).
struct U3Params {
  double theta = 0.0, phi = 0.0, lambda = 0.0, alpha = 0.0;
};
U3Params u3_decompose(const Mat2& m);

}  // namespace qhomog

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

// Dense statevector emulator.
//
// Qubit ordering is little-endian throughout: global qubit i is bit i of the
// basis index, and a register of size n occupying qubits [o, o+n) holds the
// value sum_j bit(o+j) * 2^j.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qhomog {

using cplx = std::complex<double>;
/// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Mat2 = std::array<cplx, 4>;

class QubitLayout {
 public:
  struct Register {
    std::string name;
    int offset = 0;
    int size = 0;
  };

  QubitLayout() = default;
  /// Builds a layout from explicit ranges; they must be disjoint and cover
  /// [0, num_qubits).
  explicit QubitLayout(std::vector<Register> regs);

  /// Appends a register on top of the current qubits.
  const Register& add(const std::string& name, int size);

  bool has(const std::string& name) const;
  const Register& reg(const std::string& name) const;
  int qubit(const std::string& name, int i = 0) const;
  std::vector<int> qubits(const std::string& name) const;
  int num_qubits() const { return total_; }
  const std::vector<Register>& registers() const { return regs_; }

 private:
  std::vector<Register> regs_;
  int total_ = 0;
};

enum class GateKind { H, X, Z, RY, U3, Phase, SWAP, Unitary };

struct Control {
  int qubit = 0;
  bool value = true;  // false = open control
  bool operator==(const Control&) const = default;
};

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> targets;
  std::vector<Control> controls;
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
  Mat2 u{};
  // Frame gates compose to identity with their partners inside the owning
  // block, so controlling the block does not need to control them.
  bool frame = false;

  /// Matrix of the single-target action (not defined for SWAP).
  Mat2 matrix() const;
  Gate inverse() const;
  std::string label() const;
  /// Index range, distinctness and unitarity checks.
  void validate(int num_qubits) const;
};

namespace gates {
Gate h(int t);
Gate x(int t);
Gate z(int t);
Gate ry(int t, double theta);
Gate u3(int t, double theta, double phi, double lambda);
Gate phase(int t, double theta);
Gate cnot(int c, int t);
Gate cphase(int c, int t, double theta);
Gate swap(int a, int b);
Gate mcx(std::vector<Control> controls, int t);
Gate unitary(int t, const Mat2& m);
}  // namespace gates

Mat2 mat_mul(const Mat2& a, const Mat2& b);
Mat2 mat_adjoint(const Mat2& a);
bool is_unitary(const Mat2& m, double tol = 1e-12);

class StateVector {
 public:
  explicit StateVector(int num_qubits);
  static StateVector basis(int num_qubits, std::uint64_t index);

  int num_qubits() const { return n_; }
  std::size_t size() const { return amp_.size(); }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  std::vector<cplx>& amplitudes() { return amp_; }
  cplx operator[](std::size_t i) const { return amp_[i]; }

  void apply(const Gate& g);
  double norm() const;

 private:
  int n_;
  std::vector<cplx> amp_;
};

StateVector new_state(const QubitLayout& layout);

/// Unitary DFT with e^{+2 pi i jk/N}/sqrt(N) on a register, optionally
/// conditioned on external controls. Applied directly, not gate by gate.
void apply_qft(StateVector& state, const QubitLayout& layout,
               const std::string& reg, bool inverse,
               const std::vector<Control>& controls = {});
/// Same, on an explicit little-endian qubit list.
void apply_qft(StateVector& state, const std::vector<int>& qubits,
               bool inverse, const std::vector<Control>& controls = {});

struct Projector {
  std::map<int, int> constraints;

  Projector& fix(int qubit, int value);
  Projector& fix_register(const QubitLayout& layout, const std::string& name,
                          std::uint64_t value);
  bool matches(std::uint64_t index) const;
};

struct Projection {
  double probability = 0.0;
  std::optional<StateVector> state;  // empty for an impossible outcome
};

Projection project(const StateVector& state, const Projector& proj);

/// Raw amplitudes of the constrained slice, keyed by the free qubits packed
/// in ascending qubit order. Zero amplitudes are skipped.
std::map<std::uint64_t, cplx> read_amplitudes(const StateVector& state,
                                              const Projector& proj);

/// Dense slice: entry v holds the amplitude where free_qubits[j] = bit j of v
/// and every other qubit is pinned by proj (unpinned ones read as 0).
std::vector<cplx> read_slice(const StateVector& state, const Projector& proj,
                             const std::vector<int>& free_qubits);

/// Measures the listed qubits `shots` times; returns outcome -> count.
/// Outcome bit j corresponds to qubits[j].
std::map<std::uint64_t, std::uint64_t> sample_counts(
    const StateVector& state, const std::vector<int>& qubits,
    std::uint64_t shots, std::uint64_t seed);

}  // namespace qhomog

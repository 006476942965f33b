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

// Single-RVE fixed-point circuits: initialisation, one incremental step
// (polarisation stress, QFT, Green's operator, zero-mode exchange, inverse
// QFT) and the S-step iteration with one ancilla bundle per step.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qhomog/circuit.hpp"
#include "qhomog/greens_lcu.hpp"
#include "qhomog/oracle.hpp"
#include "qhomog/poly_encode.hpp"
#include "qhomog/statevector.hpp"

namespace qhomog {

/// Ledger: copy j of gammabar carries the amplitude the physical branch will
/// have after step j, so every exchange inserts a consistently scaled zero
/// mode. Uniform: equal weights over the (e, s) subspaces and RY(2 acos(g/N))
/// on d, the printed initial state; usable for inspection only.
enum class InitWeighting { Ledger, Uniform };

/// Fresh: one 4-qubit (2D) or 2-qubit (1D) bundle per step, swapped in after
/// each step. Recycled: emulator shortcut that keeps only the working bundle
/// and, between steps, discards the non-physical ancilla components and
/// resets the bundle. Physical amplitudes are identical in both modes.
enum class AncillaMode { Fresh, Recycled };

struct IterationPlan {
  int S = 1;
  std::optional<StrainField> initial;  // default: gammabar everywhere
  InitWeighting weighting = InitWeighting::Ledger;
  AncillaMode ancillas = AncillaMode::Fresh;

  void validate() const;
};

struct RveOptions {
  EncodingOptions mu{EncodingMode::Polynomial, CoordMode::Raw, {8}, 0.0, 1.2};
  EncodingOptions alpha{EncodingMode::Polynomial, CoordMode::Extended, {7, 7, 6, 6}, 0.0, 1.2};
};

/// Register map. Bottom first: k0, k1 (2D), c (2D), d, e, s (S - 1),
/// anci0, anci1.. (Fresh only), ext (extended coordinates only).
/// Bundle qubit order: l0, l1, p0, p1 in 2D and p0, p1 in 1D.
/// The QFTs carry no swap network: S2 is the adjoint transform, so with
/// real space read through the bit-reversed views x0/x1 the frequency
/// index reads little-endian from k0/k1 with the e^{-2 pi i k x / N} sign.
struct RveLayout {
  QubitLayout layout;
  int dims = 1;
  int N = 0;
  int n = 0;
  int S = 1;
  AncillaMode mode = AncillaMode::Fresh;
  std::vector<int> k0, k1, s, ext;
  std::vector<int> x0, x1;  // real-space views: reversed(k0), reversed(k1)
  int c = -1;
  int d = -1;
  int e = -1;
  std::vector<std::vector<int>> anci;
  std::vector<int> rve_qubits;  // every qubit above, ascending

  int l0() const { return dims == 2 ? anci[0][0] : -1; }
  int l1() const { return dims == 2 ? anci[0][1] : -1; }
  int p0() const { return anci[0][dims == 2 ? 2 : 0]; }
  int p1() const { return anci[0][dims == 2 ? 3 : 1]; }
  /// Bundle values of the physical branch after a step.
  std::vector<int> physical_pattern() const;
  /// Thermometer code of copy j: the top j qubits of s are set.
  std::uint64_t copy_code(int j) const;
};

RveLayout make_rve_layout(int dims, int N, int S, bool extended,
                          AncillaMode mode = AncillaMode::Fresh);

/// Closed-form qubit count of make_rve_layout (no MCX work qubit).
int rve_qubit_count(int dims, int N, int S, bool extended,
                    AncillaMode mode = AncillaMode::Fresh);

/// Physical amplitude after s steps is A0 / K^s times the strain value.
struct StrainLedger {
  int dims = 1;
  int N = 0;
  int S = 1;
  double w_init = 1.0;   // amplitude of the e = 0 subspace
  double norm0 = 1.0;    // ||gamma^0|| over both components
  double K = 1.0;        // per-step shrink: 3 s_mu g (2D), s_mu g (1D)
  bool valid = true;     // false for Uniform weighting

  double A0() const { return w_init / norm0; }
  double amplitude_factor(int steps) const;
  std::vector<double> factors(int steps) const;
};

/// Encodings shared by every step.
struct RveEncodings {
  Encoding mu;     // mu - mu0 on p1
  UGamma gamma;
  double K = 1.0;
};

RveEncodings build_rve_encodings(const RveSpec& spec, const RveLayout& L,
                                 const RveOptions& opts);

/// Uniform-weighting bookkeeping is not a valid ledger; `ledger` may be null.
BlockPtr build_u_init(const RveSpec& spec, const std::vector<double>& gammabar,
                      const IterationPlan& plan, const RveLayout& L, double K,
                      StrainLedger* ledger = nullptr);

/// Gray path from ka to kb over `qubits` (bit j of an index is qubits[j]).
/// flip_order lists bit positions; default ascending over differing bits.
std::vector<std::uint64_t> gray_path(std::uint64_t ka, std::uint64_t kb,
                                     std::size_t width,
                                     const std::vector<int>& flip_order = {});

/// Transposition |ka> <-> |kb> built from 2h - 1 fully controlled X gates
/// along a Gray path of Hamming length h.
BlockPtr build_u_exch(const std::vector<int>& qubits, std::uint64_t ka,
                      std::uint64_t kb, const std::vector<int>& flip_order = {},
                      const std::string& name = "u_exch");

/// Basis index over L.rve_qubits of the physical zero mode before step s's
/// exchange, and of copy s.
std::uint64_t physical_zero_mode(const RveLayout& L, int step, int c);
std::uint64_t copy_zero_mode(const RveLayout& L, int step, int c);

/// One incremental step s (the exchange depends on s).
BlockPtr build_u_irve(const RveLayout& L, const RveEncodings& enc, int step);

/// Step s plus, in Fresh mode, the bundle swap that follows it.
BlockPtr build_step(const RveLayout& L, const RveEncodings& enc, int step);

/// All S steps back to back. In Recycled mode the reset between steps is not
/// a gate; execute with run_rve.
BlockPtr build_u_iter(const RveLayout& L, const RveEncodings& enc);

struct RveCircuit {
  RveSpec spec;
  std::vector<double> gammabar;
  IterationPlan plan;
  RveLayout layout;
  RveEncodings enc;
  StrainLedger ledger;
  BlockPtr u_init;
  std::vector<BlockPtr> steps;
  BlockPtr u_iter;

  /// Modulus as encoded: mu0 + realised (mu - mu0).
  RveSpec effective_spec() const;
};

RveCircuit build_rve_circuit(const RveSpec& spec,
                             const std::vector<double>& gammabar,
                             const IterationPlan& plan,
                             const RveOptions& opts = {});

/// Recycled mode: drop non-physical ancilla components and reset anci0.
void recycle_ancillas(StateVector& state, const RveLayout& L);

/// Applies step s and, in Recycled mode before another step, the reset.
void apply_rve_step(StateVector& state, const RveCircuit& rc, int step);

/// Executes U_init and all steps; observe(t, state) runs after init (t = 0)
/// and after each step t = 1..S.
StateVector run_rve(const RveCircuit& rc,
                    const std::function<void(int, const StateVector&)>& observe = {});

/// Projector onto the physical branch after `steps` steps (k, c free).
Projector physical_projector(const RveLayout& L, int steps);

/// Physical strain after `steps` steps, divided by the ledger. Throws
/// EmptyBranchError when the branch probability is below 1e-14.
StrainField readout_strain(const StateVector& state, const RveLayout& L,
                           const StrainLedger& ledger, int steps);

}  // namespace qhomog

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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhomog/rve_circuit.hpp"
#include "qhomog/transpile.hpp"

namespace qhomog {

/// Macroscopic strains of M RVE problems. M is a power of two; missing
/// cases are zero loads flagged as padding.
struct LoadSet {
  int M = 0;
  std::vector<std::vector<double>> gammabars;
  std::vector<std::string> labels;
  std::vector<char> padded;

  int m_qubits() const;  // log2 M, at least one
  int real_cases() const;
  void validate(int dims) const;
};

/// Pads to the next power of two. Labels default to "case<i>".
LoadSet make_load_set(int dims, const std::vector<std::vector<double>>& gammabars,
                      std::vector<std::string> labels = {});

/// CSV with header case_id,gamma0[,gamma1].
LoadSet read_load_csv(std::istream& in, int dims);

/// RVE registers at the bottom, then m, the stress ancilla and the flag.
struct EnsembleLayout {
  RveLayout rve;
  int M = 1;
  std::vector<int> m;
  int psig = -1;
  int flag = -1;

  int num_qubits() const { return rve.layout.num_qubits(); }
  /// Lowering options with one extra helper qubit above the layout.
  LoweringOptions lowering() const;
};

EnsembleLayout make_ensemble_layout(const RveLayout& rve, int M);

/// H on m, then U_init(gammabar^(m)) controlled on m for every real case.
/// Padded cases are parked in an inert branch (e = 1, d = 1) that no later
/// gate touches. With M = 1 the m qubit stays idle.
BlockPtr build_parallel_init(const LoadSet& loads, const RveSpec& spec,
                             const IterationPlan& plan, const EnsembleLayout& L,
                             double K, std::vector<StrainLedger>* ledgers = nullptr);

/// Init followed by one uncontrolled U_iter.
BlockPtr build_parallel_solve(const BlockPtr& init, const BlockPtr& u_iter);

/// U_poly(mu / scale) on psig, QFT on every position register and a
/// multi-controlled NOT that raises the flag on the zero mode of the
/// physical branch. `sigma` receives the encoding used.
BlockPtr build_stress_readout(const RveSpec& spec, const EnsembleLayout& L,
                              const EncodingOptions& mu_opts, Encoding* sigma = nullptr);

struct EnsembleCircuit {
  RveSpec spec;
  LoadSet loads;
  IterationPlan plan;
  EnsembleLayout layout;
  RveEncodings enc;
  Encoding sigma;
  std::vector<StrainLedger> ledgers;  // per case; padding gets a default
  BlockPtr init;
  std::vector<BlockPtr> steps;
  BlockPtr u_iter;
  BlockPtr readout;
  BlockPtr full;  // init, u_iter, readout
};

EnsembleCircuit build_ensemble_circuit(const RveSpec& spec, const LoadSet& loads,
                                       const IterationPlan& plan,
                                       const RveOptions& opts = {});

/// Runs init and iterations. `observe` sees the state after init (t = 0)
/// and after every step.
StateVector run_ensemble_solve(const EnsembleCircuit& ec,
                               const std::function<void(int, const StateVector&)>& observe = {});

/// Subspace m of a pre-readout ensemble state, rescaled by sqrt(M), as a
/// single-RVE state.
StateVector subspace_state(const StateVector& state, const EnsembleLayout& L, int m);

enum class ReadoutMode { Emulated, Sampled };

struct CaseResult {
  std::string label;
  std::vector<double> gammabar;
  std::vector<double> sigma;        // signed (emulated) or magnitude (sampled)
  std::vector<double> probability;  // p(m, c): flag raised; exact or estimated
  std::vector<double> amplitude;    // real part of the flagged amplitude
  double mass = 0.0;                // probability of the m subspace
  std::optional<StrainField> strain;  // emulator only
};

struct EnsembleReport {
  ReadoutMode mode = ReadoutMode::Emulated;
  std::uint64_t shots = 0;
  std::vector<CaseResult> cases;  // padding excluded
  std::optional<GateCountReport> counts;
};

struct ExtractOptions {
  ReadoutMode mode = ReadoutMode::Emulated;
  std::uint64_t shots = 1000000;
  std::uint64_t seed = 1;
};

/// Stress per case from the post-readout state. The flagged amplitude of
/// case m is sqrt(1/M) * A_S * sum(mu gamma) / (scale * sqrt(N^d)), so
/// p(m, c) = |single-RVE amplitude|^2 / M.
EnsembleReport extract_report(const StateVector& state, const EnsembleCircuit& ec,
                              const ExtractOptions& opts = {});

/// Full run: solve, optional strain fields per case, readout, report.
EnsembleReport run_ensemble(const EnsembleCircuit& ec, const ExtractOptions& opts = {},
                            bool keep_strain = false);

/// CSV with header case_id,component,sigma,probability.
std::string report_csv(const EnsembleReport& r);

}  // namespace qhomog

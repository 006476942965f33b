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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qhomog/ensemble.hpp"
#include "qhomog/oracle.hpp"
#include "qhomog/rve_circuit.hpp"
#include "qhomog/transpile.hpp"

namespace qhomog {

enum class RunMode { Execute, Count };
enum class ExperimentKind { Single, Ensemble };

/// One experiment, read from an INI file:
///
///   [experiment] name, kind (single|ensemble), dims, mode (execute|count),
///                seed, threads, max_qubits
///   [grid]       execute_N, count_N           (comma lists)
///   [material]   mu_csv, mu0, gammabar    (default: the analytic benchmark)
///   [iteration]  S (integer or auto), target_residual, report_steps,
///                ancillas (fresh|recycled)
///   [mu]         mode, coords, degrees, prune_tol, headroom
///   [alpha]      same keys as [mu]
///   [ensemble]   M (comma list), execute_M, shots, loads_csv
///   [output]     slice_x1, fits
///
/// Relative file names resolve against the directory of the config file.
struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::Single;
  int dims = 1;
  RunMode mode = RunMode::Execute;
  std::uint64_t seed = 1;
  int threads = 1;
  int max_qubits = 26;
  std::vector<int> execute_N;
  std::vector<int> count_N;
  std::filesystem::path mu_csv;  // empty: benchmark modulus
  double mu0 = 0.0;               // 0: benchmark value, or suggested for mu_csv
  std::vector<double> gammabar;   // empty: benchmark load
  int S = 5;                      // 0: smallest S meeting target_residual
  double target_residual = 1e-6;
  std::vector<int> report_steps;
  AncillaMode ancillas = AncillaMode::Recycled;
  RveOptions encoding;
  std::vector<int> M;
  std::vector<int> execute_M;
  std::uint64_t shots = 0;  // 0: emulated readout only
  std::filesystem::path loads_csv;  // replaces the generated loads of execute_M
  double slice_x1 = 0.5;
  bool write_fits = false;

  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& file);
/// Directory holding the bundled presets.
std::filesystem::path preset_dir();
ExperimentConfig load_preset(const std::string& name);

/// Result of one executed single-RVE solve.
struct SolveReport {
  int N = 0;
  int qubits = 0;
  std::vector<StrainField> iterates;  // s = 0..S, ledger-corrected
  std::vector<double> rel_l2;         // against the analytic field, per s
  std::vector<double> sigma;          // homogenised stress of the last iterate
  GateCountReport counts;             // U_init + U_iter
  std::vector<double> ledger;         // readout factors per s
  std::vector<std::pair<std::string, PolyFit>> fits;  // polynomial encodings used
};

/// Loads of an ensemble run: base scaled by 1 + j / M plus a seeded
/// perturbation so that no two cases coincide.
std::vector<std::vector<double>> ensemble_loads(const std::vector<double>& base, int M,
                                                std::uint64_t seed);

RveOptions options_for(const ExperimentConfig& cfg);

/// Modulus field of the experiment at N: the benchmark sampled at N, or the
/// mu_csv field (whose grid must equal N).
RveSpec spec_for(const ExperimentConfig& cfg, int N);
std::vector<double> load_for(const ExperimentConfig& cfg);
/// Reference strain: the closed form for the benchmark, otherwise the
/// oracle iterated until successive iterates differ by less than 1e-13.
StrainField reference_for(const ExperimentConfig& cfg, const RveSpec& spec);
/// Smallest S whose oracle iterate changes by at most target_residual
/// (relative L2) from the previous one; capped at 200.
int choose_S(const ExperimentConfig& cfg, int N);
/// cfg with S resolved for grid size N.
ExperimentConfig resolved(const ExperimentConfig& cfg, int N);

/// Modulus field from CSV: header k0,value (1D) or k0,k1,value (2D).
RveSpec read_mu_csv(std::istream& in, int dims);
/// Ensemble loads: loads_csv when set, otherwise ensemble_loads(M).
LoadSet loads_for(const ExperimentConfig& cfg, int M);
/// Coefficients as i0,i1,coefficient rows.
std::string fit_csv(const PolyFit& fit);

/// Qubits an executed point needs (ensemble: M > 0).
int required_qubits(const ExperimentConfig& cfg, int N, int M = 0);

SolveReport solve_single(const ExperimentConfig& cfg, int N);
/// U_init + U_iter of the benchmark at N (single) or the full ensemble
/// circuit (M > 0), lowered with one helper qubit.
GateCountReport count_point(const ExperimentConfig& cfg, int N, int M = 0);

struct ExperimentResult {
  std::vector<SolveReport> solves;
  std::vector<std::filesystem::path> files;
};

/// Writes the CSVs of an experiment into out_dir. Throws QubitBudgetError
/// before any work when an executed point exceeds max_qubits.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir);

// CSV helpers. Numbers use %.17g so reruns are byte-identical.
std::string strain_csv(const std::vector<StrainField>& iterates,
                       const std::vector<int>& steps, double slice_x1);
std::string error_csv(const std::vector<SolveReport>& solves);
std::string count_rows_csv(const std::vector<std::pair<long long, GateCounts>>& rows);

struct ScalingFit {
  std::string model;  // "polylog" or "ensemble"
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// count = a (log2 x)^c, least squares on the counts themselves.
ScalingFit fit_polylog(const std::vector<double>& x, const std::vector<double>& count);
/// count = a M (log2 M)^c + b.
ScalingFit fit_ensemble(const std::vector<double>& M, const std::vector<double>& count);

/// Reads index and total columns of a counts CSV.
std::pair<std::vector<double>, std::vector<double>> read_counts_csv(std::istream& in);

}  // namespace qhomog

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

#include <array>
#include <string>
#include <vector>

#include "qhomog/circuit.hpp"
#include "qhomog/poly_encode.hpp"

namespace qhomog {

/// Row-major real 2x2 matrix.
using Real2 = std::array<double, 4>;

struct LcuCoefficients {
  double a0 = 0.0;  // identity
  double a1 = 0.0;  // Pauli X
  double a2 = 0.0;  // Pauli Z
};

/// Coefficients of Gamma_hat = a0 I + a1 X + a2 Z at mode (k0, k1).
/// The zero mode returns (-1/(2 mu0), 0, 0).
LcuCoefficients lcu_coefficients(int k0, int k1, int N, double mu0);

/// -(1/mu0) xi xi^T / |xi|^2 with xi = (r(k0), r(k1)); throws
/// ValidationError for the excluded zero mode.
Real2 green_matrix(int k0, int k1, int N, double mu0);
/// 1D strain Green's function: -1/mu0 for k != 0.
double green_scalar(int k, int N, double mu0);

Real2 lcu_reconstruct(const LcuCoefficients& c);

/// |00> -> (|00> + |01> + |10>)/sqrt(3) on (l0, l1), l = l0 + 2 l1.
BlockPtr build_u_prep(int l0, int l1);

/// Qubits touched by U_Gamma. k0/k1 are the little-endian views of the
/// frequency registers; c, l0, l1 are unused in 1D; ext only in Extended
/// coordinate mode.
struct LcuRegisters {
  int l0 = -1;
  int l1 = -1;
  int p0 = -1;
  int c = -1;
  std::vector<int> k0;
  std::vector<int> k1;
  std::vector<int> ext;
};

struct UGamma {
  BlockPtr block;
  int dims = 1;
  int N = 0;
  double mu0 = 1.0;
  double g = 1.0;  // common amplitude scale of the LCU branches
  Encoding alpha1;
  Encoding alpha2;

  /// Operator realised on the stress qubit in the selected branch
  /// (l = 0, p0 = 1), including the 1/3 prefactor and 1/g. 1D: element 0.
  Real2 selected(int k0, int k1) const;
  /// Gamma_hat as encoded (selected * 3 g).
  Real2 realised_green(int k0, int k1) const;
};

UGamma build_u_gamma(const LcuRegisters& regs, int dims, int N, double mu0,
                     const EncodingOptions& alpha_opts);

}  // namespace qhomog

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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qhomog/circuit.hpp"

namespace qhomog {

/// Signed frequency of grid index k: k for k < N/2, k - N otherwise.
int relabel(int k, int N);

/// Polynomial in one or two normalised coordinates, monomial basis.
struct PolyFit {
  int variables = 1;
  std::vector<int> degrees;           // max degree per variable
  std::vector<double> coefficients;   // index i0 + (degrees[0] + 1) * i1
  double fit_residual = 0.0;          // max |fit - target| over samples
  // When set, the polynomial is a rotation angle P and the encoded
  // amplitude is sin(P); otherwise the polynomial is the amplitude itself.
  bool angle_space = false;

  double evaluate(double x0, double x1 = 0.0) const;
  std::size_t num_terms() const { return coefficients.size(); }
};

struct FitSample {
  double x0 = 0.0;
  double x1 = 0.0;
  double value = 0.0;
};

/// Least squares via column-pivoted QR (Eigen). Throws FitError when the
/// design matrix is rank deficient or underdetermined.
PolyFit fit_polynomial(const std::vector<FitSample>& samples,
                       const std::vector<int>& degrees);

/// x = offset + sum_j weights[j] * bit(qubits[j]).
struct CoordinateMap {
  std::vector<int> qubits;
  std::vector<double> weights;
  double offset = 0.0;

  double value(std::uint64_t bits) const;  // bit j of `bits` is qubits[j]
};

/// x = k / 2^n for a little-endian register.
CoordinateMap raw_coordinates(const std::vector<int>& qubits);
/// x = r(k) / N: the most significant bit carries weight -1/2.
CoordinateMap relabelled_coordinates(const std::vector<int>& qubits);

/// Multilinear polynomial in qubit values, keyed by bitmask over the
/// concatenated coordinate bits (dimension 0 first).
using BitPolynomial = std::map<std::uint64_t, double>;

BitPolynomial expand_bits(const PolyFit& fit,
                          const std::vector<CoordinateMap>& coords);

/// Same polynomial in the parity basis: sum_S w_S (-1)^{parity of bits in S}.
BitPolynomial walsh_terms(const PolyFit& fit,
                          const std::vector<CoordinateMap>& coords);

struct UPolyInfo {
  std::size_t terms = 0;        // rotations emitted
  std::size_t pruned = 0;
  double pruned_bound = 0.0;    // bound on the resulting angle error
};

/// Ancilla rotation so that |0>|k> -> (.. |0> + a(k) |1>)|k>.
/// Angle-space fits: one RY per parity term between CNOT ladders, a = sin(P).
/// Amplitude fits: uniformly controlled RY with 2 asin(fit(k)), a = fit.
BlockPtr build_u_poly(const PolyFit& fit,
                      const std::vector<CoordinateMap>& coords, int ancilla,
                      double prune_tol = 0.0, UPolyInfo* info = nullptr,
                      const std::string& name = "u_poly");

/// Embedding of an N-point coordinate in a 2N-point one. Base indices
/// k >= N/2 sit at k + N; the middle band is unspecified.
struct ExtendedDomainSpec {
  int base_size = 0;
  int extended_size = 0;
  std::vector<std::pair<int, int>> defined_ranges;  // half-open
  int extended_index(int k) const;
  bool defined(int k_ext) const;
};

ExtendedDomainSpec extended_domain(int N);

/// CNOT(base MSB -> ext) around U_poly over [base bits, ext] per dimension,
/// with the fit expressed in x = k_ext / 2N. The ext qubits must start in
/// |0> and are restored.
BlockPtr build_extended_encoding(const ExtendedDomainSpec& spec,
                                 const PolyFit& fit,
                                 const std::vector<std::vector<int>>& base,
                                 const std::vector<int>& ext, int ancilla,
                                 double prune_tol = 0.0,
                                 UPolyInfo* info = nullptr,
                                 const std::string& name = "u_poly_ext");

// ---------------------------------------------------------------------------
// Grid-function encoding used by the solver circuits.

enum class EncodingMode { Lookup, Polynomial };
enum class CoordMode { Raw, Relabelled, Extended };

struct EncodingOptions {
  EncodingMode mode = EncodingMode::Polynomial;
  CoordMode coords = CoordMode::Raw;
  std::vector<int> degrees{8};
  double prune_tol = 0.0;
  double headroom = 1.2;  // scale margin for polynomial mode
};

/// Values on an N (1D) or N x N grid, index k0 + N * k1.
struct GridFunction {
  int dims = 1;
  int N = 0;
  std::vector<double> values;
  std::vector<char> dont_care;  // optional; nonzero points are left out of the fit

  bool cares(std::size_t v) const { return dont_care.empty() || !dont_care[v]; }
};

struct Encoding {
  BlockPtr block;
  double scale = 1.0;          // ancilla amplitude = realised / scale
  PolyFit fit;                 // empty in lookup mode
  std::vector<double> realised;  // scale * encoded amplitude per grid point
  double max_error = 0.0;      // max |realised - target| over cared-for points
  UPolyInfo info;
};

/// index_qubits[d] is the little-endian view of coordinate d. ext holds one
/// qubit per dimension and is only used in Extended mode.
Encoding encode_grid_function(const GridFunction& f,
                              const std::vector<std::vector<int>>& index_qubits,
                              const std::vector<int>& ext, int ancilla,
                              const EncodingOptions& opts,
                              const std::string& name);

}  // namespace qhomog

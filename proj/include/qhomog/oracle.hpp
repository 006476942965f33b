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

// Classical reference: FFT fixed-point solver and closed-form benchmarks.
//
// Transform convention: forward DFT unnormalised, inverse carries 1/N^dims,
// so the zero mode of a field with mean m is m * N^dims.

#include <array>
#include <vector>

namespace qhomog {

/// RVE geometry and material on an N (1D) or N x N grid, index k0 + N k1.
struct RveSpec {
  int dims = 1;
  int N = 0;
  double L = 1.0;
  std::vector<double> mu;
  double mu0 = 1.0;

  std::size_t points() const;
  void validate() const;
};

/// Strain samples per component (dimensionless), plus the normalisation
/// ledger applied when the field was read out of a circuit.
struct StrainField {
  int dims = 1;
  int N = 0;
  std::vector<std::vector<double>> components;
  std::vector<double> ledger;
};

struct AnalyticBenchmark {
  int dims = 1;
  double L = 1.0;
  double mu0 = 1.0;
  double alpha = 0.75;
  std::vector<double> gammabar{0.01};

  /// kappa(x) = mu0 / (alpha + (1/alpha - alpha) sin^2(pi x / L)).
  double kappa(double x) const;
  double mu(double x0, double x1 = 0.0) const;
  /// 2 alpha / (1 + alpha^2): ratio of the equilibrium flux to gammabar mu0.
  double flux_factor() const;
  /// Integration constant C of component i: flux_factor * gammabar_i * mu0.
  double C(int i = 0) const;
  std::vector<double> strain(double x0, double x1 = 0.0) const;
};

AnalyticBenchmark bench_1d(double gammabar = 0.01);
AnalyticBenchmark bench_2d(double g0 = 0.01, double g1 = 0.01);

/// Samples the benchmark modulus at x_k = k L / N.
RveSpec bench_spec(const AnalyticBenchmark& b, int N);
StrainField analytic_field(const AnalyticBenchmark& b, int N);

/// Constant field equal to gammabar.
StrainField uniform_field(int dims, int N, const std::vector<double>& gammabar);

/// One Moulinec-Suquet step.
StrainField fixed_point_step(const RveSpec& spec, const StrainField& gamma,
                             const std::vector<double>& gammabar);

/// Iterates 0..S, starting from `initial` or from the uniform field.
std::vector<StrainField> fft_fixed_point(const RveSpec& spec,
                                         const std::vector<double>& gammabar,
                                         int S,
                                         const StrainField* initial = nullptr);

/// Grid average of mu * gamma per component.
std::vector<double> homogenised_stress(const RveSpec& spec,
                                       const StrainField& strain);

/// ||a - ref||_2 / ||ref||_2 over all components.
double relative_l2(const StrainField& a, const StrainField& ref);
double max_abs_diff(const StrainField& a, const StrainField& b);

/// ||xi . sigma_hat||_2 over nonzero modes (spectral divergence).
double spectral_divergence_norm(const RveSpec& spec, const StrainField& strain);

/// (min mu + max mu) / 2.
double suggest_mu0(const std::vector<double>& mu);

/// Forward (unnormalised) and inverse (1/N^dims) DFT helpers.
std::vector<std::array<double, 2>> dft(int dims, int N,
                                       const std::vector<std::array<double, 2>>& in,
                                       bool inverse);

}  // namespace qhomog

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

#include "qhomog/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qhomog/errors.hpp"
#include "qhomog/greens_lcu.hpp"

namespace qhomog {

std::size_t RveSpec::points() const {
  return dims == 2 ? std::size_t(N) * N : std::size_t(N);
}

void RveSpec::validate() const {
  if (dims != 1 && dims != 2) throw ConfigError("dims must be 1 or 2");
  if (N < 2 || (N & (N - 1))) throw ConfigError("N must be a power of two >= 2");
  if (L <= 0.0) throw ConfigError("edge length must be positive");
  if (mu0 <= 0.0) throw ConfigError("reference modulus must be positive");
  if (mu.size() != points()) throw ConfigError("modulus field has the wrong size");
  for (double m : mu)
    if (!(m > 0.0)) throw ConfigError("modulus values must be positive");
}

double AnalyticBenchmark::kappa(double x) const {
  const double s = std::sin(std::numbers::pi * x / L);
  return mu0 / (alpha + (1.0 / alpha - alpha) * s * s);
}

double AnalyticBenchmark::mu(double x0, double x1) const {
  return dims == 1 ? kappa(x0) : kappa(x0) * kappa(x1) / mu0;
}

double AnalyticBenchmark::flux_factor() const {
  return 2.0 * alpha / (1.0 + alpha * alpha);
}

double AnalyticBenchmark::C(int i) const {
  return flux_factor() * gammabar.at(i) * mu0;
}

std::vector<double> AnalyticBenchmark::strain(double x0, double x1) const {
  // kappa_i (gammabar_i + w_i') is constant for the separable modulus.
  std::vector<double> g{C(0) / kappa(x0)};
  if (dims == 2) g.push_back(C(1) / kappa(x1));
  return g;
}

AnalyticBenchmark bench_1d(double gammabar) {
  AnalyticBenchmark b;
  b.gammabar = {gammabar};
  return b;
}

AnalyticBenchmark bench_2d(double g0, double g1) {
  AnalyticBenchmark b;
  b.dims = 2;
  b.gammabar = {g0, g1};
  return b;
}

RveSpec bench_spec(const AnalyticBenchmark& b, int N) {
  RveSpec s;
  s.dims = b.dims;
  s.N = N;
  s.L = b.L;
  s.mu0 = b.mu0;
  const double h = b.L / N;
  for (std::size_t v = 0; v < s.points(); ++v)
    s.mu.push_back(b.mu(h * double(v % N), h * double(v / N)));
  s.validate();
  return s;
}

StrainField analytic_field(const AnalyticBenchmark& b, int N) {
  StrainField f;
  f.dims = b.dims;
  f.N = N;
  f.components.assign(b.dims, {});
  const std::size_t pts = b.dims == 2 ? std::size_t(N) * N : std::size_t(N);
  const double h = b.L / N;
  for (std::size_t v = 0; v < pts; ++v) {
    auto g = b.strain(h * double(v % N), h * double(v / N));
    for (int i = 0; i < b.dims; ++i) f.components[i].push_back(g[i]);
  }
  return f;
}

StrainField uniform_field(int dims, int N, const std::vector<double>& gammabar) {
  if (static_cast<int>(gammabar.size()) != dims)
    throw ConfigError("macroscopic strain must have one entry per dimension");
  StrainField f;
  f.dims = dims;
  f.N = N;
  const std::size_t pts = dims == 2 ? std::size_t(N) * N : std::size_t(N);
  for (int i = 0; i < dims; ++i) f.components.emplace_back(pts, gammabar[i]);
  return f;
}

std::vector<std::array<double, 2>> dft(int dims, int N,
                                       const std::vector<std::array<double, 2>>& in,
                                       bool inverse) {
  const std::size_t pts = dims == 2 ? std::size_t(N) * N : std::size_t(N);
  if (in.size() != pts) throw ValidationError("dft input has the wrong size");
  std::vector<std::array<double, 2>> buf(in), out(pts);
  auto* i = reinterpret_cast<fftw_complex*>(buf.data());
  auto* o = reinterpret_cast<fftw_complex*>(out.data());
  const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
  fftw_plan p = dims == 2 ? fftw_plan_dft_2d(N, N, i, o, sign, FFTW_ESTIMATE)
                          : fftw_plan_dft_1d(N, i, o, sign, FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  if (inverse)
    for (auto& z : out) {
      z[0] /= double(pts);
      z[1] /= double(pts);
    }
  return out;
}

namespace {

using Spectrum = std::vector<std::array<double, 2>>;

Spectrum to_complex(const std::vector<double>& f) {
  Spectrum s(f.size());
  for (std::size_t v = 0; v < f.size(); ++v) s[v] = {f[v], 0.0};
  return s;
}

void check_shape(const RveSpec& spec, const StrainField& g) {
  if (g.dims != spec.dims || g.N != spec.N ||
      static_cast<int>(g.components.size()) != spec.dims)
    throw ValidationError("strain field does not match the RVE grid");
  for (const auto& c : g.components)
    if (c.size() != spec.points()) throw ValidationError("strain component size mismatch");
}

}  // namespace

StrainField fixed_point_step(const RveSpec& spec, const StrainField& gamma,
                             const std::vector<double>& gammabar) {
  spec.validate();
  check_shape(spec, gamma);
  const int N = spec.N, d = spec.dims;
  const std::size_t pts = spec.points();
  std::vector<Spectrum> tau_hat(d);
  for (int i = 0; i < d; ++i) {
    std::vector<double> tau(pts);
    for (std::size_t v = 0; v < pts; ++v)
      tau[v] = (spec.mu[v] - spec.mu0) * gamma.components[i][v];
    tau_hat[i] = dft(d, N, to_complex(tau), false);
  }
  std::vector<Spectrum> g_hat(d, Spectrum(pts));
  for (std::size_t v = 0; v < pts; ++v) {
    const int k0 = static_cast<int>(v % N), k1 = static_cast<int>(v / N);
    if (v == 0) {
      for (int i = 0; i < d; ++i) g_hat[i][0] = {gammabar[i] * double(pts), 0.0};
      continue;
    }
    if (d == 1) {
      const double G = green_scalar(k0, N, spec.mu0);
      g_hat[0][v] = {G * tau_hat[0][v][0], G * tau_hat[0][v][1]};
    } else {
      const Real2 G = green_matrix(k0, k1, N, spec.mu0);
      for (int r = 0; r < 2; ++r)
        for (int part = 0; part < 2; ++part)
          g_hat[r][v][part] = G[2 * r] * tau_hat[0][v][part] + G[2 * r + 1] * tau_hat[1][v][part];
    }
  }
  StrainField out;
  out.dims = d;
  out.N = N;
  for (int i = 0; i < d; ++i) {
    Spectrum g = dft(d, N, g_hat[i], true);
    std::vector<double> re(pts);
    double rmax = 0.0, imax = 0.0;
    for (std::size_t v = 0; v < pts; ++v) {
      re[v] = g[v][0];
      rmax = std::max(rmax, std::abs(g[v][0]));
      imax = std::max(imax, std::abs(g[v][1]));
    }
    if (imax > 1e-12 * std::max(rmax, 1e-300))
      throw ValidationError("strain update lost Hermitian symmetry");
    out.components.push_back(std::move(re));
  }
  return out;
}

std::vector<StrainField> fft_fixed_point(const RveSpec& spec,
                                         const std::vector<double>& gammabar,
                                         int S, const StrainField* initial) {
  if (S < 0) throw ConfigError("iteration count must be non-negative");
  std::vector<StrainField> it;
  it.push_back(initial ? *initial : uniform_field(spec.dims, spec.N, gammabar));
  for (int s = 0; s < S; ++s) it.push_back(fixed_point_step(spec, it.back(), gammabar));
  return it;
}

std::vector<double> homogenised_stress(const RveSpec& spec, const StrainField& strain) {
  check_shape(spec, strain);
  std::vector<double> out;
  for (const auto& c : strain.components) {
    double s = 0.0;
    for (std::size_t v = 0; v < c.size(); ++v) s += spec.mu[v] * c[v];
    out.push_back(s / double(c.size()));
  }
  return out;
}

double relative_l2(const StrainField& a, const StrainField& ref) {
  if (a.components.size() != ref.components.size())
    throw ValidationError("field component counts differ");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    if (a.components[i].size() != ref.components[i].size())
      throw ValidationError("field sizes differ");
    for (std::size_t v = 0; v < a.components[i].size(); ++v) {
      const double e = a.components[i][v] - ref.components[i][v];
      num += e * e;
      den += ref.components[i][v] * ref.components[i][v];
    }
  }
  return std::sqrt(num / den);
}

double max_abs_diff(const StrainField& a, const StrainField& b) {
  if (a.components.size() != b.components.size())
    throw ValidationError("field component counts differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.components.size(); ++i)
    for (std::size_t v = 0; v < a.components[i].size(); ++v)
      m = std::max(m, std::abs(a.components[i][v] - b.components[i].at(v)));
  return m;
}

double spectral_divergence_norm(const RveSpec& spec, const StrainField& strain) {
  check_shape(spec, strain);
  const int N = spec.N, d = spec.dims;
  std::vector<Spectrum> s_hat;
  for (int i = 0; i < d; ++i) {
    std::vector<double> s(spec.points());
    for (std::size_t v = 0; v < s.size(); ++v) s[v] = spec.mu[v] * strain.components[i][v];
    s_hat.push_back(dft(d, N, to_complex(s), true));
  }
  double acc = 0.0;
  for (std::size_t v = 1; v < spec.points(); ++v) {
    const double x0 = relabel(static_cast<int>(v % N), N);
    const double x1 = d == 2 ? relabel(static_cast<int>(v / N), N) : 0.0;
    double re = x0 * s_hat[0][v][0], im = x0 * s_hat[0][v][1];
    if (d == 2) {
      re += x1 * s_hat[1][v][0];
      im += x1 * s_hat[1][v][1];
    }
    acc += re * re + im * im;
  }
  return std::sqrt(acc) * 2.0 * std::numbers::pi / spec.L;
}

double suggest_mu0(const std::vector<double>& mu) {
  if (mu.empty()) throw ConfigError("empty modulus field");
  auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
  return 0.5 * (*lo + *hi);
}

}  // namespace qhomog

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

#include "qhomog/greens_lcu.hpp"

#include <algorithm>
#include <cmath>

#include "qhomog/errors.hpp"

namespace qhomog {

namespace {

// On the lines k0 = N/2 or k1 = N/2 (not both) the modes k and -k relabel to
// frequencies whose cross product r0 r1 differs in sign. Averaging the two
// keeps Gamma_hat even in k, so real fields map to real fields.
double cross_term(int k0, int k1, int N) {
  if ((k0 == N / 2) != (k1 == N / 2)) return 0.0;
  return double(relabel(k0, N)) * relabel(k1, N);
}

}  // namespace

LcuCoefficients lcu_coefficients(int k0, int k1, int N, double mu0) {
  LcuCoefficients c;
  c.a0 = -1.0 / (2.0 * mu0);
  const double r0 = relabel(k0, N), r1 = relabel(k1, N);
  const double q = r0 * r0 + r1 * r1;
  if (q == 0.0) return c;
  c.a1 = -(1.0 / mu0) * cross_term(k0, k1, N) / q;
  c.a2 = -(1.0 / (2.0 * mu0)) * (r0 * r0 - r1 * r1) / q;
  return c;
}

Real2 green_matrix(int k0, int k1, int N, double mu0) {
  const double r0 = relabel(k0, N), r1 = relabel(k1, N);
  const double q = r0 * r0 + r1 * r1;
  if (q == 0.0) throw ValidationError("zero frequency is an excluded mode");
  const double f = -1.0 / (mu0 * q);
  const double x = cross_term(k0, k1, N);
  return {f * r0 * r0, f * x, f * x, f * r1 * r1};
}

double green_scalar(int k, int N, double mu0) {
  if (relabel(k, N) == 0) throw ValidationError("zero frequency is an excluded mode");
  return -1.0 / mu0;
}

Real2 lcu_reconstruct(const LcuCoefficients& c) {
  return {c.a0 + c.a2, c.a1, c.a1, c.a0 - c.a2};
}

BlockPtr build_u_prep(int l0, int l1) {
  CircuitBlock b("u_prep");
  b.add(gates::ry(l1, 2.0 * std::acos(std::sqrt(2.0 / 3.0))));
  Gate h = gates::h(l0);
  h.controls = {{l1, false}};
  b.add(h);
  return share(std::move(b));
}

Real2 UGamma::selected(int k0, int k1) const {
  if (dims == 1) {
    const double a = alpha1.realised.empty() ? -1.0 / mu0 : alpha1.realised[k0];
    return {a / g, 0.0, 0.0, 0.0};
  }
  const std::size_t v = static_cast<std::size_t>(k0) + static_cast<std::size_t>(N) * k1;
  LcuCoefficients c;
  c.a0 = -1.0 / (2.0 * mu0);
  c.a1 = alpha1.realised[v];
  c.a2 = alpha2.realised[v];
  Real2 m = lcu_reconstruct(c);
  for (double& x : m) x /= 3.0 * g;
  return m;
}

Real2 UGamma::realised_green(int k0, int k1) const {
  Real2 m = selected(k0, k1);
  const double f = dims == 1 ? g : 3.0 * g;
  for (double& x : m) x *= f;
  return m;
}

UGamma build_u_gamma(const LcuRegisters& regs, int dims, int N, double mu0,
                     const EncodingOptions& alpha_opts) {
  if (mu0 <= 0.0) throw ConfigError("reference modulus must be positive");
  UGamma u;
  u.dims = dims;
  u.N = N;
  u.mu0 = mu0;
  if (dims == 1) {
    // Constant Gamma_hat: one rotation with amplitude -1/(mu0 g).
    u.g = std::max(1.0, 1.0 / mu0);
    CircuitBlock b("u_gamma");
    b.add(gates::ry(regs.p0, 2.0 * std::asin(-1.0 / (mu0 * u.g))));
    u.block = share(std::move(b));
    return u;
  }
  if (dims != 2) throw ConfigError("dims must be 1 or 2");

  GridFunction a1{2, N, {}, {}}, a2{2, N, {}, {}};
  // The zero mode is overwritten by the exchange step; leave it out of the fits.
  a1.dont_care.assign(std::size_t(N) * N, 0);
  a1.dont_care[0] = 1;
  a2.dont_care = a1.dont_care;
  double amax = 1.0 / (2.0 * mu0);
  for (int k1 = 0; k1 < N; ++k1)
    for (int k0 = 0; k0 < N; ++k0) {
      LcuCoefficients c = lcu_coefficients(k0, k1, N, mu0);
      a1.values.push_back(c.a1);
      a2.values.push_back(c.a2);
      amax = std::max({amax, std::abs(c.a1), std::abs(c.a2)});
    }
  const double head = alpha_opts.mode == EncodingMode::Polynomial ? alpha_opts.headroom : 1.0;
  u.g = std::max(1.0, head * amax);

  // Encode alpha/g with unit scale so all branches share the factor 1/g.
  auto scaled = [&](GridFunction f) {
    for (double& x : f.values) x /= u.g;
    return f;
  };
  EncodingOptions o1 = alpha_opts, o2 = alpha_opts;
  if (o1.degrees.size() > 2) {
    o2.degrees = {o1.degrees[2], o1.degrees.size() > 3 ? o1.degrees[3] : o1.degrees[2]};
    o1.degrees.resize(2);
  }
  o1.headroom = o2.headroom = 1.0;
  u.alpha1 = encode_grid_function(scaled(a1), {regs.k0, regs.k1}, regs.ext, regs.p0, o1, "alpha1");
  u.alpha2 = encode_grid_function(scaled(a2), {regs.k0, regs.k1}, regs.ext, regs.p0, o2, "alpha2");
  for (double& x : u.alpha1.realised) x *= u.g;
  for (double& x : u.alpha2.realised) x *= u.g;
  if (u.alpha1.scale != 1.0 || u.alpha2.scale != 1.0)
    throw EncodingError("LCU coefficient exceeds the common scale");

  CircuitBlock sel("u_select");
  {
    CircuitBlock b0("branch_i");
    b0.add(gates::ry(regs.p0, 2.0 * std::asin(-1.0 / (2.0 * mu0 * u.g))));
    sel.add(share(std::move(b0)), {{regs.l0, false}, {regs.l1, false}});
  }
  {
    CircuitBlock b1("branch_x");
    b1.add(u.alpha1.block);
    b1.add(gates::x(regs.c));
    sel.add(share(std::move(b1)), {{regs.l0, true}, {regs.l1, false}});
  }
  {
    CircuitBlock b2("branch_z");
    b2.add(u.alpha2.block);
    b2.add(gates::z(regs.c));
    sel.add(share(std::move(b2)), {{regs.l0, false}, {regs.l1, true}});
  }
  auto prep = build_u_prep(regs.l0, regs.l1);
  CircuitBlock b("u_gamma");
  b.add(prep, {}, false, true);
  b.add(share(std::move(sel)));
  b.add(prep, {}, true, true);
  u.block = share(std::move(b));
  return u;
}

}  // namespace qhomog

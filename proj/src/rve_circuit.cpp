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

#include "qhomog/rve_circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qhomog/errors.hpp"

namespace qhomog {

void IterationPlan::validate() const {
  if (S < 1) throw ConfigError("iteration count S must be at least 1");
}

// ---------------------------------------------------------------------------
// Layout

std::vector<int> RveLayout::physical_pattern() const {
  return dims == 2 ? std::vector<int>{0, 0, 1, 1} : std::vector<int>{1, 1};
}

std::uint64_t RveLayout::copy_code(int j) const {
  if (j < 0 || j >= S) throw ValidationError("copy index out of range");
  std::uint64_t code = 0;
  for (int b = S - 1 - j; b < S - 1; ++b) code |= std::uint64_t{1} << b;
  return code;
}

RveLayout make_rve_layout(int dims, int N, int S, bool extended, AncillaMode mode) {
  if (dims != 1 && dims != 2) throw ConfigError("dims must be 1 or 2");
  if (N < 2 || (N & (N - 1))) throw ConfigError("N must be a power of two >= 2");
  if (S < 1) throw ConfigError("iteration count S must be at least 1");
  RveLayout L;
  L.dims = dims;
  L.N = N;
  L.n = std::countr_zero(static_cast<unsigned>(N));
  L.S = S;
  L.mode = mode;
  auto& lay = L.layout;
  L.k0 = lay.qubits(lay.add("k0", L.n).name);
  if (dims == 2) {
    L.k1 = lay.qubits(lay.add("k1", L.n).name);
    L.c = lay.add("c", 1).offset;
  }
  L.x0 = reversed(L.k0);
  L.x1 = reversed(L.k1);
  L.d = lay.add("d", 1).offset;
  L.e = lay.add("e", 1).offset;
  if (S > 1) L.s = lay.qubits(lay.add("s", S - 1).name);
  const int bsize = dims == 2 ? 4 : 2;
  const int bundles = mode == AncillaMode::Fresh ? S : 1;
  for (int j = 0; j < bundles; ++j)
    L.anci.push_back(lay.qubits(lay.add("anci" + std::to_string(j), bsize).name));
  if (extended) L.ext = lay.qubits(lay.add("ext", dims).name);
  for (int q = 0; q < lay.num_qubits(); ++q) L.rve_qubits.push_back(q);
  return L;
}

int rve_qubit_count(int dims, int N, int S, bool extended, AncillaMode mode) {
  const int n = std::countr_zero(static_cast<unsigned>(N));
  const int bundles = mode == AncillaMode::Fresh ? S : 1;
  const int ext = extended ? dims : 0;
  if (dims == 2) return 2 * n + 2 + (S - 1) + 1 + 4 * bundles + ext;
  return n + 2 + (S - 1) + 2 * bundles + ext;
}

// ---------------------------------------------------------------------------
// Ledger

double StrainLedger::amplitude_factor(int steps) const {
  return A0() / std::pow(K, steps);
}

std::vector<double> StrainLedger::factors(int steps) const {
  std::vector<double> f{w_init, 1.0 / norm0};
  for (int s = 0; s < steps; ++s) f.push_back(1.0 / K);
  return f;
}

// ---------------------------------------------------------------------------
// Encodings and initialisation

RveEncodings build_rve_encodings(const RveSpec& spec, const RveLayout& L,
                                 const RveOptions& opts) {
  spec.validate();
  if (spec.dims != L.dims || spec.N != L.N) throw ConfigError("layout does not match the RVE");
  RveEncodings enc;
  GridFunction f{spec.dims, spec.N, {}, {}};
  for (double m : spec.mu) f.values.push_back(m - spec.mu0);
  std::vector<std::vector<int>> idx{L.x0};
  if (L.dims == 2) idx.push_back(L.x1);
  if (opts.mu.coords == CoordMode::Extended && L.ext.empty())
    throw ConfigError("extended coordinates need ext qubits");
  enc.mu = encode_grid_function(f, idx, L.ext, L.p1(), opts.mu, "mu_minus_mu0");

  LcuRegisters r;
  r.p0 = L.p0();
  if (L.dims == 2) {
    r.l0 = L.l0();
    r.l1 = L.l1();
    r.c = L.c;
    r.k0 = L.k0;
    r.k1 = L.k1;
    if (opts.alpha.coords == CoordMode::Extended) {
      if (L.ext.empty()) throw ConfigError("extended coordinates need ext qubits");
      r.ext = L.ext;
    }
  }
  enc.gamma = build_u_gamma(r, L.dims, L.N, spec.mu0, opts.alpha);
  enc.K = enc.mu.scale * enc.gamma.g * (L.dims == 2 ? 3.0 : 1.0);
  return enc;
}

BlockPtr build_u_init(const RveSpec& spec, const std::vector<double>& gammabar,
                      const IterationPlan& plan, const RveLayout& L, double K,
                      StrainLedger* ledger) {
  plan.validate();
  const int dims = L.dims, N = L.N, S = L.S;
  if (plan.S != S) throw ConfigError("plan and layout disagree on S");
  if (static_cast<int>(gammabar.size()) != dims)
    throw ConfigError("macroscopic strain must have one entry per dimension");
  for (double g : gammabar)
    if (!(std::abs(g) <= N)) throw EncodingError("macroscopic strain exceeds N");

  const StrainField g0 = plan.initial ? *plan.initial : uniform_field(dims, N, gammabar);
  if (g0.dims != dims || g0.N != N || static_cast<int>(g0.components.size()) != dims)
    throw ConfigError("initial strain field does not match the RVE");
  std::vector<double> nc(dims, 0.0);
  for (int c = 0; c < dims; ++c) {
    if (g0.components[c].size() != spec.points())
      throw ConfigError("initial strain component has the wrong size");
    for (double v : g0.components[c]) nc[c] += v * v;
    nc[c] = std::sqrt(nc[c]);
  }
  double norm0 = 0.0;
  for (double x : nc) norm0 += x * x;
  norm0 = std::sqrt(norm0);
  if (norm0 == 0.0) throw EncodingError("initial strain field is zero");
  const bool uniform = plan.weighting == InitWeighting::Uniform;
  if (uniform)
    for (double x : nc)
      if (x == 0.0) throw EncodingError("independently normalised components must be nonzero");

  const double h = dims == 2 ? 1.0 / std::sqrt(2.0) : 1.0;
  const double rootN = std::sqrt(double(spec.points()));
  double t = 0.0;
  for (double g : gammabar) t = std::max(t, rootN * std::abs(g) / (norm0 * h));

  // Weights over (s, e): index bits are s then e.
  std::vector<int> se = L.s;
  se.push_back(L.e);
  std::vector<double> v(std::size_t{1} << S, 0.0);
  const std::uint64_t ebit = std::uint64_t{1} << (S - 1);
  v[0] = 1.0;
  for (int j = 0; j < S; ++j)
    v[ebit | L.copy_code(j)] = uniform ? 1.0 : t / std::pow(K, j + 1);
  double vn = 0.0;
  for (double x : v) vn += x * x;
  vn = std::sqrt(vn);
  for (double& x : v) x /= vn;

  CircuitBlock b("u_init");
  b.add(state_prep(se, v, "subspace_prep"));
  const Control on_e0{L.e, false}, on_e1{L.e, true};
  if (dims == 2) {
    if (uniform) {
      b.add(gates::h(L.c));
    } else {
      Gate cr = gates::ry(L.c, 2.0 * std::atan2(nc[1], nc[0]));
      cr.controls = {on_e0};
      b.add(cr);
      Gate ch = gates::h(L.c);
      ch.controls = {on_e1};
      b.add(ch);
    }
  }
  std::vector<int> kq = L.x0;
  kq.insert(kq.end(), L.x1.begin(), L.x1.end());
  for (int c = 0; c < dims; ++c) {
    if (nc[c] == 0.0) continue;
    std::vector<double> u(g0.components[c]);
    for (double& x : u) x /= nc[c];
    std::vector<Control> ctl{on_e0};
    if (dims == 2) ctl.push_back({L.c, c == 1});
    b.add(state_prep(kq, u, "gamma0_c" + std::to_string(c)), ctl);
  }
  for (int c = 0; c < dims; ++c) {
    double cs = uniform ? gammabar[c] / N
                        : (t == 0.0 ? 0.0 : rootN * gammabar[c] / (norm0 * t * h));
    cs = std::clamp(cs, -1.0, 1.0);
    Gate r = gates::ry(L.d, 2.0 * std::acos(cs));
    r.controls = {on_e1};
    if (dims == 2) r.controls.push_back({L.c, c == 1});
    b.add(r);
  }
  if (ledger) {
    ledger->dims = dims;
    ledger->N = N;
    ledger->S = S;
    ledger->w_init = v[0];
    ledger->norm0 = norm0;
    ledger->K = K;
    ledger->valid = !uniform;
  }
  return share(std::move(b));
}

// ---------------------------------------------------------------------------
// Exchange

std::vector<std::uint64_t> gray_path(std::uint64_t ka, std::uint64_t kb,
                                     std::size_t width,
                                     const std::vector<int>& flip_order) {
  if (ka == kb) throw ValidationError("exchange needs two distinct basis states");
  if (width < 64 && ((ka | kb) >> width)) throw ValidationError("basis index exceeds width");
  std::vector<int> diff;
  for (std::size_t j = 0; j < width; ++j)
    if (((ka ^ kb) >> j) & 1) diff.push_back(static_cast<int>(j));
  std::vector<int> order = flip_order.empty() ? diff : flip_order;
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != diff) throw ValidationError("flip order must list each differing bit once");
  std::vector<std::uint64_t> path{ka};
  for (int b : order) path.push_back(path.back() ^ (std::uint64_t{1} << b));
  return path;
}

BlockPtr build_u_exch(const std::vector<int>& qubits, std::uint64_t ka,
                      std::uint64_t kb, const std::vector<int>& flip_order,
                      const std::string& name) {
  const auto path = gray_path(ka, kb, qubits.size(), flip_order);
  auto link = [&](std::uint64_t a, std::uint64_t b) {
    const int bit = std::countr_zero(a ^ b);
    std::vector<Control> ctl;
    for (std::size_t j = 0; j < qubits.size(); ++j)
      if (static_cast<int>(j) != bit) ctl.push_back({qubits[j], bool((a >> j) & 1)});
    return gates::mcx(std::move(ctl), qubits[bit]);
  };
  CircuitBlock blk(name);
  const std::size_t h = path.size() - 1;
  for (std::size_t i = 0; i < h; ++i) blk.add(link(path[i], path[i + 1]));
  for (std::size_t i = h - 1; i-- > 0;) blk.add(link(path[i], path[i + 1]));
  return share(std::move(blk));
}

namespace {

std::uint64_t pattern_index(const RveLayout& L, const std::map<int, int>& values) {
  std::uint64_t idx = 0;
  for (const auto& [q, v] : values) {
    auto it = std::find(L.rve_qubits.begin(), L.rve_qubits.end(), q);
    if (it == L.rve_qubits.end()) throw ValidationError("qubit outside the RVE layout");
    if (v) idx |= std::uint64_t{1} << (it - L.rve_qubits.begin());
  }
  return idx;
}

void set_bundle(std::map<int, int>& m, const std::vector<int>& q, const std::vector<int>& v) {
  for (std::size_t i = 0; i < q.size(); ++i) m[q[i]] = v[i];
}

}  // namespace

std::uint64_t physical_zero_mode(const RveLayout& L, int step, int c) {
  std::map<int, int> m;
  m[L.e] = 0;
  set_bundle(m, L.anci[0], L.physical_pattern());
  if (L.mode == AncillaMode::Fresh)
    for (int j = 1; j <= step; ++j) set_bundle(m, L.anci.at(j), L.physical_pattern());
  if (L.dims == 2) m[L.c] = c;
  return pattern_index(L, m);
}

std::uint64_t copy_zero_mode(const RveLayout& L, int step, int c) {
  std::map<int, int> m;
  m[L.e] = 1;
  const std::uint64_t code = L.copy_code(step);
  for (std::size_t i = 0; i < L.s.size(); ++i) m[L.s[i]] = int((code >> i) & 1);
  if (L.dims == 2) m[L.c] = c;
  return pattern_index(L, m);
}

// ---------------------------------------------------------------------------
// Steps

BlockPtr build_u_irve(const RveLayout& L, const RveEncodings& enc, int step) {
  if (step < 0 || step >= L.S) throw ValidationError("step index out of range");
  const std::vector<Control> on_e0{{L.e, false}};
  CircuitBlock b("u_irve");

  CircuitBlock s1("s1_polarisation");
  s1.add(enc.mu.block);
  b.add(share(std::move(s1)), on_e0);

  CircuitBlock qft("qft");
  qft.add(qft_block(L.k0, false, "qft_k0"));
  if (L.dims == 2) qft.add(qft_block(L.k1, false, "qft_k1"));
  BlockPtr q = share(std::move(qft));
  CircuitBlock s2("s2_fourier");
  s2.add(q, {}, true);
  b.add(share(std::move(s2)), on_e0);

  CircuitBlock s3("s3_green");
  s3.add(enc.gamma.block);
  b.add(share(std::move(s3)), on_e0);

  CircuitBlock s4("s4_exchange");
  for (int c = 0; c < L.dims; ++c)
    s4.add(build_u_exch(L.rve_qubits, physical_zero_mode(L, step, c),
                        copy_zero_mode(L, step, c), {}, "exch_c" + std::to_string(c)));
  b.add(share(std::move(s4)));

  CircuitBlock s5("s5_inverse_fourier");
  s5.add(q);
  b.add(share(std::move(s5)), on_e0);
  return share(std::move(b));
}

BlockPtr build_step(const RveLayout& L, const RveEncodings& enc, int step) {
  CircuitBlock b("step" + std::to_string(step));
  b.add(build_u_irve(L, enc, step));
  if (L.mode == AncillaMode::Fresh && step + 1 < L.S) {
    CircuitBlock sw("anci_swap");
    for (std::size_t i = 0; i < L.anci[0].size(); ++i)
      sw.add(gates::swap(L.anci[0][i], L.anci[step + 1][i]));
    b.add(share(std::move(sw)));
  }
  return share(std::move(b));
}

BlockPtr build_u_iter(const RveLayout& L, const RveEncodings& enc) {
  CircuitBlock b("u_iter");
  for (int s = 0; s < L.S; ++s) b.add(build_step(L, enc, s));
  return share(std::move(b));
}

RveSpec RveCircuit::effective_spec() const {
  RveSpec s = spec;
  for (std::size_t v = 0; v < s.mu.size(); ++v) s.mu[v] = spec.mu0 + enc.mu.realised[v];
  return s;
}

RveCircuit build_rve_circuit(const RveSpec& spec, const std::vector<double>& gammabar,
                             const IterationPlan& plan, const RveOptions& opts) {
  spec.validate();
  plan.validate();
  RveCircuit rc;
  rc.spec = spec;
  rc.gammabar = gammabar;
  rc.plan = plan;
  const bool extended = (spec.dims == 2 && opts.alpha.coords == CoordMode::Extended) ||
                        opts.mu.coords == CoordMode::Extended;
  rc.layout = make_rve_layout(spec.dims, spec.N, plan.S, extended, plan.ancillas);
  rc.enc = build_rve_encodings(spec, rc.layout, opts);
  rc.u_init = build_u_init(spec, gammabar, plan, rc.layout, rc.enc.K, &rc.ledger);
  CircuitBlock it("u_iter");
  for (int s = 0; s < plan.S; ++s) {
    rc.steps.push_back(build_step(rc.layout, rc.enc, s));
    it.add(rc.steps.back());
  }
  rc.u_iter = share(std::move(it));
  return rc;
}

// ---------------------------------------------------------------------------
// Execution and readout

void recycle_ancillas(StateVector& state, const RveLayout& L) {
  const auto pat = L.physical_pattern();
  std::uint64_t amask = 0, phys = 0;
  for (std::size_t i = 0; i < L.anci[0].size(); ++i) {
    amask |= std::uint64_t{1} << L.anci[0][i];
    if (pat[i]) phys |= std::uint64_t{1} << L.anci[0][i];
  }
  const std::uint64_t ebit = std::uint64_t{1} << L.e;
  auto& amp = state.amplitudes();
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    const std::uint64_t a = i & amask;
    const bool keep = (i & ebit) ? a == 0 : a == phys;
    if (!keep) amp[i] = 0.0;
  }
  for (std::uint64_t i = 0; i < amp.size(); ++i)
    if (!(i & ebit) && (i & amask) == phys) {
      amp[i & ~amask] = amp[i];
      amp[i] = 0.0;
    }
}

void apply_rve_step(StateVector& state, const RveCircuit& rc, int step) {
  apply_block(state, *rc.steps.at(step));
  if (rc.layout.mode == AncillaMode::Recycled && step + 1 < rc.layout.S)
    recycle_ancillas(state, rc.layout);
}

StateVector run_rve(const RveCircuit& rc,
                    const std::function<void(int, const StateVector&)>& observe) {
  StateVector st = new_state(rc.layout.layout);
  apply_block(st, *rc.u_init);
  if (observe) observe(0, st);
  for (int s = 0; s < rc.layout.S; ++s) {
    apply_rve_step(st, rc, s);
    if (observe) observe(s + 1, st);
  }
  return st;
}

Projector physical_projector(const RveLayout& L, int steps) {
  if (steps < 0 || steps > L.S) throw ValidationError("step count out of range");
  Projector p;
  p.fix(L.e, 0).fix(L.d, 0);
  for (int q : L.s) p.fix(q, 0);
  for (int q : L.ext) p.fix(q, 0);
  const auto pat = L.physical_pattern();
  for (std::size_t j = 0; j < L.anci.size(); ++j) {
    bool phys;
    if (j == 0) phys = steps == L.S;
    else phys = static_cast<int>(j) <= steps;
    for (std::size_t i = 0; i < L.anci[j].size(); ++i)
      p.fix(L.anci[j][i], phys ? pat[i] : 0);
  }
  return p;
}

StrainField readout_strain(const StateVector& state, const RveLayout& L,
                           const StrainLedger& ledger, int steps) {
  if (!ledger.valid) throw ConfigError("uniform initial weighting has no strain ledger");
  std::vector<int> freeq = L.x0;
  freeq.insert(freeq.end(), L.x1.begin(), L.x1.end());
  if (L.dims == 2) freeq.push_back(L.c);
  const auto amps = read_slice(state, physical_projector(L, steps), freeq);
  double mass = 0.0;
  for (const auto& a : amps) mass += std::norm(a);
  if (mass < 1e-14) throw EmptyBranchError("physical strain branch is empty");
  const double f = ledger.amplitude_factor(steps);
  const std::size_t pts = amps.size() / L.dims;
  StrainField out;
  out.dims = L.dims;
  out.N = L.N;
  out.ledger = ledger.factors(steps);
  for (int c = 0; c < L.dims; ++c) {
    std::vector<double> comp(pts);
    for (std::size_t v = 0; v < pts; ++v) comp[v] = amps[c * pts + v].real() / f;
    out.components.push_back(std::move(comp));
  }
  return out;
}

}  // namespace qhomog

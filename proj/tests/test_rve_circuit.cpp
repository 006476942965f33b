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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qhomog/errors.hpp"
#include "qhomog/rve_circuit.hpp"
#include "qhomog/transpile.hpp"
#include "test_support.hpp"

using namespace qhomog;
using qhomog::test::Rng;

namespace {

RveOptions lookup_options() {
  RveOptions o;
  o.mu.mode = EncodingMode::Lookup;
  o.alpha.mode = EncodingMode::Lookup;
  o.alpha.coords = CoordMode::Raw;
  return o;
}

StrainField random_field(Rng& rng, int dims, int N, const std::vector<double>& gb) {
  StrainField f = uniform_field(dims, N, gb);
  for (auto& c : f.components)
    for (double& v : c) v += rng.uniform(-0.01, 0.01);
  return f;
}

std::uint64_t index_of(const RveLayout& L, const std::map<int, int>& bits) {
  std::uint64_t i = 0;
  for (const auto& [q, v] : bits)
    if (v) i |= std::uint64_t{1} << q;
  (void)L;
  return i;
}

int mcx_count(const CircuitBlock& b) {
  int n = 0;
  b.for_each_gate([&](const Gate& g, const CircuitBlock::Path&) {
    if (g.kind == GateKind::X && g.controls.size() > 1) ++n;
  });
  return n;
}

}  // namespace

TEST_CASE("layout registers and qubit count formula") {
  for (int dims : {1, 2})
    for (int N : {4, 8, 16, 1024})
      for (int S : {1, 2, 3, 6})
        for (bool ext : {false, true})
          for (auto mode : {AncillaMode::Fresh, AncillaMode::Recycled}) {
            auto L = make_rve_layout(dims, N, S, ext, mode);
            CHECK(L.layout.num_qubits() == rve_qubit_count(dims, N, S, ext, mode));
            CHECK(L.k0.size() == std::size_t(std::log2(N)));
            CHECK(L.anci.size() == std::size_t(mode == AncillaMode::Fresh ? S : 1));
            CHECK(L.s.size() == std::size_t(S - 1));
          }
  // Ancillas per step do not depend on N: 4 bundle qubits plus one s qubit in
  // 2D, 2 plus one in 1D.
  for (int N : {4, 64, 1024}) {
    const int n = int(std::log2(N));
    for (int S = 1; S < 6; ++S) {
      CHECK(rve_qubit_count(2, N, S + 1, false) - rve_qubit_count(2, N, S, false) == 5);
      CHECK(rve_qubit_count(1, N, S + 1, false) - rve_qubit_count(1, N, S, false) == 3);
      CHECK(rve_qubit_count(2, N, S, false) - 2 * n == rve_qubit_count(2, 4, S, false) - 4);
    }
  }
  CHECK_THROWS_AS(make_rve_layout(2, 12, 1, false), ConfigError);
  CHECK_THROWS_AS(make_rve_layout(3, 8, 1, false), ConfigError);
  CHECK_THROWS_AS(make_rve_layout(1, 8, 0, false), ConfigError);
}

TEST_CASE("thermometer codes of the gammabar copies") {
  auto L = make_rve_layout(2, 4, 3, false);
  CHECK(L.copy_code(0) == 0);
  CHECK(L.copy_code(1) == 2);  // s1 set: written s0 s1 = 01
  CHECK(L.copy_code(2) == 3);
}

TEST_CASE("uniform initial weighting reproduces the printed state") {
  for (int S : {1, 3}) {
    const int N = S == 1 ? 16 : 4;
    auto spec = bench_spec(bench_2d(), N);
    IterationPlan p;
    p.S = S;
    p.weighting = InitWeighting::Uniform;
    auto L = make_rve_layout(2, N, S, false);
    StrainLedger led;
    auto init = build_u_init(spec, {0.01, 0.01}, p, L, 3.0, &led);
    CHECK_FALSE(led.valid);
    StateVector st = new_state(L.layout);
    apply_block(st, *init);
    CHECK(std::abs(st.norm() - 1.0) < 1e-12);
    // (s, e) marginals: 1/(S+1) each on e=0 s=0 and on the S copy codes.
    Projector pe;
    pe.fix(L.e, 0);
    CHECK(project(st, pe).probability == doctest::Approx(1.0 / (S + 1)).epsilon(1e-12));
    for (int j = 0; j < S; ++j) {
      Projector pj;
      pj.fix(L.e, 1);
      for (std::size_t i = 0; i < L.s.size(); ++i) pj.fix(L.s[i], int((L.copy_code(j) >> i) & 1));
      CHECK(project(st, pj).probability == doctest::Approx(1.0 / (S + 1)).epsilon(1e-12));
      for (int c = 0; c < 2; ++c) {
        std::map<int, int> bits{{L.e, 1}, {L.c, c}};
        for (std::size_t i = 0; i < L.s.size(); ++i) bits[L.s[i]] = int((L.copy_code(j) >> i) & 1);
        const double want = std::sqrt(1.0 / (S + 1)) / std::sqrt(2.0) * 0.01 / N;
        CHECK(std::abs(st[index_of(L, bits)] - cplx(want)) < 1e-15);
      }
    }
    if (S == 1) {
      // Single step: gammabar_i / (2N) on e=1 and gamma_i / 2 (normalised) on e=0.
      CHECK(std::abs(st[index_of(L, {{L.e, 1}})].real() - 0.01 / (2 * N)) < 1e-15);
      for (int v = 0; v < N * N; ++v) {
        std::map<int, int> bits;
        for (int i = 0; i < L.n; ++i) {
          bits[L.x0[i]] = (v % N >> i) & 1;
          bits[L.x1[i]] = (v / N >> i) & 1;
        }
        CHECK(std::abs(st[index_of(L, bits)].real() - 0.5 / N) < 1e-14);
      }
    }
  }
}

TEST_CASE("ledger initial state carries consistently scaled copies") {
  Rng rng(21);
  for (int dims : {1, 2}) {
    const int N = 4, S = 3;
    auto spec = bench_spec(dims == 1 ? bench_1d() : bench_2d(), N);
    std::vector<double> gb = dims == 1 ? std::vector<double>{0.013} : std::vector<double>{0.01, -0.02};
    IterationPlan p;
    p.S = S;
    p.initial = random_field(rng, dims, N, gb);
    auto L = make_rve_layout(dims, N, S, false);
    const double K = 2.5;
    StrainLedger led;
    auto init = build_u_init(spec, gb, p, L, K, &led);
    StateVector st = new_state(L.layout);
    apply_block(st, *init);
    CHECK(std::abs(st.norm() - 1.0) < 1e-12);
    CHECK(led.valid);
    auto f = readout_strain(st, L, led, 0);
    CHECK(max_abs_diff(f, *p.initial) < 1e-14);
    const double rootN = std::pow(N, dims / 2.0);
    for (int j = 0; j < S; ++j)
      for (int c = 0; c < dims; ++c) {
        auto amp = st[copy_zero_mode(L, j, c)];
        CHECK(std::abs(amp.real() - led.amplitude_factor(j + 1) * rootN * gb[c]) < 1e-14);
      }
  }
}

TEST_CASE("initialisation edge cases") {
  auto spec = bench_spec(bench_1d(), 8);
  IterationPlan p;
  p.S = 2;
  auto L = make_rve_layout(1, 8, 2, false);
  CHECK_THROWS_AS(build_u_init(spec, {9.0}, p, L, 1.0), EncodingError);
  CHECK_THROWS_AS(build_u_init(spec, {0.0}, p, L, 1.0), EncodingError);
  CHECK_THROWS_AS(build_u_init(spec, {0.01, 0.01}, p, L, 1.0), ConfigError);
  // Zero load with a nonzero initial field: copies carry nothing on d = 0.
  p.initial = uniform_field(1, 8, {0.02});
  StateVector st = new_state(L.layout);
  apply_block(st, *build_u_init(spec, {0.0}, p, L, 1.0));
  for (int j = 0; j < 2; ++j) CHECK(std::abs(st[copy_zero_mode(L, j, 0)]) < 1e-15);
}

TEST_CASE("Gray-code exchange on three qubits") {
  // Written q0 q1 q2: 000 -> 100 -> 101 -> 111 flips q0, then q2, then q1.
  auto path = gray_path(0b000, 0b111, 3, {0, 2, 1});
  REQUIRE(path.size() == 4);
  CHECK(path[1] == 0b001);
  CHECK(path[2] == 0b101);
  CHECK(path[3] == 0b111);
  auto ex = build_u_exch({0, 1, 2}, 0b000, 0b111, {0, 2, 1});
  CHECK(mcx_count(*ex) == 5);
  CHECK(gate_count(*ex) == 5);
  StateVector st(3);
  st.amplitudes()[0] = 0.6;
  st.amplitudes()[7] = 0.8;
  apply_block(st, *ex);
  CHECK(std::abs(st[0] - cplx(0.8)) < 1e-15);
  CHECK(std::abs(st[7] - cplx(0.6)) < 1e-15);
  CHECK_THROWS_AS(build_u_exch({0, 1, 2}, 5, 5), ValidationError);
  CHECK_THROWS_AS(gray_path(0, 3, 3, {0}), ValidationError);
}

TEST_CASE("exchange is a transposition") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int nq = 2 + int(rng.below(4));
    const std::uint64_t dim = std::uint64_t{1} << nq;
    const std::uint64_t a = rng.below(int(dim));
    std::uint64_t b = rng.below(int(dim));
    if (a == b) b = (a + 1) % dim;
    std::vector<int> q(nq);
    for (int i = 0; i < nq; ++i) q[i] = i;
    auto ex = build_u_exch(q, a, b);
    CHECK(gate_count(*ex) == std::size_t(2 * std::popcount(a ^ b) - 1));
    auto m = qhomog::test::block_matrix(*ex, nq);
    int moved = 0;
    for (std::uint64_t col = 0; col < dim; ++col) {
      const std::uint64_t want = col == a ? b : col == b ? a : col;
      for (std::uint64_t row = 0; row < dim; ++row)
        CHECK(std::abs(m[col][row] - cplx(row == want ? 1.0 : 0.0)) < 1e-12);
      if (want != col) ++moved;
    }
    CHECK(moved == 2);
    auto s0 = qhomog::test::random_state(nq, rng);
    StateVector s = s0;
    apply_block(s, *ex);
    apply_block(s, *ex);
    CHECK(qhomog::test::max_diff(s.amplitudes(), s0.amplitudes()) < 1e-12);
  }
}

TEST_CASE("one step equals the classical oracle (lookup encoding)") {
  Rng rng(2026);
  int trials = 0;
  for (int dims : {1, 2})
    for (int N : {4, 8, 16})
      for (int rep = 0; rep < 4; ++rep) {
        RveSpec spec;
        spec.dims = dims;
        spec.N = N;
        for (std::size_t v = 0; v < spec.points(); ++v) spec.mu.push_back(rng.uniform(0.3, 3.0));
        spec.mu0 = rep % 2 ? suggest_mu0(spec.mu) : rng.uniform(0.5, 2.0);
        std::vector<double> gb;
        for (int i = 0; i < dims; ++i) gb.push_back(rng.uniform(-0.05, 0.05));
        IterationPlan p;
        p.S = 1;
        p.initial = random_field(rng, dims, N, gb);
        auto rc = build_rve_circuit(spec, gb, p, lookup_options());
        auto st = run_rve(rc);
        auto got = readout_strain(st, rc.layout, rc.ledger, 1);
        auto want = fixed_point_step(spec, *p.initial, gb);
        CHECK(max_abs_diff(got, want) <= 1e-9);
        ++trials;
      }
  CHECK(trials >= 20);
}

TEST_CASE("homogeneous modulus leaves the physical branch invariant") {
  for (int dims : {1, 2}) {
    RveSpec spec;
    spec.dims = dims;
    spec.N = 4;
    spec.mu0 = 1.7;
    spec.mu.assign(spec.points(), 1.7);
    std::vector<double> gb = dims == 1 ? std::vector<double>{0.01} : std::vector<double>{0.01, 0.004};
    IterationPlan p;
    p.S = 2;
    auto rc = build_rve_circuit(spec, gb, p, lookup_options());
    run_rve(rc, [&](int t, const StateVector& st) {
      auto f = readout_strain(st, rc.layout, rc.ledger, t);
      CHECK(max_abs_diff(f, uniform_field(dims, 4, gb)) < 1e-10);
    });
  }
}

TEST_CASE("three steps equal three oracle steps") {
  auto b = bench_1d();
  auto spec = bench_spec(b, 16);
  IterationPlan p;
  p.S = 3;
  auto rc = build_rve_circuit(spec, b.gammabar, p, lookup_options());
  CHECK(rc.layout.layout.num_qubits() == 14);
  StateVector st = new_state(rc.layout.layout);
  apply_block(st, *rc.u_init);
  apply_block(st, *rc.u_iter);
  auto ref = fft_fixed_point(spec, b.gammabar, 3);
  CHECK(max_abs_diff(readout_strain(st, rc.layout, rc.ledger, 3), ref[3]) <= 3e-9);
}

TEST_CASE("fresh and recycled ancillas give identical physical amplitudes") {
  Rng rng(77);
  for (int dims : {1, 2}) {
    const int N = 4, S = dims == 1 ? 3 : 2;
    auto spec = bench_spec(dims == 1 ? bench_1d() : bench_2d(), N);
    std::vector<double> gb = dims == 1 ? std::vector<double>{0.01} : std::vector<double>{0.01, -0.003};
    IterationPlan p;
    p.S = S;
    p.initial = random_field(rng, dims, N, gb);
    auto fresh = build_rve_circuit(spec, gb, p, lookup_options());
    p.ancillas = AncillaMode::Recycled;
    auto rec = build_rve_circuit(spec, gb, p, lookup_options());
    CHECK(rec.layout.layout.num_qubits() < fresh.layout.layout.num_qubits());
    std::vector<std::vector<cplx>> a, b2;
    std::vector<int> fq = fresh.layout.x0, rq = rec.layout.x0;
    fq.insert(fq.end(), fresh.layout.x1.begin(), fresh.layout.x1.end());
    rq.insert(rq.end(), rec.layout.x1.begin(), rec.layout.x1.end());
    if (dims == 2) {
      fq.push_back(fresh.layout.c);
      rq.push_back(rec.layout.c);
    }
    run_rve(fresh, [&](int t, const StateVector& st) {
      a.push_back(read_slice(st, physical_projector(fresh.layout, t), fq));
    });
    run_rve(rec, [&](int t, const StateVector& st) {
      b2.push_back(read_slice(st, physical_projector(rec.layout, t), rq));
    });
    REQUIRE(a.size() == b2.size());
    for (std::size_t t = 0; t < a.size(); ++t) CHECK(qhomog::test::max_diff(a[t], b2[t]) < 1e-14);
  }
}

TEST_CASE("a single step is U_IRVE plus bookkeeping") {
  auto spec = bench_spec(bench_1d(), 8);
  IterationPlan p;
  p.S = 1;
  auto rc = build_rve_circuit(spec, {0.01}, p, lookup_options());
  auto irve = build_u_irve(rc.layout, rc.enc, 0);
  StateVector a = new_state(rc.layout.layout), b = a;
  apply_block(a, *rc.u_init);
  b = a;
  apply_block(a, *rc.u_iter);
  apply_block(b, *irve);
  CHECK(qhomog::test::max_diff(a.amplitudes(), b.amplitudes()) == 0.0);
}

TEST_CASE("exchange length grows with the step index") {
  auto spec = bench_spec(bench_2d(), 4);
  IterationPlan p;
  p.S = 3;
  auto rc = build_rve_circuit(spec, {0.01, 0.01}, p, lookup_options());
  for (int s = 0; s < 3; ++s) {
    const int h = std::popcount(physical_zero_mode(rc.layout, s, 0) ^ copy_zero_mode(rc.layout, s, 0));
    CHECK(h == 3 + 3 * s);  // e, p0, p1, the used bundles and the copy code
    auto irve = build_u_irve(rc.layout, rc.enc, s);
    int n = 0;
    for (const auto& item : irve->items())
      if (item.block && item.block->name() == "s4_exchange") n = mcx_count(*item.block);
    CHECK(n == 2 * (2 * h - 1));
  }
}

TEST_CASE("readout divides by the ledger") {
  auto L = make_rve_layout(1, 4, 1, false);
  StrainLedger led;
  led.w_init = 0.5;
  led.norm0 = 4.0;  // A0 = 1 / (2N)
  StateVector st = new_state(L.layout);
  st.amplitudes()[0] = 0.0;
  for (std::uint64_t k = 0; k < 4; ++k) st.amplitudes()[k] = 0.01 / 8.0;
  auto f = readout_strain(st, L, led, 0);
  for (double v : f.components[0]) CHECK(v == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(f.ledger.size() == 2);
  CHECK_THROWS_AS(readout_strain(new_state(L.layout), L, led, 1), EmptyBranchError);
  led.valid = false;
  CHECK_THROWS_AS(readout_strain(st, L, led, 0), ConfigError);
}

TEST_CASE("polynomial encoding converges over the last iterations") {
  auto b = bench_1d();
  auto spec = bench_spec(b, 64);
  IterationPlan p;
  p.S = 5;
  p.ancillas = AncillaMode::Recycled;
  auto rc = build_rve_circuit(spec, b.gammabar, p);
  auto exact = analytic_field(b, 64);
  std::vector<double> err;
  run_rve(rc, [&](int t, const StateVector& st) {
    err.push_back(relative_l2(readout_strain(st, rc.layout, rc.ledger, t), exact));
  });
  CHECK(err[4] < err[3]);
  CHECK(err[5] < err[4]);
  CHECK(err[3] < err[2]);
}

TEST_CASE("gate counts are deterministic and attributed per block") {
  auto spec = bench_spec(bench_1d(), 16);
  IterationPlan p;
  p.S = 3;
  auto rc = build_rve_circuit(spec, {0.01}, p);
  LoweringOptions lo;
  lo.num_qubits = rc.layout.layout.num_qubits() + 1;
  lo.work_qubit = rc.layout.layout.num_qubits();
  auto r1 = count(*rc.u_iter, lo);
  auto r2 = count(*rc.u_iter, lo);
  CHECK(r1.counts == r2.counts);
  CHECK(r1.counts.total == r1.counts.cnot + r1.counts.u3);
  std::uint64_t sum = 0;
  for (int s = 0; s < 3; ++s) sum += r1.per_block.at("u_iter/step" + std::to_string(s)).total;
  CHECK(sum == r1.counts.total);
  CHECK(r1.per_block.count("u_iter/step2/u_irve/s4_exchange/exch_c0") == 1);
  CHECK(r1.per_block.count("u_iter/step0/anci_swap") == 1);
  // Golden values from the verified build; any change to the lowering or the
  // block structure shows up here.
  CHECK(r1.counts.cnot == 16554);
  CHECK(r1.counts.u3 == 25550);
}

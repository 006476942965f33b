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

#include "doctest.h"
#include "qhomog/circuit.hpp"
#include "qhomog/errors.hpp"
#include "qhomog/transpile.hpp"
#include "test_support.hpp"

using namespace qhomog;
using qhomog::test::Rng;

namespace {

LoweringOptions opts(int nq) {
  LoweringOptions o;
  o.num_qubits = nq;
  return o;
}

Gate random_gate(int nq, Rng& rng, int max_controls) {
  int t = rng.below(nq);
  Gate g;
  switch (rng.below(9)) {
    case 0: g = gates::h(t); break;
    case 1: g = gates::x(t); break;
    case 2: g = gates::z(t); break;
    case 3: g = gates::ry(t, rng.uniform(-4, 4)); break;
    case 4: g = gates::u3(t, rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)); break;
    case 5: g = gates::phase(t, rng.uniform(-4, 4)); break;
    case 6: {
      double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3), c = rng.uniform(-3, 3);
      g = gates::unitary(t, gates::u3(0, a, b, c).matrix());
      for (auto& e : g.u) e *= std::polar(1.0, 0.37);
      break;
    }
    case 7: g = gates::x(t); break;
    default: g = gates::swap(t, (t + 1 + rng.below(nq - 1)) % nq);
  }
  int nc = rng.below(max_controls + 1);
  for (int i = 0; i < nc; ++i) {
    int c = rng.below(nq);
    bool used = false;
    for (int q : g.targets) used |= q == c;
    for (auto& k : g.controls) used |= k.qubit == c;
    if (!used) g.controls.push_back({c, rng.below(3) != 0});
  }
  return g;
}

}  // namespace

TEST_CASE("single H lowers to one U3") {
  CircuitBlock b("h");
  b.add(gates::h(0));
  auto r = count(b, opts(1));
  CHECK(r.counts.u3 == 1);
  CHECK(r.counts.cnot == 0);
  CHECK(r.counts.total == 1);
  auto lc = lower(b, opts(1));
  CHECK(test::max_diff(test::lowered_matrix(lc, 1), test::block_matrix(b, 1)) < 1e-12);
}

TEST_CASE("SWAP lowers to three CNOTs") {
  CircuitBlock b("swap");
  b.add(gates::swap(0, 1));
  auto lc = lower(b, opts(2));
  REQUIRE(lc.gates.size() == 3);
  for (auto& g : lc.gates) CHECK(g.kind == LoweredGate::CNOT);
  CHECK(test::max_diff(test::lowered_matrix(lc, 2), test::block_matrix(b, 2)) < 1e-12);
}

TEST_CASE("Toffoli lowers to six CNOTs and matches the 8x8 matrix") {
  CircuitBlock b("ccx");
  b.add(gates::mcx({{0, true}, {1, true}}, 2));
  auto lc = lower(b, opts(3));
  int cx = 0, u = 0;
  for (auto& g : lc.gates) (g.kind == LoweredGate::CNOT ? cx : u)++;
  CHECK(cx == 6);
  CHECK(u == 9);
  // explicit Toffoli: permutation swapping |011> and |111> (qubits 0,1 set)
  test::Matrix tof(8, std::vector<cplx>(8, 0.0));
  for (int c = 0; c < 8; ++c) tof[c][(c & 3) == 3 ? c ^ 4 : c] = 1.0;
  CHECK(test::max_diff(test::lowered_matrix(lc, 3), tof) < 1e-12);
}

TEST_CASE("QFT construction count") {
  for (int n = 1; n <= 8; ++n) {
    std::vector<int> q;
    for (int i = 0; i < n; ++i) q.push_back(i);
    auto r = count(*qft_block(q, false), opts(n));
    CHECK(r.counts.cnot == std::uint64_t(n * (n - 1)));
    CHECK(r.counts.u3 == std::uint64_t(3 * n * (n - 1) / 2 + n));
    // by construction, same as streaming the lowered gates
    CHECK(lower(*qft_block(q, false), opts(n)).gates.size() == r.counts.total);
  }
}

TEST_CASE("empty block counts are zero") {
  CircuitBlock b("empty");
  auto r = count(b, opts(3));
  CHECK(r.counts == GateCounts{});
}

TEST_CASE("controlled RY uses two CNOTs and two U3") {
  CircuitBlock b("cry");
  Gate g = gates::ry(1, 0.7);
  g.controls = {{0, true}};
  b.add(g);
  auto r = count(b, opts(2));
  CHECK(r.counts.cnot == 2);
  CHECK(r.counts.u3 == 2);
  CHECK(test::max_diff(test::lowered_matrix(lower(b, opts(2)), 2), test::block_matrix(b, 2)) < 1e-12);
}

TEST_CASE("CPHASE lowers to 2 CNOT and 3 U3") {
  CircuitBlock b("cp");
  b.add(gates::cphase(0, 1, 0.9));
  auto r = count(b, opts(2));
  CHECK(r.counts.cnot == 2);
  CHECK(r.counts.u3 == 3);
}

TEST_CASE("multi-controlled X is exact for every control count") {
  for (int k = 1; k <= 8; ++k) {
    int nq = k + 2;
    std::vector<Control> c;
    for (int i = 0; i < k; ++i) c.push_back({i, i % 3 != 1});
    CircuitBlock b("mcx");
    b.add(gates::mcx(c, k));
    auto lc = lower(b, opts(nq));
    CHECK(test::max_diff(test::lowered_matrix(lc, nq), test::block_matrix(b, nq)) < 1e-9);
  }
  CircuitBlock full("full");
  full.add(gates::mcx({{0, true}, {1, true}, {2, true}}, 3));
  CHECK_THROWS_AS(lower(full, opts(4)), LoweringError);
}

TEST_CASE("semantic preservation on random blocks") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    int nq = 3 + rng.below(5);
    CircuitBlock b("rand");
    for (int i = 0; i < 12; ++i) b.add(random_gate(nq, rng, std::min(nq - 2, 5)));
    auto lc = lower(b, opts(nq));
    REQUIRE(test::max_diff(test::lowered_matrix(lc, nq), test::block_matrix(b, nq)) < 1e-9);
  }
  // a 10-qubit block with wide controls
  CircuitBlock big("big");
  for (int i = 0; i < 6; ++i) big.add(random_gate(10, rng, 7));
  auto lc = lower(big, opts(10));
  CHECK(test::max_diff(test::lowered_matrix(lc, 10), test::block_matrix(big, 10)) < 1e-9);
}

TEST_CASE("nested blocks with controls and adjoints lower exactly") {
  Rng rng(78);
  CircuitBlock inner("inner");
  for (int i = 0; i < 6; ++i) inner.add(random_gate(3, rng, 1));
  auto ip = share(std::move(inner));
  CircuitBlock outer("outer");
  outer.add(ip, {{3, true}});
  outer.add(ip, {{4, false}}, true);
  outer.add(multiplexed_ry({0, 1}, 2, {0.1, 0.2, -0.3, 1.4}), {{3, true}, {4, true}});
  auto lc = lower(outer, opts(6));
  CHECK(test::max_diff(test::lowered_matrix(lc, 6), test::block_matrix(outer, 6)) < 1e-9);
}

TEST_CASE("determinism and additivity") {
  Rng rng(79);
  CircuitBlock a("a"), b("b");
  for (int i = 0; i < 10; ++i) a.add(random_gate(6, rng, 4));
  for (int i = 0; i < 10; ++i) b.add(random_gate(6, rng, 4));
  auto l1 = lower(a, opts(6));
  auto l2 = lower(a, opts(6));
  REQUIRE(l1.gates.size() == l2.gates.size());
  for (std::size_t i = 0; i < l1.gates.size(); ++i) {
    CHECK(l1.gates[i].kind == l2.gates[i].kind);
    CHECK(l1.gates[i].target == l2.gates[i].target);
    CHECK(l1.gates[i].theta == l2.gates[i].theta);
  }
  auto ap = share(std::move(a));
  auto bp = share(std::move(b));
  CircuitBlock ab("ab");
  ab.add(ap);
  ab.add(bp);
  auto ca = count(*ap, opts(6)), cb = count(*bp, opts(6)), cab = count(ab, opts(6));
  CHECK(cab.counts.cnot == ca.counts.cnot + cb.counts.cnot);
  CHECK(cab.counts.u3 == ca.counts.u3 + cb.counts.u3);
  CHECK(cab.per_block.at("ab/a").total == ca.counts.total);
  CHECK(cab.per_block.at("ab/b").total == cb.counts.total);
  CHECK(cab.per_block.at("ab").total == cab.counts.total);
}

TEST_CASE("optional U3 merging keeps the unitary") {
  Rng rng(80);
  CircuitBlock b("m");
  for (int i = 0; i < 20; ++i) b.add(random_gate(4, rng, 2));
  LoweringOptions o = opts(4);
  o.merge_u3 = true;
  auto merged = lower(b, o);
  auto plain = lower(b, opts(4));
  CHECK(merged.gates.size() < plain.gates.size());
  CHECK(test::max_diff(test::lowered_matrix(merged, 4), test::block_matrix(b, 4)) < 1e-9);
  CHECK(count(b, o).counts.total == merged.gates.size());
}

TEST_CASE("scaling table and CSV") {
  auto rows = scaling_table({2, 3, 4}, [](long long n) {
    std::vector<int> q;
    for (int i = 0; i < n; ++i) q.push_back(i);
    LoweringOptions o;
    o.num_qubits = static_cast<int>(n);
    return std::make_pair(qft_block(q, false), o);
  });
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].report.counts.total < rows[1].report.counts.total);
  CHECK(rows[1].report.counts.total < rows[2].report.counts.total);
  std::string csv = counts_csv(rows);
  CHECK(csv.rfind("index,cnot,u3,total,depth\n2,2,5,7,", 0) == 0);
}

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
#include <sstream>

#include "doctest.h"
#include "qhomog/ensemble.hpp"
#include "qhomog/errors.hpp"
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

IterationPlan plan_of(int S, AncillaMode mode = AncillaMode::Fresh) {
  IterationPlan p;
  p.S = S;
  p.ancillas = mode;
  return p;
}

std::vector<double> random_load(Rng& rng, int dims) {
  std::vector<double> g;
  for (int i = 0; i < dims; ++i) g.push_back(rng.uniform(-0.03, 0.03));
  return g;
}

StateVector single_init(const RveSpec& spec, const std::vector<double>& gb, const IterationPlan& p,
                        const RveLayout& L, double K) {
  StateVector st = new_state(L.layout);
  apply_block(st, *build_u_init(spec, gb, p, L, K));
  return st;
}

}  // namespace

TEST_CASE("load sets pad to a power of two") {
  auto s = make_load_set(1, {{0.01}, {0.02}, {0.03}});
  CHECK(s.M == 4);
  CHECK(s.m_qubits() == 2);
  CHECK(s.real_cases() == 3);
  CHECK(s.padded[3]);
  CHECK(s.gammabars[3] == std::vector<double>{0.0});
  CHECK(make_load_set(2, {{0.0, 0.1}}).m_qubits() == 1);
  CHECK_THROWS_AS(make_load_set(1, {}), ConfigError);
  CHECK_THROWS_AS(make_load_set(1, {{0.1, 0.2}}), ConfigError);
  LoadSet bad = s;
  bad.M = 3;
  CHECK_THROWS_AS(bad.validate(1), ConfigError);

  std::istringstream in("case_id,gamma0,gamma1\ngp0, 0.01, 0.02\n\ngp1,0.03,-0.01\n");
  auto r = read_load_csv(in, 2);
  CHECK(r.M == 2);
  CHECK(r.labels[1] == "gp1");
  CHECK(r.gammabars[1][1] == -0.01);
  std::istringstream bad_in("gp0,0.01\n");
  CHECK_THROWS_AS(read_load_csv(bad_in, 2), ConfigError);
  std::istringstream nan_in("gp0,abc\n");
  CHECK_THROWS_AS(read_load_csv(nan_in, 1), ConfigError);
}

TEST_CASE("parallel initialisation prepares every subspace") {
  auto spec = bench_spec(bench_1d(), 8);
  auto p = plan_of(2);
  SUBCASE("identical loads") {
    auto ec = build_ensemble_circuit(spec, make_load_set(1, {{0.01}, {0.01}}), p, lookup_options());
    StateVector st = new_state(ec.layout.rve.layout);
    apply_block(st, *ec.init);
    auto ref = single_init(spec, {0.01}, p, ec.layout.rve, ec.enc.K);
    for (int m = 0; m < 2; ++m)
      CHECK(qhomog::test::max_diff(subspace_state(st, ec.layout, m).amplitudes(),
                                   ref.amplitudes()) < 1e-12);
  }
  SUBCASE("distinct loads") {
    auto ec = build_ensemble_circuit(spec, make_load_set(1, {{0.01}, {-0.02}}), p, lookup_options());
    StateVector st = new_state(ec.layout.rve.layout);
    apply_block(st, *ec.init);
    CHECK(std::abs(st.norm() - 1.0) < 1e-12);
    auto ref = single_init(spec, {0.01}, p, ec.layout.rve, ec.enc.K);
    const auto& a = st.amplitudes();
    const std::size_t chunk = std::size_t{1} << ec.layout.rve.rve_qubits.size();
    for (std::size_t i = 0; i < chunk; ++i)
      CHECK(std::abs(a[i] - ref[i] / std::sqrt(2.0)) < 1e-12);
  }
  SUBCASE("padded cases carry no load") {
    auto ec = build_ensemble_circuit(spec, make_load_set(1, {{0.01}, {0.02}, {0.03}}), p,
                                     lookup_options());
    StateVector st = new_state(ec.layout.rve.layout);
    apply_block(st, *ec.init);
    Projector pad;
    pad.fix(ec.layout.m[0], 1).fix(ec.layout.m[1], 1);
    CHECK(project(st, pad).probability == doctest::Approx(0.25).epsilon(1e-12));
    pad.fix(ec.layout.rve.d, 0);
    CHECK(project(st, pad).probability < 1e-30);
  }
}

TEST_CASE("each subspace reproduces its single-RVE solve") {
  Rng rng(808);
  struct Cfg {
    int dims, N, S;
    AncillaMode mode;
  };
  for (Cfg cfg : {Cfg{1, 16, 3, AncillaMode::Fresh}, Cfg{1, 8, 2, AncillaMode::Recycled},
                  Cfg{2, 4, 2, AncillaMode::Recycled}, Cfg{2, 4, 1, AncillaMode::Fresh}})
    for (int M : {2, 4}) {
      auto spec = bench_spec(cfg.dims == 1 ? bench_1d() : bench_2d(), cfg.N);
      auto p = plan_of(cfg.S, cfg.mode);
      std::vector<std::vector<double>> loads;
      for (int j = 0; j < M; ++j) loads.push_back(random_load(rng, cfg.dims));
      auto ec = build_ensemble_circuit(spec, make_load_set(cfg.dims, loads), p, lookup_options());
      auto st = run_ensemble_solve(ec);
      for (int j = 0; j < M; ++j) {
        auto rc = build_rve_circuit(spec, loads[j], p, lookup_options());
        auto single = run_rve(rc);
        CHECK(qhomog::test::max_diff(subspace_state(st, ec.layout, j).amplitudes(),
                                     single.amplitudes()) <= 1e-9);
        auto f = readout_strain(subspace_state(st, ec.layout, j), ec.layout.rve, ec.ledgers[j], cfg.S);
        auto ref = fft_fixed_point(spec, loads[j], cfg.S);
        CHECK(max_abs_diff(f, ref.back()) <= 1e-9);
      }
    }
}

TEST_CASE("doubling one load doubles its field only") {
  auto spec = bench_spec(bench_1d(), 16);
  auto p = plan_of(3);
  auto ec = build_ensemble_circuit(spec, make_load_set(1, {{0.01}, {0.02}}), p, lookup_options());
  auto rep = run_ensemble(ec, {}, true);
  REQUIRE(rep.cases.size() == 2);
  const auto& f0 = rep.cases[0].strain->components[0];
  const auto& f1 = rep.cases[1].strain->components[0];
  for (std::size_t v = 0; v < f0.size(); ++v) CHECK(std::abs(f1[v] - 2.0 * f0[v]) <= 1e-9);
  CHECK(rep.cases[1].sigma[0] == doctest::Approx(2.0 * rep.cases[0].sigma[0]).epsilon(1e-9));

  auto ec2 = build_ensemble_circuit(spec, make_load_set(1, {{0.01}, {0.05}}), p, lookup_options());
  auto rep2 = run_ensemble(ec2);
  CHECK(std::abs(rep2.cases[0].sigma[0] - rep.cases[0].sigma[0]) < 1e-12);
  CHECK(rep2.cases[1].sigma[0] == doctest::Approx(5.0 * rep.cases[0].sigma[0]).epsilon(1e-9));
}

TEST_CASE("a single case is the single-RVE circuit with an idle qubit") {
  auto spec = bench_spec(bench_1d(), 8);
  auto p = plan_of(2);
  auto ec = build_ensemble_circuit(spec, make_load_set(1, {{0.01}}), p, lookup_options());
  CHECK(ec.layout.m.size() == 1);
  auto st = run_ensemble_solve(ec);
  auto single = run_rve(build_rve_circuit(spec, {0.01}, p, lookup_options()));
  CHECK(qhomog::test::max_diff(subspace_state(st, ec.layout, 0).amplitudes(),
                               single.amplitudes()) == 0.0);
  Projector idle;
  idle.fix(ec.layout.m[0], 1);
  CHECK(project(st, idle).probability == 0.0);
}

TEST_CASE("stress readout of a homogeneous cell") {
  for (int dims : {1, 2}) {
    RveSpec spec;
    spec.dims = dims;
    spec.N = 4;
    spec.mu0 = 1.0;
    spec.mu.assign(spec.points(), 1.0);
    std::vector<double> g = dims == 1 ? std::vector<double>{0.01} : std::vector<double>{0.01, 0.004};
    auto ec = build_ensemble_circuit(spec, make_load_set(dims, {g}), plan_of(2), lookup_options());
    auto rep = run_ensemble(ec);
    for (int c = 0; c < dims; ++c) CHECK(rep.cases[0].sigma[c] == doctest::Approx(g[c]).epsilon(1e-10));
  }
}

TEST_CASE("stress readout matches the oracle average") {
  Rng rng(5);
  for (int dims : {1, 2}) {
    const int N = dims == 1 ? 16 : 4;
    auto spec = bench_spec(dims == 1 ? bench_1d() : bench_2d(), N);
    auto p = plan_of(2, AncillaMode::Recycled);
    std::vector<std::vector<double>> loads{random_load(rng, dims), random_load(rng, dims)};
    auto ec = build_ensemble_circuit(spec, make_load_set(dims, loads), p, lookup_options());
    auto rep = run_ensemble(ec);
    for (int j = 0; j < 2; ++j) {
      auto want = homogenised_stress(spec, fft_fixed_point(spec, loads[j], 2).back());
      for (int c = 0; c < dims; ++c) CHECK(std::abs(rep.cases[j].sigma[c] - want[c]) < 1e-10);
    }
  }
}

TEST_CASE("benchmark stresses from a polynomial-encoded ensemble") {
  auto b = bench_1d();
  auto spec = bench_spec(b, 64);
  auto p = plan_of(5, AncillaMode::Recycled);
  auto ec = build_ensemble_circuit(spec, make_load_set(1, {{0.01}, {0.02}}), p);
  auto rep = run_ensemble(ec);
  CHECK(std::abs(rep.cases[0].sigma[0] - 0.0096) < 1e-6);
  CHECK(std::abs(rep.cases[1].sigma[0] - 0.0192) < 2e-6);
  CHECK(rep.cases[1].sigma[0] == doctest::Approx(2.0 * rep.cases[0].sigma[0]).epsilon(1e-9));
  // Recycling discards the unphysical branches, so only an upper bound holds.
  CHECK(rep.cases[0].mass > 0.0);
  CHECK(rep.cases[0].mass <= 0.5 + 1e-12);
}

TEST_CASE("probabilities agree with squared amplitudes") {
  auto spec = bench_spec(bench_2d(), 4);
  auto p = plan_of(2, AncillaMode::Recycled);
  Rng rng(12);
  std::vector<std::vector<double>> loads;
  for (int j = 0; j < 3; ++j) loads.push_back(random_load(rng, 2));
  auto ec = build_ensemble_circuit(spec, make_load_set(2, loads), p, lookup_options());
  auto rep = run_ensemble(ec);
  REQUIRE(rep.cases.size() == 3);
  for (int j = 0; j < 3; ++j) {
    // Single-RVE amplitude of the same quantity, divided by M.
    auto single = build_ensemble_circuit(spec, make_load_set(2, {loads[j]}), p, lookup_options());
    auto srep = run_ensemble(single);
    for (int c = 0; c < 2; ++c) {
      const double a = rep.cases[j].amplitude[c];
      CHECK(std::abs(rep.cases[j].probability[c] - a * a) <= 1e-12);
      CHECK(std::abs(rep.cases[j].probability[c] - srep.cases[0].probability[c] / 4.0) <= 1e-12);
      CHECK(std::abs(rep.cases[j].sigma[c] - srep.cases[0].sigma[c]) <= 1e-12);
    }
  }
}

TEST_CASE("sampled readout stays within binomial error") {
  auto spec = bench_spec(bench_1d(), 16);
  auto p = plan_of(2);
  auto ec = build_ensemble_circuit(spec, make_load_set(1, {{0.01}, {-0.03}}), p, lookup_options());
  StateVector st = run_ensemble_solve(ec);
  apply_block(st, *ec.readout);
  auto exact = extract_report(st, ec);
  ExtractOptions o;
  o.mode = ReadoutMode::Sampled;
  o.shots = 1000000;
  o.seed = 99;
  auto sampled = extract_report(st, ec, o);
  auto again = extract_report(st, ec, o);
  CHECK(sampled.shots == 1000000);
  for (int j = 0; j < 2; ++j) {
    const double pe = exact.cases[j].probability[0];
    const double se = std::sqrt(pe * (1 - pe) / 1e6);
    CHECK(std::abs(sampled.cases[j].probability[0] - pe) <= 3 * se);
    CHECK(sampled.cases[j].probability[0] == again.cases[j].probability[0]);
    CHECK(sampled.cases[j].sigma[0] >= 0.0);
    CHECK(sampled.cases[j].sigma[0] ==
          doctest::Approx(std::abs(exact.cases[j].sigma[0])).epsilon(3 * se / pe));
  }
  CHECK(exact.cases[1].sigma[0] < 0.0);
}

TEST_CASE("extra cases only add initialisation gates") {
  auto spec = bench_spec(bench_1d(), 16);
  auto p = plan_of(3);
  GateCountReport base;
  for (int M : {1, 2, 4, 8}) {
    std::vector<std::vector<double>> loads;
    for (int j = 0; j < M; ++j) loads.push_back({0.01 * (j + 1)});
    auto ec = build_ensemble_circuit(spec, make_load_set(1, loads), p);
    auto r = count(*ec.full, ec.layout.lowering());
    const auto& pb = r.per_block;
    CHECK(pb.at("ensemble").total == r.counts.total);
    CHECK(pb.at("ensemble/parallel_solve/parallel_init").total +
              pb.at("ensemble/parallel_solve/u_iter").total +
              pb.at("ensemble/stress_readout").total ==
          r.counts.total);
    if (M == 1) {
      base = r;
      continue;
    }
    CHECK(pb.at("ensemble/parallel_solve/u_iter") == base.per_block.at("ensemble/parallel_solve/u_iter"));
    CHECK(pb.at("ensemble/stress_readout") == base.per_block.at("ensemble/stress_readout"));
    CHECK(pb.at("ensemble/parallel_solve/parallel_init").total >
          base.per_block.at("ensemble/parallel_solve/parallel_init").total);
  }
}

TEST_CASE("report csv") {
  EnsembleReport r;
  CaseResult c;
  c.label = "gp0";
  c.sigma = {0.0096};
  c.probability = {0.25};
  r.cases.push_back(c);
  CHECK(report_csv(r) == "case_id,component,sigma,probability\ngp0,0,0.0095999999999999992,0.25\n");
}

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

// Command-line front end: run experiments, fit gate-count scaling and run
// the classical reference solver.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qhomog/errors.hpp"
#include "qhomog/harness.hpp"
#include "qhomog/oracle.hpp"

using namespace qhomog;

namespace {

int cmd_run(const std::string& preset, const std::string& config, std::string out_dir,
            const std::string& mode, long long seed) {
  ExperimentConfig cfg = preset.empty() ? load_config(config) : load_preset(preset);
  if (mode == "execute") cfg.mode = RunMode::Execute;
  if (mode == "count") cfg.mode = RunMode::Count;
  if (seed >= 0) cfg.seed = std::uint64_t(seed);
  if (out_dir.empty()) out_dir = "out/" + cfg.name;
  auto res = run_experiment(cfg, out_dir);
  for (const auto& r : res.solves) {
    std::printf("N=%d qubits=%d gates=%llu rel_l2(S)=%.6e sigma=", r.N, r.qubits,
                static_cast<unsigned long long>(r.counts.counts.total), r.rel_l2.back());
    for (std::size_t c = 0; c < r.sigma.size(); ++c) std::printf("%s%.10g", c ? "," : "", r.sigma[c]);
    std::printf("\n");
  }
  for (const auto& f : res.files) std::printf("wrote %s\n", f.string().c_str());
  return 0;
}

int cmd_fit(const std::string& csv, const std::string& model) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open " + csv);
  auto [x, y] = read_counts_csv(in);
  const ScalingFit f = model == "ensemble" ? fit_ensemble(x, y) : fit_polylog(x, y);
  if (f.model == "ensemble")
    std::printf("model count = a*M*log2(M)^c + b\na=%.6g b=%.6g c=%.4f r2=%.6f points=%zu\n", f.a, f.b, f.c,
                f.r2, f.points);
  else
    std::printf("model count = a*log2(N)^c\na=%.6g c=%.4f r2=%.6f points=%zu\n", f.a, f.c, f.r2, f.points);
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] == 2 * x[i - 1])
      std::printf("ratio count(%g)/count(%g) = %.4f\n", x[i], x[i - 1], y[i] / y[i - 1]);
  return 0;
}

int cmd_oracle(const std::string& bench_name, int N, int S, double mu0, const std::string& out_dir) {
  AnalyticBenchmark b;
  if (bench_name == "bench-1d")
    b = bench_1d();
  else if (bench_name == "bench-2d")
    b = bench_2d();
  else
    throw ConfigError("unknown benchmark " + bench_name + " (bench-1d or bench-2d)");
  RveSpec spec = bench_spec(b, N);
  if (mu0 > 0) spec.mu0 = mu0;
  const auto it = fft_fixed_point(spec, b.gammabar, S);
  const auto exact = analytic_field(b, N);
  std::string csv = "N,s,rel_l2\n";
  for (std::size_t s = 0; s < it.size(); ++s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%zu,%.17g\n", N, s, relative_l2(it[s], exact));
    csv += buf;
  }
  const auto sigma = homogenised_stress(spec, it.back());
  std::printf("%s N=%d S=%d mu0=%g rel_l2=%.6e sigma=", bench_name.c_str(), N, S, spec.mu0,
              relative_l2(it.back(), exact));
  for (std::size_t c = 0; c < sigma.size(); ++c) std::printf("%s%.10g", c ? "," : "", sigma[c]);
  std::printf("\n");
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "oracle_error.csv") << csv;
    std::ofstream(std::filesystem::path(out_dir) / "oracle_strain.csv")
        << strain_csv(it, {S}, 0.5);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qhomog: quantum FFT homogenisation on a statevector emulator"};
  app.require_subcommand(1);

  std::string preset, config, out_dir, mode;
  long long seed = -1;
  auto* run = app.add_subcommand("run", "run an experiment and write its CSV files");
  auto* src = run->add_option_group("source");
  src->add_option("--preset", preset, "bundled preset (exp-1d, exp-1d-ensemble, exp-2d)");
  src->add_option("--config", config, "INI experiment file")->check(CLI::ExistingFile);
  src->require_option(1);
  run->add_option("--out-dir", out_dir, "output directory (default out/<name>)");
  run->add_option("--mode", mode, "execute or count")->check(CLI::IsMember({"execute", "count"}));
  run->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);

  std::string csv, model = "polylog";
  auto* fit = app.add_subcommand("fit", "fit gate-count scaling from a counts CSV");
  fit->add_option("--csv", csv, "counts CSV (index,cnot,u3,total)")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", model, "polylog or ensemble")->check(CLI::IsMember({"polylog", "ensemble"}));

  std::string bench = "bench-1d", oracle_out;
  int N = 64, S = 20;
  double mu0 = 0.0;
  auto* oracle = app.add_subcommand("oracle", "classical FFT fixed-point solve of a benchmark");
  oracle->add_option("--bench", bench, "bench-1d or bench-2d");
  oracle->add_option("--N", N, "grid points per dimension")->check(CLI::PositiveNumber);
  oracle->add_option("--S", S, "iterations")->check(CLI::NonNegativeNumber);
  oracle->add_option("--mu0", mu0, "reference modulus (default: benchmark value)");
  oracle->add_option("--out-dir", oracle_out, "write oracle_error.csv and oracle_strain.csv here");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(preset, config, out_dir, mode, seed);
    if (*fit) return cmd_fit(csv, model);
    if (*oracle) return cmd_oracle(bench, N, S, mu0, oracle_out);
  } catch (const QubitBudgetError& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

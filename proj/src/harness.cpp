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

#include "qhomog/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qhomog/errors.hpp"

namespace qhomog {

namespace pt = boost::property_tree;

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<int> int_list(const std::string& s, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError(key + ": '" + tok + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

// Numeric value with the whole token consumed; ptree's defaulted getters
// silently fall back on bad input.
template <class T>
T number(const pt::ptree& t, const std::string& key, T fallback) {
  auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream ss(*v);
  T out{};
  ss >> out;
  if (ss.fail() || !(ss >> std::ws).eof()) throw ConfigError(key + ": '" + *v + "' is not a number");
  return out;
}

EncodingOptions read_encoding(const pt::ptree& t, const std::string& sec, EncodingOptions o) {
  const auto mode = lower(t.get<std::string>(sec + ".mode", o.mode == EncodingMode::Lookup ? "lookup" : "polynomial"));
  if (mode == "lookup")
    o.mode = EncodingMode::Lookup;
  else if (mode == "polynomial")
    o.mode = EncodingMode::Polynomial;
  else
    throw ConfigError(sec + ".mode: expected lookup or polynomial");
  if (auto c = t.get_optional<std::string>(sec + ".coords")) {
    const auto v = lower(*c);
    if (v == "raw")
      o.coords = CoordMode::Raw;
    else if (v == "relabelled")
      o.coords = CoordMode::Relabelled;
    else if (v == "extended")
      o.coords = CoordMode::Extended;
    else
      throw ConfigError(sec + ".coords: expected raw, relabelled or extended");
  }
  if (auto d = t.get_optional<std::string>(sec + ".degrees")) o.degrees = int_list(*d, sec + ".degrees");
  o.prune_tol = number<double>(t, sec + ".prune_tol", o.prune_tol);
  o.headroom = number<double>(t, sec + ".headroom", o.headroom);
  return o;
}

// Runs fn(i) for i < n on up to `threads` workers; results keep index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int threads, F fn) {
  std::vector<T> out(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  for (std::size_t start = 0; start < n; start += std::size_t(threads)) {
    std::vector<std::future<T>> fut;
    for (std::size_t i = start; i < std::min(n, start + std::size_t(threads)); ++i)
      fut.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t k = 0; k < fut.size(); ++k) out[start + k] = fut[k].get();
  }
  return out;
}

AnalyticBenchmark bench_for(int dims) { return dims == 1 ? bench_1d() : bench_2d(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& s,
                std::vector<std::filesystem::path>& files) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << s;
  files.push_back(p);
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

std::vector<double> double_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError(key + ": '" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

IterationPlan plan_for(const ExperimentConfig& cfg, AncillaMode mode) {
  IterationPlan p;
  p.S = cfg.S;
  p.ancillas = mode;
  return p;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dims != 1 && dims != 2) throw ConfigError("dims must be 1 or 2");
  if (S < 0) throw ConfigError("S must be at least 1 (or auto)");
  if (S == 0 && !(target_residual > 0.0)) throw ConfigError("S = auto needs a positive target_residual");
  if (!gammabar.empty() && int(gammabar.size()) != dims)
    throw ConfigError("gammabar needs one value per dimension");
  if (mu0 < 0.0) throw ConfigError("mu0 must be positive");
  if (max_qubits < 1) throw ConfigError("max_qubits must be positive");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  for (int N : execute_N)
    if (N < 2 || !std::has_single_bit(unsigned(N))) throw ConfigError("execute_N entries must be powers of two");
  for (int N : count_N)
    if (N < 2 || !std::has_single_bit(unsigned(N))) throw ConfigError("count_N entries must be powers of two");
  for (int s : report_steps)
    if (s < 0 || (S > 0 && s > S)) throw ConfigError("report_steps must lie in [0, S]");
  if (kind == ExperimentKind::Ensemble) {
    if (M.empty()) throw ConfigError("ensemble experiments need an M list");
    for (int m : M)
      if (m < 1) throw ConfigError("M entries must be positive");
    for (int m : execute_M)
      if (m < 1) throw ConfigError("execute_M entries must be positive");
  }
  if (slice_x1 < 0.0 || slice_x1 >= 1.0) throw ConfigError("slice_x1 must lie in [0, 1)");
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree t;
  try {
    pt::ini_parser::read_ini(in, t);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.name = t.get<std::string>("experiment.name", c.name);
    const auto kind = lower(t.get<std::string>("experiment.kind", "single"));
    if (kind == "single")
      c.kind = ExperimentKind::Single;
    else if (kind == "ensemble")
      c.kind = ExperimentKind::Ensemble;
    else
      throw ConfigError("experiment.kind: expected single or ensemble");
    c.dims = number<int>(t, "experiment.dims", c.dims);
    const auto mode = lower(t.get<std::string>("experiment.mode", "execute"));
    if (mode == "execute")
      c.mode = RunMode::Execute;
    else if (mode == "count")
      c.mode = RunMode::Count;
    else
      throw ConfigError("experiment.mode: expected execute or count");
    c.seed = number<std::uint64_t>(t, "experiment.seed", c.seed);
    c.threads = number<int>(t, "experiment.threads", c.threads);
    c.max_qubits = number<int>(t, "experiment.max_qubits", c.max_qubits);
    c.execute_N = int_list(t.get<std::string>("grid.execute_N", ""), "grid.execute_N");
    c.count_N = int_list(t.get<std::string>("grid.count_N", ""), "grid.count_N");
    if (lower(t.get<std::string>("iteration.S", "")) == "auto")
      c.S = 0;
    else
      c.S = number<int>(t, "iteration.S", c.S);
    c.target_residual = number<double>(t, "iteration.target_residual", c.target_residual);
    c.mu_csv = t.get<std::string>("material.mu_csv", "");
    c.mu0 = number<double>(t, "material.mu0", c.mu0);
    c.gammabar = double_list(t.get<std::string>("material.gammabar", ""), "material.gammabar");
    c.report_steps = int_list(t.get<std::string>("iteration.report_steps", ""), "iteration.report_steps");
    const auto anc = lower(t.get<std::string>("iteration.ancillas", "recycled"));
    if (anc == "recycled")
      c.ancillas = AncillaMode::Recycled;
    else if (anc == "fresh")
      c.ancillas = AncillaMode::Fresh;
    else
      throw ConfigError("iteration.ancillas: expected fresh or recycled");
    c.encoding.mu = read_encoding(t, "mu", c.encoding.mu);
    c.encoding.alpha = read_encoding(t, "alpha", c.encoding.alpha);
    c.M = int_list(t.get<std::string>("ensemble.M", ""), "ensemble.M");
    c.execute_M = int_list(t.get<std::string>("ensemble.execute_M", ""), "ensemble.execute_M");
    c.shots = number<std::uint64_t>(t, "ensemble.shots", c.shots);
    c.loads_csv = t.get<std::string>("ensemble.loads_csv", "");
    c.slice_x1 = number<double>(t, "output.slice_x1", c.slice_x1);
    const auto fits = lower(t.get<std::string>("output.fits", "false"));
    if (fits != "true" && fits != "false") throw ConfigError("output.fits: expected true or false");
    c.write_fits = fits == "true";
  } catch (const pt::ptree_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  auto c = parse_config(in);
  const auto base = file.parent_path();
  if (!c.mu_csv.empty() && c.mu_csv.is_relative()) c.mu_csv = base / c.mu_csv;
  if (!c.loads_csv.empty() && c.loads_csv.is_relative()) c.loads_csv = base / c.loads_csv;
  return c;
}

std::filesystem::path preset_dir() { return QHOMOG_PRESET_DIR; }

ExperimentConfig load_preset(const std::string& name) {
  const auto p = preset_dir() / (name + ".ini");
  if (!std::filesystem::exists(p)) throw ConfigError("unknown preset " + name);
  return load_config(p);
}

std::vector<std::vector<double>> ensemble_loads(const std::vector<double>& base, int M,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (int j = 0; j < M; ++j) {
    std::vector<double> g;
    for (double b : base) {
      const double u = double(rng() >> 11) * 0x1.0p-53;  // portable uniform [0, 1)
      g.push_back(b * (1.0 + double(j) / M + 0.1 * (u - 0.5)));
    }
    out.push_back(std::move(g));
  }
  return out;
}

RveOptions options_for(const ExperimentConfig& cfg) { return cfg.encoding; }

RveSpec read_mu_csv(std::istream& in, int dims) {
  std::map<std::pair<int, int>, double> vals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
    if (cols[0] == "k0") continue;
    const auto where = "mu csv line " + std::to_string(lineno);
    if (int(cols.size()) != dims + 1)
      throw ConfigError(where + ": expected " + std::to_string(dims + 1) + " columns");
    try {
      const int k0 = std::stoi(cols[0]);
      const int k1 = dims == 2 ? std::stoi(cols[1]) : 0;
      if (!vals.emplace(std::pair{k0, k1}, std::stod(cols[dims])).second)
        throw ConfigError(where + ": duplicate grid point");
    } catch (const std::logic_error&) {
      throw ConfigError(where + ": bad number");
    }
  }
  const std::size_t n = vals.size();
  const int N = dims == 1 ? int(n) : int(std::lround(std::sqrt(double(n))));
  if (N < 2 || !std::has_single_bit(unsigned(N)) || (dims == 2 && std::size_t(N) * N != n))
    throw ConfigError("mu csv must cover a power-of-two grid");
  RveSpec spec;
  spec.dims = dims;
  spec.N = N;
  spec.mu.assign(n, 0.0);
  for (const auto& [k, v] : vals) {
    if (k.first < 0 || k.first >= N || k.second < 0 || k.second >= N)
      throw ConfigError("mu csv index out of range");
    spec.mu[std::size_t(k.first) + std::size_t(N) * k.second] = v;
  }
  spec.mu0 = suggest_mu0(spec.mu);
  return spec;
}

RveSpec spec_for(const ExperimentConfig& cfg, int N) {
  RveSpec spec;
  if (cfg.mu_csv.empty()) {
    spec = bench_spec(bench_for(cfg.dims), N);
  } else {
    std::ifstream in(cfg.mu_csv);
    if (!in) throw ConfigError("cannot open " + cfg.mu_csv.string());
    spec = read_mu_csv(in, cfg.dims);
    if (spec.N != N)
      throw ConfigError(cfg.mu_csv.string() + " holds an N=" + std::to_string(spec.N) +
                        " grid, requested N=" + std::to_string(N));
  }
  if (cfg.mu0 > 0.0) spec.mu0 = cfg.mu0;
  spec.validate();
  return spec;
}

std::vector<double> load_for(const ExperimentConfig& cfg) {
  return cfg.gammabar.empty() ? bench_for(cfg.dims).gammabar : cfg.gammabar;
}

StrainField reference_for(const ExperimentConfig& cfg, const RveSpec& spec) {
  if (cfg.mu_csv.empty() && cfg.mu0 == 0.0 && cfg.gammabar.empty())
    return analytic_field(bench_for(cfg.dims), spec.N);
  const auto g = load_for(cfg);
  StrainField f = uniform_field(cfg.dims, spec.N, g);
  for (int s = 0; s < 10000; ++s) {
    StrainField next = fixed_point_step(spec, f, g);
    const double change = relative_l2(next, f);
    f = std::move(next);
    if (change < 1e-13) return f;
  }
  throw ConfigError("reference iteration did not converge; check mu0");
}

int choose_S(const ExperimentConfig& cfg, int N) {
  if (cfg.S > 0) return cfg.S;
  const auto spec = spec_for(cfg, N);
  const auto g = load_for(cfg);
  StrainField f = uniform_field(cfg.dims, N, g);
  for (int s = 1; s <= 200; ++s) {
    StrainField next = fixed_point_step(spec, f, g);
    if (relative_l2(next, f) <= cfg.target_residual) return s;
    f = std::move(next);
  }
  return 200;
}

ExperimentConfig resolved(const ExperimentConfig& cfg, int N) {
  ExperimentConfig c = cfg;
  c.S = choose_S(cfg, N);
  for (int s : c.report_steps)
    if (s > c.S) throw ConfigError("report step " + std::to_string(s) + " exceeds S=" + std::to_string(c.S));
  return c;
}

LoadSet loads_for(const ExperimentConfig& cfg, int M) {
  if (cfg.loads_csv.empty())
    return make_load_set(cfg.dims, ensemble_loads(load_for(cfg), M, cfg.seed));
  std::ifstream in(cfg.loads_csv);
  if (!in) throw ConfigError("cannot open " + cfg.loads_csv.string());
  return read_load_csv(in, cfg.dims);
}

std::string fit_csv(const PolyFit& fit) {
  std::string out = "i0,i1,coefficient\n";
  const int d0 = fit.degrees.empty() ? 0 : fit.degrees[0];
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i)
    out += std::to_string(i % std::size_t(d0 + 1)) + "," + std::to_string(i / std::size_t(d0 + 1)) + "," +
           fmt(fit.coefficients[i]) + "\n";
  return out;
}

int required_qubits(const ExperimentConfig& cfg_in, int N, int M) {
  const auto cfg = resolved(cfg_in, N);
  const auto o = options_for(cfg);
  const bool ext = (cfg.dims == 2 && o.alpha.coords == CoordMode::Extended) ||
                   o.mu.coords == CoordMode::Extended;
  int q = rve_qubit_count(cfg.dims, N, cfg.S, ext, cfg.ancillas);
  if (M > 0) q += std::max(1, int(std::bit_width(unsigned(M - 1)))) + 2;
  return q;
}

SolveReport solve_single(const ExperimentConfig& cfg_in, int N) {
  const auto cfg = resolved(cfg_in, N);
  const auto spec = spec_for(cfg, N);
  auto rc = build_rve_circuit(spec, load_for(cfg), plan_for(cfg, cfg.ancillas), options_for(cfg));
  SolveReport r;
  r.N = N;
  r.qubits = rc.layout.layout.num_qubits();
  if (!rc.enc.mu.fit.coefficients.empty()) r.fits.emplace_back("mu", rc.enc.mu.fit);
  if (!rc.enc.gamma.alpha1.fit.coefficients.empty()) r.fits.emplace_back("alpha1", rc.enc.gamma.alpha1.fit);
  if (!rc.enc.gamma.alpha2.fit.coefficients.empty()) r.fits.emplace_back("alpha2", rc.enc.gamma.alpha2.fit);
  const auto exact = reference_for(cfg, spec);
  run_rve(rc, [&](int t, const StateVector& st) {
    r.iterates.push_back(readout_strain(st, rc.layout, rc.ledger, t));
    r.rel_l2.push_back(relative_l2(r.iterates.back(), exact));
  });
  r.sigma = homogenised_stress(spec, r.iterates.back());
  r.ledger = rc.ledger.factors(cfg.S);
  r.counts = count_point(cfg, N);
  return r;
}

GateCountReport count_point(const ExperimentConfig& cfg_in, int N, int M) {
  const auto cfg = resolved(cfg_in, N);
  const auto spec = spec_for(cfg, N);
  const auto plan = plan_for(cfg, AncillaMode::Fresh);  // recycling is not a gate
  if (M > 0) {
    auto ec = build_ensemble_circuit(
        spec, make_load_set(cfg.dims, ensemble_loads(load_for(cfg), M, cfg.seed)), plan, options_for(cfg));
    return count(*ec.full, ec.layout.lowering());
  }
  auto rc = build_rve_circuit(spec, load_for(cfg), plan, options_for(cfg));
  CircuitBlock all("rve");
  all.add(rc.u_init).add(rc.u_iter);
  LoweringOptions lo;
  lo.num_qubits = rc.layout.layout.num_qubits() + 1;
  lo.work_qubit = rc.layout.layout.num_qubits();
  return count(all, lo);
}

std::string strain_csv(const std::vector<StrainField>& iterates, const std::vector<int>& steps,
                       double slice_x1) {
  if (iterates.empty()) return {};
  const int dims = iterates[0].dims, N = iterates[0].N;
  std::string out = dims == 1 ? "x,component,s,value\n" : "x,y,component,s,value\n";
  const int row = int(std::lround(slice_x1 * N)) % N;
  for (int s : steps) {
    const auto& f = iterates.at(s);
    for (int c = 0; c < dims; ++c)
      for (int k = 0; k < N; ++k) {
        const double v = dims == 1 ? f.components[c][k] : f.components[c][k + N * row];
        out += fmt(double(k) / N) + ",";
        if (dims == 2) out += fmt(double(row) / N) + ",";
        out += std::to_string(c) + "," + std::to_string(s) + "," + fmt(v) + "\n";
      }
  }
  return out;
}

std::string error_csv(const std::vector<SolveReport>& solves) {
  std::string out = "N,s,rel_l2\n";
  for (const auto& r : solves)
    for (std::size_t s = 0; s < r.rel_l2.size(); ++s)
      out += std::to_string(r.N) + "," + std::to_string(s) + "," + fmt(r.rel_l2[s]) + "\n";
  return out;
}

std::string count_rows_csv(const std::vector<std::pair<long long, GateCounts>>& rows) {
  std::string out = "index,cnot,u3,total\n";
  for (const auto& [i, c] : rows)
    out += std::to_string(i) + "," + std::to_string(c.cnot) + "," + std::to_string(c.u3) + "," +
           std::to_string(c.total) + "\n";
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const bool exec = cfg.mode == RunMode::Execute;
  std::vector<int> execute_Ms = cfg.execute_M;
  if (exec && cfg.kind == ExperimentKind::Ensemble && !cfg.loads_csv.empty())
    execute_Ms = {loads_for(cfg, 0).M};
  if (exec) {
    for (int N : cfg.execute_N) {
      std::vector<int> Ms{0};
      if (cfg.kind == ExperimentKind::Ensemble) Ms = execute_Ms;
      for (int M : Ms) {
        const int q = required_qubits(cfg, N, M);
        if (q > cfg.max_qubits)
          throw QubitBudgetError(q, cfg.max_qubits,
                                 "N=" + std::to_string(N) + (M ? " M=" + std::to_string(M) : ""));
      }
    }
  }
  std::filesystem::create_directories(out_dir);
  ExperimentResult res;
  const int threads = cfg.threads == 0 ? int(std::max(1u, std::thread::hardware_concurrency())) : cfg.threads;

  if (cfg.kind == ExperimentKind::Single) {
    if (exec) {
      std::string stress = "N,component,sigma\n";
      for (int N : cfg.execute_N) {
        res.solves.push_back(solve_single(cfg, N));
        const auto& r = res.solves.back();
        std::vector<int> steps = cfg.report_steps;
        if (steps.empty())
          for (std::size_t s = 0; s < r.iterates.size(); ++s) steps.push_back(int(s));
        const auto tag = "_N" + std::to_string(N) + ".csv";
        write_file(out_dir / ("strain" + tag), strain_csv(r.iterates, steps, cfg.slice_x1), res.files);
        std::vector<StrainField> ex{reference_for(cfg, spec_for(cfg, N))};
        write_file(out_dir / ("exact" + tag), strain_csv(ex, {0}, cfg.slice_x1), res.files);
        for (std::size_t c = 0; c < r.sigma.size(); ++c)
          stress += std::to_string(N) + "," + std::to_string(c) + "," + fmt(r.sigma[c]) + "\n";
        if (cfg.write_fits)
          for (const auto& [name, fit] : r.fits)
            write_file(out_dir / ("fit_" + name + tag), fit_csv(fit), res.files);
      }
      write_file(out_dir / "error.csv", error_csv(res.solves), res.files);
      write_file(out_dir / "stress.csv", stress, res.files);
    }
    auto counts = parallel_map<GateCounts>(cfg.count_N.size(), threads,
                                           [&](std::size_t i) { return count_point(cfg, cfg.count_N[i]).counts; });
    std::vector<std::pair<long long, GateCounts>> rows;
    for (std::size_t i = 0; i < counts.size(); ++i) rows.emplace_back(cfg.count_N[i], counts[i]);
    write_file(out_dir / "counts.csv", count_rows_csv(rows), res.files);
    return res;
  }

  for (int N : cfg.count_N) {
    auto counts = parallel_map<GateCounts>(cfg.M.size(), threads,
                                           [&](std::size_t i) { return count_point(cfg, N, cfg.M[i]).counts; });
    std::vector<std::pair<long long, GateCounts>> rows;
    for (std::size_t i = 0; i < counts.size(); ++i) rows.emplace_back(cfg.M[i], counts[i]);
    write_file(out_dir / ("counts_N" + std::to_string(N) + ".csv"), count_rows_csv(rows), res.files);
  }
  if (exec)
    for (int N : cfg.execute_N)
      for (int M : execute_Ms) {
        const auto rc = resolved(cfg, N);
        auto ec = build_ensemble_circuit(spec_for(rc, N), loads_for(rc, M), plan_for(rc, rc.ancillas),
                                         options_for(rc));
        StateVector st = run_ensemble_solve(ec);
        apply_block(st, *ec.readout);
        const auto tag = "_N" + std::to_string(N) + "_M" + std::to_string(M) + ".csv";
        write_file(out_dir / ("stress" + tag), report_csv(extract_report(st, ec)), res.files);
        if (cfg.shots > 0) {
          ExtractOptions o;
          o.mode = ReadoutMode::Sampled;
          o.shots = cfg.shots;
          o.seed = cfg.seed;
          write_file(out_dir / ("sampled" + tag), report_csv(extract_report(st, ec, o)), res.files);
        }
      }
  return res;
}

// ---------------------------------------------------------------------------
// Scaling fits

namespace {

// For fixed c the model is linear in its amplitude (and offset); scan c and
// refine by golden section.
template <class Basis>
ScalingFit fit_scan(const std::vector<double>& x, const std::vector<double>& y, bool offset,
                    Basis basis) {
  if (x.size() != y.size()) throw FitError("fit: column lengths differ");
  if (x.size() < 4) throw FitError("fit needs at least 4 points, got " + std::to_string(x.size()));
  auto solve = [&](double c, ScalingFit& f) {
    double sff = 0, sf = 0, sfy = 0, sy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = basis(x[i], c);
      sff += g * g;
      sf += g;
      sfy += g * y[i];
      sy += y[i];
    }
    if (offset) {
      const double det = sff * n - sf * sf;
      f.a = det != 0 ? (sfy * n - sf * sy) / det : 0.0;
      f.b = det != 0 ? (sff * sy - sf * sfy) / det : sy / n;
    } else {
      f.a = sff != 0 ? sfy / sff : 0.0;
      f.b = 0.0;
    }
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.a * basis(x[i], c) - f.b;
      ssr += r * r;
    }
    return ssr;
  };
  ScalingFit best;
  double best_ssr = INFINITY, best_c = 0;
  for (int k = 0; k <= 1000; ++k) {
    const double c = 0.01 * k;
    ScalingFit f;
    const double s = solve(c, f);
    if (s < best_ssr) {
      best_ssr = s;
      best_c = c;
    }
  }
  double lo = std::max(0.0, best_c - 0.01), hi = best_c + 0.01;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 100; ++it) {
    const double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    ScalingFit f1, f2;
    if (solve(c1, f1) < solve(c2, f2))
      hi = c2;
    else
      lo = c1;
  }
  best.c = 0.5 * (lo + hi);
  const double ssr = solve(best.c, best);
  double mean = 0, sst = 0;
  for (double v : y) mean += v;
  mean /= double(y.size());
  for (double v : y) sst += (v - mean) * (v - mean);
  best.r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
  best.points = x.size();
  return best;
}

}  // namespace

ScalingFit fit_polylog(const std::vector<double>& x, const std::vector<double>& count) {
  for (double v : x)
    if (v < 2) throw FitError("polylog fit needs x >= 2");
  auto f = fit_scan(x, count, false, [](double v, double c) { return std::pow(std::log2(v), c); });
  f.model = "polylog";
  return f;
}

ScalingFit fit_ensemble(const std::vector<double>& M, const std::vector<double>& count) {
  for (double v : M)
    if (v < 1) throw FitError("ensemble fit needs M >= 1");
  auto f = fit_scan(M, count, true, [](double m, double c) {
    const double l = std::log2(m);
    return l > 0 ? m * std::pow(l, c) : 0.0;
  });
  f.model = "ensemble";
  return f;
}

std::pair<std::vector<double>, std::vector<double>> read_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FitError("empty counts csv");
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) head.push_back(c);
  }
  const auto col = [&](const std::string& name) {
    auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end()) throw FitError("counts csv lacks column " + name);
    return std::size_t(it - head.begin());
  };
  const std::size_t ci = col("index"), ct = col("total");
  std::vector<double> x, y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() <= std::max(ci, ct)) throw FitError("short row in counts csv");
    try {
      x.push_back(std::stod(cells[ci]));
      y.push_back(std::stod(cells[ct]));
    } catch (const std::exception&) {
      throw FitError("bad number in counts csv");
    }
  }
  return {x, y};
}

}  // namespace qhomog

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

#include "qhomog/ensemble.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <random>
#include <sstream>

#include "qhomog/errors.hpp"

namespace qhomog {

namespace {

std::vector<Control> value_controls(const std::vector<int>& qubits, std::uint64_t v) {
  std::vector<Control> c;
  for (std::size_t i = 0; i < qubits.size(); ++i) c.push_back({qubits[i], bool((v >> i) & 1)});
  return c;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// Qubit values fixing the flagged zero-mode amplitude of case m, component c.
Projector flagged(const EnsembleLayout& L, int m, int c) {
  Projector p = physical_projector(L.rve, L.rve.S);
  for (int q : L.rve.x0) p.fix(q, 0);
  for (int q : L.rve.x1) p.fix(q, 0);
  if (L.rve.dims == 2) p.fix(L.rve.c, c);
  p.fix(L.psig, 1).fix(L.flag, 1);
  for (std::size_t i = 0; i < L.m.size(); ++i) p.fix(L.m[i], (m >> i) & 1);
  return p;
}

}  // namespace

int LoadSet::m_qubits() const { return std::max(1, std::countr_zero(unsigned(M))); }

int LoadSet::real_cases() const {
  int n = 0;
  for (char p : padded) n += !p;
  return n;
}

void LoadSet::validate(int dims) const {
  if (M < 1 || !std::has_single_bit(unsigned(M)))
    throw ConfigError("number of load cases must be a power of two after padding");
  if (int(gammabars.size()) != M || int(labels.size()) != M || int(padded.size()) != M)
    throw ConfigError("load set arrays do not match M");
  for (const auto& g : gammabars)
    if (int(g.size()) != dims) throw ConfigError("load has the wrong number of components");
  if (real_cases() == 0) throw ConfigError("load set has no real cases");
}

LoadSet make_load_set(int dims, const std::vector<std::vector<double>>& gammabars,
                      std::vector<std::string> labels) {
  if (gammabars.empty()) throw ConfigError("empty load set");
  if (!labels.empty() && labels.size() != gammabars.size())
    throw ConfigError("one label per load expected");
  LoadSet s;
  s.M = int(std::bit_ceil(gammabars.size()));
  for (std::size_t i = 0; i < std::size_t(s.M); ++i) {
    const bool real = i < gammabars.size();
    s.gammabars.push_back(real ? gammabars[i] : std::vector<double>(dims, 0.0));
    if (real && !labels.empty())
      s.labels.push_back(labels[i]);
    else
      s.labels.push_back((real ? "case" : "pad") + std::to_string(i));
    s.padded.push_back(!real);
  }
  s.validate(dims);
  return s;
}

LoadSet read_load_csv(std::istream& in, int dims) {
  std::vector<std::vector<double>> g;
  std::vector<std::string> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
    if (cols[0] == "case_id") continue;
    if (int(cols.size()) != dims + 1)
      throw ConfigError("load csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(dims + 1) + " columns");
    labels.push_back(cols[0]);
    std::vector<double> v;
    try {
      for (int i = 0; i < dims; ++i) v.push_back(std::stod(cols[i + 1]));
    } catch (const std::exception&) {
      throw ConfigError("load csv line " + std::to_string(lineno) + ": bad number");
    }
    g.push_back(v);
  }
  return make_load_set(dims, g, labels);
}

LoweringOptions EnsembleLayout::lowering() const {
  LoweringOptions o;
  o.num_qubits = num_qubits() + 1;
  o.work_qubit = num_qubits();
  return o;
}

EnsembleLayout make_ensemble_layout(const RveLayout& rve, int M) {
  if (M < 1 || !std::has_single_bit(unsigned(M))) throw ConfigError("M must be a power of two");
  EnsembleLayout L;
  L.rve = rve;
  L.M = M;
  L.m = L.rve.layout.qubits(L.rve.layout.add("m", std::max(1, std::countr_zero(unsigned(M)))).name);
  L.psig = L.rve.layout.add("psig", 1).offset;
  L.flag = L.rve.layout.add("flag", 1).offset;
  return L;
}

BlockPtr build_parallel_init(const LoadSet& loads, const RveSpec& spec,
                             const IterationPlan& plan, const EnsembleLayout& L,
                             double K, std::vector<StrainLedger>* ledgers) {
  loads.validate(spec.dims);
  if (plan.initial) throw ConfigError("ensemble runs start from the uniform field of each load");
  if (int(L.m.size()) != loads.m_qubits()) throw ConfigError("m register does not match M");
  CircuitBlock init("parallel_init");
  if (loads.M > 1)
    for (int q : L.m) init.add(gates::h(q));
  if (ledgers) ledgers->assign(loads.M, StrainLedger{});
  for (int j = 0; j < loads.M; ++j) {
    const auto ctrl = loads.M > 1 ? value_controls(L.m, j) : std::vector<Control>{};
    CircuitBlock w("case" + std::to_string(j));
    if (loads.padded[j]) {
      w.add(gates::x(L.rve.e)).add(gates::x(L.rve.d));
    } else {
      StrainLedger led;
      w.add(build_u_init(spec, loads.gammabars[j], plan, L.rve, K, &led));
      if (ledgers) (*ledgers)[j] = led;
    }
    init.add(share(std::move(w)), ctrl);
  }
  return share(std::move(init));
}

BlockPtr build_parallel_solve(const BlockPtr& init, const BlockPtr& u_iter) {
  CircuitBlock b("parallel_solve");
  b.add(init).add(u_iter);
  return share(std::move(b));
}

BlockPtr build_stress_readout(const RveSpec& spec, const EnsembleLayout& L,
                              const EncodingOptions& mu_opts, Encoding* sigma) {
  const RveLayout& R = L.rve;
  GridFunction f{spec.dims, spec.N, spec.mu, {}};
  std::vector<std::vector<int>> idx{R.x0};
  if (R.dims == 2) idx.push_back(R.x1);
  if (mu_opts.coords == CoordMode::Extended && R.ext.empty())
    throw ConfigError("extended coordinates need ext qubits");
  Encoding enc = encode_grid_function(f, idx, R.ext, L.psig, mu_opts, "u_poly_sigma");
  CircuitBlock b("stress_readout");
  b.add(enc.block);
  b.add(qft_block(R.x0, false, "qft_x0"));
  if (R.dims == 2) b.add(qft_block(R.x1, false, "qft_x1"));
  std::vector<Control> ctrl;
  for (const auto& [q, v] : physical_projector(R, R.S).constraints) ctrl.push_back({q, v != 0});
  for (int q : R.x0) ctrl.push_back({q, false});
  for (int q : R.x1) ctrl.push_back({q, false});
  ctrl.push_back({L.psig, true});
  CircuitBlock fl("zero_mode_flag");
  fl.add(gates::mcx(ctrl, L.flag));
  b.add(share(std::move(fl)));
  if (sigma) *sigma = std::move(enc);
  return share(std::move(b));
}

EnsembleCircuit build_ensemble_circuit(const RveSpec& spec, const LoadSet& loads,
                                       const IterationPlan& plan, const RveOptions& opts) {
  spec.validate();
  plan.validate();
  loads.validate(spec.dims);
  EnsembleCircuit ec;
  ec.spec = spec;
  ec.loads = loads;
  ec.plan = plan;
  const bool extended = (spec.dims == 2 && opts.alpha.coords == CoordMode::Extended) ||
                        opts.mu.coords == CoordMode::Extended;
  auto rve = make_rve_layout(spec.dims, spec.N, plan.S, extended, plan.ancillas);
  ec.enc = build_rve_encodings(spec, rve, opts);
  ec.layout = make_ensemble_layout(rve, loads.M);
  ec.init = build_parallel_init(loads, spec, plan, ec.layout, ec.enc.K, &ec.ledgers);
  CircuitBlock it("u_iter");
  for (int s = 0; s < plan.S; ++s) {
    ec.steps.push_back(build_step(ec.layout.rve, ec.enc, s));
    it.add(ec.steps.back());
  }
  ec.u_iter = share(std::move(it));
  ec.readout = build_stress_readout(spec, ec.layout, opts.mu, &ec.sigma);
  CircuitBlock full("ensemble");
  full.add(build_parallel_solve(ec.init, ec.u_iter)).add(ec.readout);
  ec.full = share(std::move(full));
  return ec;
}

StateVector run_ensemble_solve(const EnsembleCircuit& ec,
                               const std::function<void(int, const StateVector&)>& observe) {
  const RveLayout& R = ec.layout.rve;
  StateVector st = new_state(R.layout);
  apply_block(st, *ec.init);
  if (observe) observe(0, st);
  for (int s = 0; s < R.S; ++s) {
    apply_block(st, *ec.steps[s]);
    if (R.mode == AncillaMode::Recycled && s + 1 < R.S) recycle_ancillas(st, R);
    if (observe) observe(s + 1, st);
  }
  return st;
}

StateVector subspace_state(const StateVector& state, const EnsembleLayout& L, int m) {
  const int R = int(L.rve.rve_qubits.size());
  const int M = L.M;
  if (m < 0 || m >= M) throw ValidationError("subspace index out of range");
  StateVector out(R);
  const std::uint64_t base = std::uint64_t(m) << R;
  const double f = std::sqrt(double(M));
  for (std::uint64_t i = 0; i < out.size(); ++i) out.amplitudes()[i] = state[base + i] * f;
  return out;
}

EnsembleReport extract_report(const StateVector& state, const EnsembleCircuit& ec,
                              const ExtractOptions& opts) {
  const EnsembleLayout& L = ec.layout;
  const int dims = ec.spec.dims;
  const double rootM = std::sqrt(double(L.M));
  const double rootN = std::pow(double(ec.spec.N), dims / 2.0);
  EnsembleReport rep;
  rep.mode = opts.mode;

  struct Slot {
    int m, c;
    double p;
  };
  std::vector<Slot> slots;
  for (int j = 0; j < ec.loads.M; ++j) {
    if (ec.loads.padded[j]) continue;
    const StrainLedger& led = ec.ledgers[j];
    if (!led.valid) throw ConfigError("uniform initial weighting has no strain ledger");
    CaseResult cr;
    cr.label = ec.loads.labels[j];
    cr.gammabar = ec.loads.gammabars[j];
    Projector pm;
    for (std::size_t i = 0; i < L.m.size(); ++i) pm.fix(L.m[i], (j >> i) & 1);
    cr.mass = project(state, pm).probability;
    const double unit = rootM * ec.sigma.scale / (led.amplitude_factor(L.rve.S) * rootN);
    for (int c = 0; c < dims; ++c) {
      const Projector p = flagged(L, j, c);
      const cplx a = read_slice(state, p, {}).at(0);
      const double prob = project(state, p).probability;
      cr.amplitude.push_back(a.real());
      cr.probability.push_back(prob);
      cr.sigma.push_back(a.real() * unit);
      slots.push_back({int(rep.cases.size()), c, prob});
    }
    rep.cases.push_back(std::move(cr));
  }

  if (opts.mode == ReadoutMode::Sampled) {
    if (opts.shots == 0) throw ConfigError("sampling needs at least one shot");
    std::vector<double> w;
    double rest = 1.0;
    for (const auto& s : slots) {
      w.push_back(s.p);
      rest -= s.p;
    }
    w.push_back(std::max(0.0, rest));
    std::mt19937_64 rng(opts.seed);
    std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
    std::vector<std::uint64_t> hits(w.size(), 0);
    for (std::uint64_t i = 0; i < opts.shots; ++i) ++hits[dist(rng)];
    rep.shots = opts.shots;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      auto& cr = rep.cases[slots[k].m];
      const double pe = double(hits[k]) / double(opts.shots);
      const double ratio = cr.probability[slots[k].c] > 0.0
                               ? std::abs(cr.sigma[slots[k].c]) / std::sqrt(cr.probability[slots[k].c])
                               : 0.0;
      cr.probability[slots[k].c] = pe;
      cr.sigma[slots[k].c] = std::sqrt(pe) * ratio;  // magnitude only
      cr.amplitude[slots[k].c] = std::sqrt(pe);
    }
  }
  return rep;
}

EnsembleReport run_ensemble(const EnsembleCircuit& ec, const ExtractOptions& opts,
                            bool keep_strain) {
  StateVector st = run_ensemble_solve(ec);
  std::vector<std::optional<StrainField>> fields(ec.loads.M);
  if (keep_strain)
    for (int j = 0; j < ec.loads.M; ++j)
      if (!ec.loads.padded[j])
        fields[j] = readout_strain(subspace_state(st, ec.layout, j), ec.layout.rve,
                                   ec.ledgers[j], ec.layout.rve.S);
  apply_block(st, *ec.readout);
  EnsembleReport rep = extract_report(st, ec, opts);
  std::size_t k = 0;
  for (int j = 0; j < ec.loads.M; ++j)
    if (!ec.loads.padded[j]) rep.cases[k++].strain = fields[j];
  return rep;
}

std::string report_csv(const EnsembleReport& r) {
  std::string out = "case_id,component,sigma,probability\n";
  char buf[160];
  for (const auto& c : r.cases)
    for (std::size_t i = 0; i < c.sigma.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g\n", c.label.c_str(), i, c.sigma[i],
                    c.probability[i]);
      out += buf;
    }
  return out;
}

}  // namespace qhomog

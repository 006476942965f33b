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

#include "qhomog/transpile.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qhomog/errors.hpp"

namespace qhomog {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTiny = 1e-14;

}  // namespace

U3Params u3_decompose(const Mat2& m) {
  U3Params p;
  const double ca = std::abs(m[0]), sc = std::abs(m[2]);
  p.theta = 2.0 * std::atan2(sc, ca);
  p.alpha = ca > kTiny ? std::arg(m[0]) : std::arg(m[2]);
  p.phi = sc > kTiny ? std::arg(m[2]) - p.alpha : 0.0;
  p.lambda = std::abs(m[1]) > kTiny ? std::arg(-m[1]) - p.alpha
                                    : std::arg(m[3]) - p.alpha - p.phi;
  return p;
}

namespace {

class Lowerer {
 public:
  Lowerer(const LoweringOptions& o, const GateSink& s) : opts_(o), sink_(s) {}

  double run(const Gate& g) {
    std::vector<int> pos;
    std::vector<int> open;
    for (const auto& c : g.controls) {
      pos.push_back(c.qubit);
      if (!c.value) open.push_back(c.qubit);
    }
    for (int q : open) x(q);
    switch (g.kind) {
      case GateKind::SWAP: {
        const int a = g.targets[0], b = g.targets[1];
        if (pos.empty()) {
          cx(a, b);
          cx(b, a);
          cx(a, b);
        } else {
          std::vector<int> c2 = pos;
          c2.push_back(a);
          cx(b, a);
          mcx(c2, b, g);
          cx(b, a);
        }
        break;
      }
      case GateKind::X:
        if (pos.empty())
          x(g.targets[0]);
        else
          mcx(pos, g.targets[0], g);
        break;
      case GateKind::Z:
        if (pos.empty())
          single(g.targets[0], g.matrix());
        else
          mcphase(pos, g.targets[0], kPi, g);
        break;
      case GateKind::Phase:
        if (pos.empty())
          single(g.targets[0], g.matrix());
        else
          mcphase(pos, g.targets[0], g.theta, g);
        break;
      case GateKind::RY:
        if (pos.empty()) {
          single(g.targets[0], g.matrix());
        } else {
          const int t = g.targets[0];
          single(t, gates::ry(t, g.theta / 2).matrix());
          mcx(pos, t, g);
          single(t, gates::ry(t, -g.theta / 2).matrix());
          mcx(pos, t, g);
        }
        break;
      case GateKind::H:
      case GateKind::U3:
      case GateKind::Unitary:
        if (pos.empty())
          single(g.targets[0], g.matrix());
        else
          controlled_u(pos, g.targets[0], g.matrix(), g);
        break;
    }
    for (int q : open) x(q);
    return phase_;
  }

 private:
  static Mat2 rz(double a) {
    return {std::polar(1.0, -a / 2), 0.0, 0.0, std::polar(1.0, a / 2)};
  }
  static Mat2 ry_mat(double a) { return gates::ry(0, a).matrix(); }

  void emit_u3(int t, double th, double ph, double la) {
    LoweredGate lg;
    lg.kind = LoweredGate::U3;
    lg.target = t;
    lg.theta = th;
    lg.phi = ph;
    lg.lambda = la;
    sink_(lg);
  }
  void single(int t, const Mat2& m) {
    U3Params p = u3_decompose(m);
    emit_u3(t, p.theta, p.phi, p.lambda);
    phase_ += p.alpha;
  }
  void x(int t) { emit_u3(t, kPi, 0.0, kPi); }
  void h(int t) { emit_u3(t, kPi / 2, 0.0, kPi); }
  void p(int t, double a) { emit_u3(t, 0.0, 0.0, a); }
  void cx(int c, int t) {
    LoweredGate lg;
    lg.kind = LoweredGate::CNOT;
    lg.control = c;
    lg.target = t;
    sink_(lg);
  }

  void toffoli(int a, int b, int t) {
    h(t);
    cx(b, t);
    p(t, -kPi / 4);
    cx(a, t);
    p(t, kPi / 4);
    cx(b, t);
    p(t, -kPi / 4);
    cx(a, t);
    p(b, kPi / 4);
    p(t, kPi / 4);
    h(t);
    cx(a, b);
    p(a, kPi / 4);
    p(b, -kPi / 4);
    cx(a, b);
  }

  // m-controlled X with m-2 dirty helpers; 4(m-2) Toffolis for m >= 3.
  void vchain(const std::vector<int>& c, int t, const std::vector<int>& dirty) {
    const int m = static_cast<int>(c.size());
    if (m == 1) return cx(c[0], t);
    if (m == 2) return toffoli(c[0], c[1], t);
    auto anc = [&](int i) { return i == m - 1 ? t : dirty[i - 1]; };
    auto step = [&](int i) {
      if (i == 0)
        toffoli(c[0], c[1], anc(1));
      else
        toffoli(c[i + 1], anc(i), anc(i + 1));
    };
    for (int i = m - 2; i >= 1; --i) step(i);
    step(0);
    for (int i = 1; i <= m - 2; ++i) step(i);
    for (int i = m - 3; i >= 1; --i) step(i);
    step(0);
    for (int i = 1; i <= m - 3; ++i) step(i);
  }

  int pick_work(const std::vector<int>& busy, const Gate& g) const {
    auto idle = [&](int q) {
      return std::find(busy.begin(), busy.end(), q) == busy.end();
    };
    if (opts_.work_qubit >= 0 && idle(opts_.work_qubit)) return opts_.work_qubit;
    for (int q = opts_.num_qubits - 1; q >= 0; --q)
      if (idle(q)) return q;
    throw LoweringError(g.label() +
                        ": no idle qubit available for multi-controlled X");
  }

  void mcx(const std::vector<int>& c, int t, const Gate& g) {
    const int k = static_cast<int>(c.size());
    if (k <= 2) return vchain(c, t, {});
    std::vector<int> busy = c;
    busy.push_back(t);
    const int w = pick_work(busy, g);
    const int k1 = (k + 1) / 2;
    std::vector<int> c1(c.begin(), c.begin() + k1);
    std::vector<int> c2(c.begin() + k1, c.end());
    std::vector<int> c2w = c2;
    c2w.push_back(w);
    std::vector<int> pool1 = c2;
    pool1.push_back(t);
    for (int r = 0; r < 2; ++r) {
      vchain(c2w, t, c1);
      vchain(c1, w, pool1);
    }
  }

  void mcphase(const std::vector<int>& c, int t, double th, const Gate& g) {
    const int k = static_cast<int>(c.size());
    if (k == 0) return p(t, th);
    if (k == 1) {
      p(c[0], th / 2);
      cx(c[0], t);
      p(t, -th / 2);
      cx(c[0], t);
      p(t, th / 2);
      return;
    }
    std::vector<int> rest(c.begin(), c.end() - 1);
    mcphase(rest, c.back(), th / 2, g);
    mcx(c, t, g);
    p(t, -th / 2);
    mcx(c, t, g);
    p(t, th / 2);
  }

  void controlled_u(const std::vector<int>& c, int t, const Mat2& u,
                    const Gate& g) {
    U3Params q = u3_decompose(u);
    const double alpha = q.alpha + (q.phi + q.lambda) / 2;
    const double beta = q.phi, gamma = q.theta, delta = q.lambda;
    const Mat2 A = mat_mul(rz(beta), ry_mat(gamma / 2));
    const Mat2 B = mat_mul(ry_mat(-gamma / 2), rz(-(delta + beta) / 2));
    const Mat2 C = rz((delta - beta) / 2);
    single(t, C);
    mcx(c, t, g);
    single(t, B);
    mcx(c, t, g);
    single(t, A);
    std::vector<int> rest(c.begin(), c.end() - 1);
    mcphase(rest, c.back(), alpha, g);
  }

  const LoweringOptions& opts_;
  const GateSink& sink_;
  double phase_ = 0.0;
};

}  // namespace

double lower_gate(const Gate& g, const LoweringOptions& opts,
                  const GateSink& sink) {
  g.validate(std::max(opts.num_qubits, 64));
  Lowerer l(opts, sink);
  return l.run(g);
}

Gate to_gate(const LoweredGate& g) {
  if (g.kind == LoweredGate::CNOT) return gates::cnot(g.control, g.target);
  return gates::u3(g.target, g.theta, g.phi, g.lambda);
}

namespace {

// Streams lowered gates, optionally merging runs of U3 on the same qubit.
class Stream {
 public:
  Stream(bool merge, GateSink out) : merge_(merge), out_(std::move(out)) {}

  void push(const LoweredGate& g) {
    if (!merge_) return out_(g);
    if (g.kind == LoweredGate::U3) {
      Mat2 m = to_gate(g).matrix();
      auto it = pending_.find(g.target);
      if (it == pending_.end())
        pending_.emplace(g.target, m);
      else
        it->second = mat_mul(m, it->second);
      return;
    }
    flush(g.control);
    flush(g.target);
    out_(g);
  }
  void finish() {
    while (!pending_.empty()) flush(pending_.begin()->first);
  }
  double phase() const { return phase_; }

 private:
  void flush(int q) {
    auto it = pending_.find(q);
    if (it == pending_.end()) return;
    U3Params p = u3_decompose(it->second);
    phase_ += p.alpha;
    LoweredGate lg;
    lg.kind = LoweredGate::U3;
    lg.target = q;
    lg.theta = p.theta;
    lg.phi = p.phi;
    lg.lambda = p.lambda;
    pending_.erase(it);
    out_(lg);
  }

  bool merge_;
  GateSink out_;
  std::map<int, Mat2> pending_;
  double phase_ = 0.0;
};

}  // namespace

LoweredCircuit lower(const CircuitBlock& block, const LoweringOptions& opts) {
  LoweredCircuit out;
  Stream st(opts.merge_u3,
            [&](const LoweredGate& g) { out.gates.push_back(g); });
  GateSink sink = [&](const LoweredGate& g) { st.push(g); };
  block.for_each_gate([&](const Gate& g, const CircuitBlock::Path&) {
    out.global_phase += lower_gate(g, opts, sink);
  });
  st.finish();
  out.global_phase += st.phase();
  return out;
}

void apply_lowered(StateVector& state, const LoweredCircuit& c) {
  for (const auto& g : c.gates) state.apply(to_gate(g));
  const cplx ph = std::polar(1.0, c.global_phase);
  for (auto& a : state.amplitudes()) a *= ph;
}

GateCountReport count(const CircuitBlock& block, const LoweringOptions& opts) {
  GateCountReport rep;
  std::vector<std::uint64_t> level;
  std::uint64_t depth = 0;
  CircuitBlock::Path last_path;
  std::vector<GateCounts*> slots;

  auto bump_depth = [&](int a, int b) {
    const int hi = std::max(a, b);
    if (hi >= static_cast<int>(level.size())) level.resize(hi + 1, 0);
    std::uint64_t l = level[b] + 1;
    if (a >= 0) l = std::max(l, level[a] + 1);
    level[b] = l;
    if (a >= 0) level[a] = l;
    depth = std::max(depth, l);
  };

  Stream st(opts.merge_u3, [&](const LoweredGate& g) {
    const bool is_cx = g.kind == LoweredGate::CNOT;
    bump_depth(is_cx ? g.control : -1, g.target);
    for (GateCounts* s : slots) {
      (is_cx ? s->cnot : s->u3) += 1;
      s->total += 1;
    }
    (is_cx ? rep.counts.cnot : rep.counts.u3) += 1;
    rep.counts.total += 1;
  });
  GateSink sink = [&](const LoweredGate& g) { st.push(g); };

  block.for_each_gate([&](const Gate& g, const CircuitBlock::Path& path) {
    if (path != last_path) {
      // U3 merging may straddle block boundaries; pending gates are
      // attributed to the block where they are flushed.
      last_path = path;
      slots.clear();
      std::string key;
      for (std::size_t i = 0; i < path.size(); ++i) {
        key += (i ? "/" : "") + path[i];
        slots.push_back(&rep.per_block[key]);
      }
    }
    lower_gate(g, opts, sink);
  });
  st.finish();
  rep.counts.depth = depth;
  return rep;
}

std::vector<ScalingPoint> scaling_table(
    const std::vector<long long>& indices,
    const std::function<std::pair<BlockPtr, LoweringOptions>(long long)>&
        make) {
  std::vector<ScalingPoint> out;
  for (long long i : indices) {
    auto [blk, opts] = make(i);
    out.push_back({i, count(*blk, opts)});
  }
  return out;
}

std::string counts_csv(const std::vector<ScalingPoint>& rows) {
  std::string s = "index,cnot,u3,total,depth\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%lld,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 "\n",
                  r.index, r.report.counts.cnot, r.report.counts.u3,
                  r.report.counts.total, r.report.counts.depth);
    s += buf;
  }
  return s;
}

}  // namespace qhomog

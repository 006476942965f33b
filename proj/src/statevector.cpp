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

#include "qhomog/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "qhomog/errors.hpp"

namespace qhomog {

// ---------------------------------------------------------------- layout

QubitLayout::QubitLayout(std::vector<Register> regs) {
  std::set<std::string> names;
  std::vector<int> owner;
  for (const auto& r : regs) {
    if (r.size <= 0 || r.offset < 0)
      throw ConfigError("register '" + r.name + "' has an invalid range");
    if (!names.insert(r.name).second)
      throw ConfigError("duplicate register name '" + r.name + "'");
    if (static_cast<int>(owner.size()) < r.offset + r.size)
      owner.resize(r.offset + r.size, -1);
    for (int q = r.offset; q < r.offset + r.size; ++q) {
      if (owner[q] != -1)
        throw ConfigError("register '" + r.name + "' overlaps qubit " +
                          std::to_string(q));
      owner[q] = 1;
    }
  }
  for (std::size_t q = 0; q < owner.size(); ++q)
    if (owner[q] == -1)
      throw ConfigError("qubit " + std::to_string(q) +
                        " is not covered by any register");
  total_ = static_cast<int>(owner.size());
  regs_ = std::move(regs);
}

const QubitLayout::Register& QubitLayout::add(const std::string& name,
                                              int size) {
  if (size <= 0) throw ConfigError("register '" + name + "' must be non-empty");
  if (has(name)) throw ConfigError("duplicate register name '" + name + "'");
  regs_.push_back({name, total_, size});
  total_ += size;
  return regs_.back();
}

bool QubitLayout::has(const std::string& name) const {
  return std::any_of(regs_.begin(), regs_.end(),
                     [&](const Register& r) { return r.name == name; });
}

const QubitLayout::Register& QubitLayout::reg(const std::string& name) const {
  for (const auto& r : regs_)
    if (r.name == name) return r;
  throw ConfigError("unknown register '" + name + "'");
}

int QubitLayout::qubit(const std::string& name, int i) const {
  const auto& r = reg(name);
  if (i < 0 || i >= r.size)
    throw ConfigError("qubit " + std::to_string(i) + " outside register '" +
                      name + "'");
  return r.offset + i;
}

std::vector<int> QubitLayout::qubits(const std::string& name) const {
  const auto& r = reg(name);
  std::vector<int> out(r.size);
  for (int i = 0; i < r.size; ++i) out[i] = r.offset + i;
  return out;
}

// ----------------------------------------------------------------- gates

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 mat_adjoint(const Mat2& a) {
  return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

bool is_unitary(const Mat2& m, double tol) {
  Mat2 p = mat_mul(mat_adjoint(m), m);
  return std::abs(p[0] - 1.0) <= tol && std::abs(p[1]) <= tol &&
         std::abs(p[2]) <= tol && std::abs(p[3] - 1.0) <= tol;
}

Mat2 Gate::matrix() const {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case GateKind::H:
      return {r, r, r, -r};
    case GateKind::X:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Z:
      return {1.0, 0.0, 0.0, -1.0};
    case GateKind::RY: {
      double c = std::cos(theta / 2), s = std::sin(theta / 2);
      return {c, -s, s, c};
    }
    case GateKind::U3: {
      double c = std::cos(theta / 2), s = std::sin(theta / 2);
      return {c, -std::polar(1.0, lambda) * s, std::polar(1.0, phi) * s,
              std::polar(1.0, phi + lambda) * c};
    }
    case GateKind::Phase:
      return {1.0, 0.0, 0.0, std::polar(1.0, theta)};
    case GateKind::Unitary:
      return u;
    case GateKind::SWAP:
      break;
  }
  throw ValidationError("SWAP has no single-qubit matrix");
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::RY:
    case GateKind::Phase:
      g.theta = -theta;
      break;
    case GateKind::U3:
      g.theta = -theta;
      g.phi = -lambda;
      g.lambda = -phi;
      break;
    case GateKind::Unitary:
      g.u = mat_adjoint(u);
      break;
    default:
      break;
  }
  return g;
}

std::string Gate::label() const {
  std::string base;
  switch (kind) {
    case GateKind::H: base = "H"; break;
    case GateKind::X: base = "X"; break;
    case GateKind::Z: base = "Z"; break;
    case GateKind::RY: base = "RY"; break;
    case GateKind::U3: base = "U3"; break;
    case GateKind::Phase: base = "PHASE"; break;
    case GateKind::SWAP: base = "SWAP"; break;
    case GateKind::Unitary: base = "U"; break;
  }
  if (controls.empty()) return base;
  return "C" + std::to_string(controls.size()) + "-" + base;
}

void Gate::validate(int num_qubits) const {
  const std::size_t want = kind == GateKind::SWAP ? 2 : 1;
  if (targets.size() != want)
    throw ValidationError(label() + ": wrong number of targets");
  std::set<int> seen;
  for (int t : targets) {
    if (t < 0 || t >= num_qubits)
      throw ValidationError(label() + ": target out of range");
    if (!seen.insert(t).second)
      throw ValidationError(label() + ": repeated target");
  }
  for (const auto& c : controls) {
    if (c.qubit < 0 || c.qubit >= num_qubits)
      throw ValidationError(label() + ": control out of range");
    if (!seen.insert(c.qubit).second)
      throw ValidationError(label() + ": control collides with another qubit");
  }
  if (kind == GateKind::Unitary && !is_unitary(u))
    throw ValidationError("generic gate matrix is not unitary");
}

namespace gates {
namespace {
Gate make(GateKind k, int t) {
  Gate g;
  g.kind = k;
  g.targets = {t};
  return g;
}
}  // namespace

Gate h(int t) { return make(GateKind::H, t); }
Gate x(int t) { return make(GateKind::X, t); }
Gate z(int t) { return make(GateKind::Z, t); }
Gate ry(int t, double theta) {
  Gate g = make(GateKind::RY, t);
  g.theta = theta;
  return g;
}
Gate u3(int t, double theta, double phi, double lambda) {
  Gate g = make(GateKind::U3, t);
  g.theta = theta;
  g.phi = phi;
  g.lambda = lambda;
  return g;
}
Gate phase(int t, double theta) {
  Gate g = make(GateKind::Phase, t);
  g.theta = theta;
  return g;
}
Gate cnot(int c, int t) {
  Gate g = make(GateKind::X, t);
  g.controls = {{c, true}};
  return g;
}
Gate cphase(int c, int t, double theta) {
  Gate g = phase(t, theta);
  g.controls = {{c, true}};
  return g;
}
Gate swap(int a, int b) {
  Gate g;
  g.kind = GateKind::SWAP;
  g.targets = {a, b};
  return g;
}
Gate mcx(std::vector<Control> controls, int t) {
  Gate g = make(GateKind::X, t);
  g.controls = std::move(controls);
  return g;
}
Gate unitary(int t, const Mat2& m) {
  if (!is_unitary(m)) throw ValidationError("generic gate matrix is not unitary");
  Gate g = make(GateKind::Unitary, t);
  g.u = m;
  return g;
}
}  // namespace gates

// ------------------------------------------------------------ statevector

StateVector::StateVector(int num_qubits) : n_(num_qubits) {
  if (num_qubits < 0 || num_qubits > 40)
    throw ConfigError("unsupported qubit count " + std::to_string(num_qubits));
  amp_.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
  amp_[0] = 1.0;
}

StateVector StateVector::basis(int num_qubits, std::uint64_t index) {
  StateVector s(num_qubits);
  if (index >= s.size()) throw ValidationError("basis index out of range");
  s.amp_[0] = 0.0;
  s.amp_[index] = 1.0;
  return s;
}

namespace {

struct ControlMask {
  std::uint64_t mask = 0;
  std::uint64_t value = 0;
};

ControlMask control_mask(const std::vector<Control>& cs) {
  ControlMask m;
  for (const auto& c : cs) {
    m.mask |= std::uint64_t{1} << c.qubit;
    if (c.value) m.value |= std::uint64_t{1} << c.qubit;
  }
  return m;
}

inline std::uint64_t insert_zero(std::uint64_t i, int bit) {
  std::uint64_t low = i & ((std::uint64_t{1} << bit) - 1);
  return ((i >> bit) << (bit + 1)) | low;
}

}  // namespace

void StateVector::apply(const Gate& g) {
  g.validate(n_);
  const ControlMask cm = control_mask(g.controls);
  const std::uint64_t half = amp_.size() / 2;

  if (g.kind == GateKind::SWAP) {
    const int a = g.targets[0], b = g.targets[1];
    const std::uint64_t ba = std::uint64_t{1} << a, bb = std::uint64_t{1} << b;
    for (std::uint64_t i = 0; i < amp_.size(); ++i) {
      if ((i & ba) && !(i & bb) && (i & cm.mask) == cm.value)
        std::swap(amp_[i], amp_[i ^ ba ^ bb]);
    }
    return;
  }

  const int t = g.targets[0];
  const std::uint64_t bt = std::uint64_t{1} << t;
  if (g.kind == GateKind::X) {
    for (std::uint64_t i = 0; i < half; ++i) {
      std::uint64_t i0 = insert_zero(i, t);
      if ((i0 & cm.mask) == cm.value) std::swap(amp_[i0], amp_[i0 | bt]);
    }
    return;
  }
  const Mat2 m = g.matrix();
  for (std::uint64_t i = 0; i < half; ++i) {
    std::uint64_t i0 = insert_zero(i, t);
    if ((i0 & cm.mask) != cm.value) continue;
    std::uint64_t i1 = i0 | bt;
    cplx a0 = amp_[i0], a1 = amp_[i1];
    amp_[i0] = m[0] * a0 + m[1] * a1;
    amp_[i1] = m[2] * a0 + m[3] * a1;
  }
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector new_state(const QubitLayout& layout) {
  return StateVector(layout.num_qubits());
}

// -------------------------------------------------------------------- QFT

void apply_qft(StateVector& state, const QubitLayout& layout,
               const std::string& reg, bool inverse,
               const std::vector<Control>& controls) {
  apply_qft(state, layout.qubits(reg), inverse, controls);
}

void apply_qft(StateVector& state, const std::vector<int>& qubits,
               bool inverse, const std::vector<Control>& controls) {
  const int n = static_cast<int>(qubits.size());
  std::set<int> seen;
  for (int q : qubits)
    if (q < 0 || q >= state.num_qubits() || !seen.insert(q).second)
      throw ValidationError("QFT register qubits invalid");
  for (const auto& c : controls)
    if (c.qubit < 0 || c.qubit >= state.num_qubits() ||
        !seen.insert(c.qubit).second)
      throw ValidationError("QFT control qubit invalid");

  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<std::uint64_t> off(dim, 0);
  std::uint64_t reg_mask = 0;
  for (std::uint64_t k = 0; k < dim; ++k)
    for (int j = 0; j < n; ++j)
      if ((k >> j) & 1) off[k] |= std::uint64_t{1} << qubits[j];
  for (int q : qubits) reg_mask |= std::uint64_t{1} << q;

  const double sign = inverse ? -1.0 : 1.0;
  std::vector<cplx> tw(dim);
  for (std::uint64_t k = 0; k < dim; ++k)
    tw[k] = std::polar(1.0 / std::sqrt(static_cast<double>(dim)),
                       sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(dim));

  const ControlMask cm = control_mask(controls);
  auto& amp = state.amplitudes();
  std::vector<cplx> in(dim), out(dim);
  for (std::uint64_t base = 0; base < amp.size(); ++base) {
    if (base & reg_mask) continue;
    if ((base & cm.mask) != cm.value) continue;
    for (std::uint64_t k = 0; k < dim; ++k) in[k] = amp[base | off[k]];
    for (std::uint64_t j = 0; j < dim; ++j) {
      cplx s = 0.0;
      for (std::uint64_t k = 0; k < dim; ++k) s += tw[(j * k) % dim] * in[k];
      out[j] = s;
    }
    for (std::uint64_t k = 0; k < dim; ++k) amp[base | off[k]] = out[k];
  }
}

// ------------------------------------------------------------- projection

Projector& Projector::fix(int qubit, int value) {
  if (value != 0 && value != 1)
    throw ValidationError("projector value must be 0 or 1");
  constraints[qubit] = value;
  return *this;
}

Projector& Projector::fix_register(const QubitLayout& layout,
                                   const std::string& name,
                                   std::uint64_t value) {
  const auto& r = layout.reg(name);
  if (r.size < 64 && value >> r.size)
    throw ValidationError("value does not fit register '" + name + "'");
  for (int i = 0; i < r.size; ++i) fix(r.offset + i, (value >> i) & 1);
  return *this;
}

bool Projector::matches(std::uint64_t index) const {
  for (const auto& [q, v] : constraints)
    if (static_cast<int>((index >> q) & 1) != v) return false;
  return true;
}

namespace {

ControlMask projector_mask(const StateVector& state, const Projector& p) {
  ControlMask m;
  for (const auto& [q, v] : p.constraints) {
    if (q < 0 || q >= state.num_qubits())
      throw ValidationError("projector qubit out of range");
    m.mask |= std::uint64_t{1} << q;
    if (v) m.value |= std::uint64_t{1} << q;
  }
  return m;
}

}  // namespace

Projection project(const StateVector& state, const Projector& proj) {
  const ControlMask m = projector_mask(state, proj);
  double p = 0.0;
  const auto& amp = state.amplitudes();
  for (std::uint64_t i = 0; i < amp.size(); ++i)
    if ((i & m.mask) == m.value) p += std::norm(amp[i]);
  Projection out;
  out.probability = p;
  if (p <= 0.0) return out;
  StateVector post(state.num_qubits());
  auto& pa = post.amplitudes();
  const double inv = 1.0 / std::sqrt(p);
  for (std::uint64_t i = 0; i < amp.size(); ++i)
    pa[i] = (i & m.mask) == m.value ? amp[i] * inv : cplx{0.0, 0.0};
  out.state = std::move(post);
  return out;
}

std::map<std::uint64_t, cplx> read_amplitudes(const StateVector& state,
                                              const Projector& proj) {
  const ControlMask m = projector_mask(state, proj);
  std::vector<int> free;
  for (int q = 0; q < state.num_qubits(); ++q)
    if (!((m.mask >> q) & 1)) free.push_back(q);
  std::map<std::uint64_t, cplx> out;
  const auto& amp = state.amplitudes();
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    if ((i & m.mask) != m.value || amp[i] == cplx{0.0, 0.0}) continue;
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < free.size(); ++j)
      key |= ((i >> free[j]) & 1) << j;
    out[key] = amp[i];
  }
  return out;
}

std::vector<cplx> read_slice(const StateVector& state, const Projector& proj,
                             const std::vector<int>& free_qubits) {
  const ControlMask m = projector_mask(state, proj);
  for (int q : free_qubits)
    if (q < 0 || q >= state.num_qubits() || ((m.mask >> q) & 1))
      throw ValidationError("slice qubit invalid or pinned");
  const std::uint64_t dim = std::uint64_t{1} << free_qubits.size();
  std::vector<cplx> out(dim);
  for (std::uint64_t v = 0; v < dim; ++v) {
    std::uint64_t idx = m.value;
    for (std::size_t j = 0; j < free_qubits.size(); ++j)
      if ((v >> j) & 1) idx |= std::uint64_t{1} << free_qubits[j];
    out[v] = state[idx];
  }
  return out;
}

std::map<std::uint64_t, std::uint64_t> sample_counts(
    const StateVector& state, const std::vector<int>& qubits,
    std::uint64_t shots, std::uint64_t seed) {
  for (int q : qubits)
    if (q < 0 || q >= state.num_qubits())
      throw ValidationError("sampled qubit out of range");
  const std::uint64_t dim = std::uint64_t{1} << qubits.size();
  std::vector<double> prob(dim, 0.0);
  const auto& amp = state.amplitudes();
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j)
      key |= ((i >> qubits[j]) & 1) << j;
    prob[key] += std::norm(amp[i]);
  }
  // Sequential conditional binomials give an exact multinomial draw.
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, std::uint64_t> out;
  std::uint64_t left = shots;
  double mass = 0.0;
  for (double p : prob) mass += p;
  for (std::uint64_t k = 0; k < dim && left > 0; ++k) {
    if (prob[k] <= 0.0) continue;
    double q = mass > 0.0 ? std::min(1.0, prob[k] / mass) : 0.0;
    std::binomial_distribution<std::uint64_t> bin(left, q);
    const bool last = mass - prob[k] <= 1e-14;
    std::uint64_t c = last ? left : bin(rng);
    if (c) out[k] = c;
    left -= c;
    mass -= prob[k];
  }
  return out;
}

}  // namespace qhomog

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

#include "qhomog/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qhomog/errors.hpp"

namespace qhomog {

CircuitBlock& CircuitBlock::add(Gate g) {
  BlockItem it;
  it.frame = g.frame;
  it.gate.push_back(std::move(g));
  items_.push_back(std::move(it));
  return *this;
}

CircuitBlock& CircuitBlock::add(BlockPtr child, std::vector<Control> controls,
                                bool adjoint, bool frame) {
  if (!child) throw ValidationError("null child block in '" + name_ + "'");
  if (child->empty()) return *this;
  BlockItem it;
  it.block = std::move(child);
  it.controls = std::move(controls);
  it.adjoint = adjoint;
  it.frame = frame;
  items_.push_back(std::move(it));
  return *this;
}

void CircuitBlock::for_each_gate(const Visitor& fn) const {
  Path path;
  walk(fn, {}, false, path);
}

void CircuitBlock::walk(const Visitor& fn, const std::vector<Control>& extra,
                        bool adjoint, Path& path) const {
  path.push_back(name_);
  auto visit = [&](const BlockItem& it) {
    std::vector<Control> ctl;
    if (!it.frame) ctl = extra;
    if (!it.gate.empty()) {
      Gate g = adjoint ? it.gate.front().inverse() : it.gate.front();
      g.controls.insert(g.controls.end(), ctl.begin(), ctl.end());
      fn(g, path);
    } else {
      ctl.insert(ctl.end(), it.controls.begin(), it.controls.end());
      it.block->walk(fn, ctl, adjoint != it.adjoint, path);
    }
  };
  if (adjoint) {
    for (auto it = items_.rbegin(); it != items_.rend(); ++it) visit(*it);
  } else {
    for (const auto& it : items_) visit(it);
  }
  path.pop_back();
}

void apply_block(StateVector& state, const CircuitBlock& block) {
  block.for_each_gate(
      [&](const Gate& g, const CircuitBlock::Path&) { state.apply(g); });
}

std::size_t gate_count(const CircuitBlock& block) {
  std::size_t n = 0;
  block.for_each_gate([&](const Gate&, const CircuitBlock::Path&) { ++n; });
  return n;
}

std::vector<int> reversed(std::vector<int> q) {
  std::reverse(q.begin(), q.end());
  return q;
}

BlockPtr qft_block(const std::vector<int>& qubits, bool with_swaps,
                   const std::string& name) {
  CircuitBlock b(name);
  const int n = static_cast<int>(qubits.size());
  for (int i = n - 1; i >= 0; --i) {
    b.add(gates::h(qubits[i]));
    for (int m = i - 1; m >= 0; --m)
      b.add(gates::cphase(qubits[m], qubits[i],
                          std::numbers::pi / std::ldexp(1.0, i - m)));
  }
  if (with_swaps)
    for (int i = 0; i < n / 2; ++i)
      b.add(gates::swap(qubits[i], qubits[n - 1 - i]));
  return share(std::move(b));
}

BlockPtr multiplexed_ry(const std::vector<int>& controls, int target,
                        const std::vector<double>& theta,
                        const std::string& name) {
  const std::size_t c = controls.size();
  const std::size_t dim = std::size_t{1} << c;
  if (theta.size() != dim)
    throw ValidationError("multiplexed RY needs 2^c angles");
  CircuitBlock b(name);
  const bool constant = std::all_of(theta.begin(), theta.end(), [&](double t) {
    return std::abs(t - theta[0]) <= 1e-15;
  });
  if (c == 0 || constant) {
    b.add(gates::ry(target, theta[0]));
    return share(std::move(b));
  }
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t gi = i ^ (i >> 1);
    double phi = 0.0;
    for (std::size_t j = 0; j < dim; ++j)
      phi += (std::popcount(j & gi) & 1) ? -theta[j] : theta[j];
    b.add(gates::ry(target, phi / static_cast<double>(dim)));
    const int bit = i + 1 == dim ? static_cast<int>(c) - 1
                                 : std::countr_zero(i + 1);
    Gate cx = gates::cnot(controls[bit], target);
    cx.frame = true;
    b.add(cx);
  }
  return share(std::move(b));
}

BlockPtr state_prep(const std::vector<int>& qubits,
                    const std::vector<double>& v, const std::string& name) {
  const int n = static_cast<int>(qubits.size());
  if (v.size() != (std::size_t{1} << n))
    throw ValidationError("state_prep needs 2^n amplitudes");
  double nrm = 0.0;
  for (double x : v) nrm += x * x;
  if (std::abs(nrm - 1.0) > 1e-9)
    throw EncodingError("state_prep vector must have unit norm");
  CircuitBlock b(name);
  for (int l = n - 1; l >= 0; --l) {
    std::vector<int> ctl(qubits.begin() + l + 1, qubits.end());
    const std::size_t groups = std::size_t{1} << (n - 1 - l);
    const std::size_t span = std::size_t{1} << (l + 1);
    const std::size_t halfspan = span / 2;
    std::vector<double> theta(groups, 0.0);
    for (std::size_t j = 0; j < groups; ++j) {
      const std::size_t base = j * span;
      if (l == 0) {
        theta[j] = 2.0 * std::atan2(v[base + 1], v[base]);
      } else {
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 0; k < halfspan; ++k) {
          lo += v[base + k] * v[base + k];
          hi += v[base + halfspan + k] * v[base + halfspan + k];
        }
        theta[j] = 2.0 * std::atan2(std::sqrt(hi), std::sqrt(lo));
      }
    }
    b.add(multiplexed_ry(ctl, qubits[l], theta, "level"));
  }
  return share(std::move(b));
}

}  // namespace qhomog

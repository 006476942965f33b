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

#include "qhomog/poly_encode.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>

#include "qhomog/errors.hpp"

namespace qhomog {

int relabel(int k, int N) {
  if (N <= 0 || N % 2 != 0)
    throw ValidationError("relabel needs a positive even grid size");
  if (k < 0 || k >= N)
    throw ValidationError("grid index " + std::to_string(k) + " out of range");
  return k < N / 2 ? k : k - N;
}

double PolyFit::evaluate(double x0, double x1) const {
  const int d0 = degrees.at(0);
  const int d1 = variables == 2 ? degrees.at(1) : 0;
  double s = 0.0, p1 = 1.0;
  for (int i1 = 0; i1 <= d1; ++i1) {
    double p0 = 1.0;
    for (int i0 = 0; i0 <= d0; ++i0) {
      s += coefficients[i0 + (d0 + 1) * i1] * p0 * p1;
      p0 *= x0;
    }
    p1 *= x1;
  }
  return s;
}

PolyFit fit_polynomial(const std::vector<FitSample>& samples,
                       const std::vector<int>& degrees) {
  if (degrees.empty() || degrees.size() > 2)
    throw FitError("fit needs one or two variables");
  for (int d : degrees)
    if (d < 0) throw FitError("negative polynomial degree");
  PolyFit fit;
  fit.variables = static_cast<int>(degrees.size());
  fit.degrees = degrees;
  const int d0 = degrees[0];
  const int d1 = fit.variables == 2 ? degrees[1] : 0;
  const Eigen::Index cols = (d0 + 1) * (d1 + 1);
  const Eigen::Index rows = static_cast<Eigen::Index>(samples.size());
  if (rows < cols)
    throw FitError("fit needs at least " + std::to_string(cols) +
                   " samples, got " + std::to_string(rows));
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& s = samples[r];
    double p1 = 1.0;
    for (int i1 = 0; i1 <= d1; ++i1) {
      double p0 = 1.0;
      for (int i0 = 0; i0 <= d0; ++i0) {
        A(r, i0 + (d0 + 1) * i1) = p0 * p1;
        p0 *= s.x0;
      }
      p1 *= s.x1;
    }
    b(r) = s.value;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < cols) throw FitError("rank-deficient design matrix");
  Eigen::VectorXd c = qr.solve(b);
  fit.coefficients.assign(c.data(), c.data() + c.size());
  fit.fit_residual = (A * c - b).cwiseAbs().maxCoeff();
  return fit;
}

double CoordinateMap::value(std::uint64_t bits) const {
  double x = offset;
  for (std::size_t j = 0; j < qubits.size(); ++j)
    if ((bits >> j) & 1) x += weights[j];
  return x;
}

CoordinateMap raw_coordinates(const std::vector<int>& qubits) {
  CoordinateMap m;
  m.qubits = qubits;
  const double N = std::ldexp(1.0, static_cast<int>(qubits.size()));
  for (std::size_t j = 0; j < qubits.size(); ++j)
    m.weights.push_back(std::ldexp(1.0, static_cast<int>(j)) / N);
  return m;
}

CoordinateMap relabelled_coordinates(const std::vector<int>& qubits) {
  CoordinateMap m = raw_coordinates(qubits);
  if (!m.weights.empty()) m.weights.back() -= 1.0;
  return m;
}

namespace {

constexpr int kMaxExpandBits = 26;

// Dense multilinear powers of x = offset + sum w_j b_j over nb local bits.
std::vector<std::vector<double>> bit_powers(const CoordinateMap& c, int deg) {
  const int nb = static_cast<int>(c.qubits.size());
  const std::size_t dim = std::size_t{1} << nb;
  std::vector<std::vector<double>> pw(deg + 1, std::vector<double>(dim, 0.0));
  pw[0][0] = 1.0;
  for (int a = 1; a <= deg; ++a) {
    const auto& prev = pw[a - 1];
    auto& cur = pw[a];
    for (std::size_t m = 0; m < dim; ++m) {
      if (prev[m] == 0.0) continue;
      cur[m] += prev[m] * c.offset;
      for (int j = 0; j < nb; ++j) cur[m | (std::size_t{1} << j)] += prev[m] * c.weights[j];
    }
  }
  return pw;
}

}  // namespace

BitPolynomial expand_bits(const PolyFit& fit,
                          const std::vector<CoordinateMap>& coords) {
  if (static_cast<int>(coords.size()) != fit.variables)
    throw EncodingError("coordinate count does not match the fit");
  const int nb0 = static_cast<int>(coords[0].qubits.size());
  const int nb1 = fit.variables == 2 ? static_cast<int>(coords[1].qubits.size()) : 0;
  if (nb0 + nb1 > kMaxExpandBits)
    throw EncodingError("too many coordinate bits for bit expansion");
  const int d0 = fit.degrees[0];
  const int d1 = fit.variables == 2 ? fit.degrees[1] : 0;
  auto p0 = bit_powers(coords[0], d0);
  std::vector<std::vector<double>> p1{{1.0}};
  if (fit.variables == 2) p1 = bit_powers(coords[1], d1);

  std::vector<double> dense(std::size_t{1} << (nb0 + nb1), 0.0);
  for (int i1 = 0; i1 <= d1; ++i1)
    for (int i0 = 0; i0 <= d0; ++i0) {
      const double c = fit.coefficients[i0 + (d0 + 1) * i1];
      if (c == 0.0) continue;
      for (std::size_t m1 = 0; m1 < p1[i1].size(); ++m1) {
        if (p1[i1][m1] == 0.0) continue;
        const double cm1 = c * p1[i1][m1];
        for (std::size_t m0 = 0; m0 < p0[i0].size(); ++m0)
          if (p0[i0][m0] != 0.0) dense[m0 | (m1 << nb0)] += cm1 * p0[i0][m0];
      }
    }
  BitPolynomial out;
  for (std::size_t m = 0; m < dense.size(); ++m)
    if (dense[m] != 0.0) out.emplace(m, dense[m]);
  return out;
}

BitPolynomial walsh_terms(const PolyFit& fit,
                          const std::vector<CoordinateMap>& coords) {
  const BitPolynomial mono = expand_bits(fit, coords);
  int nb = 0;
  for (const auto& c : coords) nb += static_cast<int>(c.qubits.size());
  const std::size_t dim = std::size_t{1} << nb;
  // prod_{i in T} b_i = 2^-|T| sum_{S subset T} (-1)^|S| prod_{i in S} z_i,
  // z_i = (-1)^{b_i}; accumulate over supersets.
  std::vector<double> w(dim, 0.0);
  for (const auto& [m, c] : mono) w[m] = c / std::ldexp(1.0, std::popcount(m));
  for (int j = 0; j < nb; ++j)
    for (std::size_t m = 0; m < dim; ++m)
      if (!((m >> j) & 1)) w[m] += w[m | (std::size_t{1} << j)];
  BitPolynomial out;
  for (std::size_t m = 0; m < dim; ++m) {
    if (w[m] == 0.0) continue;
    out.emplace(m, (std::popcount(m) & 1) ? -w[m] : w[m]);
  }
  return out;
}

namespace {

std::vector<int> concat_qubits(const std::vector<CoordinateMap>& coords) {
  std::vector<int> q;
  for (const auto& c : coords) q.insert(q.end(), c.qubits.begin(), c.qubits.end());
  return q;
}

}  // namespace

BlockPtr build_u_poly(const PolyFit& fit,
                      const std::vector<CoordinateMap>& coords, int ancilla,
                      double prune_tol, UPolyInfo* info,
                      const std::string& name) {
  const std::vector<int> q = concat_qubits(coords);
  for (int x : q)
    if (x == ancilla) throw EncodingError("ancilla overlaps an index qubit");
  CircuitBlock b(name);
  UPolyInfo local;

  if (!fit.angle_space) {
    const std::size_t dim = std::size_t{1} << q.size();
    const int nb0 = static_cast<int>(coords[0].qubits.size());
    std::vector<double> theta(dim);
    for (std::size_t v = 0; v < dim; ++v) {
      const double x0 = coords[0].value(v & ((std::size_t{1} << nb0) - 1));
      const double x1 = coords.size() > 1 ? coords[1].value(v >> nb0) : 0.0;
      const double a = fit.evaluate(x0, x1);
      if (std::abs(a) > 1.0)
        throw EncodingError("polynomial value " + std::to_string(a) +
                            " outside [-1, 1]; rescale before encoding");
      theta[v] = 2.0 * std::asin(a);
    }
    b.add(multiplexed_ry(q, ancilla, theta, "mux"));
    local.terms = dim;
  } else {
    // Parity form: RY(2w) between CNOT ladders that xor the bits of S onto
    // the ancilla flips the rotation sign when the parity of S is odd.
    std::vector<std::pair<std::uint64_t, double>> kept;
    for (const auto& [mask, w] : walsh_terms(fit, coords)) {
      if (std::abs(w) < prune_tol) {
        ++local.pruned;
        local.pruned_bound += std::abs(w);
        continue;
      }
      kept.emplace_back(mask, w);
    }
    auto gray_rank = [](std::uint64_t g) {
      for (std::uint64_t sh = 1; sh < 64; sh <<= 1) g ^= g >> sh;
      return g;
    };
    std::sort(kept.begin(), kept.end(), [&](const auto& a, const auto& b) {
      return gray_rank(a.first) < gray_rank(b.first);
    });
    std::uint64_t frame = 0;
    auto move_to = [&](std::uint64_t target) {
      const std::uint64_t diff = frame ^ target;
      for (std::size_t j = 0; j < q.size(); ++j)
        if ((diff >> j) & 1) {
          Gate cx = gates::cnot(q[j], ancilla);
          cx.frame = true;
          b.add(cx);
        }
      frame = target;
    };
    for (const auto& [mask, w] : kept) {
      move_to(mask);
      b.add(gates::ry(ancilla, 2.0 * w));
    }
    move_to(0);
    local.terms = kept.size();
  }
  if (info) *info = local;
  return share(std::move(b));
}

int ExtendedDomainSpec::extended_index(int k) const {
  if (k < 0 || k >= base_size) throw ValidationError("base index out of range");
  return k < base_size / 2 ? k : k + base_size;
}

bool ExtendedDomainSpec::defined(int k_ext) const {
  for (const auto& [lo, hi] : defined_ranges)
    if (k_ext >= lo && k_ext < hi) return true;
  return false;
}

ExtendedDomainSpec extended_domain(int N) {
  if (N < 2 || (N & (N - 1))) throw ConfigError("grid size must be a power of two");
  ExtendedDomainSpec s;
  s.base_size = N;
  s.extended_size = 2 * N;
  s.defined_ranges = {{0, N / 2}, {3 * N / 2, 2 * N}};
  return s;
}

BlockPtr build_extended_encoding(const ExtendedDomainSpec& spec,
                                 const PolyFit& fit,
                                 const std::vector<std::vector<int>>& base,
                                 const std::vector<int>& ext, int ancilla,
                                 double prune_tol, UPolyInfo* info,
                                 const std::string& name) {
  if (base.size() != ext.size() || static_cast<int>(base.size()) != fit.variables)
    throw EncodingError("extended encoding needs one ext qubit per coordinate");
  std::vector<CoordinateMap> coords;
  for (std::size_t d = 0; d < base.size(); ++d) {
    if ((std::size_t{1} << base[d].size()) != static_cast<std::size_t>(spec.base_size))
      throw EncodingError("base register does not match the extended spec");
    std::vector<int> q = base[d];
    q.push_back(ext[d]);
    coords.push_back(raw_coordinates(q));
  }
  CircuitBlock b(name);
  for (std::size_t d = 0; d < base.size(); ++d) {
    Gate cx = gates::cnot(base[d].back(), ext[d]);
    cx.frame = true;
    b.add(cx);
  }
  b.add(build_u_poly(fit, coords, ancilla, prune_tol, info, "u_poly"));
  for (std::size_t d = 0; d < base.size(); ++d) {
    Gate cx = gates::cnot(base[d].back(), ext[d]);
    cx.frame = true;
    b.add(cx);
  }
  return share(std::move(b));
}

// ---------------------------------------------------------------------------

namespace {

double grid_coordinate(CoordMode mode, int k, int N) {
  switch (mode) {
    case CoordMode::Raw:
      return static_cast<double>(k) / N;
    case CoordMode::Relabelled:
      return static_cast<double>(relabel(k, N)) / N;
    case CoordMode::Extended:
      return static_cast<double>(extended_domain(N).extended_index(k)) / (2.0 * N);
  }
  return 0.0;
}

std::uint64_t grid_bits(CoordMode mode, int k, int N) {
  if (mode == CoordMode::Extended)
    return static_cast<std::uint64_t>(extended_domain(N).extended_index(k));
  return static_cast<std::uint64_t>(k);
}

}  // namespace

Encoding encode_grid_function(const GridFunction& f,
                              const std::vector<std::vector<int>>& index_qubits,
                              const std::vector<int>& ext, int ancilla,
                              const EncodingOptions& opts,
                              const std::string& name) {
  const int N = f.N;
  const std::size_t points = f.dims == 2 ? std::size_t(N) * N : std::size_t(N);
  if (f.values.size() != points) throw EncodingError("grid function size mismatch");
  if (!f.dont_care.empty() && f.dont_care.size() != points)
    throw EncodingError("don't-care mask size mismatch");
  if (static_cast<int>(index_qubits.size()) != f.dims)
    throw EncodingError("index registers do not match grid dimension");
  for (const auto& q : index_qubits)
    if ((std::size_t{1} << q.size()) != static_cast<std::size_t>(N))
      throw EncodingError("index register size does not match N");

  double fmax = 0.0;
  for (double v : f.values) fmax = std::max(fmax, std::abs(v));

  Encoding enc;
  if (opts.mode == EncodingMode::Lookup) {
    enc.scale = std::max(1.0, fmax);
    std::vector<int> q;
    for (const auto& r : index_qubits) q.insert(q.end(), r.begin(), r.end());
    std::vector<double> theta(points);
    for (std::size_t v = 0; v < points; ++v)
      theta[v] = 2.0 * std::asin(f.values[v] / enc.scale);
    CircuitBlock b(name);
    b.add(multiplexed_ry(q, ancilla, theta, "lookup"));
    enc.block = share(std::move(b));
    enc.realised.resize(points);
    for (std::size_t v = 0; v < points; ++v)
      enc.realised[v] = enc.scale * std::sin(theta[v] / 2.0);
    enc.info.terms = points;
  } else {
    enc.scale = std::max(1.0, fmax * opts.headroom);
    std::vector<int> deg = opts.degrees;
    if (deg.empty()) throw EncodingError("polynomial degrees missing");
    if (static_cast<int>(deg.size()) < f.dims) deg.resize(f.dims, deg.back());
    deg.resize(f.dims);
    for (int& d : deg) d = std::min(d, N - 1);

    std::vector<FitSample> samples(points);
    for (std::size_t v = 0; v < points; ++v) {
      const int k0 = static_cast<int>(v % N), k1 = static_cast<int>(v / N);
      samples[v].x0 = grid_coordinate(opts.coords, k0, N);
      samples[v].x1 = f.dims == 2 ? grid_coordinate(opts.coords, k1, N) : 0.0;
      samples[v].value = std::asin(f.values[v] / enc.scale);
    }
    std::vector<FitSample> fitted;
    for (std::size_t v = 0; v < points; ++v)
      if (f.cares(v)) fitted.push_back(samples[v]);
    // Don't-care points can leave fewer samples than monomials.
    auto monomials = [&] {
      std::size_t m = 1;
      for (int d : deg) m *= std::size_t(d + 1);
      return m;
    };
    while (monomials() > fitted.size()) *std::max_element(deg.begin(), deg.end()) -= 1;
    enc.fit = fit_polynomial(fitted, deg);
    enc.fit.angle_space = true;

    if (opts.coords == CoordMode::Extended) {
      if (static_cast<int>(ext.size()) != f.dims)
        throw EncodingError("extended encoding needs one ext qubit per dimension");
      enc.block = build_extended_encoding(extended_domain(N), enc.fit,
                                          index_qubits, ext, ancilla,
                                          opts.prune_tol, &enc.info, name);
    } else {
      std::vector<CoordinateMap> coords;
      for (const auto& q : index_qubits)
        coords.push_back(opts.coords == CoordMode::Raw ? raw_coordinates(q)
                                                       : relabelled_coordinates(q));
      CircuitBlock b(name);
      b.add(build_u_poly(enc.fit, coords, ancilla, opts.prune_tol, &enc.info, "u_poly"));
      enc.block = share(std::move(b));
    }

    // Realised values: the fitted angle, minus whatever pruning removed.
    const bool ext_mode = opts.coords == CoordMode::Extended;
    const int nb0 = static_cast<int>(index_qubits[0].size()) + (ext_mode ? 1 : 0);
    BitPolynomial dropped;
    if (enc.info.pruned > 0) {
      std::vector<CoordinateMap> coords;
      for (const auto& q : index_qubits) {
        std::vector<int> qq = q;
        if (ext_mode) qq.push_back(-1);
        coords.push_back(opts.coords == CoordMode::Relabelled ? relabelled_coordinates(qq)
                                                              : raw_coordinates(qq));
      }
      for (const auto& [m, w] : walsh_terms(enc.fit, coords))
        if (std::abs(w) < opts.prune_tol) dropped.emplace(m, w);
    }
    enc.realised.resize(points);
    for (std::size_t v = 0; v < points; ++v) {
      double angle = enc.fit.evaluate(samples[v].x0, samples[v].x1);
      if (!dropped.empty()) {
        const int k0 = static_cast<int>(v % N), k1 = static_cast<int>(v / N);
        std::uint64_t bits = grid_bits(opts.coords, k0, N);
        if (f.dims == 2) bits |= grid_bits(opts.coords, k1, N) << nb0;
        for (const auto& [m, w] : dropped)
          angle -= (std::popcount(m & bits) & 1) ? -w : w;
      }
      enc.realised[v] = enc.scale * std::sin(angle);
    }
  }
  for (std::size_t v = 0; v < points; ++v)
    if (f.cares(v))
      enc.max_error = std::max(enc.max_error, std::abs(enc.realised[v] - f.values[v]));
  return enc;
}

}  // namespace qhomog

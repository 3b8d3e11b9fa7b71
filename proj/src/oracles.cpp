/**
 * Copyright 2026 The photherm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "photherm/oracles.hpp"

#include <algorithm>
#include <numeric>

#include "photherm/errors.hpp"

namespace photherm::oracle {

Complex naive_permanent(const ComplexMatrix& m) {
  const auto n = static_cast<int>(m.rows());
  if (m.cols() != n) throw DimensionError("naive_permanent: matrix must be square");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Complex total = 0.0;
  do {
    Complex prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[static_cast<std::size_t>(i)]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

ComplexMatrix series_expm(const ComplexMatrix& h, double t) {
  ComplexMatrix a = Complex(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  a /= std::pow(2.0, squarings);
  const auto n = h.rows();
  ComplexMatrix result = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

namespace {

// |perm(M)|^2 / prod(r! s!) for the enlarged system, computed with the naive permanent.
double enlarged_probability(const ComplexMatrix& big, const std::vector<int>& in, const std::vector<int>& out) {
  const auto n = static_cast<Eigen::Index>(in.size());
  ComplexMatrix sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = big(out[static_cast<std::size_t>(i)], in[static_cast<std::size_t>(j)]);
  }
  auto fact_of_counts = [](const std::vector<int>& list) {
    double f = 1.0;
    for (std::size_t i = 0; i < list.size();) {
      std::size_t k = i;
      while (k < list.size() && list[k] == list[i]) ++k;
      for (std::size_t c = 2; c <= k - i; ++c) f *= static_cast<double>(c);
      i = k;
    }
    return f;
  };
  return std::norm(naive_permanent(sub)) / (fact_of_counts(in) * fact_of_counts(out));
}

}  // namespace

FockDistribution internal_mode_distribution(const ComplexMatrix& u, const SpeciesPartition& partition) {
  const int m = partition.modes();
  const auto k = static_cast<int>(partition.species().size());
  const int n = partition.photons();
  // Enlarged mode index: spatial * k + internal.
  ComplexMatrix big = ComplexMatrix::Zero(m * k, m * k);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < k; ++c) big(a * k + c, b * k + c) = u(a, b);
    }
  }
  std::vector<int> in;
  for (int c = 0; c < k; ++c) {
    for (int d : partition.species()[static_cast<std::size_t>(c)].assignment()) in.push_back((d - 1) * k + c);
  }
  std::sort(in.begin(), in.end());

  FockDistribution dist = FockDistribution::zeros(n, m);
  // Enumerate non-decreasing output mode lists of the enlarged system.
  std::vector<int> out(static_cast<std::size_t>(n), 0);
  const int big_modes = m * k;
  while (true) {
    std::vector<int> spatial(static_cast<std::size_t>(m), 0);
    for (int o : out) ++spatial[static_cast<std::size_t>(o / k)];
    dist.probs[colex_rank(ModeOccupation(spatial))] += enlarged_probability(big, in, out);
    int pos = n - 1;
    while (pos >= 0 && out[static_cast<std::size_t>(pos)] == big_modes - 1) --pos;
    if (pos < 0) break;
    const int v = out[static_cast<std::size_t>(pos)] + 1;
    for (int q = pos; q < n; ++q) out[static_cast<std::size_t>(q)] = v;
  }
  return dist;
}

ModeOccupation sample_independent_photons(const ComplexMatrix& u, const ModeOccupation& r, Rng& rng) {
  std::vector<int> counts(static_cast<std::size_t>(r.modes()), 0);
  for (int d : r.assignment()) {
    double x = uniform01(rng);
    int out = r.modes() - 1;
    for (int s = 0; s < r.modes(); ++s) {
      x -= std::norm(u(s, d - 1));
      if (x < 0.0) {
        out = s;
        break;
      }
    }
    ++counts[static_cast<std::size_t>(out)];
  }
  return ModeOccupation(std::move(counts));
}

}  // namespace photherm::oracle

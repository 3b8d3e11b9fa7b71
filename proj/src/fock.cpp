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

#include "photherm/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "photherm/errors.hpp"
#include "photherm/parallel.hpp"

namespace photherm {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return result;
}

// Weak compositions of k into p parts.
std::uint64_t compositions(int k, int p) {
  if (p == 0) return k == 0 ? 1 : 0;
  return binomial(k + p - 1, p - 1);
}

double factorial_product(const ModeOccupation& occ) {
  double prod = 1.0;
  for (int c : occ.counts()) {
    for (int f = 2; f <= c; ++f) prod *= f;
  }
  return prod;
}

void require_unitary_shape(const ComplexMatrix& u, int modes, const char* what) {
  if (u.rows() != u.cols()) {
    throw DimensionError(std::string(what) + ": transformation must be square");
  }
  if (u.rows() != modes) {
    std::ostringstream os;
    os << what << ": transformation is " << u.rows() << "x" << u.cols() << " but pattern has "
       << modes << " modes";
    throw DimensionError(os.str());
  }
}

void require_same_photons(const ModeOccupation& r, const ModeOccupation& s, const char* what) {
  if (r.modes() != s.modes()) throw DimensionError(std::string(what) + ": mode count mismatch");
  if (r.photons() != s.photons()) {
    std::ostringstream os;
    os << what << ": input has " << r.photons() << " photons, output has " << s.photons();
    throw DomainError(os.str());
  }
}

template <typename Scalar, typename Matrix>
Scalar ryser(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  if (a.rows() != a.cols()) throw DimensionError("permanent: matrix must be square");
  if (n > kMaxPermanentSize) {
    std::ostringstream os;
    os << "permanent: size " << n << " exceeds the cap of " << kMaxPermanentSize;
    throw CapacityError(os.str());
  }
  if (n == 0) return Scalar(1);
  std::vector<Scalar> row_sums(static_cast<std::size_t>(n), Scalar(0));
  Scalar total(0);
  std::uint64_t previous = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t flipped = gray ^ previous;
    const int col = std::countr_zero(flipped);
    if (gray & flipped) {
      for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += a(i, col);
    } else {
      for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] -= a(i, col);
    }
    previous = gray;
    Scalar prod = row_sums[0];
    for (std::size_t i = 1; i < row_sums.size(); ++i) prod *= row_sums[i];
    if (std::popcount(gray) & 1) {
      total -= prod;
    } else {
      total += prod;
    }
  }
  return (n & 1) ? -total : total;
}

void enumerate_into(int pos, int remaining, std::vector<int>& counts,
                    std::vector<ModeOccupation>& out) {
  if (pos == 0) {
    counts[0] = remaining;
    out.emplace_back(counts);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    counts[static_cast<std::size_t>(pos)] = v;
    enumerate_into(pos - 1, remaining - v, counts, out);
  }
}

// All patterns t with t <= bound element-wise and total(t) = k.
void bounded_patterns(const std::vector<int>& bound, int k, std::size_t pos,
                      std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (pos + 1 == bound.size()) {
    if (k <= bound[pos]) {
      current[pos] = k;
      out.push_back(current);
    }
    return;
  }
  for (int v = 0; v <= std::min(k, bound[pos]); ++v) {
    current[pos] = v;
    bounded_patterns(bound, k - v, pos + 1, current, out);
  }
}

double species_sum(const ComplexMatrix& u, const std::vector<ModeOccupation>& species,
                   std::size_t index, const std::vector<int>& remaining) {
  const ModeOccupation& input = species[index];
  if (index + 1 == species.size()) {
    return prob_indistinguishable(u, input, ModeOccupation(remaining));
  }
  std::vector<std::vector<int>> parts;
  std::vector<int> current(remaining.size(), 0);
  bounded_patterns(remaining, input.photons(), 0, current, parts);
  double total = 0.0;
  std::vector<int> rest(remaining.size());
  for (const auto& part : parts) {
    const double p = prob_indistinguishable(u, input, ModeOccupation(part));
    if (p == 0.0) continue;
    for (std::size_t j = 0; j < rest.size(); ++j) rest[j] = remaining[j] - part[j];
    total += p * species_sum(u, species, index + 1, rest);
  }
  return total;
}

FockDistribution pattern_distribution(const ComplexMatrix& u, const ModeOccupation& r,
                                      bool distinguishable) {
  FockDistribution dist = FockDistribution::zeros(r.photons(), r.modes());
  parallel_for(dist.basis.size(), [&](std::size_t i) {
    dist.probs[i] = distinguishable ? prob_distinguishable(u, r, dist.basis[i])
                                    : prob_indistinguishable(u, r, dist.basis[i]);
  });
  return dist;
}

FockDistribution species_distribution(const ComplexMatrix& u, const SpeciesPartition& partition) {
  std::map<std::vector<int>, FockDistribution> cache;
  FockDistribution result;
  bool first = true;
  for (const auto& input : partition.species()) {
    auto it = cache.find(input.counts());
    if (it == cache.end()) {
      it = cache.emplace(input.counts(), pattern_distribution(u, input, false)).first;
    }
    if (first) {
      result = it->second;
      first = false;
    } else {
      result = convolve(result, it->second);
    }
  }
  return result;
}

void validate_partition_input(const SpeciesPartition& partition, const ModeOccupation& r) {
  if (partition.total() != r) {
    throw DomainError("species partition does not add up to the input occupation " +
                      r.to_string());
  }
}

}  // namespace

// ---------------------------------------------------------------- ModeOccupation

ModeOccupation::ModeOccupation(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw DimensionError("ModeOccupation: need at least one mode");
  for (int c : counts_) {
    if (c < 0) throw DomainError("ModeOccupation: negative photon count");
    photons_ += c;
  }
}

ModeOccupation::ModeOccupation(std::initializer_list<int> counts)
    : ModeOccupation(std::vector<int>(counts)) {}

ModeOccupation ModeOccupation::vacuum(int modes) {
  if (modes < 1) throw DimensionError("ModeOccupation: need at least one mode");
  return ModeOccupation(std::vector<int>(static_cast<std::size_t>(modes), 0));
}

ModeOccupation ModeOccupation::first_modes(int photons, int modes) {
  if (photons < 0 || photons > modes) {
    throw DimensionError("ModeOccupation::first_modes: need 0 <= photons <= modes");
  }
  std::vector<int> counts(static_cast<std::size_t>(modes), 0);
  std::fill_n(counts.begin(), photons, 1);
  return ModeOccupation(std::move(counts));
}

ModeOccupation ModeOccupation::from_assignment(std::span<const int> modes_one_based, int modes) {
  std::vector<int> counts(static_cast<std::size_t>(std::max(modes, 0)), 0);
  for (int mode : modes_one_based) {
    if (mode < 1 || mode > modes) throw DomainError("mode assignment entry out of range");
    ++counts[static_cast<std::size_t>(mode - 1)];
  }
  return ModeOccupation(std::move(counts));
}

ModeOccupation ModeOccupation::parse(const std::string& text) {
  std::string cleaned = text;
  for (char& ch : cleaned) {
    if (ch == ',' || ch == '(' || ch == ')' || ch == '[' || ch == ']' || ch == '|') ch = ' ';
  }
  std::istringstream is(cleaned);
  std::vector<int> counts;
  int value = 0;
  while (is >> value) counts.push_back(value);
  if (!is.eof()) throw DomainError("cannot parse mode occupation '" + text + "'");
  return ModeOccupation(std::move(counts));
}

std::vector<int> ModeOccupation::assignment() const {
  std::vector<int> d;
  d.reserve(static_cast<std::size_t>(photons_));
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    for (int k = 0; k < counts_[j]; ++k) d.push_back(static_cast<int>(j) + 1);
  }
  return d;
}

std::string ModeOccupation::to_string() const {
  std::string out;
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    if (j) out += ' ';
    out += std::to_string(counts_[j]);
  }
  return out;
}

ModeOccupation operator+(const ModeOccupation& a, const ModeOccupation& b) {
  if (a.modes() != b.modes()) throw DimensionError("ModeOccupation +: mode count mismatch");
  std::vector<int> sum(a.counts());
  for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += b.counts()[j];
  return ModeOccupation(std::move(sum));
}

bool colex_less(const ModeOccupation& a, const ModeOccupation& b) {
  return std::lexicographical_compare(a.counts().rbegin(), a.counts().rend(),
                                      b.counts().rbegin(), b.counts().rend());
}

std::size_t colex_rank(const ModeOccupation& occ) {
  int remaining = occ.photons();
  std::uint64_t rank = 0;
  for (int i = occ.modes() - 1; i >= 1; --i) {
    for (int v = 0; v < occ[i]; ++v) rank += compositions(remaining - v, i);
    remaining -= occ[i];
  }
  return static_cast<std::size_t>(rank);
}

std::size_t basis_size(int n, int m) {
  return static_cast<std::size_t>(compositions(n, m));
}

std::vector<ModeOccupation> enumerate_basis(int n, int m) {
  if (n < 0) throw DomainError("enumerate_basis: negative photon number");
  if (m < 1) throw DimensionError("enumerate_basis: need at least one mode");
  std::vector<ModeOccupation> out;
  out.reserve(basis_size(n, m));
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  enumerate_into(m - 1, n, counts, out);
  return out;
}

// -------------------------------------------------------------- SpeciesPartition

SpeciesPartition::SpeciesPartition(std::vector<ModeOccupation> species)
    : species_(std::move(species)) {
  if (species_.empty()) throw DomainError("SpeciesPartition: need at least one species");
  const int m = species_.front().modes();
  for (const auto& s : species_) {
    if (s.modes() != m) throw DimensionError("SpeciesPartition: species differ in mode count");
    if (s.photons() < 1) throw DomainError("SpeciesPartition: every species needs a photon");
  }
}

SpeciesPartition SpeciesPartition::single(const ModeOccupation& input) {
  return SpeciesPartition({input});
}

SpeciesPartition SpeciesPartition::singletons(const ModeOccupation& input) {
  std::vector<ModeOccupation> species;
  for (int mode : input.assignment()) {
    const int one[] = {mode};
    species.push_back(ModeOccupation::from_assignment(one, input.modes()));
  }
  return SpeciesPartition(std::move(species));
}

SpeciesPartition SpeciesPartition::from_photon_groups(
    const ModeOccupation& input, const std::vector<std::vector<int>>& groups) {
  const std::vector<int> d = input.assignment();
  std::vector<int> used(d.size(), 0);
  std::vector<ModeOccupation> species;
  for (const auto& group : groups) {
    std::vector<int> modes;
    for (int photon : group) {
      if (photon < 0 || static_cast<std::size_t>(photon) >= d.size()) {
        throw DomainError("SpeciesPartition: photon index out of range");
      }
      ++used[static_cast<std::size_t>(photon)];
      modes.push_back(d[static_cast<std::size_t>(photon)]);
    }
    species.push_back(ModeOccupation::from_assignment(modes, input.modes()));
  }
  if (std::any_of(used.begin(), used.end(), [](int u) { return u != 1; })) {
    throw DomainError("SpeciesPartition: groups must cover every photon exactly once");
  }
  return SpeciesPartition(std::move(species));
}

ModeOccupation SpeciesPartition::total() const {
  ModeOccupation sum = species_.front();
  for (std::size_t i = 1; i < species_.size(); ++i) sum = sum + species_[i];
  return sum;
}

int SpeciesPartition::photons() const {
  int n = 0;
  for (const auto& s : species_) n += s.photons();
  return n;
}

std::vector<int> SpeciesPartition::sizes() const {
  std::vector<int> sizes;
  for (const auto& s : species_) sizes.push_back(s.photons());
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

std::string describe(const DistinguishabilityModel& model) {
  struct Visitor {
    std::string operator()(const Indistinguishable&) const { return "indistinguishable"; }
    std::string operator()(const Distinguishable&) const { return "distinguishable"; }
    std::string operator()(const SpeciesPartition&) const { return "species"; }
    std::string operator()(const Mixture&) const { return "mixture"; }
  };
  return std::visit(Visitor{}, model);
}

Mixture shared_mode_mixture(const ModeOccupation& input, std::span<const double> shared_probability) {
  const std::vector<int> d = input.assignment();
  const std::size_t n = d.size();
  if (shared_probability.size() != n) {
    throw DimensionError("shared_mode_mixture: need one probability per photon");
  }
  if (n == 0 || n > 20) throw CapacityError("shared_mode_mixture: need 1..20 photons");
  for (double a : shared_probability) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("shared_mode_mixture: probability outside [0,1]");
  }
  std::map<std::vector<std::vector<int>>, std::size_t> seen;
  Mixture mixture;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double weight = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
      weight *= (mask >> p & 1) ? shared_probability[p] : 1.0 - shared_probability[p];
    }
    if (weight == 0.0) continue;
    std::vector<std::vector<int>> groups;
    std::vector<int> shared;
    for (std::size_t p = 0; p < n; ++p) {
      if (mask >> p & 1) {
        shared.push_back(static_cast<int>(p));
      } else {
        groups.push_back({static_cast<int>(p)});
      }
    }
    if (!shared.empty()) groups.push_back(shared);
    SpeciesPartition partition = SpeciesPartition::from_photon_groups(input, groups);
    std::vector<std::vector<int>> key;
    for (const auto& s : partition.species()) key.push_back(s.counts());
    std::sort(key.begin(), key.end());
    auto [it, inserted] = seen.emplace(key, mixture.components.size());
    if (inserted) {
      mixture.components.push_back({weight, std::move(partition)});
    } else {
      mixture.components[it->second].weight += weight;
    }
  }
  return mixture;
}

Mixture mixture_from_pair_overlaps(const ModeOccupation& input, const RealMatrix& overlaps) {
  const auto n = static_cast<Eigen::Index>(input.photons());
  if (overlaps.rows() != n || overlaps.cols() != n) {
    throw DimensionError("mixture_from_pair_overlaps: overlap matrix must be photons x photons");
  }
  if (n < 2) throw DomainError("mixture_from_pair_overlaps: need at least two photons");
  const Eigen::Index pairs = n * (n - 1) / 2;
  RealMatrix design = RealMatrix::Zero(pairs, n);
  Eigen::VectorXd rhs(pairs);
  Eigen::Index row = 0;
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const double v = overlaps(p, q);
      if (!(v > 0.0 && v <= 1.0)) {
        throw DomainError("mixture_from_pair_overlaps: overlaps must lie in (0, 1]");
      }
      design(row, p) = 1.0;
      design(row, q) = 1.0;
      rhs(row) = std::log(v);
      ++row;
    }
  }
  const Eigen::VectorXd log_a = design.completeOrthogonalDecomposition().solve(rhs);
  std::vector<double> a(static_cast<std::size_t>(n));
  for (Eigen::Index p = 0; p < n; ++p) {
    double value = std::exp(log_a(p));
    if (value > 1.0 + 1e-9) {
      throw DomainError("mixture_from_pair_overlaps: overlaps inconsistent with a shared mode");
    }
    a[static_cast<std::size_t>(p)] = std::min(value, 1.0);
  }
  return shared_mode_mixture(input, a);
}

// -------------------------------------------------------------- FockDistribution

FockDistribution FockDistribution::zeros(int photons, int modes) {
  FockDistribution dist;
  dist.photons = photons;
  dist.modes = modes;
  dist.basis = enumerate_basis(photons, modes);
  dist.probs.assign(dist.basis.size(), 0.0);
  return dist;
}

FockDistribution FockDistribution::point_mass(const ModeOccupation& occ) {
  FockDistribution dist = zeros(occ.photons(), occ.modes());
  dist.probs[colex_rank(occ)] = 1.0;
  return dist;
}

double FockDistribution::total() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

std::size_t FockDistribution::index_of(const ModeOccupation& occ) const {
  if (occ.modes() != modes || occ.photons() != photons) {
    throw DomainError("pattern " + occ.to_string() + " is outside this distribution's basis");
  }
  return colex_rank(occ);
}

double FockDistribution::probability(const ModeOccupation& occ) const {
  return probs[index_of(occ)];
}

void FockDistribution::validate(double tol) const {
  if (basis.size() != probs.size() || basis.size() != basis_size(photons, modes)) {
    throw DimensionError("FockDistribution: basis/probability size mismatch");
  }
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("FockDistribution: negative probability");
  }
  const double sum = total();
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "FockDistribution: probabilities sum to " << sum;
    throw DomainError(os.str());
  }
}

// ------------------------------------------------------------------- amplitudes

Complex permanent(const ComplexMatrix& m) { return ryser<Complex>(m); }

double permanent(const RealMatrix& m) { return ryser<double>(m); }

ComplexMatrix submatrix(const ComplexMatrix& u, const ModeOccupation& r, const ModeOccupation& s) {
  require_same_photons(r, s, "submatrix");
  require_unitary_shape(u, r.modes(), "submatrix");
  const std::vector<int> rows = s.assignment();
  const std::vector<int> cols = r.assignment();
  const auto n = static_cast<Eigen::Index>(rows.size());
  ComplexMatrix sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      sub(i, j) = u(rows[static_cast<std::size_t>(i)] - 1, cols[static_cast<std::size_t>(j)] - 1);
    }
  }
  return sub;
}

Complex transition_amplitude(const ComplexMatrix& u, const ModeOccupation& r,
                             const ModeOccupation& s) {
  const Complex perm = permanent(submatrix(u, r, s));
  return perm / std::sqrt(factorial_product(r) * factorial_product(s));
}

double prob_indistinguishable(const ComplexMatrix& u, const ModeOccupation& r,
                              const ModeOccupation& s) {
  const Complex perm = permanent(submatrix(u, r, s));
  return std::norm(perm) / (factorial_product(r) * factorial_product(s));
}

double prob_distinguishable(const ComplexMatrix& u, const ModeOccupation& r,
                            const ModeOccupation& s) {
  const RealMatrix weights = submatrix(u, r, s).cwiseAbs2();
  // Ryser cancellation can leave a tiny negative value for a true zero.
  return std::max(0.0, permanent(weights) / factorial_product(s));
}

double prob_species(const ComplexMatrix& u, const SpeciesPartition& partition,
                    const ModeOccupation& s) {
  require_same_photons(partition.total(), s, "prob_species");
  require_unitary_shape(u, s.modes(), "prob_species");
  return species_sum(u, partition.species(), 0, s.counts());
}

FockDistribution convolve(const FockDistribution& a, const FockDistribution& b) {
  if (a.modes != b.modes) throw DimensionError("convolve: mode count mismatch");
  FockDistribution out = FockDistribution::zeros(a.photons + b.photons, a.modes);
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    if (a.probs[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.probs.size(); ++j) {
      if (b.probs[j] == 0.0) continue;
      out.probs[colex_rank(a.basis[i] + b.basis[j])] += a.probs[i] * b.probs[j];
    }
  }
  return out;
}

FockDistribution output_distribution(const ComplexMatrix& u, const ModeOccupation& r,
                                     const DistinguishabilityModel& model) {
  require_unitary_shape(u, r.modes(), "output_distribution");
  struct Visitor {
    const ComplexMatrix& u;
    const ModeOccupation& r;
    FockDistribution operator()(const Indistinguishable&) const {
      return pattern_distribution(u, r, false);
    }
    FockDistribution operator()(const Distinguishable&) const {
      return pattern_distribution(u, r, true);
    }
    FockDistribution operator()(const SpeciesPartition& partition) const {
      validate_partition_input(partition, r);
      return species_distribution(u, partition);
    }
    FockDistribution operator()(const Mixture& mixture) const {
      if (mixture.components.empty()) throw DomainError("mixture has no components");
      double weight_sum = 0.0;
      for (const auto& c : mixture.components) {
        if (!(c.weight >= 0.0)) throw DomainError("mixture weights must be non-negative");
        validate_partition_input(c.partition, r);
        weight_sum += c.weight;
      }
      if (std::abs(weight_sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "mixture weights sum to " << weight_sum << ", expected 1";
        throw DomainError(os.str());
      }
      FockDistribution out = FockDistribution::zeros(r.photons(), r.modes());
      for (const auto& c : mixture.components) {
        if (c.weight == 0.0) continue;
        const FockDistribution part = species_distribution(u, c.partition);
        for (std::size_t i = 0; i < out.probs.size(); ++i) out.probs[i] += c.weight * part.probs[i];
      }
      return out;
    }
  };
  return std::visit(Visitor{u, r}, model);
}

ComplexVector state_vector(const ComplexMatrix& u, const ModeOccupation& r) {
  require_unitary_shape(u, r.modes(), "state_vector");
  const std::vector<ModeOccupation> basis = enumerate_basis(r.photons(), r.modes());
  ComplexVector amps(static_cast<Eigen::Index>(basis.size()));
  parallel_for(basis.size(), [&](std::size_t i) {
    amps(static_cast<Eigen::Index>(i)) = transition_amplitude(u, r, basis[i]);
  });
  return amps;
}

// --------------------------------------------------------------------- sampling

FockSampler::FockSampler(const FockDistribution& dist) : basis_(dist.basis) {
  if (dist.probs.empty() || dist.probs.size() != dist.basis.size()) {
    throw DomainError("FockSampler: empty or malformed distribution");
  }
  cdf_.resize(dist.probs.size());
  double running = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] < 0.0) throw DomainError("FockSampler: negative probability");
    running += dist.probs[i];
    cdf_[i] = running;
    if (dist.probs[i] > 0.0) {
      last_positive_ = i;
      any = true;
    }
  }
  if (!any) throw DomainError("FockSampler: distribution has no mass");
}

std::size_t FockSampler::draw_index(Rng& rng) const {
  const double u = uniform01(rng) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return last_positive_;
  return static_cast<std::size_t>(it - cdf_.begin());
}

std::vector<ModeOccupation> sample(const FockDistribution& dist, std::size_t count,
                                   std::uint64_t seed) {
  const FockSampler sampler(dist);
  Rng rng(seed);
  std::vector<ModeOccupation> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.draw(rng));
  return out;
}

}  // namespace photherm

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "photherm/linalg.hpp"
#include "photherm/random.hpp"

namespace photherm {

/// Photon counts per mode, the Fock basis label (n_1, ..., n_m).
class ModeOccupation {
 public:
  ModeOccupation() = default;
  explicit ModeOccupation(std::vector<int> counts);
  ModeOccupation(std::initializer_list<int> counts);

  static ModeOccupation vacuum(int modes);
  /// One photon in each of the first `photons` modes: |1,...,1,0,...,0>.
  static ModeOccupation first_modes(int photons, int modes);
  /// Inverse of assignment(): builds counts from 1-based mode numbers.
  static ModeOccupation from_assignment(std::span<const int> modes_one_based, int modes);
  /// Parses "1 1 1 0" (whitespace or comma separated).
  static ModeOccupation parse(const std::string& text);

  int modes() const { return static_cast<int>(counts_.size()); }
  int photons() const { return photons_; }
  int operator[](int mode) const { return counts_[static_cast<std::size_t>(mode)]; }
  const std::vector<int>& counts() const { return counts_; }

  /// Mode assignment list d(q): 1-based mode of each photon, non-decreasing.
  std::vector<int> assignment() const;

  std::string to_string() const;

  friend bool operator==(const ModeOccupation& a, const ModeOccupation& b) {
    return a.counts_ == b.counts_;
  }
  friend auto operator<=>(const ModeOccupation& a, const ModeOccupation& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  std::vector<int> counts_;
  int photons_ = 0;
};

ModeOccupation operator+(const ModeOccupation& a, const ModeOccupation& b);

/// Canonical basis order: lexicographic on the reversed count vector.
bool colex_less(const ModeOccupation& a, const ModeOccupation& b);

/// Position of `occ` in enumerate_basis(occ.photons(), occ.modes()).
std::size_t colex_rank(const ModeOccupation& occ);

/// Number of n-photon patterns on m modes, C(n+m-1, n).
std::size_t basis_size(int n, int m);

/// All weak compositions of n into m parts, in colex order.
std::vector<ModeOccupation> enumerate_basis(int n, int m);

/// Grouping of the input photons into mutually distinguishable species; photons
/// inside one species are perfectly indistinguishable.
class SpeciesPartition {
 public:
  explicit SpeciesPartition(std::vector<ModeOccupation> species);

  static SpeciesPartition single(const ModeOccupation& input);
  static SpeciesPartition singletons(const ModeOccupation& input);
  /// `groups` lists 0-based photon indices into input.assignment().
  static SpeciesPartition from_photon_groups(const ModeOccupation& input,
                                             const std::vector<std::vector<int>>& groups);

  const std::vector<ModeOccupation>& species() const { return species_; }
  ModeOccupation total() const;
  int modes() const { return species_.front().modes(); }
  int photons() const;
  /// Species sizes sorted in decreasing order, e.g. {2, 1}.
  std::vector<int> sizes() const;

 private:
  std::vector<ModeOccupation> species_;
};

struct Indistinguishable {};
struct Distinguishable {};

struct MixtureComponent {
  double weight = 0.0;
  SpeciesPartition partition;
};

/// Convex combination of species configurations.
struct Mixture {
  std::vector<MixtureComponent> components;
};

using DistinguishabilityModel =
    std::variant<Indistinguishable, Distinguishable, SpeciesPartition, Mixture>;

std::string describe(const DistinguishabilityModel& model);

/// Each photon p sits in a shared internal mode with probability a_p and in a
/// private orthogonal mode otherwise; pair overlaps are then a_p a_q. Returns
/// the induced mixture over species partitions.
Mixture shared_mode_mixture(const ModeOccupation& input, std::span<const double> shared_probability);

/// Solves a_p a_q = overlap(p, q) for the shared-mode probabilities (least
/// squares in log space, exact for three photons) and returns the mixture.
Mixture mixture_from_pair_overlaps(const ModeOccupation& input, const RealMatrix& overlaps);

/// Probability distribution over enumerate_basis(photons, modes).
struct FockDistribution {
  int photons = 0;
  int modes = 1;
  std::vector<ModeOccupation> basis;
  std::vector<double> probs;

  static FockDistribution zeros(int photons, int modes);
  static FockDistribution point_mass(const ModeOccupation& occ);

  double total() const;
  double probability(const ModeOccupation& occ) const;
  std::size_t index_of(const ModeOccupation& occ) const;
  /// Throws DomainError unless probs are non-negative and sum to 1 within tol.
  void validate(double tol = 1e-9) const;
};

inline constexpr int kMaxPermanentSize = 24;

/// Ryser's formula with Gray-code subset order, O(2^n n). Empty matrix -> 1.
Complex permanent(const ComplexMatrix& m);
double permanent(const RealMatrix& m);

/// Rows selected by d(s), columns by d(r), repeated for multiply-occupied modes.
ComplexMatrix submatrix(const ComplexMatrix& u, const ModeOccupation& r, const ModeOccupation& s);

/// <s|U(V)|r> = perm(M) / sqrt(prod r_j! s_j!).
Complex transition_amplitude(const ComplexMatrix& u, const ModeOccupation& r,
                             const ModeOccupation& s);
double prob_indistinguishable(const ComplexMatrix& u, const ModeOccupation& r,
                              const ModeOccupation& s);
double prob_distinguishable(const ComplexMatrix& u, const ModeOccupation& r,
                            const ModeOccupation& s);
/// Sum over decompositions s = sum_i s_i of prod_i prob_indistinguishable(U, r_i, s_i).
double prob_species(const ComplexMatrix& u, const SpeciesPartition& partition,
                    const ModeOccupation& s);

FockDistribution output_distribution(const ComplexMatrix& u, const ModeOccupation& r,
                                     const DistinguishabilityModel& model);

/// Distribution of the pattern sum of two independent photon groups.
FockDistribution convolve(const FockDistribution& a, const FockDistribution& b);

/// Amplitudes <s|U(V)|r> over enumerate_basis(n, m).
ComplexVector state_vector(const ComplexMatrix& u, const ModeOccupation& r);

/// Inverse-CDF sampler over the canonical order.
class FockSampler {
 public:
  explicit FockSampler(const FockDistribution& dist);
  std::size_t draw_index(Rng& rng) const;
  const ModeOccupation& draw(Rng& rng) const { return basis_[draw_index(rng)]; }

 private:
  std::vector<ModeOccupation> basis_;
  std::vector<double> cdf_;
  std::size_t last_positive_ = 0;
};

std::vector<ModeOccupation> sample(const FockDistribution& dist, std::size_t count,
                                   std::uint64_t seed);

}  // namespace photherm

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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "photherm/apparatus.hpp"
#include "photherm/fock.hpp"
#include "photherm/hamiltonian.hpp"

namespace photherm {

/// True when the suppression law forbids s after the n-point Fourier transform of
/// a period-`period` input: mod(period * sum_j d_j(s), n) != 0 over the 1-based
/// mode assignment. Patterns with photons beyond mode n are never in the set.
bool is_forbidden(const ModeOccupation& s, int n, int period = 1);

struct ForbiddenSet {
  int n = 0;
  int m = 0;
  int period = 1;
  std::vector<ModeOccupation> patterns;

  bool contains(const ModeOccupation& s) const;
};

ForbiddenSet forbidden_patterns(int n, int m, int period = 1);

/// Allowed complement on the first n modes.
std::vector<ModeOccupation> allowed_patterns(int n, int m, int period = 1);

/// Exact probability that a species configuration yields a forbidden pattern
/// after fourier(n, m), the input being one photon in each of the first n modes.
double forbidden_probability(const SpeciesPartition& partition, int m);

struct LambdaClass {
  std::vector<int> sizes;  // species sizes, decreasing
  double lambda = 0.0;     // mean over placements
  double spread = 0.0;     // max - min over placements
  std::size_t placements = 0;

  std::string label() const;  // e.g. "2+1"
};

/// One entry per species-size multiset with at least two species, computed over
/// every assignment of the n photons to species. Throws CapacityError for n > 6.
std::vector<LambdaClass> lambda_coefficients(int n, int m);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t shots = 0;
};

/// Forbidden-outcome frequency when every species is sampled independently from
/// its own output distribution and the patterns are added.
MonteCarloEstimate lambda_monte_carlo(const SpeciesPartition& partition, int m, std::size_t shots,
                                      std::uint64_t seed);

/// Whether photons beyond mode n count as forbidden when estimating p2.
enum class LeakagePolicy { Forbidden, Ignore };

struct Estimate {
  double value = 0.0;
  std::size_t hits = 0;
  std::size_t count = 0;
};

Estimate estimate_p1(std::span<const ModeOccupation> samples, const ModeOccupation& target);
Estimate estimate_p2(std::span<const ModeOccupation> samples, const ForbiddenSet& fs,
                     LeakagePolicy leakage = LeakagePolicy::Forbidden);

/// sqrt(2 variance / (k ln(1/epsilon))).
double chebyshev_delta(double variance, std::size_t k, double epsilon);

inline constexpr double kBernoulliVariance = 0.25;

enum class VarianceMode { Bernoulli, Empirical };

struct CertificationResult {
  double p1 = 0.0;
  std::size_t k1 = 0;
  double p2 = 0.0;
  std::size_t k2 = 0;
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  double epsilon = 0.0;  // epsilon1 * epsilon2
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta = 0.0;
  double lambda_min = 0.0;
  double f_lower = 0.0;
  double witness_threshold = 1.0;
  bool entangled = false;
  /// Same bound with epsilon read as an error probability (ln(1/(1 - epsilon))).
  double delta_error_reading = 0.0;
  double f_lower_error_reading = 0.0;
};

/// f_lower = p1 - p2 / min(lambdas) - delta(eps1) - delta(eps2).
CertificationResult fidelity_bound(double p1, std::size_t k1, double p2, std::size_t k2,
                                   std::span<const double> lambdas, double epsilon1,
                                   double epsilon2, VarianceMode variance = VarianceMode::Bernoulli,
                                   double witness_threshold = 1.0);

/// min lambda used for three photons in the published bound, giving the 9/4 factor.
/// Exact species summation gives 2/3 for both three-photon classes.
inline constexpr double kThreePhotonConservativeLambda = 4.0 / 9.0;

CertificationResult fidelity_bound_three_photon(double p1, std::size_t k1, double p2,
                                                std::size_t k2, double epsilon1, double epsilon2,
                                                VarianceMode variance = VarianceMode::Bernoulli,
                                                double witness_threshold = 1.0);

/// Amplitudes of U|r> arranged as (occupations of modes 1..partition_mode) x
/// (occupations of the rest).
ComplexMatrix schmidt_matrix(const ComplexMatrix& u, const ModeOccupation& r, int partition_mode);

/// Largest squared Schmidt coefficient across the bipartition.
double witness_threshold(const ComplexMatrix& u, const ModeOccupation& r, int partition_mode = 1);

enum class LambdaPolicy { Conservative, Computed };

struct CertifyOptions {
  int photons = 3;
  std::size_t shots = 100000;  // per setting
  std::uint64_t seed = 0;
  std::vector<double> epsilons = {0.7, 0.8, 0.9};  // used as epsilon1 = epsilon2
  int partition_mode = 1;
  int batches = 20;
  VarianceMode variance = VarianceMode::Bernoulli;
  LambdaPolicy lambda_policy = LambdaPolicy::Conservative;
  LeakagePolicy leakage = LeakagePolicy::Forbidden;
  std::optional<ApparatusModel> apparatus;
};

struct ConvergencePoint {
  int batch = 0;
  std::size_t shots = 0;
  double inv_sqrt_shots = 0.0;
  double epsilon = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double delta = 0.0;
  double f_lower = 0.0;
};

struct CertificationRun {
  double t = 0.0;
  std::vector<LambdaClass> lambdas;
  double lambda_min = 0.0;
  double witness_threshold = 1.0;
  Estimate p1;
  Estimate p2;
  std::vector<CertificationResult> results;  // one per epsilon
  std::vector<ConvergencePoint> convergence;
};

/// Two-setting protocol for U = evolution(spec, t). Setting 1 measures U^dagger U,
/// setting 2 measures U_F U^dagger U; with an apparatus, each half of the chip is
/// realized through its own jittered mesh and counts go through detection and
/// the resolution correction.
CertificationRun certify(const HamiltonianSpec& spec, double t, const DistinguishabilityModel& model,
                         const CertifyOptions& options);

}  // namespace photherm

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

#include "photherm/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "photherm/errors.hpp"
#include "photherm/linalg.hpp"
#include "photherm/parallel.hpp"

namespace photherm {

namespace {

bool leaks(const ModeOccupation& s, int n) {
  for (int j = n; j < s.modes(); ++j) {
    if (s[j] > 0) return true;
  }
  return false;
}

// Restricted growth strings: every set partition of {0, ..., n-1}.
void set_partitions(int n, std::vector<int>& labels, int next, int used,
                    const std::function<void(const std::vector<int>&, int)>& visit) {
  if (next == n) {
    visit(labels, used);
    return;
  }
  for (int b = 0; b <= used; ++b) {
    labels[static_cast<std::size_t>(next)] = b;
    set_partitions(n, labels, next + 1, std::max(used, b + 1), visit);
  }
}

struct SettingCounts {
  std::vector<std::size_t> patterns;  // colex-indexed tallies
  std::size_t kept = 0;
};

double variance_for(VarianceMode mode, double p) {
  return mode == VarianceMode::Bernoulli ? kBernoulliVariance : p * (1.0 - p);
}

}  // namespace

bool is_forbidden(const ModeOccupation& s, int n, int period) {
  if (n < 1) throw DomainError("is_forbidden: need n >= 1");
  if (s.photons() != n) throw DomainError("is_forbidden: pattern does not hold n photons");
  if (leaks(s, n)) return false;
  long long sum = 0;
  for (int d : s.assignment()) sum += d;
  return (static_cast<long long>(period) * sum) % n != 0;
}

bool ForbiddenSet::contains(const ModeOccupation& s) const {
  return std::binary_search(patterns.begin(), patterns.end(), s, colex_less);
}

ForbiddenSet forbidden_patterns(int n, int m, int period) {
  if (n < 1 || m < n) throw DimensionError("forbidden_patterns: need 1 <= n <= m");
  ForbiddenSet fs{n, m, period, {}};
  for (const auto& s : enumerate_basis(n, m)) {
    if (is_forbidden(s, n, period)) fs.patterns.push_back(s);
  }
  return fs;
}

std::vector<ModeOccupation> allowed_patterns(int n, int m, int period) {
  if (n < 1 || m < n) throw DimensionError("allowed_patterns: need 1 <= n <= m");
  std::vector<ModeOccupation> out;
  for (const auto& s : enumerate_basis(n, m)) {
    if (!leaks(s, n) && !is_forbidden(s, n, period)) out.push_back(s);
  }
  return out;
}

double forbidden_probability(const SpeciesPartition& partition, int m) {
  const int n = partition.photons();
  const ModeOccupation input = ModeOccupation::first_modes(n, m);
  if (partition.total() != input) {
    throw DomainError("forbidden_probability: species must fill the first n modes once each");
  }
  const FockDistribution dist = output_distribution(fourier(n, m), input, partition);
  double p = 0.0;
  for (std::size_t i = 0; i < dist.basis.size(); ++i) {
    if (is_forbidden(dist.basis[i], n)) p += dist.probs[i];
  }
  return p;
}

std::string LambdaClass::label() const {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += '+';
    out += std::to_string(sizes[i]);
  }
  return out;
}

std::vector<LambdaClass> lambda_coefficients(int n, int m) {
  if (n > 6) throw CapacityError("lambda_coefficients: brute force limited to n <= 6");
  if (n < 1 || m < n) throw DimensionError("lambda_coefficients: need 1 <= n <= m");
  const ModeOccupation input = ModeOccupation::first_modes(n, m);
  std::map<std::vector<int>, std::vector<double>, std::greater<>> by_class;
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  set_partitions(n, labels, 0, 0, [&](const std::vector<int>& lab, int blocks) {
    if (blocks < 2) return;
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(blocks));
    for (int q = 0; q < n; ++q) groups[static_cast<std::size_t>(lab[static_cast<std::size_t>(q)])].push_back(q);
    const SpeciesPartition partition = SpeciesPartition::from_photon_groups(input, groups);
    by_class[partition.sizes()].push_back(forbidden_probability(partition, m));
  });
  std::vector<LambdaClass> out;
  for (const auto& [sizes, values] : by_class) {
    LambdaClass c;
    c.sizes = sizes;
    c.placements = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    c.lambda = sum / static_cast<double>(values.size());
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    c.spread = *hi - *lo;
    out.push_back(c);
  }
  return out;
}

MonteCarloEstimate lambda_monte_carlo(const SpeciesPartition& partition, int m, std::size_t shots,
                                      std::uint64_t seed) {
  if (shots == 0) throw DomainError("lambda_monte_carlo: need at least one shot");
  const int n = partition.photons();
  if (partition.total() != ModeOccupation::first_modes(n, m)) {
    throw DomainError("lambda_monte_carlo: species must fill the first n modes once each");
  }
  const ComplexMatrix f = fourier(n, m);
  std::vector<FockSampler> samplers;
  for (const auto& species : partition.species()) {
    samplers.emplace_back(output_distribution(f, species, Indistinguishable{}));
  }
  Rng rng(seed);
  std::size_t hits = 0;
  std::vector<int> counts(static_cast<std::size_t>(m));
  for (std::size_t shot = 0; shot < shots; ++shot) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& sampler : samplers) {
      const ModeOccupation& part = sampler.draw(rng);
      for (int j = 0; j < m; ++j) counts[static_cast<std::size_t>(j)] += part[j];
    }
    if (is_forbidden(ModeOccupation(counts), n)) ++hits;
  }
  MonteCarloEstimate est;
  est.shots = shots;
  est.mean = static_cast<double>(hits) / static_cast<double>(shots);
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(shots));
  return est;
}

Estimate estimate_p1(std::span<const ModeOccupation> samples, const ModeOccupation& target) {
  if (samples.empty()) throw DomainError("estimate_p1: no samples");
  Estimate e;
  e.count = samples.size();
  for (const auto& s : samples) {
    if (s == target) ++e.hits;
  }
  e.value = static_cast<double>(e.hits) / static_cast<double>(e.count);
  return e;
}

Estimate estimate_p2(std::span<const ModeOccupation> samples, const ForbiddenSet& fs,
                     LeakagePolicy leakage) {
  if (samples.empty()) throw DomainError("estimate_p2: no samples");
  Estimate e;
  for (const auto& s : samples) {
    const bool leaked = leaks(s, fs.n);
    if (leaked && leakage == LeakagePolicy::Ignore) continue;
    ++e.count;
    if (leaked || fs.contains(s)) ++e.hits;
  }
  if (e.count == 0) throw DomainError("estimate_p2: every sample left the Fourier modes");
  e.value = static_cast<double>(e.hits) / static_cast<double>(e.count);
  return e;
}

double chebyshev_delta(double variance, std::size_t k, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("chebyshev_delta: epsilon must lie in (0, 1)");
  if (k == 0) throw DomainError("chebyshev_delta: need at least one sample");
  if (!(variance >= 0.0)) throw DomainError("chebyshev_delta: variance must be non-negative");
  return std::sqrt(2.0 * variance / (static_cast<double>(k) * std::log(1.0 / epsilon)));
}

CertificationResult fidelity_bound(double p1, std::size_t k1, double p2, std::size_t k2,
                                   std::span<const double> lambdas, double epsilon1,
                                   double epsilon2, VarianceMode variance,
                                   double witness_threshold) {
  if (lambdas.empty()) throw DomainError("fidelity_bound: no lambda coefficients");
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
    throw DomainError("fidelity_bound: probabilities must lie in [0, 1]");
  }
  const double lambda_min = *std::min_element(lambdas.begin(), lambdas.end());
  if (!(lambda_min > 0.0)) throw DomainError("fidelity_bound: lambda coefficients must be positive");
  CertificationResult r;
  r.p1 = p1;
  r.k1 = k1;
  r.p2 = p2;
  r.k2 = k2;
  r.epsilon1 = epsilon1;
  r.epsilon2 = epsilon2;
  r.epsilon = epsilon1 * epsilon2;
  const double v1 = variance_for(variance, p1);
  const double v2 = variance_for(variance, p2);
  r.delta1 = chebyshev_delta(v1, k1, epsilon1);
  r.delta2 = chebyshev_delta(v2, k2, epsilon2);
  r.delta = r.delta1 + r.delta2;
  r.lambda_min = lambda_min;
  r.f_lower = p1 - p2 / lambda_min - r.delta;
  r.witness_threshold = witness_threshold;
  r.entangled = r.f_lower > witness_threshold;
  r.delta_error_reading =
      chebyshev_delta(v1, k1, 1.0 - epsilon1) + chebyshev_delta(v2, k2, 1.0 - epsilon2);
  r.f_lower_error_reading = p1 - p2 / lambda_min - r.delta_error_reading;
  return r;
}

CertificationResult fidelity_bound_three_photon(double p1, std::size_t k1, double p2,
                                                std::size_t k2, double epsilon1, double epsilon2,
                                                VarianceMode variance, double witness_threshold) {
  const double lambdas[] = {kThreePhotonConservativeLambda};
  return fidelity_bound(p1, k1, p2, k2, lambdas, epsilon1, epsilon2, variance, witness_threshold);
}

ComplexMatrix schmidt_matrix(const ComplexMatrix& u, const ModeOccupation& r, int partition_mode) {
  const int m = r.modes();
  if (partition_mode < 1 || partition_mode >= m) {
    std::ostringstream os;
    os << "witness bipartition after mode " << partition_mode << " leaves one side empty";
    throw DomainError(os.str());
  }
  const ComplexVector amps = state_vector(u, r);
  const std::vector<ModeOccupation> basis = enumerate_basis(r.photons(), m);
  std::map<std::vector<int>, Eigen::Index> rows;
  std::map<std::vector<int>, Eigen::Index> cols;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> where(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& c = basis[i].counts();
    std::vector<int> a(c.begin(), c.begin() + partition_mode);
    std::vector<int> b(c.begin() + partition_mode, c.end());
    const auto ra = rows.emplace(a, static_cast<Eigen::Index>(rows.size())).first->second;
    const auto cb = cols.emplace(b, static_cast<Eigen::Index>(cols.size())).first->second;
    where[i] = {ra, cb};
  }
  ComplexMatrix psi = ComplexMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                          static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    psi(where[i].first, where[i].second) = amps(static_cast<Eigen::Index>(i));
  }
  return psi;
}

double witness_threshold(const ComplexMatrix& u, const ModeOccupation& r, int partition_mode) {
  const Eigen::VectorXd sv = singular_values(schmidt_matrix(u, r, partition_mode));
  return sv(0) * sv(0);
}

CertificationRun certify(const HamiltonianSpec& spec, double t, const DistinguishabilityModel& model,
                         const CertifyOptions& options) {
  if (options.shots == 0) throw DomainError("certify: need at least one shot");
  if (options.batches < 1) throw DomainError("certify: need at least one batch");
  if (options.epsilons.empty()) throw DomainError("certify: no epsilon values");
  const int m = spec.modes;
  const int n = options.photons;
  const ModeOccupation input = ModeOccupation::first_modes(n, m);
  const ComplexMatrix u = evolution(spec, t);
  const ComplexMatrix u_f = fourier(n, m);
  const ForbiddenSet fs = forbidden_patterns(n, m);

  CertificationRun run;
  run.t = t;
  run.lambdas = lambda_coefficients(n, m);
  if (run.lambdas.empty()) throw DomainError("certify: need at least two photons");
  run.lambda_min = run.lambdas.front().lambda;
  for (const auto& c : run.lambdas) run.lambda_min = std::min(run.lambda_min, c.lambda);
  if (options.lambda_policy == LambdaPolicy::Conservative && n == 3) {
    run.lambda_min = std::min(run.lambda_min, kThreePhotonConservativeLambda);
  }
  run.witness_threshold = witness_threshold(u, input, options.partition_mode);

  const std::vector<ModeOccupation> basis = enumerate_basis(n, m);
  // Correction weight per pattern: 1 / prod P_i(n_i|n_i) with an apparatus, else 1.
  std::vector<double> weight(basis.size(), 1.0);
  ComplexMatrix section1 = u;
  if (options.apparatus) {
    const DetectionModel& det = options.apparatus->detection;
    det.validate();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double prob = 1.0;
      for (int mode = 0; mode < m; ++mode) prob *= resolution_probability(det, mode, basis[i][mode]);
      weight[i] = prob > 0.0 ? 1.0 / prob : 0.0;
    }
    section1 = mesh_perturb(u, options.apparatus->mesh_jitter, derive_seed(options.seed, 10));
  }

  const auto batches = static_cast<std::size_t>(options.batches);
  std::vector<std::size_t> batch_shots(batches, options.shots / batches);
  for (std::size_t b = 0; b < options.shots % batches; ++b) ++batch_shots[b];

  auto run_setting = [&](int setting) {
    const ComplexMatrix target2 = setting == 1 ? ComplexMatrix(u.adjoint()) : ComplexMatrix(u_f * u.adjoint());
    const std::uint64_t setting_seed = derive_seed(options.seed, static_cast<std::uint64_t>(setting));
    std::vector<SettingCounts> counts(batches);
    if (options.apparatus) {
      const ApparatusModel& app = *options.apparatus;
      const ComplexMatrix section2 =
          mesh_perturb(target2, app.mesh_jitter, derive_seed(options.seed, 10 + static_cast<std::uint64_t>(setting)));
      const ComplexMatrix w = section2 * section1;
      parallel_for(batches, [&](std::size_t b) {
        SettingCounts& c = counts[b];
        c.patterns.assign(basis.size(), 0);
        if (batch_shots[b] == 0) return;
        const auto records = simulate_clicks(w, input, model, app, batch_shots[b],
                                             derive_seed(setting_seed, b), setting == 1);
        for (const auto& rec : records) {
          if (!rec.herald || static_cast<int>(rec.fired.size()) != n) continue;
          ++c.patterns[colex_rank(click_pattern(rec, app.detection))];
          ++c.kept;
        }
      });
    } else {
      const FockSampler sampler(output_distribution(target2 * u, input, model));
      parallel_for(batches, [&](std::size_t b) {
        SettingCounts& c = counts[b];
        c.patterns.assign(basis.size(), 0);
        Rng rng(derive_seed(setting_seed, b));
        for (std::size_t i = 0; i < batch_shots[b]; ++i) ++c.patterns[sampler.draw_index(rng)];
        c.kept = batch_shots[b];
      });
    }
    return counts;
  };
  const std::vector<SettingCounts> setting1 = run_setting(1);
  const std::vector<SettingCounts> setting2 = run_setting(2);

  const std::size_t target_index = colex_rank(input);
  auto p1_of = [&](const std::vector<std::size_t>& tally) {
    Estimate e;
    double total = 0.0;
    for (std::size_t i = 0; i < tally.size(); ++i) {
      total += weight[i] * static_cast<double>(tally[i]);
      e.count += tally[i];
    }
    e.hits = tally[target_index];
    e.value = total > 0.0 ? weight[target_index] * static_cast<double>(tally[target_index]) / total : 0.0;
    return e;
  };
  auto p2_of = [&](const std::vector<std::size_t>& tally) {
    Estimate e;
    double total = 0.0;
    double forbidden = 0.0;
    for (std::size_t i = 0; i < tally.size(); ++i) {
      const bool leaked = leaks(basis[i], n);
      if (leaked && options.leakage == LeakagePolicy::Ignore) continue;
      const double w = weight[i] * static_cast<double>(tally[i]);
      total += w;
      e.count += tally[i];
      if (leaked || fs.contains(basis[i])) {
        forbidden += w;
        e.hits += tally[i];
      }
    }
    e.value = total > 0.0 ? forbidden / total : 0.0;
    return e;
  };

  std::vector<std::size_t> cum1(basis.size(), 0);
  std::vector<std::size_t> cum2(basis.size(), 0);
  const double lambdas[] = {run.lambda_min};
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      cum1[i] += setting1[b].patterns[i];
      cum2[i] += setting2[b].patterns[i];
    }
    run.p1 = p1_of(cum1);
    run.p2 = p2_of(cum2);
    if (run.p1.count == 0 || run.p2.count == 0) continue;
    for (double eps : options.epsilons) {
      const CertificationResult r = fidelity_bound(run.p1.value, run.p1.count, run.p2.value, run.p2.count,
                                                   lambdas, eps, eps, options.variance, run.witness_threshold);
      ConvergencePoint point;
      point.batch = static_cast<int>(b) + 1;
      point.shots = std::min(run.p1.count, run.p2.count);
      point.inv_sqrt_shots = 1.0 / std::sqrt(static_cast<double>(point.shots));
      point.epsilon = eps;
      point.p1 = r.p1;
      point.p2 = r.p2;
      point.delta = r.delta;
      point.f_lower = r.f_lower;
      run.convergence.push_back(point);
    }
  }
  if (run.p1.count == 0 || run.p2.count == 0) {
    throw DomainError("certify: no post-selected events in one of the settings");
  }
  for (double eps : options.epsilons) {
    run.results.push_back(fidelity_bound(run.p1.value, run.p1.count, run.p2.value, run.p2.count, lambdas,
                                         eps, eps, options.variance, run.witness_threshold));
  }
  return run;
}

}  // namespace photherm

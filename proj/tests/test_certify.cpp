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

#include <doctest.h>

#include <cmath>

#include "photherm/certify.hpp"
#include "photherm/errors.hpp"
#include "photherm/oracles.hpp"

using namespace photherm;

TEST_SUITE("certify") {

TEST_CASE("suppression law by hand") {
  CHECK(is_forbidden({2, 1, 0, 0}, 3));
  CHECK_FALSE(is_forbidden({1, 1, 1, 0}, 3));
  const auto allowed = allowed_patterns(3, 4);
  const std::vector<ModeOccupation> expected{{1, 1, 1, 0}, {3, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 3, 0}};
  CHECK(allowed.size() == expected.size());
  for (const auto& e : expected) CHECK(std::find(allowed.begin(), allowed.end(), e) != allowed.end());
  const ForbiddenSet fs = forbidden_patterns(3, 4);
  CHECK(fs.contains({2, 1, 0, 0}));
  CHECK_FALSE(fs.contains({1, 1, 1, 0}));
}

TEST_CASE("suppression law holds on exact Fourier outputs") {
  for (int n = 2; n <= 5; ++n) {
    for (int m = n; m <= n + 2; ++m) {
      const FockDistribution d = output_distribution(fourier(n, m), ModeOccupation::first_modes(n, m), Indistinguishable{});
      for (std::size_t i = 0; i < d.basis.size(); ++i) {
        if (is_forbidden(d.basis[i], n)) CHECK(d.probs[i] < 1e-12);
      }
    }
  }
}

TEST_CASE("lambda coefficients") {
  const auto two = lambda_coefficients(2, 2);
  REQUIRE(two.size() == 1);
  CHECK(two[0].label() == "1+1");
  CHECK(two[0].lambda == doctest::Approx(0.5).epsilon(1e-12));

  const auto three = lambda_coefficients(3, 4);
  REQUIRE(three.size() == 2);
  CHECK(three[0].label() == "2+1");
  CHECK(three[1].label() == "1+1+1");
  CHECK(three[1].lambda == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  for (const auto& c : three) CHECK(c.spread < 1e-12);
  CHECK(three[0].placements == 3);

  CHECK_THROWS_AS(lambda_coefficients(7, 8), CapacityError);
}

TEST_CASE("lambda for 2+1 agrees with the internal-mode oracle and Monte Carlo") {
  const ModeOccupation r{1, 1, 1, 0};
  for (const auto& groups : std::vector<std::vector<std::vector<int>>>{{{0, 1}, {2}}, {{0, 2}, {1}}, {{1, 2}, {0}}}) {
    const SpeciesPartition part = SpeciesPartition::from_photon_groups(r, groups);
    const FockDistribution ref = oracle::internal_mode_distribution(fourier(3, 4), part);
    double lambda = 0.0;
    for (std::size_t i = 0; i < ref.basis.size(); ++i) {
      if (is_forbidden(ref.basis[i], 3)) lambda += ref.probs[i];
    }
    CHECK(forbidden_probability(part, 4) == doctest::Approx(lambda).epsilon(1e-12));
    const MonteCarloEstimate mc = lambda_monte_carlo(part, 4, 50000, 3);
    CHECK(std::abs(mc.mean - lambda) < 4 * mc.std_error);
  }
}

TEST_CASE("estimators") {
  const ModeOccupation target{1, 1, 1, 0};
  const std::vector<ModeOccupation> all(10, target);
  CHECK(estimate_p1(all, target).value == 1.0);
  const std::vector<ModeOccupation> none(10, ModeOccupation{2, 1, 0, 0});
  CHECK(estimate_p1(none, target).value == 0.0);
  const ForbiddenSet fs = forbidden_patterns(3, 4);
  CHECK(estimate_p2(none, fs).value == 1.0);
  CHECK(estimate_p2(all, fs).value == 0.0);
  CHECK_THROWS_AS(estimate_p1(std::vector<ModeOccupation>{}, target), DomainError);
  CHECK_THROWS_AS(estimate_p2(std::vector<ModeOccupation>{}, fs), DomainError);

  const std::vector<ModeOccupation> leaked{{0, 0, 0, 3}, {1, 1, 1, 0}};
  CHECK(estimate_p2(leaked, fs, LeakagePolicy::Forbidden).value == doctest::Approx(0.5));
  const Estimate ignored = estimate_p2(leaked, fs, LeakagePolicy::Ignore);
  CHECK(ignored.count == 1);
  CHECK(ignored.value == 0.0);
}

TEST_CASE("chebyshev delta") {
  CHECK(chebyshev_delta(0.0, 100, 0.5) == 0.0);
  CHECK(chebyshev_delta(0.25, 1000, 0.1) == doctest::Approx(std::sqrt(0.5 / (1000 * std::log(10.0)))).epsilon(1e-14));
  CHECK(chebyshev_delta(0.25, 1000, 0.1) == doctest::Approx(0.0147).epsilon(0.01));
  CHECK(chebyshev_delta(0.25, 4000, 0.3) == doctest::Approx(chebyshev_delta(0.25, 1000, 0.3) / 2).epsilon(1e-14));
  CHECK_THROWS_AS(chebyshev_delta(0.25, 10, 0.0), DomainError);
  CHECK_THROWS_AS(chebyshev_delta(0.25, 10, 1.0), DomainError);
}

TEST_CASE("fidelity bound arithmetic") {
  const std::vector<double> lambdas{4.0 / 9.0, 2.0 / 3.0};
  const std::size_t huge = std::size_t{1} << 60;
  CHECK(fidelity_bound(1.0, huge, 0.0, huge, lambdas, 0.9, 0.9).f_lower == doctest::Approx(1.0).epsilon(1e-6));
  const CertificationResult r = fidelity_bound(0.5, huge, 0.1, huge, lambdas, 0.9, 0.9);
  CHECK(r.f_lower == doctest::Approx(0.275).epsilon(1e-6));
  CHECK(r.lambda_min == doctest::Approx(4.0 / 9.0));
  CHECK(r.epsilon == doctest::Approx(0.81));
  CHECK(fidelity_bound_three_photon(0.5, huge, 0.1, huge, 0.9, 0.9).f_lower == doctest::Approx(0.275).epsilon(1e-6));

  const CertificationResult w = fidelity_bound(0.9, 1000, 0.05, 1000, lambdas, 0.8, 0.8, VarianceMode::Bernoulli, 0.5);
  CHECK(w.delta1 == doctest::Approx(chebyshev_delta(0.25, 1000, 0.8)));
  CHECK(w.f_lower == doctest::Approx(0.9 - 0.05 / (4.0 / 9.0) - 2 * w.delta1));
  CHECK(w.entangled == (w.f_lower > 0.5));
  CHECK_THROWS_AS(fidelity_bound(0.5, 10, 0.1, 10, std::vector<double>{}, 0.9, 0.9), DomainError);
}

TEST_CASE("witness threshold") {
  CHECK(witness_threshold(ComplexMatrix::Identity(4, 4), {1, 1, 1, 0}, 1) == doctest::Approx(1.0));
  CHECK(witness_threshold(fourier(2, 2), {1, 0}, 1) == doctest::Approx(0.5));
  const double w = witness_threshold(evolution(HamiltonianSpec::hopping(4), 1.0), {1, 1, 1, 0}, 1);
  CHECK(w < 1.0);
  CHECK(w > 0.0);
  CHECK_THROWS_AS(witness_threshold(ComplexMatrix::Identity(4, 4), {1, 1, 1, 0}, 4), DomainError);
  CHECK_THROWS_AS(witness_threshold(ComplexMatrix::Identity(4, 4), {1, 1, 1, 0}, 0), DomainError);
}

TEST_CASE("noiseless certification revives the input") {
  CertifyOptions opt;
  opt.shots = 100000;
  opt.seed = 5;
  const CertificationRun run = certify(HamiltonianSpec::hopping(4), 1.0, Indistinguishable{}, opt);
  CHECK(run.p1.value == 1.0);
  CHECK(run.p2.value == 0.0);
  REQUIRE(run.results.size() == 3);
  for (const auto& r : run.results) {
    CHECK(r.f_lower >= 1 - 2 * chebyshev_delta(0.25, 100000, r.epsilon1) - 1e-12);
    CHECK(r.entangled == (r.f_lower > run.witness_threshold));
  }
  CHECK(run.results.back().entangled);
  CHECK(run.convergence.size() == 3 * static_cast<std::size_t>(opt.batches));
  CHECK(run.convergence.back().shots == opt.shots);
}

TEST_CASE("distinguishable photons collapse the bound") {
  CertifyOptions opt;
  opt.shots = 50000;
  opt.seed = 6;
  const CertificationRun run = certify(HamiltonianSpec::hopping(4), 1.0, Distinguishable{}, opt);
  CHECK(run.p2.value == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  for (const auto& r : run.results) CHECK(r.f_lower < 0.0);
}

TEST_CASE("certification is deterministic and independent of thread count") {
  CertifyOptions opt;
  opt.shots = 20000;
  opt.seed = 77;
  opt.batches = 4;
  ApparatusModel app;
  app.source.squeezing = 0.1;
  app.detection = DetectionModel::with_blinding_fit(std::vector<double>(12, 0.3));
  app.mesh_jitter = 0.05;
  opt.apparatus = app;
  const auto a = certify(HamiltonianSpec::hopping(4), 1.0, Indistinguishable{}, opt);
  const auto b = certify(HamiltonianSpec::hopping(4), 1.0, Indistinguishable{}, opt);
  CHECK(a.results.back().f_lower == b.results.back().f_lower);
  CHECK(a.p1.hits == b.p1.hits);
}

}  // TEST_SUITE

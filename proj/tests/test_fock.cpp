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

#include <algorithm>
#include <cmath>
#include <map>

#include "photherm/certify.hpp"
#include "photherm/errors.hpp"
#include "photherm/fock.hpp"
#include "photherm/oracles.hpp"

using namespace photherm;

namespace {

ComplexMatrix splitter() { return fourier(2, 2); }

ComplexMatrix random_complex(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return a;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("basis enumeration") {
  const auto b0 = enumerate_basis(0, 3);
  REQUIRE(b0.size() == 1);
  CHECK(b0[0] == ModeOccupation{0, 0, 0});
  const auto b1 = enumerate_basis(1, 2);
  REQUIRE(b1.size() == 2);
  CHECK(std::find(b1.begin(), b1.end(), ModeOccupation{1, 0}) != b1.end());
  CHECK(std::find(b1.begin(), b1.end(), ModeOccupation{0, 1}) != b1.end());
  CHECK(enumerate_basis(3, 4).size() == 20);
  CHECK(basis_size(5, 7) == 462);
}

TEST_CASE("basis order is strict and colex_rank indexes it") {
  for (int n = 0; n <= 5; ++n) {
    for (int m = 1; m <= 6; ++m) {
      const auto basis = enumerate_basis(n, m);
      CHECK(basis.size() == basis_size(n, m));
      for (std::size_t i = 0; i < basis.size(); ++i) {
        CHECK(colex_rank(basis[i]) == i);
        CHECK(basis[i].photons() == n);
        if (i > 0) CHECK(colex_less(basis[i - 1], basis[i]));
      }
    }
  }
}

TEST_CASE("mode occupation helpers") {
  const ModeOccupation r{2, 0, 1, 0};
  CHECK(r.photons() == 3);
  CHECK(r.assignment() == std::vector<int>{1, 1, 3});
  const std::vector<int> d{1, 1, 3};
  CHECK(ModeOccupation::from_assignment(d, 4) == r);
  CHECK(ModeOccupation::parse("2 0 1 0") == r);
  CHECK(ModeOccupation::parse("[2,0,1,0]") == r);
  CHECK(ModeOccupation::parse(r.to_string()) == r);
  CHECK(ModeOccupation::first_modes(3, 4) == ModeOccupation{1, 1, 1, 0});
  CHECK_THROWS_AS(ModeOccupation({1, -1}), DomainError);
  CHECK_THROWS_AS(ModeOccupation::parse("1 x"), DomainError);
}

TEST_CASE("permanent closed forms") {
  ComplexMatrix a(2, 2);
  a << Complex(1, 2), Complex(3, -1), Complex(0.5, 0), Complex(-2, 1);
  CHECK(std::abs(permanent(a) - (a(0, 0) * a(1, 1) + a(0, 1) * a(1, 0))) < 1e-14);
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(permanent(ComplexMatrix(ComplexMatrix::Identity(n, n))) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(permanent(ComplexMatrix(ComplexMatrix::Ones(3, 3))) - Complex(6, 0)) < 1e-13);
  CHECK(std::abs(permanent(ComplexMatrix(0, 0)) - Complex(1, 0)) == 0.0);
  CHECK(permanent(RealMatrix(RealMatrix::Ones(4, 4))) == doctest::Approx(24.0));
  CHECK_THROWS_AS(permanent(ComplexMatrix(2, 3)), DimensionError);
  CHECK_THROWS_AS(permanent(ComplexMatrix(ComplexMatrix::Zero(25, 25))), CapacityError);
}

TEST_CASE("Ryser agrees with the permutation sum") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const ComplexMatrix a = random_complex(1 + trial % 7, rng);
    const Complex ref = oracle::naive_permanent(a);
    CHECK(std::abs(permanent(a) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
  const ComplexMatrix u = haar_random(6, 4).topLeftCorner(4, 4);
  CHECK(std::abs(permanent(u) - oracle::naive_permanent(u)) < 1e-12);
}

TEST_CASE("permanent is invariant under row and column permutations") {
  Rng rng(5);
  const ComplexMatrix a = random_complex(5, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(5), q(5);
  p.indices() << 3, 0, 4, 1, 2;
  q.indices() << 1, 2, 0, 4, 3;
  const ComplexMatrix b = p * a * q;
  CHECK(std::abs(permanent(a) - permanent(b)) < 1e-12 * std::abs(permanent(a)));
  CHECK(std::abs(permanent(a) - permanent(ComplexMatrix(a.transpose()))) < 1e-12 * std::abs(permanent(a)));
}

TEST_CASE("submatrix") {
  const ModeOccupation one{1, 0, 0};
  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix s1 = submatrix(id, one, one);
  REQUIRE(s1.rows() == 1);
  CHECK(std::abs(s1(0, 0) - Complex(1, 0)) == 0.0);

  const ComplexMatrix s2 = submatrix(splitter(), {1, 1}, {2, 0});
  REQUIRE(s2.rows() == 2);
  CHECK(s2.row(0) == s2.row(1));

  const ComplexMatrix u = haar_random(4, 2);
  CHECK(submatrix(u, {1, 1, 1, 0}, {1, 1, 1, 0}) == u.topLeftCorner(3, 3));
  CHECK_THROWS_AS(submatrix(u, {1, 1, 1, 0}, {1, 1, 0, 0}), DomainError);
}

TEST_CASE("Hong-Ou-Mandel") {
  CHECK(prob_indistinguishable(splitter(), {1, 1}, {1, 1}) < 1e-15);
  CHECK(prob_indistinguishable(splitter(), {1, 1}, {2, 0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(prob_distinguishable(splitter(), {1, 1}, {1, 1}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(prob_distinguishable(splitter(), {1, 1}, {2, 0}) == doctest::Approx(0.25).epsilon(1e-14));
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  CHECK(prob_indistinguishable(id, {1, 1, 1, 0}, {1, 1, 1, 0}) == doctest::Approx(1.0));
  CHECK(prob_distinguishable(id, {1, 1, 1, 0}, {1, 1, 1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("species probabilities reduce to the pure cases") {
  const ComplexMatrix u = haar_random(4, 8);
  const ModeOccupation r{1, 1, 1, 0};
  for (const auto& s : enumerate_basis(3, 4)) {
    CHECK(prob_species(u, SpeciesPartition::single(r), s) == doctest::Approx(prob_indistinguishable(u, r, s)).epsilon(1e-12));
    CHECK(prob_species(u, SpeciesPartition::singletons(r), s) == doctest::Approx(prob_distinguishable(u, r, s)).epsilon(1e-12));
  }
  CHECK(prob_species(splitter(), SpeciesPartition::singletons({1, 1}), {1, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(prob_species(u, SpeciesPartition::single(r), {1, 1, 0, 0}), DomainError);
}

TEST_CASE("species probabilities match the internal-mode oracle") {
  const ComplexMatrix u = haar_random(4, 13);
  const ModeOccupation r{2, 1, 1, 0};
  const SpeciesPartition part = SpeciesPartition::from_photon_groups(r, {{0, 2}, {1, 3}});
  const FockDistribution ref = oracle::internal_mode_distribution(u, part);
  const FockDistribution got = output_distribution(u, r, part);
  REQUIRE(got.basis == ref.basis);
  for (std::size_t i = 0; i < got.probs.size(); ++i) CHECK(std::abs(got.probs[i] - ref.probs[i]) < 1e-12);
}

TEST_CASE("2+1 species forbidden weight through the 4-mode Fourier") {
  const ModeOccupation r{1, 1, 1, 0};
  const SpeciesPartition part = SpeciesPartition::from_photon_groups(r, {{0, 1}, {2}});
  const ComplexMatrix f = fourier(3, 4);
  double forbidden = 0.0;
  for (const auto& s : enumerate_basis(3, 4)) {
    if (is_forbidden(s, 3)) forbidden += prob_species(f, part, s);
  }
  // The brute-force sum and the enlarged-space oracle both give 2/3.
  const FockDistribution ref = oracle::internal_mode_distribution(f, part);
  double ref_forbidden = 0.0;
  for (std::size_t i = 0; i < ref.basis.size(); ++i) {
    if (is_forbidden(ref.basis[i], 3)) ref_forbidden += ref.probs[i];
  }
  CHECK(forbidden == doctest::Approx(ref_forbidden).epsilon(1e-12));
  CHECK(forbidden == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("output distribution") {
  const ModeOccupation r{1, 1, 1, 0};
  const FockDistribution id = output_distribution(ComplexMatrix::Identity(4, 4), r, Indistinguishable{});
  CHECK(id.probability(r) == doctest::Approx(1.0));
  CHECK(id.total() == doctest::Approx(1.0));

  const FockDistribution f = output_distribution(fourier(3, 4), r, Indistinguishable{});
  const std::vector<ModeOccupation> allowed{{1, 1, 1, 0}, {3, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 3, 0}};
  for (std::size_t i = 0; i < f.basis.size(); ++i) {
    const bool in = std::find(allowed.begin(), allowed.end(), f.basis[i]) != allowed.end();
    if (in) {
      CHECK(f.probs[i] > 1e-3);
    } else {
      CHECK(f.probs[i] < 1e-12);
    }
  }

  Mixture bad{{{0.5, SpeciesPartition::single(r)}, {0.4, SpeciesPartition::singletons(r)}}};
  CHECK_THROWS_AS(output_distribution(fourier(3, 4), r, bad), DomainError);
}

TEST_CASE("mixtures are convex combinations") {
  const ComplexMatrix u = haar_random(4, 31);
  const ModeOccupation r{1, 1, 1, 0};
  Mixture mix{{{0.3, SpeciesPartition::single(r)}, {0.7, SpeciesPartition::singletons(r)}}};
  const FockDistribution m = output_distribution(u, r, mix);
  const FockDistribution a = output_distribution(u, r, Indistinguishable{});
  const FockDistribution b = output_distribution(u, r, Distinguishable{});
  for (std::size_t i = 0; i < m.probs.size(); ++i) CHECK(m.probs[i] == doctest::Approx(0.3 * a.probs[i] + 0.7 * b.probs[i]).epsilon(1e-12));
}

TEST_CASE("distributions are normalized for every model") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix u = haar_random(5, seed);
    const ModeOccupation r{1, 0, 2, 1, 0};
    const std::vector<DistinguishabilityModel> models{
        Indistinguishable{}, Distinguishable{},
        SpeciesPartition::from_photon_groups(r, {{0}, {1, 2}, {3}}),
        shared_mode_mixture(r, std::vector<double>{0.9, 0.8, 0.7, 0.95})};
    for (const auto& model : models) {
      const FockDistribution d = output_distribution(u, r, model);
      CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(*std::min_element(d.probs.begin(), d.probs.end()) >= 0.0);
    }
  }
}

TEST_CASE("distinguishable output matches independent-photon sampling") {
  const ComplexMatrix u = haar_random(4, 17);
  const ModeOccupation r{1, 1, 1, 0};
  const FockDistribution d = output_distribution(u, r, Distinguishable{});
  const int shots = 100000;
  std::map<ModeOccupation, int> counts;
  Rng rng(99);
  for (int i = 0; i < shots; ++i) ++counts[oracle::sample_independent_photons(u, r, rng)];
  for (std::size_t i = 0; i < d.basis.size(); ++i) {
    const double p = d.probs[i];
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / shots);
    CHECK(std::abs(counts[d.basis[i]] / static_cast<double>(shots) - p) < 4 * se + 1e-9);
  }
}

TEST_CASE("shared-mode mixture") {
  const ModeOccupation r{1, 1, 1, 0};
  const Mixture all = shared_mode_mixture(r, std::vector<double>{1, 1, 1});
  REQUIRE(all.components.size() == 1);
  CHECK(all.components[0].partition.sizes() == std::vector<int>{3});
  const Mixture none = shared_mode_mixture(r, std::vector<double>{0, 0, 0});
  REQUIRE(none.components.size() == 1);
  CHECK(none.components[0].partition.sizes() == std::vector<int>{1, 1, 1});
  double total = 0.0;
  for (const auto& c : shared_mode_mixture(r, std::vector<double>{0.9, 0.5, 0.2}).components) total += c.weight;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("pair-overlap mixture reproduces the overlaps") {
  const ModeOccupation r{1, 1, 1, 0};
  const std::vector<double> a{0.95, 0.93, 0.98};
  RealMatrix ov = RealMatrix::Identity(3, 3);
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      if (p != q) ov(p, q) = a[static_cast<std::size_t>(p)] * a[static_cast<std::size_t>(q)];
    }
  }
  const Mixture mix = mixture_from_pair_overlaps(r, ov);
  // Pairwise HOM-type overlap: weight of components where photons p, q share a species.
  const std::vector<int> d = r.assignment();
  for (int p = 0; p < 3; ++p) {
    for (int q = p + 1; q < 3; ++q) {
      double together = 0.0;
      for (const auto& c : mix.components) {
        for (const auto& s : c.partition.species()) {
          if (s[d[static_cast<std::size_t>(p)] - 1] > 0 && s[d[static_cast<std::size_t>(q)] - 1] > 0) together += c.weight;
        }
      }
      CHECK(together == doctest::Approx(ov(p, q)).epsilon(1e-9));
    }
  }
  RealMatrix too_big = RealMatrix::Constant(3, 3, 1.2);
  CHECK_THROWS_AS(mixture_from_pair_overlaps(r, too_big), DomainError);
}

TEST_CASE("sampling") {
  const FockDistribution pm = FockDistribution::point_mass({0, 2, 1});
  for (const auto& s : sample(pm, 1000, 3)) CHECK(s == ModeOccupation{0, 2, 1});

  FockDistribution two = FockDistribution::zeros(1, 2);
  two.probs = {0.5, 0.5};
  const auto draws = sample(two, 100000, 12);
  const auto ones = std::count(draws.begin(), draws.end(), two.basis[0]);
  CHECK(std::abs(ones / 100000.0 - 0.5) < 0.01);
  CHECK(sample(two, 500, 77) == sample(two, 500, 77));
  CHECK(sample(two, 500, 77) != sample(two, 500, 78));
}

TEST_CASE("state vector") {
  const ModeOccupation r{0, 1, 1};
  const ComplexVector v = state_vector(ComplexMatrix::Identity(3, 3), r);
  CHECK(std::abs(v(static_cast<Eigen::Index>(colex_rank(r))) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(v.norm() - 1.0) < 1e-15);

  const ComplexVector h = state_vector(splitter(), {1, 1});
  const auto i20 = static_cast<Eigen::Index>(colex_rank({2, 0}));
  const auto i11 = static_cast<Eigen::Index>(colex_rank({1, 1}));
  const auto i02 = static_cast<Eigen::Index>(colex_rank({0, 2}));
  CHECK(std::abs(h(i11)) < 1e-15);
  CHECK(std::abs(std::abs(h(i20)) - 1 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(h(i20) + h(i02)) < 1e-14);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(std::abs(state_vector(haar_random(5, seed), {1, 0, 2, 0, 1}).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("convolution of independent species") {
  const ComplexMatrix u = haar_random(3, 6);
  const FockDistribution a = output_distribution(u, {1, 0, 0}, Indistinguishable{});
  const FockDistribution b = output_distribution(u, {0, 1, 1}, Indistinguishable{});
  const FockDistribution c = convolve(a, b);
  const SpeciesPartition part({ModeOccupation{1, 0, 0}, ModeOccupation{0, 1, 1}});
  const FockDistribution direct = output_distribution(u, {1, 1, 1}, part);
  for (std::size_t i = 0; i < c.probs.size(); ++i) CHECK(c.probs[i] == doctest::Approx(direct.probs[i]).epsilon(1e-12));
}

}  // TEST_SUITE

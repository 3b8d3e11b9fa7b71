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

#include <sstream>

#include "photherm/errors.hpp"
#include "photherm/io.hpp"

using namespace photherm;

TEST_SUITE("io") {

TEST_CASE("occupation json") {
  const ModeOccupation r{1, 0, 2};
  CHECK(occupation_from_json(to_json(r)) == r);
  CHECK(occupation_from_json(Json("1 0 2")) == r);
  CHECK_THROWS(occupation_from_json(Json(3.5)));
}

TEST_CASE("distribution round trip is exact") {
  const FockDistribution d = output_distribution(haar_random(4, 1), {1, 1, 1, 0}, Indistinguishable{});
  const FockDistribution back = fock_distribution_from_json(Json::parse(to_json(d).dump()));
  CHECK(back.basis == d.basis);
  CHECK(back.probs == d.probs);
  Json shuffled = to_json(d);
  std::swap(shuffled["basis"][0], shuffled["basis"][1]);
  CHECK_THROWS(fock_distribution_from_json(shuffled));
}

TEST_CASE("distribution csv") {
  std::ostringstream os;
  write_distribution_csv(os, FockDistribution::point_mass({0, 1}));
  CHECK(os.str().rfind("pattern,probability\n", 0) == 0);
}

TEST_CASE("hamiltonian json") {
  for (const HamiltonianSpec& spec :
       {HamiltonianSpec::hopping(5, 0.5, Boundary::Open), HamiltonianSpec::long_range(4, 9)}) {
    const HamiltonianSpec back = hamiltonian_from_json(to_json(spec));
    CHECK(max_abs_diff(build(back).matrix(), build(spec).matrix()) == 0.0);
  }
  const HamiltonianSpec ex = HamiltonianSpec::from_matrix(build(HamiltonianSpec::long_range(3, 2)));
  CHECK(max_abs_diff(build(hamiltonian_from_json(to_json(ex))).matrix(), build(ex).matrix()) == 0.0);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-300, 12345.678}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("click record ndjson") {
  std::vector<ClickRecord> recs{{{0, 4, 7}, true}, {{}, false}, {{11}, true}};
  std::stringstream ss;
  write_click_records(ss, recs);
  CHECK(read_click_records(ss) == recs);
  CHECK_THROWS(click_record_from_json(Json::parse(R"({"fired":[3,1],"herald":true})")));
}

TEST_CASE("result json carries both epsilon readings") {
  const std::vector<double> lambdas{4.0 / 9.0};
  const Json j = to_json(fidelity_bound(0.9, 1000, 0.05, 1000, lambdas, 0.8, 0.8));
  CHECK(j.contains("f_lower"));
  CHECK(j.contains("f_lower_error_reading"));
  CHECK(j.contains("witness_threshold"));
}

}  // TEST_SUITE

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

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "photherm/apparatus.hpp"
#include "photherm/certify.hpp"
#include "photherm/fock.hpp"
#include "photherm/gge.hpp"
#include "photherm/hamiltonian.hpp"

namespace photherm {

using Json = nlohmann::ordered_json;

/// %.17g, enough digits to reproduce the double exactly.
std::string format_double(double x);

Json to_json(const ModeOccupation& occ);
ModeOccupation occupation_from_json(const Json& j);

Json to_json(const FockDistribution& dist);
FockDistribution fock_distribution_from_json(const Json& j);

/// Columns: pattern (space separated counts), probability.
void write_distribution_csv(std::ostream& out, const FockDistribution& dist);

Json to_json(const HamiltonianSpec& spec);
HamiltonianSpec hamiltonian_from_json(const Json& j);

Json to_json(const ComplexMatrix& m);  // [[re, im], ...] row-major nested
ComplexMatrix complex_matrix_from_json(const Json& j);

Json to_json(const MarginalDistribution& p);
Json to_json(const CertificationResult& r);
Json to_json(const LambdaClass& c);
Json to_json(const DistinguishabilityModel& model);

Json to_json(const ClickRecord& record);
ClickRecord click_record_from_json(const Json& j);

/// One JSON object per line.
void write_click_records(std::ostream& out, const std::vector<ClickRecord>& records);
std::vector<ClickRecord> read_click_records(std::istream& in);

}  // namespace photherm

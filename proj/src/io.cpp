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

#include "photherm/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "photherm/errors.hpp"

namespace photherm {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const ModeOccupation& occ) { return occ.counts(); }

ModeOccupation occupation_from_json(const Json& j) {
  if (j.is_string()) return ModeOccupation::parse(j.get<std::string>());
  if (!j.is_array()) throw DomainError("occupation must be an array of counts or a string");
  return ModeOccupation(j.get<std::vector<int>>());
}

Json to_json(const FockDistribution& dist) {
  Json j;
  j["photons"] = dist.photons;
  j["modes"] = dist.modes;
  Json basis = Json::array();
  for (const auto& b : dist.basis) basis.push_back(b.counts());
  j["basis"] = std::move(basis);
  j["probs"] = dist.probs;
  return j;
}

FockDistribution fock_distribution_from_json(const Json& j) {
  FockDistribution dist = FockDistribution::zeros(j.at("photons").get<int>(), j.at("modes").get<int>());
  const auto& basis = j.at("basis");
  const auto probs = j.at("probs").get<std::vector<double>>();
  if (basis.size() != dist.basis.size() || probs.size() != dist.basis.size()) {
    throw DimensionError("FockDistribution JSON: basis size does not match photons/modes");
  }
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (ModeOccupation(basis[i].get<std::vector<int>>()) != dist.basis[i]) {
      throw DomainError("FockDistribution JSON: basis is not in canonical order");
    }
    dist.probs[i] = probs[i];
  }
  return dist;
}

void write_distribution_csv(std::ostream& out, const FockDistribution& dist) {
  out << "pattern,probability\n";
  for (std::size_t i = 0; i < dist.basis.size(); ++i) {
    out << dist.basis[i].to_string() << ',' << format_double(dist.probs[i]) << '\n';
  }
}

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix complex_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw DimensionError("matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DimensionError("matrix rows differ in length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw DomainError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Json to_json(const HamiltonianSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  j["modes"] = spec.modes;
  j["coupling"] = spec.coupling;
  j["boundary"] = spec.boundary == Boundary::Periodic ? "periodic" : "open";
  j["seed"] = spec.seed;
  if (spec.explicit_matrix) j["matrix"] = to_json(spec.explicit_matrix->matrix());
  return j;
}

HamiltonianSpec hamiltonian_from_json(const Json& j) {
  HamiltonianSpec spec;
  spec.kind = parse_hamiltonian_kind(j.value("kind", std::string("hopping")));
  spec.modes = j.value("modes", 4);
  spec.coupling = j.value("coupling", 1.0);
  const std::string boundary = j.value("boundary", std::string("periodic"));
  if (boundary == "periodic") {
    spec.boundary = Boundary::Periodic;
  } else if (boundary == "open") {
    spec.boundary = Boundary::Open;
  } else {
    throw DomainError("boundary must be 'periodic' or 'open'");
  }
  spec.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("matrix")) {
    spec.explicit_matrix = HermitianMatrix(complex_matrix_from_json(j.at("matrix")));
    if (!j.contains("modes")) spec.modes = spec.explicit_matrix->dim();
  }
  spec.validate();
  return spec;
}

Json to_json(const MarginalDistribution& p) {
  Json j;
  j["mode"] = p.mode;
  j["probs"] = p.probs;
  return j;
}

Json to_json(const CertificationResult& r) {
  Json j;
  j["p1"] = r.p1;
  j["k1"] = r.k1;
  j["p2"] = r.p2;
  j["k2"] = r.k2;
  j["epsilon1"] = r.epsilon1;
  j["epsilon2"] = r.epsilon2;
  j["epsilon"] = r.epsilon;
  j["delta1"] = r.delta1;
  j["delta2"] = r.delta2;
  j["delta"] = r.delta;
  j["lambda_min"] = r.lambda_min;
  j["f_lower"] = r.f_lower;
  j["witness_threshold"] = r.witness_threshold;
  j["entangled"] = r.entangled;
  j["delta_error_reading"] = r.delta_error_reading;
  j["f_lower_error_reading"] = r.f_lower_error_reading;
  return j;
}

Json to_json(const LambdaClass& c) {
  Json j;
  j["class"] = c.label();
  j["sizes"] = c.sizes;
  j["lambda"] = c.lambda;
  j["placement_spread"] = c.spread;
  j["placements"] = c.placements;
  return j;
}

Json to_json(const DistinguishabilityModel& model) {
  Json j;
  j["type"] = describe(model);
  auto species_json = [](const SpeciesPartition& p) {
    Json s = Json::array();
    for (const auto& occ : p.species()) s.push_back(occ.counts());
    return s;
  };
  if (const auto* p = std::get_if<SpeciesPartition>(&model)) j["species"] = species_json(*p);
  if (const auto* mix = std::get_if<Mixture>(&model)) {
    Json comps = Json::array();
    for (const auto& c : mix->components) {
      Json cj;
      cj["weight"] = c.weight;
      cj["species"] = species_json(c.partition);
      comps.push_back(std::move(cj));
    }
    j["components"] = std::move(comps);
  }
  return j;
}

Json to_json(const ClickRecord& record) {
  Json j;
  j["fired"] = record.fired;
  j["herald"] = record.herald;
  return j;
}

ClickRecord click_record_from_json(const Json& j) {
  ClickRecord r;
  r.fired = j.at("fired").get<std::vector<int>>();
  r.herald = j.at("herald").get<bool>();
  for (std::size_t i = 0; i < r.fired.size(); ++i) {
    if (r.fired[i] < 0 || (i > 0 && r.fired[i] <= r.fired[i - 1])) {
      throw DomainError("click record: channels must be distinct, non-negative and sorted");
    }
  }
  return r;
}

void write_click_records(std::ostream& out, const std::vector<ClickRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<ClickRecord> read_click_records(std::istream& in) {
  std::vector<ClickRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(click_record_from_json(Json::parse(line)));
  }
  return out;
}

}  // namespace photherm

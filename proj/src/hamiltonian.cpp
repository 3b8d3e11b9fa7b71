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

#include "photherm/hamiltonian.hpp"

#include <cmath>
#include <sstream>

#include "photherm/errors.hpp"

namespace photherm {

HamiltonianSpec HamiltonianSpec::hopping(int modes, double coupling, Boundary boundary) {
  HamiltonianSpec spec;
  spec.kind = HamiltonianKind::Hopping;
  spec.modes = modes;
  spec.coupling = coupling;
  spec.boundary = boundary;
  spec.validate();
  return spec;
}

HamiltonianSpec HamiltonianSpec::long_range(int modes, std::uint64_t seed) {
  HamiltonianSpec spec;
  spec.kind = HamiltonianKind::LongRangeFromHaar;
  spec.modes = modes;
  spec.seed = seed;
  spec.validate();
  return spec;
}

HamiltonianSpec HamiltonianSpec::from_matrix(HermitianMatrix h) {
  HamiltonianSpec spec;
  spec.kind = HamiltonianKind::Explicit;
  spec.modes = h.dim();
  spec.explicit_matrix = std::move(h);
  spec.validate();
  return spec;
}

void HamiltonianSpec::validate() const {
  if (modes < 2) throw DimensionError("HamiltonianSpec: modes must be >= 2");
  if (!std::isfinite(coupling)) throw DomainError("HamiltonianSpec: coupling must be finite");
  if (kind == HamiltonianKind::Explicit) {
    if (!explicit_matrix) throw DomainError("HamiltonianSpec: explicit kind needs a matrix");
    if (explicit_matrix->dim() != modes) {
      throw DimensionError("HamiltonianSpec: explicit matrix dimension differs from modes");
    }
  }
}

std::string HamiltonianSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case HamiltonianKind::Hopping:
      os << "hopping_m" << modes;
      if (boundary == Boundary::Open) os << "_open";
      break;
    case HamiltonianKind::LongRangeFromHaar:
      os << "longrange_m" << modes << "_s" << seed;
      break;
    case HamiltonianKind::Explicit:
      os << "explicit_m" << modes;
      break;
  }
  return os.str();
}

std::string to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::Hopping: return "hopping";
    case HamiltonianKind::LongRangeFromHaar: return "long_range";
    case HamiltonianKind::Explicit: return "explicit";
  }
  return "unknown";
}

HamiltonianKind parse_hamiltonian_kind(const std::string& s) {
  if (s == "hopping") return HamiltonianKind::Hopping;
  if (s == "long_range") return HamiltonianKind::LongRangeFromHaar;
  if (s == "explicit") return HamiltonianKind::Explicit;
  throw DomainError("unknown hamiltonian kind '" + s + "'");
}

HermitianMatrix build(const HamiltonianSpec& spec) {
  spec.validate();
  const int m = spec.modes;
  switch (spec.kind) {
    case HamiltonianKind::Hopping: {
      ComplexMatrix h = ComplexMatrix::Zero(m, m);
      const int bonds = spec.boundary == Boundary::Periodic ? m : m - 1;
      for (int j = 0; j < bonds; ++j) {
        const int k = (j + 1) % m;
        h(j, k) = spec.coupling;
        h(k, j) = spec.coupling;
      }
      return HermitianMatrix(h);
    }
    case HamiltonianKind::LongRangeFromHaar:
      return logm_unitary(haar_random(m, spec.seed));
    case HamiltonianKind::Explicit:
      return *spec.explicit_matrix;
  }
  throw DomainError("build: invalid hamiltonian kind");
}

ComplexMatrix evolution(const HamiltonianSpec& spec, double t) {
  if (!std::isfinite(t)) throw DomainError("evolution: time must be finite");
  const HermitianMatrix h = build(spec);
  if (t == 0.0) return ComplexMatrix::Identity(spec.modes, spec.modes);
  return expm(h, t);
}

ComplexMatrix cyclic_shift(int modes) {
  ComplexMatrix s = ComplexMatrix::Zero(modes, modes);
  for (int j = 0; j < modes; ++j) s((j + 1) % modes, j) = 1.0;
  return s;
}

}  // namespace photherm

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
#include <string>

#include "photherm/linalg.hpp"

namespace photherm {

enum class HamiltonianKind { Hopping, LongRangeFromHaar, Explicit };
enum class Boundary { Periodic, Open };

/// Which quadratic Hamiltonian family to simulate. The coupling sets the time
/// unit: with coupling 1 the hopping spectrum is 2 cos(2 pi k / m).
struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::Hopping;
  int modes = 4;
  double coupling = 1.0;
  std::uint64_t seed = 0;
  Boundary boundary = Boundary::Periodic;
  std::optional<HermitianMatrix> explicit_matrix;

  static HamiltonianSpec hopping(int modes, double coupling = 1.0,
                                 Boundary boundary = Boundary::Periodic);
  static HamiltonianSpec long_range(int modes, std::uint64_t seed);
  static HamiltonianSpec from_matrix(HermitianMatrix h);

  /// Throws DomainError / DimensionError on an inconsistent spec.
  void validate() const;

  /// Short stable label for file names, e.g. "hopping_m4" or "longrange_m4_s7".
  std::string label() const;
};

std::string to_string(HamiltonianKind kind);
HamiltonianKind parse_hamiltonian_kind(const std::string& s);

HermitianMatrix build(const HamiltonianSpec& spec);

/// e^{-iHt}; exactly the identity at t = 0.
ComplexMatrix evolution(const HamiltonianSpec& spec, double t);

/// Cyclic shift matrix: mode j -> mode j+1 (mod m).
ComplexMatrix cyclic_shift(int modes);

}  // namespace photherm

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

// Slow reference implementations used to cross-check the production code.
// They share no code paths with the kernels they check.

#include <cstdint>

#include "photherm/fock.hpp"
#include "photherm/linalg.hpp"

namespace photherm::oracle {

/// Sum over all n! permutations.
Complex naive_permanent(const ComplexMatrix& m);

/// e^{-iHt} by scaling and squaring of a truncated Taylor series.
ComplexMatrix series_expm(const ComplexMatrix& h, double t);

/// Species model evaluated in an enlarged Fock space: every species gets its own
/// internal (temporal) mode, the interferometer acts as U (x) I, and internal
/// modes are summed out at the detectors.
FockDistribution internal_mode_distribution(const ComplexMatrix& u, const SpeciesPartition& partition);

/// Fully distinguishable photons routed one by one through |U_{:, d}|^2.
ModeOccupation sample_independent_photons(const ComplexMatrix& u, const ModeOccupation& r, Rng& rng);

}  // namespace photherm::oracle

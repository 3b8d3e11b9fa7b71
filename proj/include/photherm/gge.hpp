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

#include <vector>

#include "photherm/fock.hpp"
#include "photherm/hamiltonian.hpp"

namespace photherm {

/// Photon-number statistics k -> p(k), k = 0..n, of one output mode.
struct MarginalDistribution {
  int mode = 1;  // 1-based; 0 for model predictions not tied to a mode
  std::vector<double> probs;
};

/// Marginal of `mode` (1-based). Throws DomainError for an out-of-range mode.
MarginalDistribution marginal(const FockDistribution& dist, int mode);

/// Geometric single-mode law D^k / (D+1)^(k+1) with D = n/m, truncated at k = n
/// and renormalized.
MarginalDistribution gge_marginal(int n, int m);

/// Same law without renormalization, k = 0..n. Sums to less than one.
std::vector<double> gge_marginal_untruncated(int n, int m);

/// <N_k> for a Fock product state; uniform n/m.
std::vector<double> momentum_occupations(const ModeOccupation& r);

/// <b_x^dagger b_y> after the mode transformation U acting on the Fock state r.
ComplexMatrix single_particle_correlations(const ComplexMatrix& u, const ModeOccupation& r);

/// <N_k> = (1/m) sum_{x,y} e^{2 pi i k (y-x)/m} C_{xy}, k = 0..m-1.
std::vector<double> momentum_occupations(const ComplexMatrix& correlations);

/// Half the l1 distance. Throws DomainError on length mismatch.
double tvd(const MarginalDistribution& p, const MarginalDistribution& q);
double tvd(const std::vector<double>& p, const std::vector<double>& q);

/// Full-pattern TVD, for diagnostics.
double joint_tvd(const FockDistribution& p, const FockDistribution& q);

struct TracePoint {
  double t = 0.0;
  MarginalDistribution marginal;
  double tvd_to_gge = 0.0;
};

/// Evolves r under the spec for every time, takes the marginal of `mode` and
/// its TVD to gge_marginal(n, m). Parallel over time points.
std::vector<TracePoint> equilibration_trace(const HamiltonianSpec& spec, const ModeOccupation& r,
                                            const std::vector<double>& times,
                                            const DistinguishabilityModel& model, int mode = 1);

struct Recurrence {
  bool found = false;
  double time = 0.0;
  double distance = 1.0;  // TVD between marginal(time) and marginal(0)
};

/// First return of the mode marginal to its t = 0 value on (0, t_max]: grid scan
/// for the first local minimum after the trace has moved away, then golden-section
/// refinement on the bracketing grid cells.
Recurrence find_recurrence(const HamiltonianSpec& spec, const ModeOccupation& r,
                           const DistinguishabilityModel& model, double t_max,
                           int grid_points = 400, int mode = 1);

}  // namespace photherm

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
#include <vector>

#include "photherm/fock.hpp"
#include "photherm/hamiltonian.hpp"
#include "photherm/linalg.hpp"
#include "photherm/random.hpp"

namespace photherm {

// ------------------------------------------------------------------- source

/// Two SPDC crystals. Crystal A sends its signal into mode 1 and its idler to
/// the herald detector; crystal B sends signal and idler into modes 2 and 3.
/// Each crystal emits k pairs with probability (1 - s^2) s^(2k), s = squeezing.
struct SourceModel {
  double squeezing = 0.1;
  double pump_power = 5.0;  // mW, only used by the blinding fit
  double heralding_efficiency = 1.0;
  /// Pair-number cutoff per crystal for the conditional event sampler.
  int max_pairs = 3;
  /// Optional photon-photon wave-function overlaps (3 x 3) for the mixture model.
  std::optional<RealMatrix> photon_overlaps;

  void validate() const;
};

/// Probability that one crystal emits exactly k pairs.
double pair_probability(double squeezing, int k);

struct HeraldedInput {
  ModeOccupation occupation;
  bool accepted = false;
  int pairs_a = 0;
  int pairs_b = 0;
};

/// Injected occupation for given pair numbers: (a, b, b, 0, ..., 0) on `modes` modes.
ModeOccupation injected_occupation(int pairs_a, int pairs_b, int modes);

/// One laser pulse: draws both pair numbers and the herald click.
HeraldedInput herald_input(const SourceModel& src, Rng& rng, int modes = 4);

struct SourceEvent {
  int pairs_a = 0;
  int pairs_b = 0;
  double weight = 0.0;  // conditional probability given acceptance
};

/// Heralded events that can yield `min_photons` or more photons in the chip,
/// with probabilities conditioned on that, truncated at max_pairs per crystal.
std::vector<SourceEvent> heralded_event_table(const SourceModel& src, int min_photons);

// ---------------------------------------------------------------- detection

/// Multiplexed quasi-number-resolving detection: every spatial mode is split
/// over `channels_per_mode` threshold detectors with lumped weights.
struct DetectionModel {
  std::vector<double> weights = std::vector<double>(12, 1.0 / 3.0);
  int channels_per_mode = 3;
  double blinding_slope = 0.0;  // per mW
  double blinding_intercept = 1.0;
  double dark_count_prob = 0.0;

  static DetectionModel uniform(int modes, double efficiency = 1.0);
  /// Weights as given, blinding fit (-0.0020 / mW, 0.9534).
  static DetectionModel with_blinding_fit(std::vector<double> weights);

  int modes() const { return static_cast<int>(weights.size()) / channels_per_mode; }
  void validate() const;
};

/// Reads "channel,weight" lines; '#' comments and a non-numeric header are skipped.
std::vector<double> load_weights_csv(const std::string& path);

struct ClickRecord {
  std::vector<int> fired;  // sorted 0-based channel indices
  bool herald = true;

  friend bool operator==(const ClickRecord&, const ClickRecord&) = default;
};

ClickRecord qpnr_detect(const ModeOccupation& pattern, const DetectionModel& det, Rng& rng);

/// Number of fired channels per spatial mode.
ModeOccupation click_pattern(const ClickRecord& record, const DetectionModel& det);

/// P_i(k|k) = k! e_k(w_i): all k photons in mode i land on distinct channels.
double resolution_probability(const DetectionModel& det, int mode, int photons);

/// Herald and exactly `photons` clicks, pattern counts divided by the product of
/// per-mode resolution probabilities, renormalized.
FockDistribution correct_counts(const std::vector<ClickRecord>& records, const DetectionModel& det,
                                int photons = 3);

/// Raw post-selected pattern frequencies without the resolution correction.
FockDistribution raw_counts(const std::vector<ClickRecord>& records, const DetectionModel& det,
                            int photons = 3);

/// slope * pump + intercept, clamped to [0, 1].
double blinding_probability(double pump_power, const DetectionModel& det);

// --------------------------------------------------------------------- mesh

/// Mach-Zehnder cell on modes (mode, mode + 1):
/// [[e^{i phi} cos theta, -sin theta], [e^{i phi} sin theta, cos theta]].
struct MziCrossing {
  int mode = 0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Rectangular mesh, crossings in the order light meets them, then output phases.
struct MeshParameters {
  int modes = 0;
  std::vector<MziCrossing> crossings;
  std::vector<double> output_phases;
};

ComplexMatrix mzi_matrix(double theta, double phi);

MeshParameters mesh_decompose(const ComplexMatrix& u);
ComplexMatrix mesh_compose(const MeshParameters& mesh);

/// Independent N(0, sd) added to every theta and phi, then recomposed.
ComplexMatrix mesh_perturb(const MeshParameters& mesh, double phase_jitter_sd, std::uint64_t seed);
ComplexMatrix mesh_perturb(const ComplexMatrix& u, double phase_jitter_sd, std::uint64_t seed);

/// Mean amplitude fidelity between Haar targets and their jittered meshes.
double mean_mesh_fidelity(double phase_jitter_sd, int modes, int samples, std::uint64_t seed);

/// Jitter whose mean amplitude fidelity equals target, by bisection with common
/// random numbers.
double calibrate_mesh_jitter(double target_fidelity, int modes, int samples, std::uint64_t seed);

// --------------------------------------------------------------- experiment

struct ApparatusModel {
  SourceModel source;
  DetectionModel detection;
  double mesh_jitter = 0.0;
};

/// Shot simulation through a realized unitary: heralded source event, exact output
/// distribution for that input, sample, blinding, detection. The nominal input
/// uses `model`; multi-pair by-products are simulated with the same
/// indistinguishable/distinguishable character (species models fall back to
/// indistinguishable). Blinding acts on events that reproduce the nominal input,
/// i.e. revival measurements; pass apply_blinding = false for other settings.
std::vector<ClickRecord> simulate_clicks(const ComplexMatrix& u_get, const ModeOccupation& nominal,
                                         const DistinguishabilityModel& model,
                                         const ApparatusModel& apparatus, std::size_t shots,
                                         std::uint64_t seed, bool apply_blinding = true);

struct ExperimentRun {
  ComplexMatrix u_set;
  ComplexMatrix u_get;
  std::vector<ClickRecord> records;
  FockDistribution corrected;
};

/// Full chain for one evolution time, deterministic in seed.
ExperimentRun run_experiment(const HamiltonianSpec& spec, double t, const ModeOccupation& nominal,
                             const DistinguishabilityModel& model, const ApparatusModel& apparatus,
                             std::size_t shots, std::uint64_t seed);

}  // namespace photherm

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

#include "photherm/apparatus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "photherm/errors.hpp"
#include "photherm/parallel.hpp"

namespace photherm {

namespace {

constexpr std::size_t kShotBatch = 4096;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

// Distribution of a by-product input under the nominal model's character.
DistinguishabilityModel byproduct_model(const DistinguishabilityModel& model) {
  if (std::holds_alternative<Distinguishable>(model)) return Distinguishable{};
  return Indistinguishable{};
}

ModeOccupation relocate_one_photon(const ModeOccupation& pattern, Rng& rng) {
  const std::vector<int> d = pattern.assignment();
  std::vector<int> counts = pattern.counts();
  const int m = pattern.modes();
  const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(d.size()));
  const int from = d[std::min(pick, d.size() - 1)] - 1;
  int to = static_cast<int>(uniform01(rng) * (m - 1));
  to = std::min(to, m - 2);
  if (to >= from) ++to;
  --counts[static_cast<std::size_t>(from)];
  ++counts[static_cast<std::size_t>(to)];
  return ModeOccupation(std::move(counts));
}

FockDistribution tally(const std::vector<ClickRecord>& records, const DetectionModel& det,
                       int photons, bool correct) {
  det.validate();
  FockDistribution dist = FockDistribution::zeros(photons, det.modes());
  std::vector<std::size_t> counts(dist.basis.size(), 0);
  std::size_t kept = 0;
  for (const auto& record : records) {
    if (!record.herald || static_cast<int>(record.fired.size()) != photons) continue;
    ++counts[colex_rank(click_pattern(record, det))];
    ++kept;
  }
  if (kept == 0) throw DomainError("no heralded records with the required number of clicks");
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    double value = static_cast<double>(counts[i]);
    if (correct) {
      for (int mode = 0; mode < det.modes(); ++mode) {
        value /= resolution_probability(det, mode, dist.basis[i][mode]);
      }
    }
    dist.probs[i] = value;
    sum += value;
  }
  for (double& p : dist.probs) p /= sum;
  return dist;
}

}  // namespace

// ------------------------------------------------------------------- source

void SourceModel::validate() const {
  if (!(squeezing >= 0.0 && squeezing < 1.0)) throw DomainError("source: squeezing must lie in [0, 1)");
  if (!(pump_power >= 0.0)) throw DomainError("source: pump power must be non-negative");
  require_probability(heralding_efficiency, "source: heralding efficiency");
  if (max_pairs < 1 || max_pairs > 6) throw DomainError("source: max_pairs must be in 1..6");
  if (photon_overlaps) {
    if (photon_overlaps->rows() != 3 || photon_overlaps->cols() != 3) {
      throw DimensionError("source: photon overlaps must be a 3 x 3 matrix");
    }
  }
}

double pair_probability(double squeezing, int k) {
  if (k < 0) return 0.0;
  const double s2 = squeezing * squeezing;
  return (1.0 - s2) * std::pow(s2, k);
}

ModeOccupation injected_occupation(int pairs_a, int pairs_b, int modes) {
  if (modes < 3) throw DimensionError("source: need at least three modes");
  std::vector<int> counts(static_cast<std::size_t>(modes), 0);
  counts[0] = pairs_a;
  counts[1] = pairs_b;
  counts[2] = pairs_b;
  return ModeOccupation(std::move(counts));
}

HeraldedInput herald_input(const SourceModel& src, Rng& rng, int modes) {
  src.validate();
  const double s2 = src.squeezing * src.squeezing;
  auto draw_pairs = [&] {
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    if (s2 == 0.0) return 0;
    return static_cast<int>(std::floor(std::log(u) / std::log(s2)));
  };
  HeraldedInput out;
  out.pairs_a = draw_pairs();
  out.pairs_b = draw_pairs();
  out.occupation = injected_occupation(out.pairs_a, out.pairs_b, modes);
  const double fire = 1.0 - std::pow(1.0 - src.heralding_efficiency, out.pairs_a);
  out.accepted = uniform01(rng) < fire;
  return out;
}

std::vector<SourceEvent> heralded_event_table(const SourceModel& src, int min_photons) {
  src.validate();
  std::vector<SourceEvent> table;
  double total = 0.0;
  for (int a = 1; a <= src.max_pairs; ++a) {
    for (int b = 0; b <= src.max_pairs; ++b) {
      if (a + 2 * b < min_photons) continue;
      const double w = pair_probability(src.squeezing, a) * pair_probability(src.squeezing, b) *
                       (1.0 - std::pow(1.0 - src.heralding_efficiency, a));
      if (w <= 0.0) continue;
      table.push_back({a, b, w});
      total += w;
    }
  }
  if (table.empty()) throw DomainError("source never produces a heralded multi-photon event");
  for (auto& e : table) e.weight /= total;
  return table;
}

// ---------------------------------------------------------------- detection

DetectionModel DetectionModel::uniform(int modes, double efficiency) {
  require_probability(efficiency, "detection efficiency");
  DetectionModel det;
  det.weights.assign(static_cast<std::size_t>(modes) * 3, efficiency / 3.0);
  return det;
}

DetectionModel DetectionModel::with_blinding_fit(std::vector<double> weights) {
  DetectionModel det;
  det.weights = std::move(weights);
  det.blinding_slope = -0.0020;
  det.blinding_intercept = 0.9534;
  det.validate();
  return det;
}

void DetectionModel::validate() const {
  if (channels_per_mode < 1) throw DomainError("detection: need at least one channel per mode");
  if (weights.empty() || weights.size() % static_cast<std::size_t>(channels_per_mode) != 0) {
    throw DimensionError("detection: weight count must be a multiple of the channels per mode");
  }
  for (int mode = 0; mode < modes(); ++mode) {
    double sum = 0.0;
    for (int c = 0; c < channels_per_mode; ++c) {
      const double w = weights[static_cast<std::size_t>(mode * channels_per_mode + c)];
      require_probability(w, "detection: channel weight");
      sum += w;
    }
    if (sum > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "detection: weights of mode " << mode + 1 << " sum to " << sum << " > 1";
      throw DomainError(os.str());
    }
  }
  require_probability(dark_count_prob, "detection: dark count probability");
  if (!std::isfinite(blinding_slope) || !std::isfinite(blinding_intercept)) {
    throw DomainError("detection: blinding fit must be finite");
  }
}

std::vector<double> load_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight file " + path);
  std::map<int, double> by_channel;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    int channel = 0;
    double weight = 0.0;
    if (!(is >> channel >> weight)) {
      if (by_channel.empty() && line_no == 1) continue;  // header
      throw DomainError(path + ":" + std::to_string(line_no) + ": expected 'channel,weight'");
    }
    if (channel < 0 || !by_channel.emplace(channel, weight).second) {
      throw DomainError(path + ":" + std::to_string(line_no) + ": bad or repeated channel");
    }
  }
  std::vector<double> weights;
  int expected = by_channel.empty() ? 0 : by_channel.begin()->first;
  for (const auto& [channel, weight] : by_channel) {
    if (channel != expected++) throw DomainError(path + ": channel numbers are not contiguous");
    weights.push_back(weight);
  }
  return weights;
}

ClickRecord qpnr_detect(const ModeOccupation& pattern, const DetectionModel& det, Rng& rng) {
  if (pattern.modes() != det.modes()) {
    std::ostringstream os;
    os << "qpnr_detect: pattern has " << pattern.modes() << " modes, detector has " << det.modes();
    throw DomainError(os.str());
  }
  const int per = det.channels_per_mode;
  std::vector<char> fired(det.weights.size(), 0);
  for (int mode = 0; mode < pattern.modes(); ++mode) {
    for (int photon = 0; photon < pattern[mode]; ++photon) {
      const double u = uniform01(rng);
      double cumulative = 0.0;
      for (int c = 0; c < per; ++c) {
        const auto channel = static_cast<std::size_t>(mode * per + c);
        cumulative += det.weights[channel];
        if (u < cumulative) {
          fired[channel] = 1;
          break;
        }
      }
    }
  }
  if (det.dark_count_prob > 0.0) {
    for (char& f : fired) {
      if (uniform01(rng) < det.dark_count_prob) f = 1;
    }
  }
  ClickRecord record;
  for (std::size_t c = 0; c < fired.size(); ++c) {
    if (fired[c]) record.fired.push_back(static_cast<int>(c));
  }
  return record;
}

ModeOccupation click_pattern(const ClickRecord& record, const DetectionModel& det) {
  std::vector<int> counts(static_cast<std::size_t>(det.modes()), 0);
  for (int channel : record.fired) {
    if (channel < 0 || channel >= static_cast<int>(det.weights.size())) {
      throw DomainError("click record names an unknown channel");
    }
    ++counts[static_cast<std::size_t>(channel / det.channels_per_mode)];
  }
  return ModeOccupation(std::move(counts));
}

double resolution_probability(const DetectionModel& det, int mode, int photons) {
  if (photons == 0) return 1.0;
  const int per = det.channels_per_mode;
  if (photons > per) return 0.0;
  // Elementary symmetric polynomial e_k of the mode's weights.
  std::vector<double> e(static_cast<std::size_t>(photons) + 1, 0.0);
  e[0] = 1.0;
  for (int c = 0; c < per; ++c) {
    const double w = det.weights[static_cast<std::size_t>(mode * per + c)];
    for (int k = photons; k >= 1; --k) e[static_cast<std::size_t>(k)] += w * e[static_cast<std::size_t>(k - 1)];
  }
  double factorial = 1.0;
  for (int k = 2; k <= photons; ++k) factorial *= k;
  return factorial * e[static_cast<std::size_t>(photons)];
}

FockDistribution correct_counts(const std::vector<ClickRecord>& records, const DetectionModel& det,
                                int photons) {
  return tally(records, det, photons, true);
}

FockDistribution raw_counts(const std::vector<ClickRecord>& records, const DetectionModel& det,
                            int photons) {
  return tally(records, det, photons, false);
}

double blinding_probability(double pump_power, const DetectionModel& det) {
  if (!(pump_power >= 0.0)) throw DomainError("blinding: pump power must be non-negative");
  return std::clamp(det.blinding_slope * pump_power + det.blinding_intercept, 0.0, 1.0);
}

// --------------------------------------------------------------------- mesh

ComplexMatrix mzi_matrix(double theta, double phi) {
  const Complex e = std::polar(1.0, phi);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  ComplexMatrix t(2, 2);
  t << e * c, -s, e * s, c;
  return t;
}

MeshParameters mesh_decompose(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) throw DimensionError("mesh_decompose: matrix must be square");
  if (!is_unitary(u)) throw DomainError("mesh_decompose: matrix is not unitary");
  const int n = static_cast<int>(u.rows());
  ComplexMatrix w = u;
  std::vector<MziCrossing> right;  // applied as w <- w T^dagger
  std::vector<MziCrossing> left;   // applied as w <- T w

  for (int i = 1; i < n; ++i) {
    if (i % 2 == 1) {
      for (int j = 0; j < i; ++j) {
        const int row = n - 1 - j;
        const int a = i - 1 - j;
        const Complex x = w(row, a);
        const Complex y = w(row, a + 1);
        MziCrossing cell{a, 0.0, 0.0};
        if (std::abs(x) > 0.0) {
          cell.theta = std::atan2(std::abs(x), std::abs(y));
          cell.phi = std::abs(y) > 0.0 ? std::arg(x) - std::arg(y) : 0.0;
        }
        const ComplexMatrix t_dag = mzi_matrix(cell.theta, cell.phi).adjoint();
        w.middleCols(a, 2) = w.middleCols(a, 2) * t_dag;
        right.push_back(cell);
      }
    } else {
      for (int j = 1; j <= i; ++j) {
        const int a = n + j - 2 - i;
        const int col = j - 1;
        const Complex x = w(a, col);
        const Complex y = w(a + 1, col);
        MziCrossing cell{a, 0.0, 0.0};
        if (std::abs(y) > 0.0) {
          cell.theta = std::atan2(std::abs(y), std::abs(x));
          cell.phi = std::abs(x) > 0.0 ? std::numbers::pi + std::arg(y) - std::arg(x) : 0.0;
        }
        const ComplexMatrix t = mzi_matrix(cell.theta, cell.phi);
        w.middleRows(a, 2) = t * w.middleRows(a, 2);
        left.push_back(cell);
      }
    }
  }

  // w is now diagonal: U = L_1^dag ... L_k^dag D R_j ... R_1. Move every L^dag
  // to the right of the diagonal: T^dag(theta, phi) diag(da, db) =
  // diag(-e^{-i phi} db, db) T(theta, arg(-da / db)).
  std::vector<Complex> d(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) d[static_cast<std::size_t>(k)] = w(k, k);
  std::vector<MziCrossing> pushed;
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    const Complex da = d[static_cast<std::size_t>(it->mode)];
    const Complex db = d[static_cast<std::size_t>(it->mode + 1)];
    pushed.push_back({it->mode, it->theta, std::arg(-da / db)});
    d[static_cast<std::size_t>(it->mode)] = -std::polar(1.0, -it->phi) * db;
  }

  MeshParameters mesh;
  mesh.modes = n;
  mesh.crossings = right;
  // U = D' T'_1 ... T'_k R_j ... R_1, so light meets T'_k first.
  mesh.crossings.insert(mesh.crossings.end(), pushed.begin(), pushed.end());
  const double two_pi = 2.0 * std::numbers::pi;
  for (auto& cell : mesh.crossings) {
    cell.phi = std::fmod(cell.phi, two_pi);
    if (cell.phi < 0.0) cell.phi += two_pi;
    if (cell.phi >= two_pi) cell.phi = 0.0;
  }
  for (const Complex& z : d) mesh.output_phases.push_back(std::arg(z));
  return mesh;
}

ComplexMatrix mesh_compose(const MeshParameters& mesh) {
  const int n = mesh.modes;
  if (static_cast<int>(mesh.output_phases.size()) != n) {
    throw DimensionError("mesh_compose: need one output phase per mode");
  }
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  for (const auto& cell : mesh.crossings) {
    if (cell.mode < 0 || cell.mode + 1 >= n) throw DimensionError("mesh_compose: crossing out of range");
    u.middleRows(cell.mode, 2) = mzi_matrix(cell.theta, cell.phi) * u.middleRows(cell.mode, 2);
  }
  for (int k = 0; k < n; ++k) u.row(k) *= std::polar(1.0, mesh.output_phases[static_cast<std::size_t>(k)]);
  return u;
}

ComplexMatrix mesh_perturb(const MeshParameters& mesh, double phase_jitter_sd, std::uint64_t seed) {
  if (!(phase_jitter_sd >= 0.0)) throw DomainError("mesh_perturb: jitter must be non-negative");
  MeshParameters noisy = mesh;
  if (phase_jitter_sd > 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> jitter(0.0, phase_jitter_sd);
    for (auto& cell : noisy.crossings) {
      cell.theta += jitter(rng);
      cell.phi += jitter(rng);
    }
  }
  return mesh_compose(noisy);
}

ComplexMatrix mesh_perturb(const ComplexMatrix& u, double phase_jitter_sd, std::uint64_t seed) {
  if (!(phase_jitter_sd >= 0.0)) throw DomainError("mesh_perturb: jitter must be non-negative");
  if (phase_jitter_sd == 0.0) return u;
  return mesh_perturb(mesh_decompose(u), phase_jitter_sd, seed);
}

double mean_mesh_fidelity(double phase_jitter_sd, int modes, int samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("mean_mesh_fidelity: need at least one sample");
  std::vector<double> f(static_cast<std::size_t>(samples));
  parallel_for(f.size(), [&](std::size_t i) {
    const ComplexMatrix target = haar_random(modes, derive_seed(seed, 2 * i));
    f[i] = amplitude_fidelity(target, mesh_perturb(target, phase_jitter_sd, derive_seed(seed, 2 * i + 1)));
  });
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum / samples;
}

double calibrate_mesh_jitter(double target_fidelity, int modes, int samples, std::uint64_t seed) {
  if (!(target_fidelity > 0.0 && target_fidelity <= 1.0)) {
    throw DomainError("calibrate_mesh_jitter: target fidelity must lie in (0, 1]");
  }
  if (target_fidelity == 1.0) return 0.0;
  double lo = 0.0;
  double hi = 0.05;
  while (mean_mesh_fidelity(hi, modes, samples, seed) > target_fidelity) {
    lo = hi;
    hi *= 2.0;
    if (hi > 10.0) throw DomainError("calibrate_mesh_jitter: target fidelity not reachable");
  }
  for (int iter = 0; iter < 40; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mean_mesh_fidelity(mid, modes, samples, seed) > target_fidelity) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// --------------------------------------------------------------- experiment

std::vector<ClickRecord> simulate_clicks(const ComplexMatrix& u_get, const ModeOccupation& nominal,
                                         const DistinguishabilityModel& model,
                                         const ApparatusModel& apparatus, std::size_t shots,
                                         std::uint64_t seed, bool apply_blinding) {
  if (shots == 0) throw DomainError("simulate_clicks: need at least one shot");
  const DetectionModel& det = apparatus.detection;
  det.validate();
  const int m = static_cast<int>(u_get.rows());
  if (det.modes() != m) {
    std::ostringstream os;
    os << "detector covers " << det.modes() << " modes but the chip has " << m;
    throw DimensionError(os.str());
  }
  if (nominal != injected_occupation(1, 1, m)) {
    throw DomainError("apparatus source injects " + injected_occupation(1, 1, m).to_string() +
                      ", not " + nominal.to_string());
  }
  const int min_photons = det.dark_count_prob > 0.0 ? 1 : nominal.photons();
  const std::vector<SourceEvent> table = heralded_event_table(apparatus.source, min_photons);

  std::vector<double> event_cdf;
  std::vector<FockSampler> samplers;
  double running = 0.0;
  for (const auto& e : table) {
    running += e.weight;
    event_cdf.push_back(running);
    const ModeOccupation input = injected_occupation(e.pairs_a, e.pairs_b, m);
    const DistinguishabilityModel& which =
        (e.pairs_a == 1 && e.pairs_b == 1) ? model : byproduct_model(model);
    samplers.emplace_back(output_distribution(u_get, input, which));
  }
  const double survive = apply_blinding ? blinding_probability(apparatus.source.pump_power, det) : 1.0;

  std::vector<ClickRecord> records(shots);
  const std::size_t batches = (shots + kShotBatch - 1) / kShotBatch;
  parallel_for(batches, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    const std::size_t end = std::min(shots, (b + 1) * kShotBatch);
    for (std::size_t i = b * kShotBatch; i < end; ++i) {
      const double u = uniform01(rng) * event_cdf.back();
      auto idx = static_cast<std::size_t>(
          std::upper_bound(event_cdf.begin(), event_cdf.end(), u) - event_cdf.begin());
      idx = std::min(idx, samplers.size() - 1);
      ModeOccupation pattern = samplers[idx].draw(rng);
      if (survive < 1.0 && pattern == nominal && uniform01(rng) >= survive) {
        pattern = relocate_one_photon(pattern, rng);
      }
      records[i] = qpnr_detect(pattern, det, rng);
    }
  });
  return records;
}

ExperimentRun run_experiment(const HamiltonianSpec& spec, double t, const ModeOccupation& nominal,
                             const DistinguishabilityModel& model, const ApparatusModel& apparatus,
                             std::size_t shots, std::uint64_t seed) {
  ExperimentRun run;
  run.u_set = evolution(spec, t);
  run.u_get = mesh_perturb(run.u_set, apparatus.mesh_jitter, derive_seed(seed, 1));
  run.records = simulate_clicks(run.u_get, nominal, model, apparatus, shots, derive_seed(seed, 2));
  run.corrected = correct_counts(run.records, apparatus.detection, nominal.photons());
  return run;
}

}  // namespace photherm

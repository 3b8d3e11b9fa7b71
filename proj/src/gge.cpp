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

#include "photherm/gge.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "photherm/errors.hpp"
#include "photherm/parallel.hpp"

namespace photherm {

MarginalDistribution marginal(const FockDistribution& dist, int mode) {
  if (mode < 1 || mode > dist.modes) {
    std::ostringstream os;
    os << "marginal: mode " << mode << " outside 1.." << dist.modes;
    throw DomainError(os.str());
  }
  MarginalDistribution out;
  out.mode = mode;
  out.probs.assign(static_cast<std::size_t>(dist.photons) + 1, 0.0);
  for (std::size_t i = 0; i < dist.basis.size(); ++i) {
    out.probs[static_cast<std::size_t>(dist.basis[i][mode - 1])] += dist.probs[i];
  }
  return out;
}

std::vector<double> gge_marginal_untruncated(int n, int m) {
  if (n < 0 || m < 1) throw DomainError("gge_marginal: need n >= 0 and m >= 1");
  const double d = static_cast<double>(n) / m;
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    p[static_cast<std::size_t>(k)] = std::pow(d, k) / std::pow(d + 1.0, k + 1);
  }
  return p;
}

MarginalDistribution gge_marginal(int n, int m) {
  MarginalDistribution out;
  out.mode = 0;
  out.probs = gge_marginal_untruncated(n, m);
  double sum = 0.0;
  for (double p : out.probs) sum += p;
  for (double& p : out.probs) p /= sum;
  return out;
}

std::vector<double> momentum_occupations(const ModeOccupation& r) {
  const ComplexMatrix c = single_particle_correlations(
      ComplexMatrix::Identity(r.modes(), r.modes()), r);
  return momentum_occupations(c);
}

ComplexMatrix single_particle_correlations(const ComplexMatrix& u, const ModeOccupation& r) {
  if (u.rows() != r.modes() || u.cols() != r.modes()) {
    throw DimensionError("single_particle_correlations: matrix does not match the mode count");
  }
  Eigen::VectorXcd occ(r.modes());
  for (int j = 0; j < r.modes(); ++j) occ(j) = r[j];
  // b_x -> sum_j U_xj a_j, so <b_x^dagger b_y> = sum_j conj(U_xj) U_yj r_j.
  return u.conjugate() * occ.asDiagonal() * u.transpose();
}

std::vector<double> momentum_occupations(const ComplexMatrix& correlations) {
  const auto m = correlations.rows();
  if (m < 1 || correlations.cols() != m) {
    throw DimensionError("momentum_occupations: correlation matrix must be square");
  }
  std::vector<double> out(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) {
    Complex sum = 0.0;
    for (Eigen::Index x = 0; x < m; ++x) {
      for (Eigen::Index y = 0; y < m; ++y) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k * (y - x)) /
                             static_cast<double>(m);
        sum += std::polar(1.0, angle) * correlations(x, y);
      }
    }
    out[static_cast<std::size_t>(k)] = sum.real() / static_cast<double>(m);
  }
  return out;
}

double tvd(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DomainError("tvd: support lengths differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += std::abs(p[k] - q[k]);
  return 0.5 * sum;
}

double tvd(const MarginalDistribution& p, const MarginalDistribution& q) {
  return tvd(p.probs, q.probs);
}

double joint_tvd(const FockDistribution& p, const FockDistribution& q) {
  if (p.photons != q.photons || p.modes != q.modes) {
    throw DomainError("joint_tvd: distributions live on different bases");
  }
  return tvd(p.probs, q.probs);
}

std::vector<TracePoint> equilibration_trace(const HamiltonianSpec& spec, const ModeOccupation& r,
                                            const std::vector<double>& times,
                                            const DistinguishabilityModel& model, int mode) {
  if (times.empty()) throw DomainError("equilibration_trace: no time points");
  if (r.modes() != spec.modes) {
    throw DimensionError("equilibration_trace: input occupation does not match the mode count");
  }
  const MarginalDistribution reference = gge_marginal(r.photons(), r.modes());
  std::vector<TracePoint> trace(times.size());
  parallel_for(times.size(), [&](std::size_t i) {
    const FockDistribution dist = output_distribution(evolution(spec, times[i]), r, model);
    trace[i].t = times[i];
    trace[i].marginal = marginal(dist, mode);
    trace[i].tvd_to_gge = tvd(trace[i].marginal, reference);
  });
  return trace;
}

Recurrence find_recurrence(const HamiltonianSpec& spec, const ModeOccupation& r,
                           const DistinguishabilityModel& model, double t_max, int grid_points,
                           int mode) {
  if (!(t_max > 0.0) || grid_points < 3) {
    throw DomainError("find_recurrence: need t_max > 0 and at least 3 grid points");
  }
  const MarginalDistribution start = marginal(output_distribution(evolution(spec, 0.0), r, model), mode);
  auto distance = [&](double t) {
    return tvd(marginal(output_distribution(evolution(spec, t), r, model), mode), start);
  };

  std::vector<double> times(static_cast<std::size_t>(grid_points) + 1);
  for (int i = 0; i <= grid_points; ++i) times[static_cast<std::size_t>(i)] = t_max * i / grid_points;
  std::vector<double> d(times.size());
  parallel_for(times.size(), [&](std::size_t i) { d[i] = distance(times[i]); });

  double peak = 0.0;
  for (double v : d) peak = std::max(peak, v);
  Recurrence result;
  if (peak == 0.0) return result;  // stationary marginal, no excursion to return from

  bool departed = false;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) {
    if (d[i] > 0.5 * peak) departed = true;
    if (!departed || d[i] > d[i - 1] || d[i] > d[i + 1] || d[i] > 0.25 * peak) continue;
    double lo = times[i - 1];
    double hi = times[i + 1];
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = distance(x1);
    double f2 = distance(x2);
    while (hi - lo > 1e-12) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = distance(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = distance(x2);
      }
    }
    result.found = true;
    result.time = 0.5 * (lo + hi);
    result.distance = distance(result.time);
    if (d[i] < result.distance) {
      result.time = times[i];
      result.distance = d[i];
    }
    return result;
  }
  return result;
}

}  // namespace photherm

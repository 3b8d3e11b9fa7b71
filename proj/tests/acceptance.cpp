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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "photherm/apparatus.hpp"
#include "photherm/certify.hpp"
#include "photherm/cli.hpp"
#include "photherm/gge.hpp"
#include "photherm/oracles.hpp"
#include "photherm/parallel.hpp"

using namespace photherm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome permanent_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20260101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = Complex(u(rng), u(rng));
    }
    worst = std::max(worst, std::abs(permanent(a) - oracle::naive_permanent(a)));
  }
  const double secs = seconds_since(start);
  return {worst < 1e-12 && secs < 5.0, fmt("max |ryser - naive| = %.2e (< 1e-12), %.3f s (< 5 s)", worst, secs)};
}

Outcome hom() {
  const ComplexMatrix bs = fourier(2, 2);
  const double pi = prob_indistinguishable(bs, {1, 1}, {1, 1});
  const double pd = prob_distinguishable(bs, {1, 1}, {1, 1});
  return {std::abs(pi) < 1e-14 && std::abs(pd - 0.5) < 1e-14,
          fmt("indistinguishable P(1,1) = %.2e, distinguishable P(1,1) = %.17g", pi, pd)};
}

Outcome fourier_support() {
  const FockDistribution d = output_distribution(fourier(3, 4), {1, 1, 1, 0}, Indistinguishable{});
  const std::vector<ModeOccupation> expected{{1, 1, 1, 0}, {3, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 3, 0}};
  double outside = 0.0;
  double inside_min = 1.0;
  for (std::size_t i = 0; i < d.basis.size(); ++i) {
    if (std::find(expected.begin(), expected.end(), d.basis[i]) != expected.end()) {
      inside_min = std::min(inside_min, d.probs[i]);
    } else {
      outside = std::max(outside, d.probs[i]);
    }
  }
  return {outside < 1e-12 && inside_min > 1e-12,
          fmt("max probability off the four patterns = %.2e, min on them = %.4f", outside, inside_min)};
}

Outcome lambda_constants() {
  const auto start = std::chrono::steady_clock::now();
  const auto classes = lambda_coefficients(3, 4);
  const std::map<std::string, double> published{{"2+1", 4.0 / 9.0}, {"1+1+1", 2.0 / 3.0}};
  const ModeOccupation r{1, 1, 1, 0};
  Outcome out;
  out.pass = classes.size() == published.size();
  std::string detail;
  for (const auto& c : classes) {
    std::vector<std::vector<int>> groups;
    int next = 0;
    for (int size : c.sizes) {
      std::vector<int> g;
      for (int q = 0; q < size; ++q) g.push_back(next++);
      groups.push_back(g);
    }
    const MonteCarloEstimate mc = lambda_monte_carlo(SpeciesPartition::from_photon_groups(r, groups), 4, 100000, 4);
    const double target = published.count(c.label()) ? published.at(c.label()) : -1.0;
    const bool exact_ok = std::abs(c.lambda - target) < 1e-12;
    const bool mc_ok = std::abs(mc.mean - target) < 3 * mc.std_error;
    out.pass = out.pass && exact_ok && mc_ok;
    detail += fmt("%s: exact %.12f vs %.12f %s, MC %.4f +- %.4f %s; ", c.label().c_str(), c.lambda, target,
                  exact_ok ? "ok" : "MISMATCH", mc.mean, mc.std_error, mc_ok ? "ok" : "MISMATCH");
  }
  const double secs = seconds_since(start);
  out.pass = out.pass && secs < 30.0;
  out.detail = detail + fmt("%.2f s", secs);
  if (!out.pass) {
    out.notes = {
        "2+1 class: exact summation, the enlarged internal-mode Fock space and Monte Carlo all give 2/3, not 4/9.",
        "The lone distinguishable photon lands uniformly and independently on the three Fourier outputs; for",
        "every two-photon configuration exactly one landing mode completes an allowed pattern, so P(allowed) = 1/3.",
        "4/9 < 2/3, so bounds built with 4/9 (factor 9/4) stay valid but are looser than necessary."};
  }
  return out;
}

Outcome gge_law() {
  const auto u = gge_marginal_untruncated(3, 4);
  const double e0 = std::abs(u[0] - 4.0 / 7.0);
  const double e1 = std::abs(u[1] - 12.0 / 49.0);
  const double e2 = std::abs(u[2] - 36.0 / 343.0);
  double ratio_err = 0.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) ratio_err = std::max(ratio_err, std::abs(u[k + 1] / u[k] - 0.75 / 1.75));
  const auto t = gge_marginal(3, 4).probs;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) ratio_err = std::max(ratio_err, std::abs(t[k + 1] / t[k] - 0.75 / 1.75));
  const double worst = std::max({e0, e1, e2});
  return {worst < 1e-12 && ratio_err < 1e-12,
          fmt("max |p(k) - exact| = %.2e, max ratio error = %.2e", worst, ratio_err)};
}

Outcome revival() {
  CertifyOptions opt;
  opt.shots = 100000;
  opt.seed = 6;
  opt.epsilons = {0.9};
  const CertificationRun run = certify(HamiltonianSpec::hopping(4), 1.0, Indistinguishable{}, opt);
  const double floor = 1.0 - 2.0 * chebyshev_delta(kBernoulliVariance, opt.shots, 0.9);
  const CertificationResult& r = run.results.front();
  const bool pass = run.p1.hits == opt.shots && run.p1.count == opt.shots && run.p1.value == 1.0 &&
                    run.p2.value == 0.0 && r.f_lower >= floor;
  return {pass, fmt("p1 = %zu/%zu, p2 = %.3g, f_lower = %.6f >= %.6f", run.p1.hits, run.p1.count, run.p2.value,
                    r.f_lower, floor)};
}

Outcome recurrence() {
  const HamiltonianSpec spec = HamiltonianSpec::hopping(4);
  const ModeOccupation r{1, 1, 1, 0};
  const Recurrence rec = find_recurrence(spec, r, Indistinguishable{}, 3.0);
  const auto ends = equilibration_trace(spec, r, {0.0, rec.time}, Indistinguishable{});
  const double back = tvd(ends[0].marginal, ends[1].marginal);

  std::vector<double> times;
  for (int i = 0; i <= 400; ++i) times.push_back(std::numbers::pi * i / 400);
  const auto ind = equilibration_trace(spec, r, times, Indistinguishable{});
  const auto dis = equilibration_trace(spec, r, times, Distinguishable{});
  std::size_t arg = 0;
  double min_dis = 1.0;
  for (std::size_t i = 0; i < ind.size(); ++i) {
    if (ind[i].tvd_to_gge < ind[arg].tvd_to_gge) arg = i;
    min_dis = std::min(min_dis, dis[i].tvd_to_gge);
  }
  const double min_ind = ind[arg].tvd_to_gge;
  const bool interior = arg > 0 && arg + 1 < ind.size();
  const bool pass = rec.found && back < 1e-9 && interior && min_ind < ind.front().tvd_to_gge && min_dis > min_ind;
  return {pass, fmt("t_rec = %.12f, TVD(trace(t_rec), trace(0)) = %.2e; indist min %.4f at t = %.4f (t=0: %.4f); "
                    "dist min %.4f",
                    rec.time, back, min_ind, ind[arg].t, ind.front().tvd_to_gge, min_dis)};
}

Outcome detector_correction() {
  DetectionModel det;
  det.weights = {0.30, 0.25, 0.20, 0.35, 0.30, 0.15, 0.28, 0.22, 0.32, 0.18, 0.33, 0.27};
  FockDistribution truth = FockDistribution::zeros(3, 4);
  truth.probs[truth.index_of({1, 1, 1, 0})] = 0.35;
  truth.probs[truth.index_of({2, 1, 0, 0})] = 0.25;
  truth.probs[truth.index_of({0, 0, 3, 0})] = 0.15;
  truth.probs[truth.index_of({0, 2, 0, 1})] = 0.15;
  truth.probs[truth.index_of({1, 0, 1, 1})] = 0.10;
  const FockSampler sampler(truth);
  const std::size_t records_count = 1000000;
  const std::size_t batch = 1 << 16;
  std::vector<ClickRecord> records(records_count);
  parallel_for((records_count + batch - 1) / batch, [&](std::size_t b) {
    Rng rng(derive_seed(8, b));
    for (std::size_t i = b * batch; i < std::min(records_count, (b + 1) * batch); ++i) {
      records[i] = qpnr_detect(sampler.draw(rng), det, rng);
    }
  });
  const double corrected = joint_tvd(correct_counts(records, det), truth);
  const double raw = joint_tvd(raw_counts(records, det), truth);
  return {corrected < 0.01 && raw >= 0.01,
          fmt("corrected TVD = %.4f (< 0.01), uncorrected TVD = %.4f (must be >= 0.01)", corrected, raw)};
}

Outcome witness() {
  const HamiltonianSpec spec = HamiltonianSpec::hopping(4);
  const ModeOccupation r{1, 1, 1, 0};
  const double w0 = witness_threshold(evolution(spec, 0.0), r, 1);

  CertifyOptions noiseless;
  noiseless.shots = 100000;
  noiseless.seed = 9;
  const CertificationRun at0 = certify(spec, 0.0, Indistinguishable{}, noiseless);
  const CertificationRun at1 = certify(spec, 1.0, Indistinguishable{}, noiseless);
  bool never_at_0 = true;
  for (const auto& res : at0.results) never_at_0 = never_at_0 && !res.entangled;
  bool certified_at_1 = true;
  for (const auto& res : at1.results) certified_at_1 = certified_at_1 && res.f_lower > at1.witness_threshold && res.entangled;

  // Imperfect apparatus: see the ledger entry for the fixed protocol.
  RealMatrix ov(3, 3);
  ov << 1, 0.885, 0.885, 0.885, 1, 0.932, 0.885, 0.932, 1;
  const Mixture mix = mixture_from_pair_overlaps(r, ov);
  ApparatusModel app;
  app.source.pump_power = 5.0;
  app.source.squeezing = std::sqrt(0.005);
  app.source.heralding_efficiency = 0.45;
  app.detection = DetectionModel::with_blinding_fit(std::vector<double>(12, 0.3));
  app.mesh_jitter = calibrate_mesh_jitter(0.98, 12, 100, 42);
  std::vector<double> sums(3, 0.0);
  const int realizations = 20;
  for (int seed = 1; seed <= realizations; ++seed) {
    CertifyOptions opt;
    opt.shots = 100000;
    opt.seed = static_cast<std::uint64_t>(seed);
    opt.apparatus = app;
    const CertificationRun run = certify(spec, 1.0, mix, opt);
    for (std::size_t e = 0; e < 3; ++e) sums[e] += run.results[e].f_lower;
  }
  bool in_band = true;
  std::string band;
  for (std::size_t e = 0; e < 3; ++e) {
    const double mean = sums[e] / realizations;
    const bool ok = mean > 0.25 && mean < 0.6;
    in_band = in_band && ok;
    band += fmt("eps %.1f: %.4f%s ", noiseless.epsilons[e], mean, ok ? "" : " OUT");
  }
  Outcome out;
  out.pass = std::abs(w0 - 1.0) < 1e-12 && never_at_0 && certified_at_1 && in_band;
  out.detail = fmt("threshold(t=0) = %.12f, t=0 never certified: %s; noiseless t=1 f_lower(eps 0.9) = %.4f > %.4f: %s; "
                   "jitter sd %.4f, mean f_lower in (0.25, 0.6): ",
                   w0, never_at_0 ? "yes" : "no", at1.results.back().f_lower, at1.witness_threshold,
                   certified_at_1 ? "yes" : "no", app.mesh_jitter) +
               band;
  if (!in_band) {
    out.notes = {"Protocol fixed before evaluation and not retuned. The mean lands on the lower band edge; single jitter",
                 "realizations scatter with sd ~0.17, so the mean over 20 realizations has standard error ~0.04."};
  }
  return out;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = os.str();
  }
  return files;
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "photherm_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path config = base / "config.json";
  {
    std::ofstream out(config);
    out << R"({
  "hamiltonian": [{"kind": "hopping", "modes": 4}, {"kind": "long_range", "modes": 4, "seed": 3}],
  "times": [0, 0.5, 1],
  "models": [{"type": "indistinguishable"},
             {"type": "pair_overlaps", "name": "lab", "overlaps": [[1, 0.885, 0.885], [0.885, 1, 0.932], [0.885, 0.932, 1]]}],
  "shots": 20000,
  "seed": 12,
  "apparatus": {"mesh_jitter": 0.08, "detection": {"weights": [0.3,0.3,0.3,0.3,0.3,0.3,0.3,0.3,0.3,0.3,0.3,0.3]}},
  "certification": {"batches": 4},
  "gge": {"joint": true, "recurrence": {"t_max": 2}}
})";
  }
  std::vector<std::map<std::string, std::string>> runs;
  bool codes_ok = true;
  for (const std::string threads : {"1", "4", "1"}) {
    const fs::path out = base / ("out_" + std::to_string(runs.size()));
    for (const char* cmd : {"evolve", "gge", "certify", "selftest"}) {
      const std::string out_str = out.string();
      const std::string cfg_str = config.string();
      const char* argv[] = {"photherm", "--config", cfg_str.c_str(), "--out", out_str.c_str(), "--threads", threads.c_str(), cmd};
      std::ostringstream sink, err;
      const int code = cli::run(8, argv, sink, err);
      codes_ok = codes_ok && code == 0;
      if (std::string(cmd) == "selftest") {
        std::ofstream(out / "selftest.txt", std::ios::binary) << sink.str();
      }
    }
    runs.push_back(snapshot(out));
  }
  set_thread_count(1);
  std::size_t differing = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) differing += runs[i] == runs[0] ? 0 : 1;
  fs::remove_all(base);
  return {codes_ok && differing == 0 && runs[0].size() > 10,
          fmt("%zu files per run, 3 runs (threads 1, 4, 1), runs differing from the first: %zu", runs[0].size(),
              differing)};
}

}  // namespace

int main() {
  set_thread_count(std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"permanent oracle", permanent_oracle},
      {"HOM suppression", hom},
      {"Fourier allowed set", fourier_support},
      {"lambda constants", lambda_constants},
      {"GGE law", gge_law},
      {"reversibility / revival", revival},
      {"recurrence and equilibration", recurrence},
      {"detector correction", detector_correction},
      {"witness sanity and noise band", witness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    for (const auto& note : o.notes) std::printf("          %s\n", note.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

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

#include "photherm/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "photherm/errors.hpp"
#include "photherm/gge.hpp"
#include "photherm/oracles.hpp"
#include "photherm/parallel.hpp"

namespace photherm::cli {

namespace {

// One JSON object of the config. Every getter records the value it settled on
// (given or default) so finish() yields the resolved form of the object.
class Node {
 public:
  Node(const Json& src, std::string path) : src_(src), path_(std::move(path)) {
    if (!src_.is_object()) throw ConfigError((path_.empty() ? "/" : path_) + ": expected an object");
  }

  std::string pointer(const std::string& key) const { return path_ + "/" + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(pointer(key) + ": " + message);
  }

  bool has(const std::string& key) const { return src_.contains(key); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return src_.at(key);
  }

  double number(const std::string& key, double fallback) {
    double v = fallback;
    if (has(key)) {
      const Json& j = raw(key);
      if (!j.is_number()) fail(key, "expected a number");
      v = j.get<double>();
    }
    if (!std::isfinite(v)) fail(key, "must be finite");
    out_[key] = v;
    return v;
  }

  long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
    long long v = fallback;
    if (has(key)) {
      const Json& j = raw(key);
      if (!j.is_number_integer()) fail(key, "expected an integer");
      v = j.get<long long>();
    }
    if (v < lo || v > hi) {
      fail(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(v));
    }
    out_[key] = v;
    return v;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    std::uint64_t v = fallback;
    if (has(key)) {
      const Json& j = raw(key);
      if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        fail(key, "expected a non-negative integer");
      }
      v = j.get<std::uint64_t>();
    }
    out_[key] = v;
    return v;
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) {
    std::string v = fallback;
    if (has(key)) {
      const Json& j = raw(key);
      if (!j.is_string()) fail(key, "expected a string");
      v = j.get<std::string>();
    }
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(key, "'" + v + "' is not one of " + list);
    }
    out_[key] = v;
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    bool v = fallback;
    if (has(key)) {
      const Json& j = raw(key);
      if (!j.is_boolean()) fail(key, "expected true or false");
      v = j.get<bool>();
    }
    out_[key] = v;
    return v;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    std::vector<double> v = std::move(fallback);
    if (has(key)) {
      const Json& j = raw(key);
      if (!j.is_array()) fail(key, "expected an array of numbers");
      v.clear();
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(key + "/" + std::to_string(i), "expected a number");
        v.push_back(j[i].get<double>());
        if (!std::isfinite(v.back())) fail(key + "/" + std::to_string(i), "must be finite");
      }
    }
    out_[key] = v;
    return v;
  }

  void put(const std::string& key, Json value) { out_[key] = std::move(value); }

  Json finish() const {
    for (const auto& [key, value] : src_.items()) {
      if (!seen_.count(key)) throw ConfigError(pointer(key) + ": unknown or unused key");
    }
    return out_;
  }

 private:
  const Json& src_;
  std::string path_;
  std::set<std::string> seen_;
  Json out_ = Json::object();
};

template <typename F>
auto rethrow_at(const std::string& pointer, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(pointer + ": " + e.what());
  }
}

std::vector<HamiltonianSpec> parse_hamiltonian(Node& node, Json& resolved) {
  const std::string kind = node.choice("kind", "hopping", {"hopping", "long_range", "explicit"});
  std::optional<HermitianMatrix> matrix;
  if (kind == "explicit") {
    if (!node.has("matrix")) node.fail("matrix", "required for kind 'explicit'");
    const Json& mj = node.raw("matrix");
    matrix = rethrow_at(node.pointer("matrix"), [&] { return HermitianMatrix(complex_matrix_from_json(mj)); });
    node.put("matrix", to_json(matrix->matrix()));
  }
  const int modes = static_cast<int>(node.integer("modes", matrix ? matrix->dim() : 4, 2, 64));
  std::vector<HamiltonianSpec> out;
  if (kind == "hopping") {
    const double coupling = node.number("coupling", 1.0);
    const std::string boundary = node.choice("boundary", "periodic", {"periodic", "open"});
    out.push_back(HamiltonianSpec::hopping(modes, coupling, boundary == "open" ? Boundary::Open : Boundary::Periodic));
  } else if (kind == "long_range") {
    std::vector<std::uint64_t> seeds;
    if (node.has("seeds")) {
      const Json& sj = node.raw("seeds");
      if (!sj.is_array() || sj.empty()) node.fail("seeds", "expected a non-empty array of seeds");
      for (std::size_t i = 0; i < sj.size(); ++i) {
        if (!sj[i].is_number_integer() || sj[i].get<long long>() < 0) {
          node.fail("seeds/" + std::to_string(i), "expected a non-negative integer");
        }
        seeds.push_back(sj[i].get<std::uint64_t>());
      }
      node.put("seeds", seeds);
    } else {
      const std::uint64_t base = node.seed("seed", 0);
      const auto count = node.integer("count", 1, 1, 10000);
      for (long long i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    }
    for (auto s : seeds) out.push_back(HamiltonianSpec::long_range(modes, s));
  } else {
    if (matrix->dim() != modes) node.fail("modes", "differs from the matrix dimension");
    out.push_back(HamiltonianSpec::from_matrix(*matrix));
  }
  resolved = node.finish();
  return out;
}

std::vector<std::vector<int>> parse_groups(Node& node, const std::string& key) {
  if (!node.has(key)) node.fail(key, "required");
  const Json& j = node.raw(key);
  if (!j.is_array()) node.fail(key, "expected an array of photon-index arrays");
  std::vector<std::vector<int>> groups;
  for (std::size_t g = 0; g < j.size(); ++g) {
    if (!j[g].is_array()) node.fail(key + "/" + std::to_string(g), "expected an array of photon indices");
    std::vector<int> group;
    for (std::size_t q = 0; q < j[g].size(); ++q) {
      if (!j[g][q].is_number_integer()) node.fail(key + "/" + std::to_string(g) + "/" + std::to_string(q), "expected an integer");
      group.push_back(j[g][q].get<int>());
    }
    groups.push_back(group);
  }
  node.put(key, groups);
  return groups;
}

NamedModel parse_model(Node& node, const ModeOccupation& input, Json& resolved) {
  const std::string type = node.choice(
      "type", "indistinguishable",
      {"indistinguishable", "distinguishable", "species", "mixture", "shared_mode", "pair_overlaps"});
  NamedModel nm;
  if (node.has("name")) {
    const Json& j = node.raw("name");
    if (!j.is_string() || j.get<std::string>().empty()) node.fail("name", "expected a non-empty string");
    nm.name = j.get<std::string>();
  } else {
    nm.name = type;
  }
  node.put("name", nm.name);
  const int n = input.photons();
  if (type == "indistinguishable") {
    nm.model = Indistinguishable{};
  } else if (type == "distinguishable") {
    nm.model = Distinguishable{};
  } else if (type == "species") {
    const auto groups = parse_groups(node, "groups");
    nm.model = rethrow_at(node.pointer("groups"), [&] { return SpeciesPartition::from_photon_groups(input, groups); });
  } else if (type == "mixture") {
    if (!node.has("components")) node.fail("components", "required for type 'mixture'");
    const Json& cj = node.raw("components");
    if (!cj.is_array() || cj.empty()) node.fail("components", "expected a non-empty array");
    Mixture mix;
    Json out = Json::array();
    double total = 0.0;
    for (std::size_t i = 0; i < cj.size(); ++i) {
      Node comp(cj[i], node.pointer("components/" + std::to_string(i)));
      const double w = comp.number("weight", 0.0);
      if (w < 0.0) comp.fail("weight", "must be non-negative");
      const auto groups = parse_groups(comp, "groups");
      SpeciesPartition p = rethrow_at(comp.pointer("groups"), [&] { return SpeciesPartition::from_photon_groups(input, groups); });
      mix.components.push_back({w, std::move(p)});
      total += w;
      out.push_back(comp.finish());
    }
    if (std::abs(total - 1.0) > 1e-9) node.fail("components", "weights sum to " + format_double(total) + ", expected 1");
    node.put("components", out);
    nm.model = std::move(mix);
  } else if (type == "shared_mode") {
    const auto a = node.numbers("probabilities", {});
    if (static_cast<int>(a.size()) != n) node.fail("probabilities", "need one probability per photon (" + std::to_string(n) + ")");
    nm.model = rethrow_at(node.pointer("probabilities"), [&] { return shared_mode_mixture(input, a); });
  } else {
    if (!node.has("overlaps")) node.fail("overlaps", "required for type 'pair_overlaps'");
    const Json& oj = node.raw("overlaps");
    RealMatrix ov = RealMatrix::Identity(n, n);
    if (!oj.is_array() || static_cast<int>(oj.size()) != n) node.fail("overlaps", "expected a " + std::to_string(n) + " x " + std::to_string(n) + " matrix");
    for (int p = 0; p < n; ++p) {
      const Json& row = oj[static_cast<std::size_t>(p)];
      if (!row.is_array() || static_cast<int>(row.size()) != n) node.fail("overlaps/" + std::to_string(p), "expected a row of " + std::to_string(n) + " numbers");
      for (int q = 0; q < n; ++q) {
        if (!row[static_cast<std::size_t>(q)].is_number()) node.fail("overlaps/" + std::to_string(p) + "/" + std::to_string(q), "expected a number");
        ov(p, q) = row[static_cast<std::size_t>(q)].get<double>();
      }
    }
    node.put("overlaps", oj);
    nm.model = rethrow_at(node.pointer("overlaps"), [&] { return mixture_from_pair_overlaps(input, ov); });
  }
  resolved = node.finish();
  return nm;
}

ApparatusModel parse_apparatus(Node& node, int modes, std::optional<double>& target, Json& resolved) {
  ApparatusModel app;
  {
    static const Json empty = Json::object();
    Node src(node.has("source") ? node.raw("source") : empty, node.pointer("source"));
    app.source.squeezing = src.number("squeezing", std::sqrt(0.005));
    app.source.pump_power = src.number("pump_power", 5.0);
    app.source.heralding_efficiency = src.number("heralding_efficiency", 0.45);
    app.source.max_pairs = static_cast<int>(src.integer("max_pairs", 3, 1, 6));
    rethrow_at(node.pointer("source"), [&] { app.source.validate(); return 0; });
    node.put("source", src.finish());
  }
  {
    static const Json empty = Json::object();
    Node det(node.has("detection") ? node.raw("detection") : empty, node.pointer("detection"));
    if (det.has("weights") && det.has("weights_file")) det.fail("weights_file", "give either weights or weights_file");
    if (det.has("weights")) {
      app.detection.weights = det.numbers("weights", {});
    } else if (det.has("weights_file")) {
      const Json& fj = det.raw("weights_file");
      if (!fj.is_string()) det.fail("weights_file", "expected a path");
      try {
        app.detection.weights = load_weights_csv(fj.get<std::string>());
      } catch (const DomainError& e) {
        throw ConfigError(det.pointer("weights_file") + ": " + e.what());
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
      det.put("weights_file", fj);
      det.put("weights", app.detection.weights);
    } else {
      const double eff = det.number("efficiency", 0.9);
      app.detection.weights = rethrow_at(det.pointer("efficiency"), [&] { return DetectionModel::uniform(modes, eff).weights; });
    }
    if (det.has("blinding") && det.raw("blinding").is_object()) {
      Node b(det.raw("blinding"), det.pointer("blinding"));
      app.detection.blinding_slope = b.number("slope", 0.0);
      app.detection.blinding_intercept = b.number("intercept", 1.0);
      det.put("blinding", b.finish());
    } else {
      const std::string preset = det.choice("blinding", "fit", {"fit", "none"});
      if (preset == "fit") {
        const DetectionModel fit = DetectionModel::with_blinding_fit(app.detection.weights);
        app.detection.blinding_slope = fit.blinding_slope;
        app.detection.blinding_intercept = fit.blinding_intercept;
      }
    }
    app.detection.dark_count_prob = det.number("dark_count_prob", 0.0);
    rethrow_at(node.pointer("detection"), [&] { app.detection.validate(); return 0; });
    if (app.detection.modes() != modes) {
      det.fail("weights", "cover " + std::to_string(app.detection.modes()) + " modes, the chip has " + std::to_string(modes));
    }
    node.put("detection", det.finish());
  }
  if (node.has("mesh_jitter") && node.has("target_amplitude_fidelity")) {
    node.fail("target_amplitude_fidelity", "give either mesh_jitter or target_amplitude_fidelity");
  }
  if (node.has("target_amplitude_fidelity")) {
    const double f = node.number("target_amplitude_fidelity", 0.98);
    if (!(f > 0.0 && f <= 1.0)) node.fail("target_amplitude_fidelity", "must lie in (0, 1]");
    const int cal_modes = static_cast<int>(node.integer("calibration_modes", 12, 2, 64));
    const int samples = static_cast<int>(node.integer("calibration_samples", 100, 1, 100000));
    const std::uint64_t cal_seed = node.seed("calibration_seed", 42);
    target = f;
    app.mesh_jitter = rethrow_at(node.pointer("target_amplitude_fidelity"),
                                 [&] { return calibrate_mesh_jitter(f, cal_modes, samples, cal_seed); });
  } else {
    app.mesh_jitter = node.number("mesh_jitter", 0.0);
    if (app.mesh_jitter < 0.0) node.fail("mesh_jitter", "must be non-negative");
  }
  resolved = node.finish();
  return app;
}

CertifyOptions parse_certification(Node& node, const ModeOccupation& input, Json& resolved) {
  CertifyOptions opt;
  opt.photons = input.photons();
  opt.epsilons = node.numbers("epsilons", {0.7, 0.8, 0.9});
  if (opt.epsilons.empty()) node.fail("epsilons", "need at least one value");
  for (std::size_t i = 0; i < opt.epsilons.size(); ++i) {
    if (!(opt.epsilons[i] > 0.0 && opt.epsilons[i] < 1.0)) node.fail("epsilons/" + std::to_string(i), "must lie in (0, 1)");
  }
  opt.partition_mode = static_cast<int>(node.integer("bipartition", 1, 1, input.modes() - 1));
  opt.batches = static_cast<int>(node.integer("batches", 20, 1, 100000));
  opt.variance = node.choice("variance", "bernoulli", {"bernoulli", "empirical"}) == "bernoulli"
                     ? VarianceMode::Bernoulli
                     : VarianceMode::Empirical;
  opt.lambda_policy = node.choice("lambda_policy", "conservative", {"conservative", "computed"}) == "conservative"
                          ? LambdaPolicy::Conservative
                          : LambdaPolicy::Computed;
  opt.leakage = node.choice("leakage", "forbidden", {"forbidden", "ignore"}) == "forbidden"
                    ? LeakagePolicy::Forbidden
                    : LeakagePolicy::Ignore;
  resolved = node.finish();
  return opt;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string csv_preamble(const ExperimentConfig& cfg) { return "# config: " + cfg.resolved.dump() + "\n"; }

std::string stem(const HamiltonianSpec& spec, const NamedModel& nm) {
  return spec.label() + "_" + sanitize(nm.name);
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t h, std::size_t m, std::size_t t) {
  return derive_seed(derive_seed(derive_seed(seed, 1000 + h), m), t);
}

FockDistribution empirical(const FockDistribution& exact, std::size_t shots, std::uint64_t seed) {
  FockDistribution freq = FockDistribution::zeros(exact.photons, exact.modes);
  const FockSampler sampler(exact);
  Rng rng(seed);
  for (std::size_t i = 0; i < shots; ++i) freq.probs[sampler.draw_index(rng)] += 1.0;
  for (double& p : freq.probs) p /= static_cast<double>(shots);
  return freq;
}

}  // namespace

ExperimentConfig parse_config(const Json& doc, std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg;
  Node root(doc, "");
  Json resolved_h = Json::array();
  {
    static const Json default_h = Json::object();
    const Json& hj = root.has("hamiltonian") ? root.raw("hamiltonian") : default_h;
    if (hj.is_array()) {
      if (hj.empty()) root.fail("hamiltonian", "need at least one Hamiltonian");
      for (std::size_t i = 0; i < hj.size(); ++i) {
        Node node(hj[i], root.pointer("hamiltonian/" + std::to_string(i)));
        Json r;
        for (auto& s : parse_hamiltonian(node, r)) cfg.hamiltonians.push_back(std::move(s));
        resolved_h.push_back(std::move(r));
      }
    } else {
      Node node(hj, root.pointer("hamiltonian"));
      Json r;
      cfg.hamiltonians = parse_hamiltonian(node, r);
      resolved_h.push_back(std::move(r));
    }
    root.put("hamiltonian", resolved_h);
  }
  const int modes = cfg.hamiltonians.front().modes;
  for (const auto& h : cfg.hamiltonians) {
    if (h.modes != modes) root.fail("hamiltonian", "all Hamiltonians must act on the same number of modes");
  }

  if (root.has("input")) {
    const Json& ij = root.raw("input");
    cfg.input = rethrow_at(root.pointer("input"), [&] { return occupation_from_json(ij); });
    if (cfg.input.modes() != modes) root.fail("input", "has " + std::to_string(cfg.input.modes()) + " modes, the Hamiltonian has " + std::to_string(modes));
    if (cfg.input.photons() < 1) root.fail("input", "needs at least one photon");
  } else {
    if (modes < 3) root.fail("input", "required when there are fewer than three modes");
    cfg.input = ModeOccupation::first_modes(3, modes);
  }
  root.put("input", cfg.input.counts());

  cfg.times = root.numbers("times", {0.0, 0.2, 1.0, 2.0, 5.0});
  if (cfg.times.empty()) root.fail("times", "need at least one time");

  {
    Json resolved_models = Json::array();
    std::set<std::string> names;
    auto add = [&](const Json& mj, const std::string& pointer) {
      Node node(mj, pointer);
      Json r;
      NamedModel nm = parse_model(node, cfg.input, r);
      if (!names.insert(sanitize(nm.name)).second) throw ConfigError(pointer + "/name: duplicate model name '" + nm.name + "'");
      cfg.models.push_back(std::move(nm));
      resolved_models.push_back(std::move(r));
    };
    if (root.has("model") && root.has("models")) root.fail("models", "give either model or models");
    if (root.has("models")) {
      const Json& mj = root.raw("models");
      if (!mj.is_array() || mj.empty()) root.fail("models", "expected a non-empty array");
      for (std::size_t i = 0; i < mj.size(); ++i) add(mj[i], root.pointer("models/" + std::to_string(i)));
    } else if (root.has("model")) {
      add(root.raw("model"), root.pointer("model"));
    } else {
      add(Json::object(), root.pointer("model"));
    }
    root.put("models", resolved_models);
  }

  cfg.shots = static_cast<std::size_t>(root.integer("shots", 100000, 1, 1'000'000'000));
  cfg.seed = root.seed("seed", 1);
  if (seed_override) {
    cfg.seed = *seed_override;
    root.put("seed", cfg.seed);
  }

  if (root.has("apparatus")) {
    Node node(root.raw("apparatus"), root.pointer("apparatus"));
    Json r;
    cfg.apparatus = parse_apparatus(node, modes, cfg.target_amplitude_fidelity, r);
    root.put("apparatus", r);
    if (cfg.input != injected_occupation(1, 1, modes)) {
      root.fail("input", "the apparatus source injects " + injected_occupation(1, 1, modes).to_string());
    }
  }
  if (root.has("certification")) {
    Node node(root.raw("certification"), root.pointer("certification"));
    Json r;
    cfg.certification = parse_certification(node, cfg.input, r);
    root.put("certification", r);
    if (cfg.input != ModeOccupation::first_modes(cfg.input.photons(), modes)) {
      root.fail("input", "certification needs one photon in each of the first n modes");
    }
    if (cfg.input.photons() < 2 || cfg.input.photons() > 6) root.fail("input", "certification supports 2 to 6 photons");
  }
  {
    static const Json empty = Json::object();
    Node node(root.has("gge") ? root.raw("gge") : empty, root.pointer("gge"));
    cfg.gge.mode = static_cast<int>(node.integer("mode", 1, 1, modes));
    cfg.gge.joint = node.boolean("joint", false);
    if (node.has("recurrence")) {
      Node rec(node.raw("recurrence"), node.pointer("recurrence"));
      cfg.gge.recurrence_t_max = rec.number("t_max", 4.0);
      if (!(*cfg.gge.recurrence_t_max > 0.0)) rec.fail("t_max", "must be positive");
      cfg.gge.recurrence_grid = static_cast<int>(rec.integer("grid", 400, 3, 1'000'000));
      node.put("recurrence", rec.finish());
    }
    root.put("gge", node.finish());
  }
  cfg.resolved = root.finish();
  return cfg;
}

std::string config_hash(const std::string& command, const Json& resolved) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(command + "\n" + resolved.dump());
  return os.str();
}

std::filesystem::path prepare_run_dir(const std::string& command, const ExperimentConfig& cfg,
                                      const RunContext& ctx) {
  namespace fs = std::filesystem;
  const fs::path dir = ctx.out_root / (command + "-" + config_hash(command, cfg.resolved));
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!ctx.force) throw IoError(dir.string() + " already exists; pass --force to overwrite");
    fs::remove_all(dir, ec);
    if (ec) throw IoError("cannot clear " + dir.string() + ": " + ec.message());
  }
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "config.json", cfg.resolved.dump(2) + "\n");
  return dir;
}

std::filesystem::path cmd_evolve(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto dir = prepare_run_dir("evolve", cfg, ctx);
  for (std::size_t h = 0; h < cfg.hamiltonians.size(); ++h) {
    const HamiltonianSpec& spec = cfg.hamiltonians[h];
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
      const NamedModel& nm = cfg.models[mi];
      Json doc;
      doc["command"] = "evolve";
      doc["config"] = cfg.resolved;
      doc["hamiltonian"] = to_json(spec);
      doc["model"] = to_json(nm.model);
      doc["model"]["name"] = nm.name;
      doc["input"] = cfg.input.counts();
      doc["shots"] = cfg.shots;
      Json steps = Json::array();
      std::ostringstream csv;
      csv << csv_preamble(cfg) << "t,pattern,exact,sampled\n";
      for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        const double t = cfg.times[ti];
        const std::uint64_t seed = stream_seed(cfg.seed, h, mi, ti);
        const ComplexMatrix u = evolution(spec, t);
        const FockDistribution exact = output_distribution(u, cfg.input, nm.model);
        Json step;
        step["t"] = t;
        step["seed"] = seed;
        step["unitary"] = to_json(u);
        FockDistribution sampled;
        if (cfg.apparatus) {
          const ExperimentRun run = run_experiment(spec, t, cfg.input, nm.model, *cfg.apparatus, cfg.shots, seed);
          sampled = run.corrected;
          step["realized_unitary"] = to_json(run.u_get);
          step["amplitude_fidelity"] = amplitude_fidelity(run.u_set, run.u_get);
          step["uncorrected"] = to_json(raw_counts(run.records, cfg.apparatus->detection, cfg.input.photons()));
        } else {
          sampled = empirical(exact, cfg.shots, seed);
        }
        step["exact"] = to_json(exact);
        step["sampled"] = to_json(sampled);
        steps.push_back(std::move(step));
        for (std::size_t i = 0; i < exact.basis.size(); ++i) {
          if (exact.probs[i] == 0.0 && sampled.probs[i] == 0.0) continue;
          csv << format_double(t) << ',' << exact.basis[i].to_string() << ',' << format_double(exact.probs[i])
              << ',' << format_double(sampled.probs[i]) << '\n';
        }
      }
      doc["steps"] = std::move(steps);
      write_file(dir / ("evolve_" + stem(spec, nm) + ".json"), doc.dump(1) + "\n");
      write_file(dir / ("evolve_" + stem(spec, nm) + ".csv"), csv.str());
    }
  }
  return dir;
}

std::filesystem::path cmd_gge(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto dir = prepare_run_dir("gge", cfg, ctx);
  const int n = cfg.input.photons();
  const int m = cfg.input.modes();
  const MarginalDistribution reference = gge_marginal(n, m);
  for (std::size_t h = 0; h < cfg.hamiltonians.size(); ++h) {
    const HamiltonianSpec& spec = cfg.hamiltonians[h];
    for (const NamedModel& nm : cfg.models) {
      const auto trace = equilibration_trace(spec, cfg.input, cfg.times, nm.model, cfg.gge.mode);
      std::ostringstream marg;
      marg << csv_preamble(cfg) << "t,k,p_k,tvd\n";
      std::ostringstream tv;
      tv << csv_preamble(cfg) << (cfg.gge.joint ? "t,tvd,joint_tvd_distinguishable\n" : "t,tvd\n");
      Json momentum = Json::array();
      std::size_t best = 0;
      for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& pt = trace[i];
        for (std::size_t k = 0; k < pt.marginal.probs.size(); ++k) {
          marg << format_double(pt.t) << ',' << k << ',' << format_double(pt.marginal.probs[k]) << ','
               << format_double(pt.tvd_to_gge) << '\n';
        }
        tv << format_double(pt.t) << ',' << format_double(pt.tvd_to_gge);
        const ComplexMatrix u = evolution(spec, pt.t);
        if (cfg.gge.joint) {
          tv << ',' << format_double(joint_tvd(output_distribution(u, cfg.input, nm.model),
                                               output_distribution(u, cfg.input, Distinguishable{})));
        }
        tv << '\n';
        Json mo;
        mo["t"] = pt.t;
        mo["values"] = momentum_occupations(single_particle_correlations(u, cfg.input));
        momentum.push_back(std::move(mo));
        if (pt.tvd_to_gge < trace[best].tvd_to_gge) best = i;
      }
      Json doc;
      doc["command"] = "gge";
      doc["config"] = cfg.resolved;
      doc["hamiltonian"] = to_json(spec);
      doc["model"] = to_json(nm.model);
      doc["model"]["name"] = nm.name;
      doc["mode"] = cfg.gge.mode;
      doc["density"] = static_cast<double>(n) / m;
      doc["gge_truncated"] = reference.probs;
      doc["gge_untruncated"] = gge_marginal_untruncated(n, m);
      doc["momentum_occupations"] = std::move(momentum);
      doc["tvd_first"] = trace.front().tvd_to_gge;
      doc["tvd_min"] = trace[best].tvd_to_gge;
      doc["t_at_tvd_min"] = trace[best].t;
      if (cfg.gge.recurrence_t_max) {
        const Recurrence rec = find_recurrence(spec, cfg.input, nm.model, *cfg.gge.recurrence_t_max,
                                               cfg.gge.recurrence_grid, cfg.gge.mode);
        Json rj;
        rj["found"] = rec.found;
        rj["time"] = rec.time;
        rj["distance_to_initial"] = rec.distance;
        doc["recurrence"] = std::move(rj);
      }
      const std::string base = "gge_" + stem(spec, nm);
      write_file(dir / (base + "_marginal.csv"), marg.str());
      write_file(dir / (base + "_tvd.csv"), tv.str());
      write_file(dir / (base + ".json"), doc.dump(1) + "\n");
    }
  }
  return dir;
}

std::filesystem::path cmd_certify(const ExperimentConfig& cfg, const RunContext& ctx) {
  if (!cfg.certification) throw ConfigError("/certification: required by the certify command");
  const auto dir = prepare_run_dir("certify", cfg, ctx);
  for (std::size_t h = 0; h < cfg.hamiltonians.size(); ++h) {
    const HamiltonianSpec& spec = cfg.hamiltonians[h];
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
      const NamedModel& nm = cfg.models[mi];
      for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        CertifyOptions opt = *cfg.certification;
        opt.shots = cfg.shots;
        opt.seed = stream_seed(cfg.seed, h, mi, ti);
        opt.apparatus = cfg.apparatus;
        const CertificationRun run = certify(spec, cfg.times[ti], nm.model, opt);
        Json doc;
        doc["command"] = "certify";
        doc["config"] = cfg.resolved;
        doc["hamiltonian"] = to_json(spec);
        doc["model"] = to_json(nm.model);
        doc["model"]["name"] = nm.name;
        doc["t"] = cfg.times[ti];
        doc["shots"] = cfg.shots;
        doc["seed"] = opt.seed;
        doc["epsilons"] = opt.epsilons;
        if (cfg.apparatus) doc["mesh_jitter"] = cfg.apparatus->mesh_jitter;
        Json lambdas = Json::array();
        for (const auto& c : run.lambdas) lambdas.push_back(to_json(c));
        doc["lambdas"] = std::move(lambdas);
        doc["lambda_min_used"] = run.lambda_min;
        doc["witness_threshold"] = run.witness_threshold;
        doc["p1"] = {{"value", run.p1.value}, {"hits", run.p1.hits}, {"count", run.p1.count}};
        doc["p2"] = {{"value", run.p2.value}, {"hits", run.p2.hits}, {"count", run.p2.count}};
        Json results = Json::array();
        for (const auto& r : run.results) results.push_back(to_json(r));
        doc["results"] = std::move(results);
        doc["epsilon_note"] =
            "delta uses ln(1/epsilon) with epsilon as given; *_error_reading fields use ln(1/(1-epsilon))";
        std::ostringstream csv;
        csv << csv_preamble(cfg) << "batch,shots,inv_sqrt_shots,epsilon,p1,p2,delta,f_lower\n";
        for (const auto& c : run.convergence) {
          csv << c.batch << ',' << c.shots << ',' << format_double(c.inv_sqrt_shots) << ','
              << format_double(c.epsilon) << ',' << format_double(c.p1) << ',' << format_double(c.p2) << ','
              << format_double(c.delta) << ',' << format_double(c.f_lower) << '\n';
        }
        const std::string base = "certify_" + stem(spec, nm) + "_t" + std::to_string(ti);
        write_file(dir / (base + ".json"), doc.dump(1) + "\n");
        write_file(dir / (base + "_convergence.csv"), csv.str());
      }
    }
  }
  return dir;
}

bool cmd_selftest(std::ostream& out) {
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    ok = ok && pass;
  };
  auto sci = [](double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << x;
    return os.str();
  };

  {
    double worst = 0.0;
    Rng rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + trial % 6;
      ComplexMatrix a(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
      }
      const Complex ref = oracle::naive_permanent(a);
      worst = std::max(worst, std::abs(permanent(a) - ref) / std::max(1.0, std::abs(ref)));
    }
    report("permanent vs n!-sum (200 matrices, n<=6)", worst < 1e-12, "max rel residual " + sci(worst));
  }
  {
    double worst = 0.0;
    for (int m = 2; m <= 6; ++m) {
      const HamiltonianSpec spec = HamiltonianSpec::hopping(m);
      worst = std::max(worst, max_abs_diff(evolution(spec, 1.3), oracle::series_expm(build(spec).matrix(), 1.3)));
      const HermitianMatrix h = build(HamiltonianSpec::long_range(m, 11));
      worst = std::max(worst, max_abs_diff(expm(h, 0.7), oracle::series_expm(h.matrix(), 0.7)));
    }
    report("expm vs Taylor scaling-and-squaring", worst < 1e-10, "max residual " + sci(worst));
  }
  {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const ComplexMatrix v = haar_random(2 + static_cast<int>(seed % 5), seed);
      worst = std::max(worst, max_abs_diff(expm(logm_unitary(v), 1.0), v));
    }
    report("expm(logm(V)) = V (100 Haar unitaries)", worst < kRoundTripTol, "max residual " + sci(worst));
  }
  {
    double worst = 0.0;
    for (int m = 2; m <= 12; ++m) {
      const ComplexMatrix v = haar_random(m, 100 + static_cast<std::uint64_t>(m));
      worst = std::max(worst, max_abs_diff(mesh_compose(mesh_decompose(v)), v));
    }
    report("mesh decompose/compose round trip (m<=12)", worst < 1e-8, "max residual " + sci(worst));
  }
  {
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
      const FockDistribution d = output_distribution(fourier(n, n + 1), ModeOccupation::first_modes(n, n + 1),
                                                     Indistinguishable{});
      for (std::size_t i = 0; i < d.basis.size(); ++i) {
        if (is_forbidden(d.basis[i], n)) worst = std::max(worst, d.probs[i]);
      }
    }
    report("suppression law n=2,3,4", worst < 1e-12, "max forbidden probability " + sci(worst));
  }
  {
    const auto table = lambda_coefficients(3, 4);
    const ModeOccupation input = ModeOccupation::first_modes(3, 4);
    for (const auto& c : table) {
      std::vector<std::vector<int>> groups;
      int next = 0;
      for (int size : c.sizes) {
        std::vector<int> g;
        for (int q = 0; q < size; ++q) g.push_back(next++);
        groups.push_back(g);
      }
      const SpeciesPartition partition = SpeciesPartition::from_photon_groups(input, groups);
      const FockDistribution enlarged = oracle::internal_mode_distribution(fourier(3, 4), partition);
      double lambda_oracle = 0.0;
      for (std::size_t i = 0; i < enlarged.basis.size(); ++i) {
        if (is_forbidden(enlarged.basis[i], 3)) lambda_oracle += enlarged.probs[i];
      }
      const MonteCarloEstimate mc = lambda_monte_carlo(partition, 4, 100000, 2024);
      const double z = std::abs(mc.mean - c.lambda) / std::max(mc.std_error, 1e-12);
      std::ostringstream detail;
      detail << std::setprecision(12) << "lambda=" << c.lambda << " internal-mode oracle=" << lambda_oracle
             << std::setprecision(5) << " monte carlo=" << mc.mean << " (" << z << " sigma)"
             << " placement spread=" << sci(c.spread);
      if (c.label() == "2+1") detail << " (published value 4/9 = 0.44444)";
      if (c.label() == "1+1+1") detail << " (published value 2/3 = 0.66667)";
      report("lambda class " + c.label(), std::abs(lambda_oracle - c.lambda) < 1e-12 && z < 3.0 && c.spread < 1e-12,
             detail.str());
    }
  }
  {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ComplexMatrix u = haar_random(5, seed);
      const ModeOccupation r{1, 1, 1, 0, 0};
      for (const DistinguishabilityModel& model :
           {DistinguishabilityModel(Indistinguishable{}), DistinguishabilityModel(Distinguishable{}),
            DistinguishabilityModel(SpeciesPartition::from_photon_groups(r, {{0, 2}, {1}}))}) {
        worst = std::max(worst, std::abs(output_distribution(u, r, model).total() - 1.0));
      }
    }
    report("output distributions normalized", worst < 1e-9, "max |sum - 1| " + sci(worst));
  }
  return ok;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear-optics equilibration simulator and fidelity-witness certification"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "runs";
  bool force = false;
  int threads = 1;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--seed", seed, "Master seed, overrides the config value");
  app.add_option("--out", out_dir, "Root directory for run outputs")->capture_default_str();
  app.add_flag("--force", force, "Overwrite an existing run directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  auto* evolve = app.add_subcommand("evolve", "Exact and sampled output distributions per time");
  auto* gge = app.add_subcommand("gge", "Mode marginals and TVD to the generalized Gibbs ensemble");
  auto* cert = app.add_subcommand("certify", "Two-setting fidelity witness");
  auto* selftest = app.add_subcommand("selftest", "Oracle cross-checks");
  for (auto* sub : {evolve, gge, cert, selftest}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }
  set_thread_count(threads);

  if (selftest->parsed()) return cmd_selftest(out) ? kOk : kSelftestFailed;

  try {
    Json doc = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot read config " + config_path);
      try {
        doc = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
    }
    const ExperimentConfig cfg = parse_config(doc, seed);
    const RunContext ctx{out_dir, force};
    std::filesystem::path dir;
    if (evolve->parsed()) dir = cmd_evolve(cfg, ctx);
    if (gge->parsed()) dir = cmd_gge(cfg, ctx);
    if (cert->parsed()) dir = cmd_certify(cfg, ctx);
    out << dir.string() << '\n';
    return kOk;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::logic_error& e) {  // DimensionError, DomainError, CapacityError
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace photherm::cli

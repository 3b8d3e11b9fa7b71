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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photherm/apparatus.hpp"
#include "photherm/certify.hpp"
#include "photherm/hamiltonian.hpp"
#include "photherm/io.hpp"

namespace photherm::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kSelftestFailed = 3 };

/// Schema violation; the message starts with the JSON pointer of the offending value.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NamedModel {
  std::string name;
  DistinguishabilityModel model;
};

struct GgeSettings {
  int mode = 1;
  bool joint = false;
  std::optional<double> recurrence_t_max;
  int recurrence_grid = 400;
};

struct ExperimentConfig {
  std::vector<HamiltonianSpec> hamiltonians;
  ModeOccupation input;
  std::vector<double> times;
  std::vector<NamedModel> models;
  std::size_t shots = 100000;
  std::uint64_t seed = 1;
  std::optional<ApparatusModel> apparatus;
  std::optional<double> target_amplitude_fidelity;  // when the jitter is calibrated
  std::optional<CertifyOptions> certification;
  GgeSettings gge;
  /// Every value after defaults and overrides, in a stable key order.
  Json resolved;
};

/// Validates `doc` and fills defaults. A seed override replaces the file value.
ExperimentConfig parse_config(const Json& doc, std::optional<std::uint64_t> seed_override = {});

/// 64-bit FNV-1a of the resolved config and the command name, as 16 hex digits.
std::string config_hash(const std::string& command, const Json& resolved);

struct RunContext {
  std::filesystem::path out_root = "runs";
  bool force = false;
};

/// Creates <out_root>/<command>-<hash>; refuses to reuse an existing directory
/// unless ctx.force. Returns the directory.
std::filesystem::path prepare_run_dir(const std::string& command, const ExperimentConfig& cfg,
                                      const RunContext& ctx);

std::filesystem::path cmd_evolve(const ExperimentConfig& cfg, const RunContext& ctx);
std::filesystem::path cmd_gge(const ExperimentConfig& cfg, const RunContext& ctx);
std::filesystem::path cmd_certify(const ExperimentConfig& cfg, const RunContext& ctx);

/// Oracle suite; prints one line per check. Returns true when every check passes.
bool cmd_selftest(std::ostream& out);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace photherm::cli

#ifndef AMTK_HARNESS_HPP
#define AMTK_HARNESS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "am/adapt.hpp"
#include "am/certify.hpp"
#include "am/io.hpp"

namespace am {

// Target described by a config block; `params` keeps the raw JSON so configs
// echo byte-identically.
struct TargetSpec {
  std::string name;
  int dim = 1;
  json params;
};

std::unique_ptr<TargetDensity> make_target(const TargetSpec& spec);

struct CertifyRequest {
  bool enabled = false;
  double margin = 0.05;
  std::vector<double> search_radii = {1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  bool expect_no_drift = false;  // negative control: NoDriftFound counts as pass
};

// Fully validated experiment description. `parse_config` fills defaults and
// aggregates every violation into a single ValidationError.
struct RunConfig {
  TargetSpec target;
  AmConfig am;
  ConstraintSchedule constraint;
  long n_steps = 0;
  int n_chains = 1;
  std::uint64_t root_seed = 0;
  Vector x0;
  Matrix sigma0;
  std::vector<long> checkpoints;
  std::string out_dir;
  int workers = 1;
  CertifyRequest certify;
};

RunConfig parse_config_json(const json& j);
RunConfig parse_config(const std::string& path);

// Canonical config echo; parse(emit(parse(x))) == parse(x) and emissions are
// byte-identical.
json config_to_json(const RunConfig& cfg);

struct ChainResult {
  int index = 0;
  std::uint64_t seed = 0;
  std::string trace_csv_path;
  std::string sidecar_path;
  std::string trace_hash;
  double accept_rate = 0.0;
  double steps_per_sec = 0.0;
  long constraint_hits = 0;
};

struct OutputRecord {
  json config_echo;
  std::vector<ChainResult> chains;
  json diagnostics;
  json certify;
  std::vector<std::string> files;
  double wallclock_sec = 0.0;
  bool all_checks_passed = true;
  std::string summary_path;
};

// Runs n_chains chains with seeds derive_stream_seed(root_seed, index),
// writes one CSV + JSON sidecar per chain plus a summary JSON, and runs the
// optional certification block. Chains execute concurrently up to `workers`;
// outputs are identical regardless of the worker count.
OutputRecord run_experiment(const RunConfig& cfg);

// Re-derives every trace of a recorded run from (config echo, seed) and
// compares hashes against both the summary and the bytes on disk.
struct ReplayReport {
  bool ok = true;
  std::vector<std::string> mismatches;
};

ReplayReport replay(const std::string& summary_path);

// Default output root: $AMTK_OUT_ROOT or "amtk_out".
std::string default_out_root();

}  // namespace am

#endif  // AMTK_HARNESS_HPP

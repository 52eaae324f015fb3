// amtk: adaptive Metropolis sampling, target verification, drift
// certification and trace replay from one reproducible CLI.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "am/harness.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

am::TargetSpec target_spec_from_flags(const std::string& name, int dim, double p) {
  am::TargetSpec spec;
  spec.name = name;
  spec.dim = dim;
  spec.params = am::json::object();
  if (name == "power_exponential") spec.params["p"] = p;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive Metropolis toolkit"};
  app.require_subcommand(1);

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "run AM chains from a config file");
  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  int chains_override = 0, workers_override = 0;
  long steps_override = 0;
  bool have_seed = false;
  sample->add_option("--config", config_path, "config JSON")->required();
  sample->add_option("--seed", seed_override, "override run.root_seed")
      ->each([&](const std::string&) { have_seed = true; });
  sample->add_option("--chains", chains_override, "override run.n_chains");
  sample->add_option("--steps", steps_override, "override run.n_steps");
  sample->add_option("--out", out_override, "override run.out_dir");
  sample->add_option("--workers", workers_override, "override run.workers");

  // ---- certify ----
  auto* certify = app.add_subcommand("certify", "fit a drift certificate and bounds");
  std::string c_target = "gaussian";
  int c_dim = 1;
  double c_p = 1.5, c_margin = 0.05, c_vscale = 1.0;
  std::string c_radii = "1,1.5,2,3,4,6", c_family, c_out;
  bool c_expect_no_drift = false;
  certify->add_option("target", c_target, "target name")->required();
  certify->add_option("--dim", c_dim, "dimension");
  certify->add_option("--p", c_p, "power-exponential exponent");
  certify->add_option("--margin", c_margin, "drift margin (lambda = 1 - margin)");
  certify->add_option("--v-scale", c_vscale, "proposal covariance = scale * I");
  certify->add_option("--radii", c_radii, "candidate ball radii, comma separated");
  certify->add_option("--family", c_family,
                      "extra scales for the det-scaling audit, comma separated");
  certify->add_option("--out", c_out, "output directory");
  certify->add_flag("--expect-no-drift", c_expect_no_drift,
                    "negative control: NoDriftFound is the expected outcome");

  // ---- verify-target ----
  auto* verify = app.add_subcommand("verify-target", "tail and contour checks");
  std::string v_target = "gaussian", v_radii = "4,8,16,32,64,128,256";
  std::string v_contour_radii = "2,4,8,16,32";
  int v_dim = 1, v_dirs = 64;
  double v_rho = 1.5, v_p = 1.5, v_threshold = 10.0, v_margin = 0.1;
  std::uint64_t v_seed = 1;
  verify->add_option("target", v_target, "target name")->required();
  verify->add_option("--dim", v_dim, "dimension");
  verify->add_option("--p", v_p, "power-exponential exponent");
  verify->add_option("--rho", v_rho, "tail exponent rho > 1");
  verify->add_option("--radii", v_radii, "tail shell radii");
  verify->add_option("--contour-radii", v_contour_radii, "contour shell radii");
  verify->add_option("--dirs", v_dirs, "directions per shell");
  verify->add_option("--threshold", v_threshold, "tail divergence threshold");
  verify->add_option("--margin", v_margin, "contour margin");
  verify->add_option("--seed", v_seed, "direction-sampling seed");

  // ---- diagnose ----
  auto* diagnose = app.add_subcommand("diagnose", "recompute diagnostics for a run");
  std::string d_run, d_out;
  int d_batches = 50;
  double d_burn = 0.1;
  diagnose->add_option("--run", d_run, "summary.json of a recorded run")->required();
  diagnose->add_option("--batches", d_batches, "batch count for batch means");
  diagnose->add_option("--burn", d_burn, "burn-in fraction for batch means");
  diagnose->add_option("--out", d_out, "directory for per-chain CSV reports");

  // ---- replay ----
  auto* replay_cmd = app.add_subcommand("replay", "re-derive traces and verify hashes");
  std::string r_run;
  replay_cmd->add_option("--run", r_run, "summary.json of a recorded run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      am::RunConfig cfg = am::parse_config(config_path);
      if (have_seed) cfg.root_seed = seed_override;
      if (chains_override > 0) cfg.n_chains = chains_override;
      if (steps_override > 0) {
        cfg.n_steps = steps_override;
        // Drop checkpoints the shortened run can no longer reach.
        std::erase_if(cfg.checkpoints, [&](long c) { return c > cfg.n_steps; });
        if (cfg.checkpoints.empty()) cfg.checkpoints.push_back(cfg.n_steps);
      }
      if (workers_override > 0) cfg.workers = workers_override;
      if (!out_override.empty()) cfg.out_dir = out_override;
      const am::OutputRecord record = am::run_experiment(cfg);
      std::cout << "wrote " << record.summary_path << " (" << record.chains.size()
                << " chains, " << record.wallclock_sec << " s)\n";
      return record.all_checks_passed ? 0 : 1;
    }

    if (*certify) {
      const am::TargetSpec spec = target_spec_from_flags(c_target, c_dim, c_p);
      const auto target = am::make_target(spec);
      const auto radii = parse_double_list(c_radii);
      const am::SpdMatrix v = am::SpdMatrix::identity(c_dim, c_vscale);
      am::json out;
      try {
        const am::DriftCertificate cert =
            am::fit_drift_certificate(*target, v, radii, c_margin);
        const am::ConvergenceBound bound = am::mt_bound(cert.lambda, cert.b, cert.delta);
        out = am::json{{"certificate", am::to_json(cert)}, {"bound", am::to_json(bound)}};
        std::string audit_csv;
        if (!c_family.empty()) {
          std::vector<am::SpdMatrix> family;
          for (double s : parse_double_list(c_family))
            family.push_back(am::SpdMatrix::identity(c_dim, s));
          const am::ScalingAudit audit =
              am::det_scaling_audit(*target, family, 0.0, radii, c_margin);
          out["audit"] = am::to_json(audit);
          audit_csv = am::to_csv(audit);
        }
        std::cout << out.dump(2) << "\n";
        if (!audit_csv.empty() && c_out.empty()) std::cout << audit_csv;
        if (!c_out.empty()) {
          std::filesystem::create_directories(c_out);
          am::write_file(c_out + "/certificate.json", out.dump(2) + "\n");
          if (!audit_csv.empty()) am::write_file(c_out + "/audit.csv", audit_csv);
        }
        return c_expect_no_drift ? 1 : 0;
      } catch (const am::NoDriftFound& e) {
        out = am::json{{"no_drift_found", e.what()},
                       {"negative_control_pass", c_expect_no_drift}};
        std::cout << out.dump(2) << "\n";
        if (!c_out.empty()) am::write_file(c_out + "/certificate.json", out.dump(2) + "\n");
        return c_expect_no_drift ? 0 : 1;
      }
    }

    if (*verify) {
      const am::TargetSpec spec = target_spec_from_flags(v_target, v_dim, v_p);
      const auto target = am::make_target(spec);
      am::RngStream rng(v_seed);
      const am::TailReport tail = am::verify_super_exponential(
          *target, v_rho, parse_double_list(v_radii), v_dirs, rng, v_threshold);
      am::RngStream rng2(am::derive_stream_seed(v_seed, 1));
      const am::ContourReport contour = am::verify_contour_regularity(
          *target, parse_double_list(v_contour_radii), v_dirs, rng2, v_margin);
      am::json out{{"tail", am::to_json(tail)}, {"contour", am::to_json(contour)}};
      std::cout << out.dump(2) << "\n";
      return (tail.verdict == am::Verdict::pass && contour.verdict == am::Verdict::pass)
                 ? 0
                 : 1;
    }

    if (*diagnose) {
      const am::json summary = am::json::parse(am::read_file(d_run));
      const am::RunConfig cfg = am::parse_config_json(summary.at("config"));
      const auto target = am::make_target(cfg.target);
      const am::DriftFunction df(*target);
      am::json out = am::json::array();
      if (!d_out.empty()) std::filesystem::create_directories(d_out);
      for (const auto& entry : summary.at("chains")) {
        const int index = entry.at("index").get<int>();
        am::ChainTrace trace =
            am::trace_from_csv(am::read_file(entry.at("trace_csv").get<std::string>()));
        try {
          const am::json sidecar =
              am::json::parse(am::read_file(entry.at("sidecar").get<std::string>()));
          for (const auto& snap : sidecar.at("snapshots")) {
            am::ChainTrace::Snapshot s;
            s.step = snap.at("step").get<long>();
            s.mean = am::Vector(trace.dim);
            s.cov = am::Matrix(trace.dim, trace.dim);
            for (int i = 0; i < trace.dim; ++i) {
              s.mean[i] = snap.at("mean").at(i).get<double>();
              for (int k = 0; k < trace.dim; ++k)
                s.cov(i, k) = snap.at("cov").at(i).at(k).get<double>();
            }
            s.certified_floor = snap.value("certified_floor", 0.0);
            trace.snapshots.push_back(std::move(s));
          }
        } catch (const std::exception&) {
          // Sidecar missing or unreadable: snapshot diagnostics are skipped.
        }
        am::json chain{{"chain", index}};
        const am::EstimatorSeries series = am::running_average(
            trace, [](const am::Vector& x) { return x.squaredNorm(); }, cfg.checkpoints);
        chain["running_average_sq_norm"] = am::to_json(series);
        std::string batch_csv;
        try {
          const am::BatchMeansReport bm = am::clt_batch_means(
              trace, [](const am::Vector& x) { return x[0]; }, d_batches, d_burn);
          chain["batch_means_x0"] = am::to_json(bm);
          batch_csv = am::to_csv(bm);
        } catch (const am::TooShort& e) {
          chain["batch_means_x0"] = am::json{{"error", e.what()}};
        }
        const am::VMomentReport vr = am::v_moment_track(trace, df, 0.5);
        chain["v_moment"] = am::json{{"slope", vr.slope}, {"flagged", vr.flagged}};
        std::string limit_csv;
        if (cfg.target.name == "gaussian" && !trace.snapshots.empty()) {
          // Analytic reference moments are available for gaussian targets.
          am::Vector ref_mean = am::Vector::Zero(trace.dim);
          am::Matrix ref_cov = am::Matrix::Identity(trace.dim, trace.dim);
          if (cfg.target.params.contains("mean"))
            for (int i = 0; i < trace.dim; ++i)
              ref_mean[i] = cfg.target.params["mean"].at(i).get<double>();
          if (cfg.target.params.contains("cov"))
            for (int i = 0; i < trace.dim; ++i)
              for (int k = 0; k < trace.dim; ++k)
                ref_cov(i, k) = cfg.target.params["cov"].at(i).at(k).get<double>();
          const am::AdaptationDistanceSeries limit = am::adaptation_limit(
              trace, ref_mean, am::SpdMatrix::from_matrix(ref_cov), cfg.am.kappa);
          chain["adaptation_limit"] =
              am::json{{"steps", limit.steps}, {"distances", limit.distances}};
          limit_csv = am::to_csv(limit);
        }
        out.push_back(chain);
        if (!d_out.empty()) {
          const std::string stem = d_out + "/chain_" + std::to_string(index);
          am::write_file(stem + "_running_average.csv", am::to_csv(series));
          if (!batch_csv.empty()) am::write_file(stem + "_batch_means.csv", batch_csv);
          am::write_file(stem + "_v_moment.csv", am::to_csv(vr));
          if (!limit_csv.empty()) am::write_file(stem + "_adaptation_limit.csv", limit_csv);
        }
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*replay_cmd) {
      const am::ReplayReport report = am::replay(r_run);
      if (report.ok) {
        std::cout << "replay ok: all traces reproduce their recorded hashes\n";
        return 0;
      }
      for (const auto& m : report.mismatches) std::cerr << "replay mismatch: " << m << "\n";
      return 1;
    }
  } catch (const am::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const am::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

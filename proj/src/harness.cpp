#include "am/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

namespace am {

namespace fs = std::filesystem;

std::unique_ptr<TargetDensity> make_target(const TargetSpec& spec) {
  const json& p = spec.params;
  if (spec.name == "gaussian") {
    Vector mean = Vector::Zero(spec.dim);
    Matrix cov = Matrix::Identity(spec.dim, spec.dim);
    if (p.contains("mean"))
      for (int i = 0; i < spec.dim; ++i) mean[i] = p["mean"].at(i).get<double>();
    if (p.contains("cov"))
      for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j) cov(i, j) = p["cov"].at(i).at(j).get<double>();
    return std::make_unique<GaussianTarget>(mean, SpdMatrix::from_matrix(cov));
  }
  if (spec.name == "power_exponential") {
    return std::make_unique<PowerExponentialTarget>(spec.dim, p.value("p", 1.5));
  }
  if (spec.name == "gaussian_mixture") {
    std::vector<double> weights = p.at("weights").get<std::vector<double>>();
    std::vector<Vector> means;
    std::vector<SpdMatrix> covs;
    for (const auto& jm : p.at("means")) {
      Vector m(spec.dim);
      for (int i = 0; i < spec.dim; ++i) m[i] = jm.at(i).get<double>();
      means.push_back(m);
    }
    for (const auto& jc : p.at("covs")) {
      Matrix c(spec.dim, spec.dim);
      for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j) c(i, j) = jc.at(i).at(j).get<double>();
      covs.push_back(SpdMatrix::from_matrix(c));
    }
    return std::make_unique<GaussianMixtureTarget>(weights, means, covs);
  }
  if (spec.name == "cauchy_like") {
    return std::make_unique<CauchyLikeTarget>(spec.dim);
  }
  throw ValidationError({"unknown target '" + spec.name + "'"});
}

namespace {

Matrix json_to_matrix(const json& j, int d) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

}  // namespace

RunConfig parse_config_json(const json& j) {
  std::vector<std::string> errors;
  RunConfig cfg;

  if (!j.contains("target") || !j["target"].contains("name")) {
    errors.push_back("missing target.name");
  } else {
    cfg.target.name = j["target"]["name"].get<std::string>();
    cfg.target.dim = j["target"].value("dim", 1);
    cfg.target.params = j["target"];
    cfg.target.params.erase("name");
    cfg.target.params.erase("dim");
    if (cfg.target.dim < 1) errors.push_back("target.dim must be >= 1");
  }
  const int d = std::max(1, cfg.target.dim);

  const json am_block = j.value("am", json::object());
  cfg.am.theta = am_block.value("theta", 0.0);  // 0 = 2.38^2/d default
  if (am_block.contains("theta") && !(am_block["theta"].get<double>() > 0.0))
    errors.push_back("am.theta must be > 0 when given");
  cfg.am.kappa = am_block.value("kappa", 0.01);
  cfg.am.weight_exponent = am_block.value("weight_exponent", 1.0);
  cfg.am.burn_in = am_block.value("burn_in", 0L);
  cfg.am.snapshot_stride = am_block.value("snapshot_stride", 100L);
  const std::string variant = am_block.value("variant", "modified");
  if (variant == "modified") {
    cfg.am.variant = RecursionVariant::modified;
  } else if (variant == "original") {
    cfg.am.variant = RecursionVariant::original;
  } else {
    errors.push_back("am.variant must be 'modified' or 'original'");
  }
  if (!(cfg.am.kappa > 0.0)) errors.push_back("am.kappa must be > 0");
  if (!(cfg.am.weight_exponent > 0.0)) errors.push_back("am.weight_exponent must be > 0");
  if (cfg.am.variant == RecursionVariant::original && cfg.am.weight_exponent != 1.0)
    errors.push_back("am.variant 'original' requires weight_exponent = 1");
  if (cfg.am.burn_in < 0) errors.push_back("am.burn_in must be >= 0");

  const json cons = j.value("constraint", json::object());
  cfg.constraint.enabled = cons.value("enabled", false);
  cfg.constraint.t = cons.value("t", 1e6);
  cfg.constraint.eps_prime = cons.value("eps_prime", 0.05);
  if (cfg.constraint.enabled && !(cfg.constraint.t >= 1.0))
    errors.push_back("constraint.t must be >= 1");
  if (cfg.constraint.enabled && !(cfg.constraint.eps_prime > 0.0))
    errors.push_back("constraint.eps_prime must be > 0");

  const json run = j.value("run", json::object());
  cfg.n_steps = run.value("n_steps", 0L);
  cfg.n_chains = run.value("n_chains", 1);
  cfg.root_seed = run.value("root_seed", 0ULL);
  cfg.workers = run.value("workers", 1);
  cfg.out_dir = run.value("out_dir", std::string());
  if (cfg.n_steps < 1) errors.push_back("run.n_steps must be >= 1");
  if (cfg.n_chains < 1) errors.push_back("run.n_chains must be >= 1");
  if (cfg.workers < 1) errors.push_back("run.workers must be >= 1");

  cfg.x0 = Vector::Zero(d);
  if (run.contains("x0")) {
    if (static_cast<int>(run["x0"].size()) != d) {
      errors.push_back("run.x0 has wrong dimension");
    } else {
      for (int i = 0; i < d; ++i) cfg.x0[i] = run["x0"].at(i).get<double>();
    }
  }
  cfg.sigma0 = Matrix::Identity(d, d);
  if (run.contains("sigma0")) {
    try {
      cfg.sigma0 = json_to_matrix(run["sigma0"], d);
    } catch (const std::exception&) {
      errors.push_back("run.sigma0 is not a " + std::to_string(d) + "x" +
                       std::to_string(d) + " matrix");
    }
  }
  // Proposal-covariance eigenvalue floor precondition: sigma0 >= kappa * I.
  try {
    const SpdMatrix s0 = SpdMatrix::from_matrix(cfg.sigma0);
    const double min_eig = s0.min_eigenvalue();
    if (min_eig < cfg.am.kappa - 1e-12)
      errors.push_back("run.sigma0 violates the eigenvalue-floor precondition: min "
                       "eigenvalue " + std::to_string(min_eig) +
                       " < kappa = " + std::to_string(cfg.am.kappa) +
                       " (the proposal family requires sigma0 >= kappa*I)");
  } catch (const std::exception&) {
    errors.push_back("run.sigma0 is not symmetric positive definite");
  }

  if (run.contains("checkpoints")) {
    for (const auto& c : run["checkpoints"]) cfg.checkpoints.push_back(c.get<long>());
  } else {
    const long stride = run.value("checkpoint_stride",
                                  std::max<long>(1, cfg.n_steps / 100));
    for (long c = stride; c <= cfg.n_steps; c += stride) cfg.checkpoints.push_back(c);
  }
  for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
    if (cfg.checkpoints[i] < 1 || cfg.checkpoints[i] > std::max<long>(cfg.n_steps, 1) ||
        (i > 0 && cfg.checkpoints[i] <= cfg.checkpoints[i - 1])) {
      errors.push_back("run.checkpoints must be increasing and within [1, n_steps]");
      break;
    }
  }

  const json cert = j.value("certify", json::object());
  cfg.certify.enabled = cert.value("enabled", false);
  cfg.certify.margin = cert.value("margin", 0.05);
  cfg.certify.expect_no_drift = cert.value("expect_no_drift", false);
  if (cert.contains("search_radii"))
    cfg.certify.search_radii = cert["search_radii"].get<std::vector<double>>();
  if (cfg.certify.enabled && !(cfg.certify.margin > 0.0 && cfg.certify.margin < 1.0))
    errors.push_back("certify.margin must be in (0,1)");

  // The target itself must construct; surfaces bad mixture weights etc.
  if (errors.empty()) {
    try {
      auto t = make_target(cfg.target);
      if (!(t->log_density(cfg.x0) > -std::numeric_limits<double>::infinity()))
        errors.push_back("run.x0 has zero target density");
    } catch (const std::exception& e) {
      errors.push_back(std::string("target construction failed: ") + e.what());
    }
  }

  if (!errors.empty()) throw ValidationError(errors);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("config parse error in " + path + ": " + e.what());
  }
  return parse_config_json(j);
}

json config_to_json(const RunConfig& cfg) {
  json target = cfg.target.params;
  target["name"] = cfg.target.name;
  target["dim"] = cfg.target.dim;

  json sigma0 = json::array();
  for (Eigen::Index i = 0; i < cfg.sigma0.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < cfg.sigma0.cols(); ++k) row.push_back(cfg.sigma0(i, k));
    sigma0.push_back(row);
  }
  json x0 = json::array();
  for (Eigen::Index i = 0; i < cfg.x0.size(); ++i) x0.push_back(cfg.x0[i]);

  json am_block{
      {"kappa", cfg.am.kappa},
      {"weight_exponent", cfg.am.weight_exponent},
      {"variant", cfg.am.variant == RecursionVariant::modified ? "modified" : "original"},
      {"burn_in", cfg.am.burn_in},
      {"snapshot_stride", cfg.am.snapshot_stride}};
  if (cfg.am.theta > 0.0) am_block["theta"] = cfg.am.theta;  // omit the default marker

  return json{
      {"target", target},
      {"am", am_block},
      {"constraint",
       {{"enabled", cfg.constraint.enabled},
        {"t", cfg.constraint.t},
        {"eps_prime", cfg.constraint.eps_prime}}},
      {"run",
       {{"n_steps", cfg.n_steps},
        {"n_chains", cfg.n_chains},
        {"root_seed", cfg.root_seed},
        {"workers", cfg.workers},
        {"x0", x0},
        {"sigma0", sigma0},
        {"checkpoints", cfg.checkpoints},
        {"out_dir", cfg.out_dir}}},
      {"certify",
       {{"enabled", cfg.certify.enabled},
        {"margin", cfg.certify.margin},
        {"search_radii", cfg.certify.search_radii},
        {"expect_no_drift", cfg.certify.expect_no_drift}}}};
}

std::string default_out_root() {
  if (const char* env = std::getenv("AMTK_OUT_ROOT")) return env;
  return "amtk_out";
}

namespace {

std::string chain_name(int index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "chain_%03d.%s", index, ext);
  return buf;
}

}  // namespace

OutputRecord run_experiment(const RunConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::string out_dir = cfg.out_dir.empty() ? default_out_root() : cfg.out_dir;
  fs::create_directories(out_dir);

  OutputRecord record;
  record.config_echo = config_to_json(cfg);
  record.chains.resize(cfg.n_chains);

  std::vector<ChainTrace> traces(cfg.n_chains);
  std::vector<std::string> chain_errors(cfg.n_chains);
  std::atomic<int> next_chain{0};

  auto worker = [&]() {
    for (;;) {
      const int i = next_chain.fetch_add(1);
      if (i >= cfg.n_chains) return;
      try {
        const auto target = make_target(cfg.target);
        const std::uint64_t seed = derive_stream_seed(cfg.root_seed, i);
        const auto c_start = std::chrono::steady_clock::now();
        ChainTrace trace = run_am_chain(cfg.am, cfg.constraint, *target, cfg.x0,
                                        SpdMatrix::from_matrix(cfg.sigma0), cfg.n_steps,
                                        seed);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - c_start)
                .count();

        const std::string csv = trace_to_csv(trace);
        ChainResult& res = record.chains[i];
        res.index = i;
        res.seed = seed;
        res.trace_csv_path = out_dir + "/" + chain_name(i, "csv");
        res.sidecar_path = out_dir + "/" + chain_name(i, "json");
        res.trace_hash = fnv1a64_hex(csv);
        res.accept_rate = trace.acceptance_rate();
        res.steps_per_sec = secs > 0 ? static_cast<double>(cfg.n_steps) / secs : 0.0;
        res.constraint_hits = static_cast<long>(trace.constraint_hits.size());
        write_file(res.trace_csv_path, csv);

        json sidecar{{"chain_index", i},
                     {"seed", seed},
                     {"config_echo", record.config_echo},
                     {"snapshots", snapshots_to_json(trace)}};
        write_file(res.sidecar_path, sidecar.dump(2) + "\n");
        traces[i] = std::move(trace);
      } catch (const std::exception& e) {
        chain_errors[i] = e.what();
      }
    }
  };

  const int n_workers = std::max(1, std::min(cfg.workers, cfg.n_chains));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  json chain_diags = json::array();
  for (int i = 0; i < cfg.n_chains; ++i) {
    if (!chain_errors[i].empty()) {
      record.all_checks_passed = false;
      chain_diags.push_back(json{{"chain", i}, {"error", chain_errors[i]}});
      continue;
    }
    const ChainTrace& trace = traces[i];
    json entry{{"chain", i},
               {"accept_rate", record.chains[i].accept_rate},
               {"constraint_hits", record.chains[i].constraint_hits}};
    if (!cfg.checkpoints.empty()) {
      const auto series = running_average(
          trace, [](const Vector& x) { return x.squaredNorm(); }, cfg.checkpoints);
      entry["running_average_sq_norm"] = to_json(series);
    }
    if (!trace.snapshots.empty()) {
      const auto& last = trace.snapshots.back();
      json mean = json::array();
      for (Eigen::Index k = 0; k < last.mean.size(); ++k) mean.push_back(last.mean[k]);
      entry["terminal_mean"] = mean;
      entry["terminal_cov_fro_norm"] = frobenius_norm(last.cov);
    }
    chain_diags.push_back(entry);
    record.files.push_back(record.chains[i].trace_csv_path);
    record.files.push_back(record.chains[i].sidecar_path);
  }
  record.diagnostics = json{{"chains", chain_diags}};

  if (cfg.certify.enabled) {
    const auto target = make_target(cfg.target);
    try {
      const DriftCertificate cert = fit_drift_certificate(
          *target, SpdMatrix::from_matrix(cfg.sigma0), cfg.certify.search_radii,
          cfg.certify.margin);
      const ConvergenceBound bound = mt_bound(cert.lambda, cert.b, cert.delta);
      record.certify = json{{"certificate", to_json(cert)}, {"bound", to_json(bound)}};
      const std::string cert_path = out_dir + "/certificate.json";
      write_file(cert_path, record.certify.dump(2) + "\n");
      record.files.push_back(cert_path);
      if (cfg.certify.expect_no_drift) {
        record.all_checks_passed = false;  // expected the negative control to fail
        record.certify["negative_control_pass"] = false;
      }
    } catch (const NoDriftFound& e) {
      record.certify = json{{"no_drift_found", e.what()},
                            {"negative_control_pass", cfg.certify.expect_no_drift}};
      if (!cfg.certify.expect_no_drift) record.all_checks_passed = false;
    }
  }

  record.wallclock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  json chains_json = json::array();
  for (const auto& res : record.chains) {
    chains_json.push_back(json{{"index", res.index},
                               {"seed", res.seed},
                               {"trace_csv", res.trace_csv_path},
                               {"sidecar", res.sidecar_path},
                               {"trace_hash", res.trace_hash},
                               {"accept_rate", res.accept_rate},
                               {"steps_per_sec", res.steps_per_sec},
                               {"constraint_hits", res.constraint_hits}});
  }
  record.summary_path = out_dir + "/summary.json";
  json summary{{"config", record.config_echo},
               {"chains", chains_json},
               {"diagnostics", record.diagnostics},
               {"certify", record.certify},
               {"files", record.files},
               {"wallclock_sec", record.wallclock_sec},
               {"all_checks_passed", record.all_checks_passed}};
  write_file(record.summary_path, summary.dump(2) + "\n");
  return record;
}

ReplayReport replay(const std::string& summary_path) {
  ReplayReport report;
  json summary;
  try {
    summary = json::parse(read_file(summary_path));
  } catch (const std::exception& e) {
    report.ok = false;
    report.mismatches.push_back(std::string("cannot load summary: ") + e.what());
    return report;
  }

  RunConfig cfg = parse_config_json(summary.at("config"));
  const auto target = make_target(cfg.target);
  for (const auto& entry : summary.at("chains")) {
    const int index = entry.at("index").get<int>();
    const std::uint64_t seed = entry.at("seed").get<std::uint64_t>();
    const std::string stored_hash = entry.at("trace_hash").get<std::string>();
    const std::string csv_path = entry.at("trace_csv").get<std::string>();

    const ChainTrace trace = run_am_chain(cfg.am, cfg.constraint, *target, cfg.x0,
                                          SpdMatrix::from_matrix(cfg.sigma0), cfg.n_steps,
                                          seed);
    const std::string regenerated = trace_to_csv(trace);
    if (fnv1a64_hex(regenerated) != stored_hash) {
      report.ok = false;
      report.mismatches.push_back("chain " + std::to_string(index) +
                                  ": regenerated trace hash differs from summary");
    }
    try {
      const std::string on_disk = read_file(csv_path);
      if (fnv1a64_hex(on_disk) != stored_hash) {
        report.ok = false;
        report.mismatches.push_back("chain " + std::to_string(index) + ": file " + csv_path +
                                    " does not match its recorded hash (tampered?)");
      }
    } catch (const std::exception& e) {
      report.ok = false;
      report.mismatches.push_back(std::string("chain trace unreadable: ") + e.what());
    }
  }
  return report;
}

}  // namespace am

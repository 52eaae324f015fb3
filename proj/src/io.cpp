#include "am/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace am {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string trace_to_csv(const ChainTrace& trace) {
  std::string out = "step";
  for (int j = 0; j < trace.dim; ++j) out += ",x" + std::to_string(j);
  out += ",accepted,s_norm,constraint_hit\n";
  for (long k = 0; k <= trace.n_steps; ++k) {
    out += std::to_string(k);
    for (int j = 0; j < trace.dim; ++j) {
      out += ',';
      out += format_g17(trace.states[static_cast<std::size_t>(k) * trace.dim + j]);
    }
    out += ',';
    out += (k > 0 && trace.accepted[k - 1]) ? '1' : '0';
    out += ',';
    out += format_g17(trace.s_norm(k));
    out += ',';
    out += trace.constraint_hit_at(k) ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ChainTrace trace_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace csv: empty file");
  int dim = 0;
  {
    std::istringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) {
      if (col.size() > 1 && col[0] == 'x') ++dim;
    }
  }
  if (dim < 1) throw ParseError("trace csv: no coordinate columns");

  ChainTrace trace;
  trace.dim = dim;
  long row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != dim + 4)
      throw ParseError("trace csv: malformed row " + std::to_string(row));
    for (int j = 0; j < dim; ++j) trace.states.push_back(std::stod(cells[1 + j]));
    if (row > 0) trace.accepted.push_back(cells[dim + 1] == "1" ? 1 : 0);
    const double s_norm = std::stod(cells[dim + 2]);
    trace.mean_norms.push_back(s_norm);
    trace.cov_norms.push_back(s_norm);
    if (cells[dim + 3] == "1") trace.constraint_hits.push_back(row);
    ++row;
  }
  trace.n_steps = row - 1;
  return trace;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

json to_json(const TailReport& report) {
  return json{{"rho", report.rho},
              {"shell_radii", report.shell_radii},
              {"shell_suprema", report.shell_suprema},
              {"verdict", to_string(report.verdict)}};
}

json to_json(const ContourReport& report) {
  return json{{"shell_radii", report.shell_radii},
              {"shell_suprema", report.shell_suprema},
              {"verdict", to_string(report.verdict)}};
}

json to_json(const DriftCertificate& cert) {
  return json{{"lambda", cert.lambda},
              {"b", cert.b},
              {"R", cert.R},
              {"delta", cert.delta},
              {"v", matrix_to_json(cert.v.matrix())},
              {"v_certified_floor", cert.v.certified_floor()},
              {"quadrature_budget", cert.quadrature_budget},
              {"observed_min_tau", cert.observed_min_tau},
              {"max_quadrature_err", cert.max_quadrature_err}};
}

json to_json(const ConvergenceBound& bound) {
  return json{{"gamma", bound.gamma},
              {"lambda_check", bound.lambda_check},
              {"b_check", bound.b_check},
              {"zeta_bar", bound.zeta_bar},
              {"M_tilde", bound.M_tilde},
              {"vartheta", bound.vartheta},
              {"rho", bound.rho},
              {"L", bound.L},
              {"one_minus_vartheta", bound.one_minus_vartheta},
              {"one_minus_rho", bound.one_minus_rho},
              {"log_L", bound.log_L}};
}

json to_json(const ScalingAudit& audit) {
  json rows = json::array();
  for (const auto& row : audit.rows) {
    rows.push_back(json{{"det_v", row.det_v},
                        {"lambda", row.lambda},
                        {"delta", row.delta},
                        {"ratio", row.ratio}});
  }
  return json{{"rows", rows}, {"max_ratio", audit.max_ratio}, {"min_ratio", audit.min_ratio}};
}

json to_json(const EstimatorSeries& series) {
  json out{{"checkpoints", series.checkpoints}, {"values", series.values}};
  if (series.reference) out["reference"] = *series.reference;
  return out;
}

json to_json(const BatchMeansReport& report) {
  return json{{"n_batches", report.n_batches},
              {"batch_size", report.batch_size},
              {"batch_means", report.batch_means},
              {"sigma2_hat", report.sigma2_hat},
              {"skewness", report.skewness},
              {"excess_kurtosis", report.excess_kurtosis}};
}

std::string to_csv(const EstimatorSeries& series) {
  std::string out = "checkpoint,value\n";
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i)
    out += std::to_string(series.checkpoints[i]) + "," + format_g17(series.values[i]) + "\n";
  return out;
}

std::string to_csv(const BatchMeansReport& report) {
  std::string out = "batch,mean\n";
  for (std::size_t i = 0; i < report.batch_means.size(); ++i)
    out += std::to_string(i) + "," + format_g17(report.batch_means[i]) + "\n";
  return out;
}

std::string to_csv(const VMomentReport& report) {
  std::string out = "step,running_max,running_mean\n";
  for (std::size_t i = 0; i < report.checkpoints.size(); ++i)
    out += std::to_string(report.checkpoints[i]) + "," + format_g17(report.running_max[i]) +
           "," + format_g17(report.running_mean[i]) + "\n";
  return out;
}

std::string to_csv(const AdaptationDistanceSeries& series) {
  std::string out = "step,distance\n";
  for (std::size_t i = 0; i < series.steps.size(); ++i)
    out += std::to_string(series.steps[i]) + "," + format_g17(series.distances[i]) + "\n";
  return out;
}

std::string to_csv(const ScalingAudit& audit) {
  std::string out = "det_v,lambda,delta,ratio\n";
  for (const auto& row : audit.rows)
    out += format_g17(row.det_v) + "," + format_g17(row.lambda) + "," +
           format_g17(row.delta) + "," + format_g17(row.ratio) + "\n";
  return out;
}

json snapshots_to_json(const ChainTrace& trace) {
  json out = json::array();
  for (const auto& snap : trace.snapshots) {
    out.push_back(json{{"step", snap.step},
                       {"mean", vector_to_json(snap.mean)},
                       {"cov", matrix_to_json(snap.cov)},
                       {"certified_floor", snap.certified_floor}});
  }
  return out;
}

}  // namespace am

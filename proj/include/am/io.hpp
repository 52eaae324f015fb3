#ifndef AMTK_IO_HPP
#define AMTK_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "am/adapt.hpp"
#include "am/certify.hpp"
#include "am/diagnostics.hpp"
#include "am/verify.hpp"

namespace am {

using json = nlohmann::json;

// Full round-trip decimal formatting (17 significant digits) so replayed
// traces hash identically.
std::string format_g17(double x);

// FNV-1a 64-bit over raw bytes; the trace-integrity hash used by `replay`.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Trace CSV, columns: step,x0..x{d-1},accepted,s_norm,constraint_hit.
std::string trace_to_csv(const ChainTrace& trace);
void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// Parses a trace CSV back. Only the columns present in the file are
// recovered; mean/cov norms are both set to the stored s_norm and snapshots
// must come from the JSON sidecar.
ChainTrace trace_from_csv(const std::string& csv);

json to_json(const TailReport& report);
json to_json(const ContourReport& report);
json to_json(const DriftCertificate& cert);
json to_json(const ConvergenceBound& bound);
json to_json(const ScalingAudit& audit);
json to_json(const EstimatorSeries& series);
json to_json(const BatchMeansReport& report);
json snapshots_to_json(const ChainTrace& trace);

// Row-per-checkpoint / row-per-batch CSV forms of the diagnostic reports.
std::string to_csv(const EstimatorSeries& series);
std::string to_csv(const BatchMeansReport& report);
std::string to_csv(const VMomentReport& report);
std::string to_csv(const AdaptationDistanceSeries& series);
std::string to_csv(const ScalingAudit& audit);

}  // namespace am

#endif  // AMTK_IO_HPP

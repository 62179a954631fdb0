#pragma once

// Plot-ready exports: RFC-4180 CSV tables and JSON reports. Every file
// starts with a provenance header (config hash and seed). Wall-clock
// timings are omitted unless requested so that outputs are byte-identical
// across runs.

#include "isac/config.h"
#include "isac/experiment.h"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isac::harness {

struct Provenance {
  std::string config_sha;  // config_hash_hex
  std::uint64_t seed = 0;  // master seed
};

Provenance provenance_of(const ExperimentConfig& cfg);

/// "# config_sha=<hex> seed=<u64>" followed by CRLF.
std::string provenance_line(const Provenance& p);

/// Shortest round-trip decimal ('.' separator, locale independent);
/// "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// Quotes a field when it contains a comma, quote, CR or LF; quotes are doubled.
std::string csv_field(std::string_view s);

/// One row per record. The wall_time_s column is present only with `timing`.
std::string records_csv(const std::vector<MetricsRecord>& records, const Provenance& p,
                        bool timing);

std::string aggregates_csv(const std::vector<Aggregate>& aggs, const Provenance& p,
                           const std::string& sweep_axis);

/// Per-FP-round trace of an IMBO solve.
std::string convergence_csv(const solver::SolveReport& report, const Provenance& p);

/// Columns theta_deg, gain_dbm_<name> for each profile, gamma_th_dbm.
/// Gains are a(theta)^H W W^H a(theta) converted to dBm.
std::string beampattern_csv(const std::vector<std::pair<std::string, CMatrix>>& profiles,
                            const std::vector<double>& grid_deg, double gamma_th_dbm,
                            const Provenance& p);

/// Writes beampattern_csv for the given profiles. DomainError for grid
/// angles outside [-90, 90]; IoError if the file cannot be written.
void export_beampattern(const std::vector<std::pair<std::string, CMatrix>>& profiles,
                        const std::vector<double>& grid_deg, double gamma_th_dbm,
                        const std::filesystem::path& path, const Provenance& p);

/// Single-beamformer convenience overload; the gain column is "gain_dbm".
void export_beampattern(const CMatrix& w, const std::vector<double>& grid_deg,
                        double gamma_th_dbm, const std::filesystem::path& path,
                        const Provenance& p);

nlohmann::json report_json(const solver::SolveReport& report, bool timing);

nlohmann::json aggregates_json(const std::vector<Aggregate>& aggs);

/// Writes `content` to `path`, creating parent directories. IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Pretty JSON with the provenance object and a trailing newline.
std::string json_document(nlohmann::json body, const Provenance& p);

}  // namespace isac::harness

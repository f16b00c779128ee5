// Artifact writers: atomically written CSV/JSON reports that all embed the
// run manifest hash.
#pragma once

#include "ealign/config.hpp"
#include "ealign/dynamics.hpp"
#include "ealign/geometry.hpp"
#include "ealign/limits.hpp"
#include "ealign/stability.hpp"

#include <string>

namespace ealign {

// Shortest text keeping doubles bit-exact on round-trip.
std::string fmt_double(double v);

// Writes via a temp file in the same directory, then renames into place.
void write_text_atomic(const std::string& path, const std::string& content);

// Manifest: resolved config + version + seed + workers, plus its own hash.
Json make_manifest(const RunConfig& cfg, std::uint64_t seed);
std::string manifest_hash(const Json& manifest);

void write_manifest(const std::string& dir, const Json& manifest);
void write_trajectory_csv(const std::string& dir, const Scenario& s,
                          const TrajectoryRecord& rec, const std::string& hash);
void write_diagnostics_json(const std::string& dir, const TrajectoryRecord& rec,
                            const std::string& hash);
void write_limit_report(const std::string& dir, const Scenario& s, const LimitReport& lr,
                        const std::string& hash);
void write_curves_csv(const std::string& dir, const LimitReport& lr,
                      const std::string& hash);
void write_density_csv(const std::string& dir, const Scenario& s, const LimitReport& lr,
                       const std::string& hash);
void write_dimension_json(const std::string& dir, const DimensionEstimate& de,
                          const std::string& hash, const std::string& stem = "dimension");
void write_loglog_csv(const std::string& dir, const DimensionEstimate& de,
                      const std::string& hash, const std::string& stem = "loglog");
void write_stability_json(const std::string& dir, const StabilityReport& rep,
                          const std::string& hash);

Json bound_check_json(const BoundCheck& bc);

}  // namespace ealign

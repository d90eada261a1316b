#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surftest/core.hpp"
#include "surftest/report.hpp"
#include "surftest/sim.hpp"

namespace surftest::io {

// Long-format CSV with header `unit,s,t,value`, one row per observed cell.
// Units keep their order of first appearance; grids are the sorted distinct
// coordinates and must be equispaced.
FunctionalSample read_csv(std::istream& in, const std::string& source = "<stream>");
FunctionalSample ingest_csv(const std::filesystem::path& path);

/// Writes rows ordered by (unit, s, t) with shortest round-trip numbers.
/// Units are named 1..n unless `units` supplies names.
void write_csv(const FunctionalSample& sample, std::ostream& out,
               const std::vector<std::string>& units = {});
void emit_csv(const FunctionalSample& sample, const std::filesystem::path& path);

/// Entrywise log10(v + 1); negative values are rejected.
FunctionalSample log_transform(const FunctionalSample& sample);

/// s,t,value rows of a surface.
void write_surface_csv(const Surface& surface, const Grid& grid_s, const Grid& grid_t,
                       std::ostream& out);

nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const SimReport& report);
nlohmann::json to_json(const SimConfig& config);

/// Per-slice reports of a profile sweep, ordered by slice coordinate.
nlohmann::json sweep_to_json(const std::vector<TestReport>& reports);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace surftest::io

#pragma once

// File formats: field CSV text, JSON sidecars, content hashes, kernel cache.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lanemden/greens.hpp"
#include "lanemden/lattice.hpp"

namespace lanemden::io {

using nlohmann::json;

std::string sha256_hex(std::string_view data);

/// %.17g, the round-trip format used in every CSV.
std::string format_double(double v);

std::string field_csv(const LatticeField& u);

/// Writes through a temporary file and a rename.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

json point_json(const LatticePoint& x);
LatticePoint point_from_json(const json& j);

/// Sidecar for a table: kind, d, pole, R, tol, fitted_constant,
/// extrapolation_record, max_residual, the CSV's sha256 and `config`.
json table_metadata(const GreenTable& table, const std::string& csv_sha256, const json& config);

/// Writes `csv_path` and `csv_path` + ".json".
void save_table(const std::filesystem::path& csv_path, const GreenTable& table,
                const json& config = json::object());

/// Reads a table written by save_table, checking the hash.
GreenTable load_table(const std::filesystem::path& csv_path);

/// Directory named by LANE_EMDEN_CACHE, created on demand.
std::optional<std::filesystem::path> cache_dir();

}  // namespace lanemden::io

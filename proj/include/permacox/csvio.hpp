#pragma once

// File formats: point CSV (lat,lon,year), counts CSV (row,col,replicate,count)
// with lattice metadata in comment lines, totals/decay/mask CSVs, and the
// JSON representations of specs, manifests and reports. All numeric output is
// printed with round-trippable precision so re-runs are byte-identical.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "permacox/estimate.hpp"
#include "permacox/lattice.hpp"
#include "permacox/process.hpp"

namespace permacox {

// Round-trippable decimal rendering ("%.17g").
std::string format_double(double v);

// FNV-1a 64-bit, used to stamp artifacts with their producing manifest.
std::uint64_t fnv1a64(const std::string& text);
std::string hash_hex(std::uint64_t h);

struct MalformedRow {
    std::size_t line = 0;
    std::string text;
};

struct PointReadResult {
    std::vector<GeoPoint> points;
    std::vector<MalformedRow> malformed;  // capped at 100 entries
    std::size_t malformed_count = 0;
    std::size_t rows_read = 0;
};

PointReadResult read_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path, std::span<const GeoPoint> points,
                      const std::string& manifest_hash);

void write_counts_csv(const std::filesystem::path& path, const CountField& field,
                      const LatticeSpec& lattice, const std::string& manifest_hash);
struct CountsReadResult {
    CountField field;
    LatticeSpec lattice;
};
CountsReadResult read_counts_csv(const std::filesystem::path& path);

void write_totals_csv(const std::filesystem::path& path, std::span<const int> labels,
                      std::span<const double> totals, const std::string& manifest_hash);

void write_decay_csv(const std::filesystem::path& path, const DecayCurve& curve,
                     const std::string& manifest_hash);

RegionMask read_mask_csv(const std::filesystem::path& path, int rows, int cols);
void write_mask_csv(const std::filesystem::path& path, const RegionMask& mask);

nlohmann::json spec_to_json(const PermanentalSpec& spec);
PermanentalSpec spec_from_json(const nlohmann::json& j);
void write_spec_json(const std::filesystem::path& path, const PermanentalSpec& spec,
                     const std::string& manifest_hash);
PermanentalSpec read_spec_json(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace permacox

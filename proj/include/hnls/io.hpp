#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hnls/coupled.hpp"
#include "hnls/field.hpp"
#include "hnls/observables.hpp"
#include "hnls/radial.hpp"

namespace hnls {

// Snapshot layout, little-endian:
//   "HNLSNAP1" | u32 version = 1 | u32 d | u32 n[d] | f64 len[d] | f64 alpha[d] | f64 t
//   | n_0 ... n_{d-1} pairs (f64 re, f64 im), row-major.
inline constexpr char kSnapshotMagic[8] = {'H', 'N', 'L', 'S', 'N', 'A', 'P', '1'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::size_t snapshot_size(std::size_t d, std::size_t points);
std::string encode_snapshot(const ComplexField& field);
/// Throws FormatError on a bad magic, unknown version, bad header or size mismatch.
ComplexField decode_snapshot(std::string_view bytes);

void write_snapshot(const ComplexField& field, const std::filesystem::path& path);
ComplexField read_snapshot(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`. Throws Error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

/// Columns t, mass, energy, px, py[, pz], comx, comy[, comz], V, dVdt_pred, rhs, lsigma2, linf.
std::string observables_csv(const ObservableSeries& series, std::size_t d);
/// Columns r, re, im.
std::string radial_profile_csv(const RadialProfile& profile);
/// Columns t, mass, energy, linf, outer_fraction.
std::string radial_series_csv(const RadialTrajectory& traj);

/// Generic CSV with a header row; all columns must have the same length.
std::string columns_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns);

/// JSON report: eps, h_sup, growth_ratio, status, t_detect, detection, regime,
/// and `series` naming the CSV that holds the h series.
nlohmann::json stability_report_json(const StabilityReport& report, const std::string& series_file);
nlohmann::json conservation_report_json(const ConservationReport& report, std::size_t d);

}  // namespace hnls

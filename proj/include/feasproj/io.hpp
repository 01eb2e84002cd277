#pragma once

#include <filesystem>
#include <string>

#include "feasproj/bench.hpp"
#include "feasproj/mask.hpp"

namespace feasproj {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Reads a dense matrix. Extension .mtx/.mm selects MatrixMarket (array or
/// coordinate, real, general); anything else is CSV: one row per line,
/// comma-separated values, leading '#' lines ignored. Parse errors name the
/// file and line; non-finite values are rejected.
Matrix read_matrix(const std::filesystem::path& path);

/// Writes CSV (with a "# rows cols" comment line) or MatrixMarket array for
/// .mtx/.mm. Values round-trip bit-exactly through read_matrix.
void write_matrix(const Matrix& m, const std::filesystem::path& path);

/// Observation masks travel as MatrixMarket coordinate pattern files,
/// 1-based on disk, 0-based in memory. Duplicate coordinates are rejected.
ObservationMask read_mask(const std::filesystem::path& path);
void write_mask(const ObservationMask& mask, const std::filesystem::path& path);

/// Loads a directory of equally sized binary 8-bit PGM (P5) frames, sorted
/// lexicographically by filename. Column i holds frame i flattened in
/// row-major pixel order, scaled to [0,1] by division by 255.
Matrix read_frame_stack(const std::filesystem::path& directory);

void write_table_csv(const Table& table, const std::filesystem::path& path);

}  // namespace feasproj

#pragma once

#include "hotcs/hot.hpp"
#include "hotcs/linalg.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hotcs {

/// Grayscale image in [0,1] from a binary (P5) 8-bit PGM. Header comments
/// are honored. Malformed content throws std::invalid_argument naming the
/// path.
RMatrix load_pgm(const std::string& path);

/// 8-bit binary PGM; values clamped to [0,1] and rounded to 255ths, so a
/// write/load round trip is exact for data already on that lattice.
void write_pgm(const std::string& path, const RMatrix& img);

/// Vector CSV: either one real per line or "re,im" per line, consistently.
CVector load_csv_vector(const std::string& path);
void write_csv_vector(const std::string& path, const CVector& v);

/// Numeric report table. Values are serialized with %.17g, which
/// round-trips doubles exactly and keeps outputs byte-stable.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_double(double v);
void write_csv(const std::string& path, const CsvTable& table);

/// Parses a JSON file; unreadable or malformed input throws
/// std::invalid_argument with the path.
nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Serialized posterior transform: prior descriptor plus the reflection
/// chain. Custom priors embed their dense matrix. Schema version 1.
nlohmann::json posterior_to_json(const PosteriorTransform& t);
PosteriorTransform posterior_from_json(const nlohmann::json& j);

/// Run manifest: schema version, verbatim config echo, master seed, plus
/// caller extras (timings, output paths). Enough to reproduce the run.
void write_manifest(const std::string& path, const nlohmann::json& config,
                    std::uint64_t seed, const nlohmann::json& extras = nlohmann::json::object());
nlohmann::json load_manifest(const std::string& path);

}  // namespace hotcs

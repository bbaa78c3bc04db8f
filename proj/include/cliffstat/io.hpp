#pragma once

#include <string>
#include <vector>

namespace cliffstat {

/// One output table: a header and rows of preformatted cells. Data files are
/// byte-deterministic for a fixed (config, seed, chunk size); the JSON sidecar
/// additionally carries wall-clock time and is the one non-reproducible file.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);  // shortest round-trip-exact decimal

/// Write as CSV ("csv") or as a JSON array of objects ("json").
void write_table(const Table& table, const std::string& path, const std::string& format);

/// Sidecar metadata next to a data file: <path>.meta.json.
void write_sidecar(const std::string& data_path, const std::string& experiment,
                   const std::string& config_json, double wall_clock_seconds);

std::string library_version();

}  // namespace cliffstat

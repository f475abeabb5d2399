#pragma once

// CSV writing and the JSON run manifest written next to every CSV.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cvsense::cli {

inline constexpr int kManifestSchemaVersion = 1;

/// Fixed-format CSV: one header line, '\n' line ends, reals printed with %.15g.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(std::string_view v);
    CsvWriter& operator<<(const char* v) { return *this << std::string_view(v); }
    /// Vector cell, items joined with ';'.
    CsvWriter& operator<<(const std::vector<double>& v);
    void end_row();

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    void cell(const std::string& text);

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

std::string format_real(double v);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// curve.csv -> curve.manifest.json
std::filesystem::path manifest_path_for(const std::filesystem::path& csv);

struct RunRecord {
    std::string command;
    nlohmann::json parameters;
    std::vector<std::filesystem::path> outputs;  // first is the primary CSV
    std::vector<std::string> warnings;
    int exit_code = 0;
};

/// Manifest JSON (schema version, command, parameters, seed, tool version, UTC timestamp,
/// thread count, warnings, outputs with file name and checksum).
nlohmann::json make_manifest(const RunRecord& run);
void write_manifest(const RunRecord& run);

}  // namespace cvsense::cli

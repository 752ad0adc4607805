#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentlab {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DD`. Returns nullopt on any malformation or invalid day.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DD HH:MM[:SS]`, or the same with a `T`
/// separator and an optional trailing `Z`. Times are taken as UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Minimal RFC 4180 reader: quoted fields may contain separators, doubled
/// quotes and newlines. Each record remembers the line it started on.
struct CsvRecord {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

std::vector<CsvRecord> parse_csv(std::string_view text);
std::vector<CsvRecord> read_csv_file(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames over the target, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace sentlab

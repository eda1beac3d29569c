#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ddk/market_data.hpp"

namespace ddk::cli {

struct Provenance {
    std::string version;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string generator;
};

// Comment line placed at the top of every CSV the tool writes.
std::string provenance_comment(const Provenance& p);

// Shortest text that parses back to the same double; empty for NaN.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

// Writes through a temporary file and a rename so a crash never leaves a
// truncated artifact. Creates parent directories. Throws InputError.
void write_file(const std::filesystem::path& path, const std::string& content);

TickFile read_tick_file(const std::filesystem::path& path, const ColumnMap& columns);

// Numeric CSV with a header row; lines starting with '#' are skipped.
struct NumericTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;  // values[c][row]
};

NumericTable read_numeric_csv(const std::filesystem::path& path);

}  // namespace ddk::cli
